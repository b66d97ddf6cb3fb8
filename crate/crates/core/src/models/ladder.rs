use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::spec::{GroupTag, ModelSpec, Su11Series};
use crate::statefam::CVector;

/// An operator with a single nonzero band: `(B v)[i + shift] = coeff[i] v[i]`.
#[derive(Debug, Clone)]
pub(crate) struct Banded {
    pub shift: isize,
    pub coeff: Vec<f64>,
}

impl Banded {
    pub fn apply(&self, v: &CVector) -> CVector {
        let d = v.len() as isize;
        let mut out = CVector::zeros(v.len());
        for (i, &c) in self.coeff.iter().enumerate() {
            let t = i as isize + self.shift;
            if c != 0.0 && (0..d).contains(&t) {
                out[t as usize] += v[i] * c;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.coeff.len();
        let mut m = DMatrix::zeros(d, d);
        for (i, &c) in self.coeff.iter().enumerate() {
            let t = i as isize + self.shift;
            if (0..d as isize).contains(&t) {
                m[(t as usize, i)] = Complex64::new(c, 0.0);
            }
        }
        m
    }

    /// `exp(c B) v` by its Taylor series. The band is nilpotent on the
    /// truncated space, so the series terminates.
    pub fn exp_apply(&self, c: Complex64, v: &CVector) -> CVector {
        let max_terms = self.coeff.len() / self.shift.unsigned_abs() + 1;
        let mut sum = v.clone();
        let mut term = v.clone();
        let mut prev = term.norm();
        for p in 1..=max_terms {
            term = self.apply(&term) * (c / p as f64);
            let norm = term.norm();
            if norm == 0.0 {
                break;
            }
            sum += &term;
            if norm < 1e-20 * sum.norm() && norm < 0.5 * prev {
                break;
            }
            prev = norm;
        }
        sum
    }
}

/// Which end of the ladder the truncation cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationEdge {
    None,
    High,
    Low,
}

/// Ladder operators on the truncated basis, ordered by ascending weight.
#[derive(Debug, Clone)]
pub struct LadderAlgebra {
    pub j_plus: DMatrix<Complex64>,
    pub j_minus: DMatrix<Complex64>,
    pub j_z: DMatrix<Complex64>,
    pub group_tag: GroupTag,
    weights: Vec<f64>,
    edge: TruncationEdge,
    pub(crate) raise: Banded,
    pub(crate) lower: Banded,
}

fn root(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

impl LadderAlgebra {
    fn assemble(group_tag: GroupTag, weights: Vec<f64>, edge: TruncationEdge, raise: Banded, lower: Banded) -> Self {
        let j_z = DMatrix::from_diagonal(&CVector::from_iterator(
            weights.len(),
            weights.iter().map(|&w| Complex64::new(w, 0.0)),
        ));
        Self {
            j_plus: raise.to_dense(),
            j_minus: lower.to_dense(),
            j_z,
            group_tag,
            weights,
            edge,
            raise,
            lower,
        }
    }

    /// Operators for a model; the base state index is returned alongside.
    pub fn for_model(spec: &ModelSpec) -> Result<(Self, usize)> {
        let d = spec.truncation();
        if d < 2 {
            return Err(Error::InvalidModel(format!("truncation {d} < 2")));
        }
        let too_small = || Error::InvalidModel(format!("truncation {d} too small for {}", spec.label()));
        match *spec {
            ModelSpec::Glauber { m, .. } => {
                let base = m as usize;
                if base + 2 >= d {
                    return Err(too_small());
                }
                let weights: Vec<f64> = (0..d).map(|k| k as f64).collect();
                let raise = Banded {
                    shift: 1,
                    coeff: (0..d).map(|k| ((k + 1) as f64).sqrt()).collect(),
                };
                let lower = Banded {
                    shift: -1,
                    coeff: (0..d).map(|k| (k as f64).sqrt()).collect(),
                };
                Ok((
                    Self::assemble(GroupTag::WeylHeisenberg, weights, TruncationEdge::High, raise, lower),
                    base,
                ))
            }
            ModelSpec::Su2 { j, m } => {
                let weights: Vec<f64> = (0..d).map(|k| -j + k as f64).collect();
                let c = j * (j + 1.0);
                let raise = Banded {
                    shift: 1,
                    coeff: weights.iter().map(|&w| root(c - w * (w + 1.0))).collect(),
                };
                let lower = Banded {
                    shift: -1,
                    coeff: weights.iter().map(|&w| root(c - w * (w - 1.0))).collect(),
                };
                let base = (m + j).round() as usize;
                Ok((
                    Self::assemble(GroupTag::SU2, weights, TruncationEdge::None, raise, lower),
                    base,
                ))
            }
            ModelSpec::Su11 { series, j, m, .. } => {
                let j = j.re;
                let c = j * (j + 1.0);
                let (weights, base, edge): (Vec<f64>, isize, TruncationEdge) = match series {
                    Su11Series::Dplus | Su11Series::ProjectiveDiscrete => (
                        (0..d).map(|k| -j + k as f64).collect(),
                        (m + j).round() as isize,
                        TruncationEdge::High,
                    ),
                    Su11Series::Dminus => (
                        (0..d).map(|k| j - (d - 1 - k) as f64).collect(),
                        (d as isize - 1) - (j - m).round() as isize,
                        TruncationEdge::Low,
                    ),
                    other => return Err(Error::UnsupportedSeries(other.name().into())),
                };
                let interior = match edge {
                    TruncationEdge::Low => base >= 2,
                    _ => base + 2 < d as isize,
                };
                if !interior {
                    return Err(too_small());
                }
                let raise = Banded {
                    shift: 1,
                    coeff: weights.iter().map(|&w| root(w * (w + 1.0) - c)).collect(),
                };
                let lower = Banded {
                    shift: -1,
                    coeff: weights.iter().map(|&w| root(w * (w - 1.0) - c)).collect(),
                };
                Ok((
                    Self::assemble(GroupTag::SU11, weights, edge, raise, lower),
                    base as usize,
                ))
            }
            ModelSpec::TwoOscillator { m, .. } => {
                let n = (2.0 * m - 0.5).round() as usize;
                if n + 2 >= d {
                    return Err(too_small());
                }
                let weights: Vec<f64> = (0..d).map(|k| 0.5 * (k as f64 + 0.5)).collect();
                let raise = Banded {
                    shift: 2,
                    coeff: (0..d).map(|k| 0.5 * (((k + 1) * (k + 2)) as f64).sqrt()).collect(),
                };
                let lower = Banded {
                    shift: -2,
                    coeff: (0..d)
                        .map(|k| 0.5 * ((k * k.saturating_sub(1)) as f64).sqrt())
                        .collect(),
                };
                Ok((
                    Self::assemble(GroupTag::SU11, weights, TruncationEdge::High, raise, lower),
                    n,
                ))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Eigenvalues of `j_z` on the basis.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edge(&self) -> TruncationEdge {
        self.edge
    }

    /// Basis indices at least two steps from the truncation edge.
    pub fn interior(&self) -> Vec<usize> {
        let d = self.dim();
        match self.edge {
            TruncationEdge::None => (0..d).collect(),
            TruncationEdge::High => (0..d.saturating_sub(2)).collect(),
            TruncationEdge::Low => (2.min(d)..d).collect(),
        }
    }

    /// Casimir operator: `Jz^2 + (J+J- + J-J+)/2` for SU(2) and
    /// `Jz^2 - (J+J- + J-J+)/2` for SU(1,1); both have eigenvalue `j(j+1)`.
    pub fn casimir(&self) -> Option<DMatrix<Complex64>> {
        let sym = (&self.j_plus * &self.j_minus + &self.j_minus * &self.j_plus) * Complex64::new(0.5, 0.0);
        let z2 = &self.j_z * &self.j_z;
        match self.group_tag {
            GroupTag::SU2 => Some(z2 + sym),
            GroupTag::SU11 => Some(z2 - sym),
            GroupTag::WeylHeisenberg => None,
        }
    }
}

/// Residual norms of the algebra relations on the truncation interior.
#[derive(Debug, Clone)]
pub struct LadderReport {
    pub commutator_residuals: Vec<(String, f64)>,
    /// `<base|C|base>`.
    pub casimir_eigenvalue: Option<f64>,
    /// Largest deviation of the interior Casimir block from `c * I`.
    pub casimir_interior_spread: Option<f64>,
    /// `||J-|lowest>||`, or `||J+|highest>||` when the ladder is bounded above.
    pub extremal_annihilation: Option<f64>,
    /// `||J+|base>||^2`.
    pub j_plus_norm_sq: f64,
    /// `||J-|base>||^2`.
    pub j_minus_norm_sq: f64,
}

impl LadderReport {
    pub fn max_residual(&self) -> f64 {
        self.commutator_residuals.iter().fold(0.0, |m, (_, r)| m.max(*r))
    }
}

fn block_residual(m: &DMatrix<Complex64>, idx: &[usize]) -> f64 {
    let mut r = 0.0_f64;
    for &a in idx {
        for &b in idx {
            r = r.max(m[(a, b)].norm());
        }
    }
    r
}

pub fn ladder_algebra_check(spec: &ModelSpec) -> Result<LadderReport> {
    spec.validate()?;
    let (alg, base) = LadderAlgebra::for_model(spec)?;
    let (jp, jm, jz) = (&alg.j_plus, &alg.j_minus, &alg.j_z);
    let comm = |a: &DMatrix<Complex64>, b: &DMatrix<Complex64>| a * b - b * a;
    let idx = alg.interior();
    let step = alg.raise.shift as f64;
    let mut res = vec![
        (
            "[Jz,J+] - s J+".to_string(),
            block_residual(&(comm(jz, jp) - jp * Complex64::new(step, 0.0)), &idx),
        ),
        (
            "[Jz,J-] + s J-".to_string(),
            block_residual(&(comm(jz, jm) + jm * Complex64::new(step, 0.0)), &idx),
        ),
    ];
    // Two-oscillator ladders move two Fock levels; in weight units the step is one.
    if alg.raise.shift == 2 {
        res[0] = ("[Jz,J+] - J+".into(), block_residual(&(comm(jz, jp) - jp), &idx));
        res[1] = ("[Jz,J-] + J-".into(), block_residual(&(comm(jz, jm) + jm), &idx));
    }
    let two = Complex64::new(2.0, 0.0);
    match alg.group_tag {
        GroupTag::SU2 => res.push(("[J+,J-] - 2Jz".into(), block_residual(&(comm(jp, jm) - jz * two), &idx))),
        GroupTag::SU11 => res.push(("[J+,J-] + 2Jz".into(), block_residual(&(comm(jp, jm) + jz * two), &idx))),
        GroupTag::WeylHeisenberg => {
            let id = DMatrix::<Complex64>::identity(alg.dim(), alg.dim());
            res.push(("[a,a+] - 1".into(), block_residual(&(comm(jm, jp) - id), &idx)));
        }
    }
    let (casimir_eigenvalue, casimir_interior_spread) = match alg.casimir() {
        Some(c) => {
            let value = c[(base, base)].re;
            let mut spread = 0.0_f64;
            for &a in &idx {
                for &b in &idx {
                    let target = if a == b { value } else { 0.0 };
                    spread = spread.max((c[(a, b)] - target).norm());
                }
            }
            (Some(value), Some(spread))
        }
        None => (None, None),
    };
    let d = alg.dim();
    let unit = |i: usize| {
        let mut v = CVector::zeros(d);
        v[i] = Complex64::new(1.0, 0.0);
        v
    };
    let extremal_annihilation = match alg.edge {
        TruncationEdge::Low => Some((jp * unit(d - 1)).norm()),
        _ => Some((jm * unit(0)).norm()),
    };
    let e = unit(base);
    Ok(LadderReport {
        commutator_residuals: res,
        casimir_eigenvalue,
        casimir_interior_spread,
        extremal_annihilation,
        j_plus_norm_sq: (jp * &e).norm_squared(),
        j_minus_norm_sq: (jm * &e).norm_squared(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spec::TwoOscillatorBranch;

    #[test]
    fn banded_exp_matches_dense_series() {
        let b = Banded {
            shift: 1,
            coeff: vec![1.0, 2.0, 0.5, 0.0],
        };
        let v = CVector::from_vec(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        let c = Complex64::new(0.3, -0.2);
        let dense = b.to_dense() * c;
        let mut expected = v.clone();
        let mut term = v.clone();
        for p in 1..6 {
            term = &dense * term / Complex64::new(p as f64, 0.0);
            expected += &term;
        }
        assert!((b.exp_apply(c, &v) - expected).norm() < 1e-15);
    }

    #[test]
    fn dplus_lowest_weight_annihilated() {
        let r = ladder_algebra_check(&ModelSpec::su11(Su11Series::Dplus, -1.0, 1.0, 64)).unwrap();
        assert_eq!(r.extremal_annihilation, Some(0.0));
        assert!(r.max_residual() < 1e-12);
        assert!((r.casimir_eigenvalue.unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn dplus_half_raising_norm() {
        let r = ladder_algebra_check(&ModelSpec::su11(Su11Series::Dplus, -0.5, 0.5, 32)).unwrap();
        assert!((r.j_plus_norm_sq - 1.0).abs() < 1e-14);
    }

    #[test]
    fn su2_relations() {
        let r = ladder_algebra_check(&ModelSpec::su2(1.5, 0.5)).unwrap();
        assert!(r.max_residual() < 1e-12);
        assert!((r.casimir_eigenvalue.unwrap() - 3.75).abs() < 1e-12);
        assert!(r.casimir_interior_spread.unwrap() < 1e-12);
    }

    #[test]
    fn two_oscillator_casimir() {
        for (branch, m) in [
            (TwoOscillatorBranch::Quarter, 0.25),
            (TwoOscillatorBranch::ThreeQuarters, 0.75),
        ] {
            let r = ladder_algebra_check(&ModelSpec::two_oscillator(branch, m, 64)).unwrap();
            assert!((r.casimir_eigenvalue.unwrap() + 3.0 / 16.0).abs() < 1e-12);
            assert!(r.casimir_interior_spread.unwrap() < 1e-12);
            assert!(r.max_residual() < 1e-12);
        }
    }

    #[test]
    fn glauber_canonical_commutator() {
        let r = ladder_algebra_check(&ModelSpec::glauber(1, 32)).unwrap();
        assert!(r.max_residual() < 1e-12);
        assert!(r.casimir_eigenvalue.is_none());
    }

    #[test]
    fn dminus_highest_weight() {
        let r = ladder_algebra_check(&ModelSpec::su11(Su11Series::Dminus, -1.0, -1.0, 32)).unwrap();
        assert_eq!(r.extremal_annihilation, Some(0.0));
        assert!(r.max_residual() < 1e-12);
    }
}
