use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::ladder::{LadderAlgebra, TruncationEdge};
use crate::models::spec::{GroupTag, ModelSpec, Su11Series};
use crate::statefam::{CVector, Domain, StateFamily};

/// Norm drift above which a truncated construction is rejected.
pub const TRUNCATION_DRIFT: f64 = 1e-10;
/// Default half-width of the Glauber displacement box.
pub const DEFAULT_ALPHA_MAX: f64 = 3.0;
/// Default bound on the SU(1,1) rapidity.
pub const DEFAULT_RHO_MAX: f64 = 3.0;
/// Distance from the poles kept by the SU(2) sampling chart.
pub const POLE_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone)]
enum Construction {
    /// `exp(alpha a+) exp(-alpha* a) |m>` scaled by `exp(-|alpha|^2/2)`.
    Glauber,
    /// `exp(i phi Jz) exp(i theta Jy) exp(-i phi Jz) |m>`.
    Rotation { vecs: DMatrix<Complex64>, vals: Vec<f64> },
    /// `exp(tau J+) exp(beta Jz) exp(-tau* J-) |m>`.
    NormalOrdered,
    /// `exp(-tau* J-) exp(-beta Jz) exp(tau J+) |m>`.
    AntiNormalOrdered,
}

/// A displaced model state, parametrized by `(alpha1, alpha2)`,
/// `(theta, phi)` or `(rho, phi)` depending on the group.
#[derive(Debug, Clone)]
pub struct ModelFamily {
    spec: ModelSpec,
    algebra: LadderAlgebra,
    base: usize,
    domain: Domain,
    chart: Vec<(f64, f64)>,
    construction: Construction,
}

/// Builds the evaluator for a validated model.
pub fn build_model(spec: &ModelSpec) -> Result<ModelFamily> {
    ModelFamily::new(spec)
}

fn su11_parameters(rho: f64, phi: f64) -> (Complex64, f64) {
    let tau = -(rho / 2.0).tanh() * Complex64::from_polar(1.0, -phi);
    (tau, (1.0 - tau.norm_sqr()).ln())
}

impl ModelFamily {
    pub fn new(spec: &ModelSpec) -> Result<Self> {
        spec.validate()?;
        if !spec.is_numerical() {
            if let ModelSpec::Su11 { series, .. } = spec {
                return Err(Error::UnsupportedSeries(series.name().into()));
            }
        }
        let (algebra, base) = LadderAlgebra::for_model(spec)?;
        let construction = match spec {
            ModelSpec::Glauber { .. } => Construction::Glauber,
            ModelSpec::Su2 { .. } => {
                let jy = (&algebra.j_plus - &algebra.j_minus) * Complex64::new(0.0, -0.5);
                let eig = jy.symmetric_eigen();
                Construction::Rotation {
                    vecs: eig.eigenvectors,
                    vals: eig.eigenvalues.iter().copied().collect(),
                }
            }
            ModelSpec::Su11 {
                series: Su11Series::Dminus,
                ..
            } => Construction::AntiNormalOrdered,
            _ => Construction::NormalOrdered,
        };
        let (domain, chart) = match spec.group() {
            GroupTag::WeylHeisenberg => Self::glauber_ranges(DEFAULT_ALPHA_MAX),
            GroupTag::SU2 => (
                Domain::new(vec![(-PI, 2.0 * PI), (-4.0 * PI, 4.0 * PI)])?,
                vec![(POLE_MARGIN, PI - POLE_MARGIN), (0.0, 2.0 * PI)],
            ),
            GroupTag::SU11 => Self::su11_ranges(DEFAULT_RHO_MAX),
        };
        Ok(Self {
            spec: spec.clone(),
            algebra,
            base,
            domain,
            chart,
            construction,
        })
    }

    fn glauber_ranges(alpha_max: f64) -> (Domain, Vec<(f64, f64)>) {
        let half = alpha_max / 3.0 * 2.0 / 2f64.sqrt();
        (
            Domain::new(vec![(-alpha_max, alpha_max); 2]).expect("positive width"),
            vec![(-half, half); 2],
        )
    }

    fn su11_ranges(rho_max: f64) -> (Domain, Vec<(f64, f64)>) {
        (
            Domain::new(vec![(-rho_max, rho_max), (-4.0 * PI, 4.0 * PI)]).expect("positive width"),
            vec![(0.0, rho_max * 2.0 / 3.0), (0.0, 2.0 * PI)],
        )
    }

    /// Changes the radial bound: `|alpha_i|` for Glauber, `|rho|` for SU(1,1).
    /// The sampling chart covers two thirds of it.
    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
        }
        let (domain, chart) = match self.spec.group() {
            GroupTag::WeylHeisenberg => Self::glauber_ranges(radius),
            GroupTag::SU11 => Self::su11_ranges(radius),
            GroupTag::SU2 => return Err(Error::InvalidArgument("SU(2) has a compact domain".into())),
        };
        self.domain = domain;
        self.chart = chart;
        Ok(self)
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn algebra(&self) -> &LadderAlgebra {
        &self.algebra
    }

    /// Basis index of the undisplaced state.
    pub fn base_index(&self) -> usize {
        self.base
    }

    /// Sampling rectangle used for grids and random points.
    pub fn chart(&self) -> &[(f64, f64)] {
        &self.chart
    }

    pub fn coordinate_names(&self) -> [&'static str; 2] {
        match self.spec.group() {
            GroupTag::WeylHeisenberg => ["alpha1", "alpha2"],
            GroupTag::SU2 => ["theta", "phi"],
            GroupTag::SU11 => ["rho", "phi"],
        }
    }

    /// Basis indices away from the truncation edge, used when reading
    /// operator identities off finite matrices.
    pub fn trusted_block(&self) -> Vec<usize> {
        let d = self.algebra.dim();
        let q = (d / 4).max(1);
        match self.algebra.edge() {
            TruncationEdge::None => (0..d).collect(),
            TruncationEdge::High => (0..q).collect(),
            TruncationEdge::Low => (d - q..d).collect(),
        }
    }

    fn apply(&self, s: &[f64], v: &CVector) -> CVector {
        let alg = &self.algebra;
        match &self.construction {
            Construction::Glauber => {
                let alpha = Complex64::new(s[0], s[1]);
                let v = alg.lower.exp_apply(-alpha.conj(), v);
                alg.raise.exp_apply(alpha, &v) * Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0)
            }
            Construction::Rotation { vecs, vals } => {
                let (theta, phi) = (s[0], s[1]);
                let w = alg.weights();
                let mut u = CVector::from_fn(v.len(), |k, _| v[k] * Complex64::from_polar(1.0, -phi * w[k]));
                u = vecs.adjoint() * u;
                for (k, lam) in vals.iter().enumerate() {
                    u[k] *= Complex64::from_polar(1.0, theta * lam);
                }
                u = vecs * u;
                CVector::from_fn(v.len(), |k, _| u[k] * Complex64::from_polar(1.0, phi * w[k]))
            }
            Construction::NormalOrdered => {
                let (tau, beta) = su11_parameters(s[0], s[1]);
                let mut u = alg.lower.exp_apply(-tau.conj(), v);
                for (k, w) in alg.weights().iter().enumerate() {
                    u[k] *= (beta * w).exp();
                }
                alg.raise.exp_apply(tau, &u)
            }
            Construction::AntiNormalOrdered => {
                let (tau, beta) = su11_parameters(s[0], s[1]);
                let mut u = alg.raise.exp_apply(tau, v);
                for (k, w) in alg.weights().iter().enumerate() {
                    u[k] *= (-beta * w).exp();
                }
                alg.lower.exp_apply(-tau.conj(), &u)
            }
        }
    }

    /// Matrix of the group element on the truncated basis. Columns near the
    /// truncation edge are not unitary.
    pub fn displacement_matrix(&self, s: &[f64]) -> Result<DMatrix<Complex64>> {
        self.domain.check(s)?;
        let d = self.algebra.dim();
        let mut out = DMatrix::zeros(d, d);
        for b in 0..d {
            let mut e = CVector::zeros(d);
            e[b] = Complex64::new(1.0, 0.0);
            out.set_column(b, &self.apply(s, &e));
        }
        Ok(out)
    }
}

impl StateFamily for ModelFamily {
    fn param_dim(&self) -> usize {
        2
    }

    fn hilbert_dim(&self) -> usize {
        self.algebra.dim()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        let d = self.algebra.dim();
        let mut e = CVector::zeros(d);
        e[self.base] = Complex64::new(1.0, 0.0);
        let v = self.apply(s, &e);
        let drift = (v.norm() - 1.0).abs();
        if drift.is_nan() || drift > TRUNCATION_DRIFT {
            return Err(Error::TruncationInsufficient { drift, dim: d });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spec::TwoOscillatorBranch;

    #[test]
    fn glauber_coherent_amplitudes() {
        let f = build_model(&ModelSpec::glauber(0, 64)).unwrap();
        let v = f.amplitudes(&[0.3, -0.4]).unwrap();
        let alpha = Complex64::new(0.3, -0.4);
        let mut expected = Complex64::new((-0.125f64).exp(), 0.0);
        for n in 0..6 {
            assert!((v[n] - expected).norm() < 1e-14, "n={n}");
            expected *= alpha / ((n + 1) as f64).sqrt();
        }
    }

    #[test]
    fn su2_spin_half_rotation() {
        let f = build_model(&ModelSpec::su2(0.5, -0.5)).unwrap();
        let (theta, phi) = (0.7, 1.1);
        let v = f.amplitudes(&[theta, phi]).unwrap();
        assert!((v[0].norm() - (theta / 2.0).cos()).abs() < 1e-14);
        assert!((v[1].norm() - (theta / 2.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn su2_displacement_is_unitary() {
        let f = build_model(&ModelSpec::su2(2.0, 1.0)).unwrap();
        let d = f.displacement_matrix(&[1.2, -0.4]).unwrap();
        let id = DMatrix::<Complex64>::identity(5, 5);
        assert!((d.adjoint() * d - id).norm() < 1e-13);
    }

    #[test]
    fn su11_states_stay_normalized() {
        for spec in [
            ModelSpec::su11(Su11Series::Dplus, -1.5, 2.5, 128),
            ModelSpec::su11(Su11Series::Dminus, -1.0, -2.0, 128),
            ModelSpec::su11(Su11Series::ProjectiveDiscrete, -0.3, 0.3, 128),
            ModelSpec::two_oscillator(TwoOscillatorBranch::ThreeQuarters, 0.75, 128),
        ] {
            let f = build_model(&spec).unwrap();
            let v = f.amplitudes(&[0.9, 0.4]).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12, "{}", spec.label());
        }
    }

    #[test]
    fn truncation_failure_is_reported() {
        let f = build_model(&ModelSpec::glauber(0, 8)).unwrap();
        assert!(matches!(
            f.amplitudes(&[2.0, 0.0]),
            Err(Error::TruncationInsufficient { .. })
        ));
    }

    #[test]
    fn continuous_series_unsupported() {
        let spec = ModelSpec::Su11 {
            series: Su11Series::Ck0,
            j: Complex64::new(-0.5, 0.7),
            m: 0.0,
            truncation: 64,
        };
        assert!(matches!(build_model(&spec), Err(Error::UnsupportedSeries(_))));
    }
}
