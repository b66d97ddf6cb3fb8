//! Mixed primed/unprimed derivatives of the overlap and its logarithm.
//!
//! A primed derivative acts on the bra argument and carries a factor `-i`;
//! an unprimed one acts on the ket and carries `+i`. All derivatives are
//! evaluated on the diagonal `s' = s`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::statefam::{check_index, CVector, ParameterPoint, StateCache, StateFamily, MIN_OVERLAP};
use crate::tensor::Tensor3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Multisets of primed and unprimed coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DerivativeSpec {
    primed: Vec<usize>,
    unprimed: Vec<usize>,
}

impl DerivativeSpec {
    pub const MAX_ORDER: usize = 3;

    pub fn new(primed: Vec<usize>, unprimed: Vec<usize>) -> Result<Self> {
        let order = primed.len() + unprimed.len();
        if order == 0 || order > Self::MAX_ORDER {
            return Err(Error::InvalidArgument(format!(
                "derivative order {order} outside 1..=3"
            )));
        }
        Ok(Self { primed, unprimed })
    }

    pub fn primed(&self) -> &[usize] {
        &self.primed
    }

    pub fn unprimed(&self) -> &[usize] {
        &self.unprimed
    }

    pub fn order(&self) -> usize {
        self.primed.len() + self.unprimed.len()
    }

    /// Cumulants with derivatives on both sides do not depend on the gauge.
    pub fn is_gauge_invariant(&self) -> bool {
        !self.primed.is_empty() && !self.unprimed.is_empty()
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let Some(&k) = self.primed.iter().chain(&self.unprimed).find(|&&k| k >= n) {
            return Err(Error::InvalidArgument(format!("coordinate index {k} >= {n}")));
        }
        Ok(())
    }

    fn prefactor(&self) -> Complex64 {
        (-I).powu(self.primed.len() as u32) * I.powu(self.unprimed.len() as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CumulantValue {
    pub value: Complex64,
    pub spec: DerivativeSpec,
    pub point: ParameterPoint,
    pub estimated_error: f64,
}

/// Tensor-product central difference of `g(Psi(s'), Psi(s))` at `s' = s`.
fn stencil<F, G>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    spec: &DerivativeSpec,
    h: f64,
    g: &mut G,
) -> Result<Complex64>
where
    F: StateFamily + ?Sized,
    G: FnMut(&CVector, &CVector) -> Result<Complex64>,
{
    let m = spec.order();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut bra_off = vec![0.0; s.len()];
    let mut ket_off = vec![0.0; s.len()];
    for pattern in 0..(1u32 << m) {
        bra_off.iter_mut().for_each(|x| *x = 0.0);
        ket_off.iter_mut().for_each(|x| *x = 0.0);
        let mut weight = 1.0;
        for (bit, &k) in spec.primed.iter().chain(&spec.unprimed).enumerate() {
            let sign = if pattern & (1 << bit) == 0 { 1.0 } else { -1.0 };
            weight *= sign;
            if bit < spec.primed.len() {
                bra_off[k] += sign * h;
            } else {
                ket_off[k] += sign * h;
            }
        }
        let bra: Vec<f64> = s.iter().zip(&bra_off).map(|(x, d)| x + d).collect();
        let ket: Vec<f64> = s.iter().zip(&ket_off).map(|(x, d)| x + d).collect();
        let psi_bra = cache.get(&bra)?;
        let psi_ket = cache.get(&ket)?;
        acc += g(&psi_bra, &psi_ket)? * weight;
    }
    Ok(acc * spec.prefactor() / (2.0 * h).powi(m as i32))
}

fn checked_log(bra: &CVector, ket: &CVector) -> Result<Complex64> {
    let z = bra.dotc(ket);
    if z.norm() <= MIN_OVERLAP {
        return Err(Error::VanishingOverlap(z.norm()));
    }
    let wide = (z - 1.0).norm();
    if wide >= 0.5 {
        return Err(Error::StencilTooWide(wide));
    }
    Ok(z.ln())
}

fn plain_overlap(bra: &CVector, ket: &CVector) -> Result<Complex64> {
    Ok(bra.dotc(ket))
}

pub(crate) fn cumulant_cached<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    spec: &DerivativeSpec,
    scheme: &FDScheme,
) -> Result<(Complex64, f64)> {
    extrapolate(scheme, |h| stencil(cache, s, spec, h, &mut checked_log))
}

fn moment_cached<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    spec: &DerivativeSpec,
    scheme: &FDScheme,
) -> Result<(Complex64, f64)> {
    extrapolate(scheme, |h| stencil(cache, s, spec, h, &mut plain_overlap))
}

fn prepare<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint, spec: &DerivativeSpec) -> Result<()> {
    check_index(family, s, 0)?;
    spec.validate(family.param_dim())
}

/// Mixed derivative of `S(s', s)` with the `-i`/`+i` prefactors.
pub fn moment<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    spec: &DerivativeSpec,
    scheme: &FDScheme,
) -> Result<Complex64> {
    prepare(family, s, spec)?;
    let mut cache = StateCache::new(family);
    moment_cached(&mut cache, s.coords(), spec, scheme).map(|(v, _)| v)
}

/// Mixed derivative of `ln S(s', s)`.
pub fn cumulant<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    spec: &DerivativeSpec,
    scheme: &FDScheme,
) -> Result<CumulantValue> {
    prepare(family, s, spec)?;
    let mut cache = StateCache::new(family);
    let (value, estimated_error) = cumulant_cached(&mut cache, s.coords(), spec, scheme)?;
    Ok(CumulantValue {
        value,
        spec: spec.clone(),
        point: s.clone(),
        estimated_error,
    })
}

/// Every mixed moment up to third order that the cumulant relations use.
///
/// Naming follows the side of the semicolon: `m2_mixed[(k, l)] = M2(k;l)`,
/// `m3_1_2[(j, k, l)] = M3(j;kl)`, `m3_2_1[(j, k, l)] = M3(jk;l)`.
#[derive(Debug, Clone, Default)]
pub struct MomentSet {
    pub m1_primed: Option<Vec<Complex64>>,
    pub m1_unprimed: Option<Vec<Complex64>>,
    pub m2_mixed: Option<DMatrix<Complex64>>,
    pub m2_primed: Option<DMatrix<Complex64>>,
    pub m2_unprimed: Option<DMatrix<Complex64>>,
    pub m3_1_2: Option<Tensor3<Complex64>>,
    pub m3_2_1: Option<Tensor3<Complex64>>,
}

/// Cumulants up to third order, same layout as [`MomentSet`].
#[derive(Debug, Clone)]
pub struct CumulantSet {
    pub c1_primed: Vec<Complex64>,
    pub c1_unprimed: Vec<Complex64>,
    pub c2_mixed: DMatrix<Complex64>,
    pub c2_primed: DMatrix<Complex64>,
    pub c2_unprimed: DMatrix<Complex64>,
    pub c3_1_2: Tensor3<Complex64>,
    pub c3_2_1: Tensor3<Complex64>,
}

fn sp(primed: &[usize], unprimed: &[usize]) -> DerivativeSpec {
    DerivativeSpec {
        primed: primed.to_vec(),
        unprimed: unprimed.to_vec(),
    }
}

fn fill_all<'a, F, E>(
    family: &'a F,
    s: &ParameterPoint,
    low: &FDScheme,
    high: &FDScheme,
    mut engine: E,
) -> Result<CumulantSet>
where
    F: StateFamily + ?Sized,
    E: FnMut(&mut StateCache<'a, F>, &[f64], &DerivativeSpec, &FDScheme) -> Result<(Complex64, f64)>,
{
    check_index(family, s, 0)?;
    let n = family.param_dim();
    let x = s.coords();
    let mut cache = StateCache::new(family);
    let mut get = |spec: DerivativeSpec, scheme: &FDScheme| engine(&mut cache, x, &spec, scheme).map(|v| v.0);
    let mut c1_primed = Vec::with_capacity(n);
    let mut c1_unprimed = Vec::with_capacity(n);
    for l in 0..n {
        c1_primed.push(get(sp(&[l], &[]), low)?);
        c1_unprimed.push(get(sp(&[], &[l]), low)?);
    }
    let mut c2_mixed = DMatrix::zeros(n, n);
    let mut c2_primed = DMatrix::zeros(n, n);
    let mut c2_unprimed = DMatrix::zeros(n, n);
    for k in 0..n {
        for l in 0..n {
            c2_mixed[(k, l)] = get(sp(&[k], &[l]), low)?;
            if l >= k {
                c2_primed[(k, l)] = get(sp(&[k, l], &[]), low)?;
                c2_unprimed[(k, l)] = get(sp(&[], &[k, l]), low)?;
                c2_primed[(l, k)] = c2_primed[(k, l)];
                c2_unprimed[(l, k)] = c2_unprimed[(k, l)];
            }
        }
    }
    let mut c3_1_2 = Tensor3::zeros(n);
    let mut c3_2_1 = Tensor3::zeros(n);
    for j in 0..n {
        for k in 0..n {
            for l in k..n {
                let v = get(sp(&[j], &[k, l]), high)?;
                c3_1_2[(j, k, l)] = v;
                c3_1_2[(j, l, k)] = v;
            }
        }
    }
    for j in 0..n {
        for k in j..n {
            for l in 0..n {
                let v = get(sp(&[j, k], &[l]), high)?;
                c3_2_1[(j, k, l)] = v;
                c3_2_1[(k, j, l)] = v;
            }
        }
    }
    Ok(CumulantSet {
        c1_primed,
        c1_unprimed,
        c2_mixed,
        c2_primed,
        c2_unprimed,
        c3_1_2,
        c3_2_1,
    })
}

impl MomentSet {
    /// Computes every moment by finite differences of the overlap.
    /// `high` is used for third-order stencils.
    pub fn compute<F: StateFamily + ?Sized>(
        family: &F,
        s: &ParameterPoint,
        low: &FDScheme,
        high: &FDScheme,
    ) -> Result<Self> {
        let all = fill_all(family, s, low, high, moment_cached)?;
        Ok(Self {
            m1_primed: Some(all.c1_primed),
            m1_unprimed: Some(all.c1_unprimed),
            m2_mixed: Some(all.c2_mixed),
            m2_primed: Some(all.c2_primed),
            m2_unprimed: Some(all.c2_unprimed),
            m3_1_2: Some(all.c3_1_2),
            m3_2_1: Some(all.c3_2_1),
        })
    }
}

/// Direct log-overlap evaluation of every cumulant up to third order.
pub fn cumulant_set<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    low: &FDScheme,
    high: &FDScheme,
) -> Result<CumulantSet> {
    fill_all(family, s, low, high, cumulant_cached)
}

fn need<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T> {
    field
        .as_ref()
        .ok_or_else(|| Error::IncompleteMomentSet(name.to_string()))
}

/// Moment-to-cumulant relations with indices keeping their side of the
/// semicolon.
pub fn cumulants_from_moments(m: &MomentSet) -> Result<CumulantSet> {
    let m1p = need(&m.m1_primed, "M1(l;_)")?;
    let m1u = need(&m.m1_unprimed, "M1(_;l)")?;
    let m2 = need(&m.m2_mixed, "M2(k;l)")?;
    let m2p = need(&m.m2_primed, "M2(kl;_)")?;
    let m2u = need(&m.m2_unprimed, "M2(_;kl)")?;
    let m3a = need(&m.m3_1_2, "M3(j;kl)")?;
    let m3b = need(&m.m3_2_1, "M3(jk;l)")?;
    let n = m1p.len();
    let dims_ok = m1u.len() == n
        && [m2, m2p, m2u].iter().all(|x| x.nrows() == n && x.ncols() == n)
        && m3a.dim() == n
        && m3b.dim() == n;
    if !dims_ok {
        return Err(Error::IncompleteMomentSet("moment arrays of inconsistent size".into()));
    }
    let c2_mixed = DMatrix::from_fn(n, n, |k, l| m2[(k, l)] - m1p[k] * m1u[l]);
    let c2_primed = DMatrix::from_fn(n, n, |k, l| m2p[(k, l)] - m1p[k] * m1p[l]);
    let c2_unprimed = DMatrix::from_fn(n, n, |k, l| m2u[(k, l)] - m1u[k] * m1u[l]);
    let c3_1_2 = Tensor3::from_fn(n, |j, k, l| {
        m3a[(j, k, l)] - m2[(j, k)] * m1u[l] - m2[(j, l)] * m1u[k] - m1p[j] * m2u[(k, l)]
            + 2.0 * m1p[j] * m1u[k] * m1u[l]
    });
    let c3_2_1 = Tensor3::from_fn(n, |j, k, l| {
        m3b[(j, k, l)] - m1p[j] * m2[(k, l)] - m1p[k] * m2[(j, l)] - m2p[(j, k)] * m1u[l]
            + 2.0 * m1p[j] * m1p[k] * m1u[l]
    });
    Ok(CumulantSet {
        c1_primed: m1p.clone(),
        c1_unprimed: m1u.clone(),
        c2_mixed,
        c2_primed,
        c2_unprimed,
        c3_1_2,
        c3_2_1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statefam::{ConstantFamily, StateVector};

    #[test]
    fn spec_validation() {
        assert!(DerivativeSpec::new(vec![], vec![]).is_err());
        assert!(DerivativeSpec::new(vec![0, 1], vec![0, 1]).is_err());
        let s = DerivativeSpec::new(vec![0], vec![1, 1]).unwrap();
        assert_eq!(s.order(), 3);
        assert!(s.is_gauge_invariant());
        assert!(!DerivativeSpec::new(vec![], vec![1]).unwrap().is_gauge_invariant());
    }

    #[test]
    fn prefactors() {
        assert_eq!(sp(&[0], &[0]).prefactor(), Complex64::new(1.0, 0.0));
        assert_eq!(sp(&[0], &[0, 0]).prefactor(), Complex64::new(0.0, 1.0));
        assert_eq!(sp(&[0, 0], &[0]).prefactor(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn constant_family_moments_vanish() {
        let v = StateVector::new(CVector::from_vec(vec![
            Complex64::new(0.6, 0.1),
            Complex64::new(0.2, -0.7),
        ]))
        .unwrap();
        let f = ConstantFamily::new(v, 2);
        let s = ParameterPoint::new(vec![0.2, 0.4]).unwrap();
        for spec in [sp(&[0], &[]), sp(&[0], &[1]), sp(&[1, 1], &[0])] {
            let m = moment(&f, &s, &spec, &FDScheme::default()).unwrap();
            assert!(m.norm() < 1e-8, "{spec:?} {m}");
        }
    }

    #[test]
    fn centered_moments_are_cumulants() {
        let n = 2;
        let m2 = DMatrix::from_fn(n, n, |a, b| Complex64::new((a + 2 * b) as f64, 0.5));
        let m3 = Tensor3::from_fn(n, |a, b, c| Complex64::new((a * b + c) as f64, -1.0));
        let set = MomentSet {
            m1_primed: Some(vec![Complex64::new(0.0, 0.0); n]),
            m1_unprimed: Some(vec![Complex64::new(0.0, 0.0); n]),
            m2_mixed: Some(m2.clone()),
            m2_primed: Some(m2.clone()),
            m2_unprimed: Some(m2.clone()),
            m3_1_2: Some(m3.clone()),
            m3_2_1: Some(m3.clone()),
        };
        let c = cumulants_from_moments(&set).unwrap();
        assert_eq!(c.c2_mixed, m2);
        assert_eq!(c.c3_1_2, m3);
        assert_eq!(c.c3_2_1, m3);
    }

    #[test]
    fn incomplete_set_is_rejected() {
        let err = cumulants_from_moments(&MomentSet::default()).unwrap_err();
        assert!(matches!(err, Error::IncompleteMomentSet(_)));
    }
}
