//! Parameter points, normalized states and smooth state families.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use log::warn;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};

pub type CVector = DVector<Complex64>;

/// Smallest overlap magnitude accepted by [`log_overlap`].
pub const MIN_OVERLAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPoint {
    coords: Vec<f64>,
    names: Option<Vec<String>>,
}

impl ParameterPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument(
                "parameter point needs at least one coordinate".into(),
            ));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("parameter coordinate {i}")));
        }
        Ok(Self { coords, names: None })
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                got: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Copy moved by `delta` along coordinate `k`.
    pub fn shifted(&self, k: usize, delta: f64) -> Self {
        let mut coords = self.coords.clone();
        coords[k] += delta;
        Self {
            coords,
            names: self.names.clone(),
        }
    }
}

impl TryFrom<&[f64]> for ParameterPoint {
    type Error = Error;
    fn try_from(c: &[f64]) -> Result<Self> {
        Self::new(c.to_vec())
    }
}

/// Normalized state vector with at least two amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: CVector,
}

impl StateVector {
    /// Normalizes `amps`; fails on non-finite input or a zero vector.
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidArgument("state dimension must be at least 2".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes".into()));
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.dotc(&other.amps)
    }
}

/// Closed coordinate intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    intervals: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidArgument("domain needs at least one interval".into()));
        }
        for &(lo, hi) in &intervals {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::InvalidArgument(format!("bad interval [{lo}, {hi}]")));
            }
        }
        Ok(Self { intervals })
    }

    pub fn unbounded(n: usize) -> Self {
        Self {
            intervals: vec![(f64::NEG_INFINITY, f64::INFINITY); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn check(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.intervals.len() {
            return Err(Error::DimensionMismatch {
                expected: self.intervals.len(),
                got: s.len(),
            });
        }
        for (index, (&value, &(lo, hi))) in s.iter().zip(&self.intervals).enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("parameter coordinate {index}")));
            }
            if value < lo || value > hi {
                return Err(Error::OutOfDomain { index, value, lo, hi });
            }
        }
        Ok(())
    }

    pub fn contains(&self, s: &[f64]) -> bool {
        self.check(s).is_ok()
    }
}

/// A smooth map from parameter space to normalized states.
///
/// Implementors provide raw amplitudes; [`evaluate`] validates the domain,
/// checks finiteness and normalizes.
pub trait StateFamily: Send + Sync {
    fn param_dim(&self) -> usize;
    fn hilbert_dim(&self) -> usize;
    fn domain(&self) -> &Domain;

    /// Number of continuous derivatives the evaluator guarantees.
    fn smoothness_order(&self) -> u32 {
        u32::MAX
    }

    /// Amplitudes at a point that has already passed the domain check.
    fn amplitudes(&self, s: &[f64]) -> Result<CVector>;
}

impl<F: StateFamily + ?Sized> StateFamily for &F {
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn hilbert_dim(&self) -> usize {
        (**self).hilbert_dim()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn smoothness_order(&self) -> u32 {
        (**self).smoothness_order()
    }
    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        (**self).amplitudes(s)
    }
}

impl<F: StateFamily + ?Sized> StateFamily for Box<F> {
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn hilbert_dim(&self) -> usize {
        (**self).hilbert_dim()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn smoothness_order(&self) -> u32 {
        (**self).smoothness_order()
    }
    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        (**self).amplitudes(s)
    }
}

impl<F: StateFamily + ?Sized> StateFamily for Arc<F> {
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn hilbert_dim(&self) -> usize {
        (**self).hilbert_dim()
    }
    fn domain(&self) -> &Domain {
        (**self).domain()
    }
    fn smoothness_order(&self) -> u32 {
        (**self).smoothness_order()
    }
    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        (**self).amplitudes(s)
    }
}

pub(crate) fn eval_coords<F: StateFamily + ?Sized>(family: &F, s: &[f64]) -> Result<CVector> {
    family.domain().check(s)?;
    let amps = family.amplitudes(s)?;
    let d = family.hilbert_dim();
    if amps.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: amps.len(),
        });
    }
    if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("state evaluator output".into()));
    }
    let norm = amps.norm();
    if norm == 0.0 {
        return Err(Error::NonFinite("state evaluator returned a zero vector".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        warn!("renormalizing state with norm drift {:.3e} at {:?}", norm - 1.0, s);
    }
    if norm == 1.0 {
        Ok(amps)
    } else {
        Ok(amps.unscale(norm))
    }
}

pub fn evaluate<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<StateVector> {
    Ok(StateVector {
        amps: eval_coords(family, s.coords())?,
    })
}

/// `S(s', s) = <Psi(s')|Psi(s)>`.
pub fn overlap<F: StateFamily + ?Sized>(
    family: &F,
    s_primed: &ParameterPoint,
    s: &ParameterPoint,
) -> Result<Complex64> {
    let bra = eval_coords(family, s_primed.coords())?;
    let ket = eval_coords(family, s.coords())?;
    Ok(bra.dotc(&ket))
}

/// Principal-branch logarithm of the overlap.
pub fn log_overlap<F: StateFamily + ?Sized>(
    family: &F,
    s_primed: &ParameterPoint,
    s: &ParameterPoint,
) -> Result<Complex64> {
    let z = overlap(family, s_primed, s)?;
    if z.norm() <= MIN_OVERLAP {
        return Err(Error::VanishingOverlap(z.norm()));
    }
    Ok(z.ln())
}

/// Central-difference derivative `|d_k Psi>` (unnormalized).
pub fn tangent<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    k: usize,
    scheme: &FDScheme,
) -> Result<CVector> {
    tangent_with_error(family, s, k, scheme).map(|(v, _)| v)
}

/// Tangent together with the Richardson error estimate.
pub fn tangent_with_error<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    k: usize,
    scheme: &FDScheme,
) -> Result<(CVector, f64)> {
    check_index(family, s, k)?;
    let mut cache = StateCache::new(family);
    cache.first_derivative(s.coords(), k, scheme)
}

pub(crate) fn check_index<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint, k: usize) -> Result<()> {
    let n = family.param_dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.dim(),
        });
    }
    if k >= n {
        return Err(Error::InvalidArgument(format!("coordinate index {k} >= {n}")));
    }
    Ok(())
}

/// Memoizes evaluator output keyed on exact coordinate bits.
pub(crate) struct StateCache<'a, F: ?Sized> {
    family: &'a F,
    states: HashMap<Vec<u64>, Rc<CVector>>,
}

impl<'a, F: StateFamily + ?Sized> StateCache<'a, F> {
    pub(crate) fn new(family: &'a F) -> Self {
        Self {
            family,
            states: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, s: &[f64]) -> Result<Rc<CVector>> {
        let key: Vec<u64> = s.iter().map(|x| x.to_bits()).collect();
        if let Some(v) = self.states.get(&key) {
            return Ok(Rc::clone(v));
        }
        let v = Rc::new(eval_coords(self.family, s)?);
        self.states.insert(key, Rc::clone(&v));
        Ok(v)
    }

    pub(crate) fn get_offset(&mut self, s: &[f64], offsets: &[(usize, f64)]) -> Result<Rc<CVector>> {
        let mut p = s.to_vec();
        for &(k, d) in offsets {
            p[k] += d;
        }
        self.get(&p)
    }

    pub(crate) fn first_derivative(&mut self, s: &[f64], k: usize, scheme: &FDScheme) -> Result<(CVector, f64)> {
        extrapolate(scheme, |h| {
            let plus = self.get_offset(s, &[(k, h)])?;
            let minus = self.get_offset(s, &[(k, -h)])?;
            Ok((&*plus - &*minus).unscale(2.0 * h))
        })
    }

    pub(crate) fn second_derivative(
        &mut self,
        s: &[f64],
        k: usize,
        l: usize,
        scheme: &FDScheme,
    ) -> Result<(CVector, f64)> {
        extrapolate(scheme, |h| {
            if k == l {
                let plus = self.get_offset(s, &[(k, h)])?;
                let minus = self.get_offset(s, &[(k, -h)])?;
                let mid = self.get(s)?;
                Ok((&*plus + &*minus - &*mid * Complex64::new(2.0, 0.0)).unscale(h * h))
            } else {
                let pp = self.get_offset(s, &[(k, h), (l, h)])?;
                let pm = self.get_offset(s, &[(k, h), (l, -h)])?;
                let mp = self.get_offset(s, &[(k, -h), (l, h)])?;
                let mm = self.get_offset(s, &[(k, -h), (l, -h)])?;
                Ok((&*pp - &*pm - &*mp + &*mm).unscale(4.0 * h * h))
            }
        })
    }
}

/// Real polynomial `alpha(s) = sum_t c_t prod_i s_i^{e_ti}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    n: usize,
    max_degree: u32,
    terms: Vec<(Vec<u32>, f64)>,
}

impl GaugeFunction {
    pub fn new(n: usize, max_degree: u32, terms: Vec<(Vec<u32>, f64)>) -> Result<Self> {
        for (exps, c) in &terms {
            if exps.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: exps.len(),
                });
            }
            if exps.iter().sum::<u32>() > max_degree {
                return Err(Error::InvalidArgument(format!(
                    "monomial {exps:?} exceeds degree {max_degree}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite("gauge coefficient".into()));
            }
        }
        Ok(Self { n, max_degree, terms })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            max_degree: 0,
            terms: Vec::new(),
        }
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, 0, vec![(vec![0; n], c)])
    }

    /// All monomials up to `degree` with coefficients uniform in `[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(n: usize, degree: u32, scale: f64, rng: &mut R) -> Self {
        let mut terms = Vec::new();
        let mut exps = vec![0u32; n];
        loop {
            if exps.iter().sum::<u32>() <= degree {
                terms.push((exps.clone(), rng.gen_range(-scale..=scale)));
            }
            let mut i = 0;
            loop {
                if i == n {
                    return Self {
                        n,
                        max_degree: degree,
                        terms,
                    };
                }
                exps[i] += 1;
                if exps[i] <= degree {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn terms(&self) -> &[(Vec<u32>, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == 0.0)
    }

    /// The same polynomial expanded about `center`: `s -> alpha(s - center)`.
    pub fn recentered(&self, center: &[f64]) -> Result<Self> {
        if center.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: center.len(),
            });
        }
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (exps, c) in &self.terms {
            // Binomial expansion, one variable at a time.
            let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::with_capacity(self.n), *c)];
            for (&e, &x0) in exps.iter().zip(center) {
                let mut next = Vec::with_capacity(partial.len() * (e as usize + 1));
                for (head, coef) in &partial {
                    let mut binom = 1.0;
                    for a in 0..=e {
                        let mut h = head.clone();
                        h.push(a);
                        next.push((h, coef * binom * (-x0).powi((e - a) as i32)));
                        binom = binom * (e - a) as f64 / (a + 1) as f64;
                    }
                }
                partial = next;
            }
            for (k, v) in partial {
                *merged.entry(k).or_insert(0.0) += v;
            }
        }
        Self::new(self.n, self.max_degree, merged.into_iter().collect())
    }

    pub fn value(&self, s: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(exps, c)| c * exps.iter().zip(s).map(|(&e, &x)| x.powi(e as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, s: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                self.terms
                    .iter()
                    .filter(|(exps, _)| exps[k] > 0)
                    .map(|(exps, c)| {
                        let mut t = c * exps[k] as f64;
                        for (i, (&e, &x)) in exps.iter().zip(s).enumerate() {
                            let e = if i == k { e - 1 } else { e };
                            t *= x.powi(e as i32);
                        }
                        t
                    })
                    .sum()
            })
            .collect()
    }
}

/// The family `s -> exp(-i alpha(s)) |Psi(s)>`.
#[derive(Debug, Clone)]
pub struct GaugedFamily<F> {
    inner: F,
    alpha: GaugeFunction,
}

impl<F> GaugedFamily<F> {
    pub fn inner(&self) -> &F {
        &self.inner
    }

    pub fn gauge(&self) -> &GaugeFunction {
        &self.alpha
    }
}

pub fn apply_gauge<F: StateFamily>(family: F, alpha: GaugeFunction) -> Result<GaugedFamily<F>> {
    if alpha.dim() != family.param_dim() {
        return Err(Error::DimensionMismatch {
            expected: family.param_dim(),
            got: alpha.dim(),
        });
    }
    Ok(GaugedFamily { inner: family, alpha })
}

impl<F: StateFamily> StateFamily for GaugedFamily<F> {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn hilbert_dim(&self) -> usize {
        self.inner.hilbert_dim()
    }
    fn domain(&self) -> &Domain {
        self.inner.domain()
    }
    fn smoothness_order(&self) -> u32 {
        self.inner.smoothness_order()
    }
    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        let psi = self.inner.amplitudes(s)?;
        if self.alpha.is_zero() {
            return Ok(psi);
        }
        let a = self.alpha.value(s);
        if !a.is_finite() {
            return Err(Error::NonFinite("gauge function value".into()));
        }
        Ok(psi * Complex64::from_polar(1.0, -a))
    }
}

/// A family whose state does not depend on the parameters.
#[derive(Debug, Clone)]
pub struct ConstantFamily {
    state: CVector,
    domain: Domain,
}

impl ConstantFamily {
    pub fn new(state: StateVector, n: usize) -> Self {
        Self {
            state: state.into_amplitudes(),
            domain: Domain::unbounded(n),
        }
    }
}

impl StateFamily for ConstantFamily {
    fn param_dim(&self) -> usize {
        self.domain.dim()
    }
    fn hilbert_dim(&self) -> usize {
        self.state.len()
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn amplitudes(&self, _s: &[f64]) -> Result<CVector> {
        Ok(self.state.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recentered_gauge_is_a_shift() {
        let alpha = GaugeFunction::new(2, 3, vec![(vec![2, 1], 0.7), (vec![0, 1], -1.3), (vec![0, 0], 0.2)]).unwrap();
        let c = [0.4, -1.1];
        let shifted = alpha.recentered(&c).unwrap();
        assert!(shifted.max_degree() == 3);
        for s in [[0.0, 0.0], [1.3, 0.2], [-0.7, 2.5]] {
            let v = shifted.value(&s);
            assert!((v - alpha.value(&[s[0] - c[0], s[1] - c[1]])).abs() < 1e-12);
        }
    }

    fn pt(c: &[f64]) -> ParameterPoint {
        ParameterPoint::new(c.to_vec()).unwrap()
    }

    /// Spin-1/2 rotation of the lower state by theta about y, with a phase in phi.
    struct Qubit {
        domain: Domain,
    }

    impl StateFamily for Qubit {
        fn param_dim(&self) -> usize {
            2
        }
        fn hilbert_dim(&self) -> usize {
            2
        }
        fn domain(&self) -> &Domain {
            &self.domain
        }
        fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
            let (t, p) = (s[0], s[1]);
            Ok(CVector::from_vec(vec![
                Complex64::new((t / 2.0).cos(), 0.0),
                Complex64::from_polar((t / 2.0).sin(), p),
            ]))
        }
    }

    fn qubit() -> Qubit {
        Qubit {
            domain: Domain::new(vec![(0.0, 3.2), (-7.0, 7.0)]).unwrap(),
        }
    }

    #[test]
    fn point_validation() {
        assert!(ParameterPoint::new(vec![]).is_err());
        assert!(matches!(
            ParameterPoint::new(vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        let p = pt(&[1.0, 2.0]).with_names(vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(p.names().unwrap()[1], "b");
        assert_eq!(p.shifted(1, 0.5).coords(), &[1.0, 2.5]);
    }

    #[test]
    fn state_vector_normalizes() {
        let v = StateVector::new(CVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 4.0),
        ]))
        .unwrap();
        assert!((v.amplitudes().norm() - 1.0).abs() < 1e-15);
        assert!(StateVector::new(CVector::from_vec(vec![Complex64::new(1.0, 0.0)])).is_err());
    }

    #[test]
    fn out_of_domain() {
        let f = qubit();
        let err = evaluate(&f, &pt(&[4.0, 0.0])).unwrap_err();
        assert!(matches!(err, Error::OutOfDomain { index: 0, .. }));
    }

    #[test]
    fn overlap_matches_half_angle() {
        let f = qubit();
        let th = 0.9;
        let s = overlap(&f, &pt(&[0.0, 0.0]), &pt(&[th, 0.0])).unwrap();
        assert!((s - Complex64::new((th / 2.0).cos(), 0.0)).norm() < 1e-15);
        let back = overlap(&f, &pt(&[th, 0.0]), &pt(&[0.0, 0.0])).unwrap();
        assert!((s - back.conj()).norm() < 1e-15);
    }

    #[test]
    fn log_overlap_rejects_orthogonal() {
        let f = qubit();
        let err = log_overlap(&f, &pt(&[0.0, 0.0]), &pt(&[std::f64::consts::PI, 0.0])).unwrap_err();
        assert!(matches!(err, Error::VanishingOverlap(_)));
    }

    #[test]
    fn tangent_norm_on_qubit() {
        let f = qubit();
        let t = tangent(&f, &pt(&[std::f64::consts::FRAC_PI_2, 0.3]), 0, &FDScheme::default()).unwrap();
        assert!((t.norm_squared() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn constant_family_has_zero_tangent() {
        let v = StateVector::new(CVector::from_vec(vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(0.5, 0.0),
        ]))
        .unwrap();
        let f = ConstantFamily::new(v, 3);
        let t = tangent(&f, &pt(&[0.1, 0.2, 0.3]), 2, &FDScheme::default()).unwrap();
        assert_eq!(t.norm(), 0.0);
    }

    #[test]
    fn zero_gauge_is_bit_identical() {
        let f = qubit();
        let p = pt(&[0.7, -1.3]);
        let a = evaluate(&f, &p).unwrap();
        let g = apply_gauge(&f, GaugeFunction::zero(2)).unwrap();
        assert_eq!(evaluate(&g, &p).unwrap(), a);
    }

    #[test]
    fn constant_gauge_preserves_overlaps() {
        let f = qubit();
        let g = apply_gauge(&f, GaugeFunction::constant(2, 1.234).unwrap()).unwrap();
        let (a, b) = (pt(&[0.3, 0.1]), pt(&[1.1, 0.9]));
        let s0 = overlap(&f, &a, &b).unwrap();
        let s1 = overlap(&g, &a, &b).unwrap();
        assert!((s0 - s1).norm() < 1e-15);
    }

    #[test]
    fn gauge_gradient() {
        // alpha = s1^2 + 2 s2
        let a = GaugeFunction::new(2, 2, vec![(vec![2, 0], 1.0), (vec![0, 1], 2.0)]).unwrap();
        assert_eq!(a.value(&[1.0, 1.0]), 3.0);
        assert_eq!(a.gradient(&[1.0, 1.0]), vec![2.0, 2.0]);
        assert!(GaugeFunction::new(2, 1, vec![(vec![2, 0], 1.0)]).is_err());
    }

    #[test]
    fn random_gauge_counts_monomials() {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let a = GaugeFunction::random(2, 3, 0.5, &mut rng);
        assert_eq!(a.terms().len(), 10);
        assert!(a
            .terms()
            .iter()
            .all(|(e, c)| e.iter().sum::<u32>() <= 3 && c.abs() <= 0.5));
    }
}
