use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cumulants::{cumulant_cached, DerivativeSpec};
use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::geometry::qgt::{qgt_with_scheme, tangents, QgtEngine};
use crate::statefam::{check_index, ParameterPoint, StateCache, StateFamily};
use crate::tensor::Tensor3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Below this `det g` the metric counts as singular.
pub const SINGULAR_DET: f64 = 1e-12;

/// Third cumulants in both flavors: `c3_1_2[(j, k, l)] = C3(j;kl)` and
/// `c3_2_1[(j, k, l)] = C3(jk;l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThirdCumulant {
    pub c3_1_2: Tensor3<Complex64>,
    pub c3_2_1: Tensor3<Complex64>,
    pub point: ParameterPoint,
    pub estimated_error: f64,
}

impl ThirdCumulant {
    /// Largest deviation from `C3(jk;l) = conj(C3(l;kj))`.
    pub fn pairing_residual(&self) -> f64 {
        let n = self.c3_1_2.dim();
        let mut r = 0.0_f64;
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    r = r.max((self.c3_2_1[(j, k, l)] - self.c3_1_2[(l, k, j)].conj()).norm());
                }
            }
        }
        r
    }
}

pub fn third_cumulant<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<ThirdCumulant> {
    third_cumulant_with(family, s, QgtEngine::TangentState)
}

/// `TangentState` assembles the cumulants from first and second derivative
/// states; `LogOverlapFD` differentiates `ln S` directly with a wider step.
pub fn third_cumulant_with<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    engine: QgtEngine,
) -> Result<ThirdCumulant> {
    check_index(family, s, 0)?;
    let mut cache = StateCache::new(family);
    third_cumulant_cached(&mut cache, s, engine)
}

pub(crate) fn third_cumulant_cached<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &ParameterPoint,
    engine: QgtEngine,
) -> Result<ThirdCumulant> {
    match engine {
        QgtEngine::TangentState => tangent_c3(cache, s),
        QgtEngine::LogOverlapFD => log_overlap_c3(cache, s),
    }
}

fn tangent_c3<F: StateFamily + ?Sized>(cache: &mut StateCache<'_, F>, s: &ParameterPoint) -> Result<ThirdCumulant> {
    let scheme = FDScheme::default();
    let x = s.coords();
    let n = x.len();
    let tg = tangents(cache, x, &scheme)?;
    let mut err = tg.err;
    let mut u = vec![None; n * n];
    for k in 0..n {
        for l in k..n {
            let (v, e) = cache.second_derivative(x, k, l, &scheme)?;
            err = err.max(e);
            u[l * n + k] = Some(v.clone());
            u[k * n + l] = Some(v);
        }
    }
    let u = |k: usize, l: usize| u[k * n + l].as_ref().expect("filled above");
    let (psi, t) = (&tg.psi, &tg.t);
    // Derivatives of S on the diagonal; a trailing p marks the bra side.
    let s_p: Vec<Complex64> = t.iter().map(|tj| tj.dotc(psi)).collect();
    let s_u: Vec<Complex64> = t.iter().map(|tl| psi.dotc(tl)).collect();
    let s_pu = DMatrix::from_fn(n, n, |j, k| t[j].dotc(&t[k]));
    let c3_1_2 = Tensor3::from_fn(n, |j, k, l| {
        let s_uu = psi.dotc(u(k, l));
        let s_puu = t[j].dotc(u(k, l));
        I * (s_puu - s_pu[(j, k)] * s_u[l] - s_pu[(j, l)] * s_u[k] - s_uu * s_p[j] + 2.0 * s_p[j] * s_u[k] * s_u[l])
    });
    let c3_2_1 = Tensor3::from_fn(n, |j, k, l| {
        let s_pp = u(j, k).dotc(psi);
        let s_ppu = u(j, k).dotc(&t[l]);
        -I * (s_ppu - s_pp * s_u[l] - s_pu[(j, l)] * s_p[k] - s_pu[(k, l)] * s_p[j] + 2.0 * s_p[j] * s_p[k] * s_u[l])
    });
    let scale = t.iter().fold(1.0_f64, |m, v| m.max(v.norm()));
    Ok(ThirdCumulant {
        c3_1_2,
        c3_2_1,
        point: s.clone(),
        estimated_error: 8.0 * scale * scale * err,
    })
}

fn log_overlap_c3<F: StateFamily + ?Sized>(cache: &mut StateCache<'_, F>, s: &ParameterPoint) -> Result<ThirdCumulant> {
    let scheme = FDScheme::third_order();
    let x = s.coords();
    let n = x.len();
    let mut err = 0.0_f64;
    let mut c3_1_2 = Tensor3::zeros(n);
    let mut c3_2_1 = Tensor3::zeros(n);
    for j in 0..n {
        for k in 0..n {
            for l in k..n {
                let (v, e) = cumulant_cached(cache, x, &DerivativeSpec::new(vec![j], vec![k, l])?, &scheme)?;
                c3_1_2[(j, k, l)] = v;
                c3_1_2[(j, l, k)] = v;
                err = err.max(e);
            }
        }
    }
    for j in 0..n {
        for k in j..n {
            for l in 0..n {
                let (v, e) = cumulant_cached(cache, x, &DerivativeSpec::new(vec![j, k], vec![l])?, &scheme)?;
                c3_2_1[(j, k, l)] = v;
                c3_2_1[(k, j, l)] = v;
                err = err.max(e);
            }
        }
    }
    Ok(ThirdCumulant {
        c3_1_2,
        c3_2_1,
        point: s.clone(),
        estimated_error: err,
    })
}

/// `d[(l, j, k)] = d_l C2(j;k) = i (C3(jl;k) - C3(j;kl))`.
pub fn c2_derivative_from_c3(c3: &ThirdCumulant) -> Tensor3<Complex64> {
    let n = c3.c3_1_2.dim();
    Tensor3::from_fn(n, |l, j, k| I * (c3.c3_2_1[(j, l, k)] - c3.c3_1_2[(j, k, l)]))
}

/// The same combination with the coefficient `1/(2i)` in place of `i`.
/// Kept for comparison; it equals `-1/2` times the true derivative.
pub fn c2_derivative_half_inverse_i(c3: &ThirdCumulant) -> Tensor3<Complex64> {
    let n = c3.c3_1_2.dim();
    Tensor3::from_fn(n, |l, j, k| (c3.c3_2_1[(j, l, k)] - c3.c3_1_2[(j, k, l)]) / (2.0 * I))
}

/// `d_l C2(j;k)` by central differences of the tangent-engine `C2` field.
pub fn c2_derivative_fd<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<Tensor3<Complex64>> {
    check_index(family, s, 0)?;
    let n = s.dim();
    let mut out = Tensor3::zeros(n);
    for l in 0..n {
        let (d, _) = extrapolate(&FDScheme::default(), |h| {
            let plus = qgt_with_scheme(family, &s.shifted(l, h), QgtEngine::TangentState, &FDScheme::default())?;
            let minus = qgt_with_scheme(family, &s.shifted(l, -h), QgtEngine::TangentState, &FDScheme::default())?;
            Ok((plus.c2() - minus.c2()) / Complex64::new(2.0 * h, 0.0))
        })?;
        for j in 0..n {
            for k in 0..n {
                out[(l, j, k)] = d[(j, k)];
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct QgtDerivative {
    /// From third cumulants; `value[(l, j, k)] = d_l C2(j;k)`.
    pub value: Tensor3<Complex64>,
    pub finite_difference: Tensor3<Complex64>,
    pub deviation: f64,
}

/// Derivative of `C2` from third cumulants, cross-checked against finite
/// differences of `C2` (tolerance 1e-5).
pub fn qgt_derivative<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<QgtDerivative> {
    let c3 = third_cumulant(family, s)?;
    let value = c2_derivative_from_c3(&c3);
    let finite_difference = c2_derivative_fd(family, s)?;
    let deviation = value.max_abs_diff(&finite_difference);
    if deviation > 1e-5 {
        return Err(Error::IdentityViolation {
            what: "derivative of C2 from third cumulants".into(),
            deviation,
            tolerance: 1e-5,
        });
    }
    Ok(QgtDerivative {
        value,
        finite_difference,
        deviation,
    })
}

/// `[jl;k]_q = (d_j C2(l;k) + d_l C2(k;j) - d_k C2(j;l)) / 2` written in
/// third cumulants; stored as `q[(j, l, k)]`.
pub fn quantum_christoffel_from(c3: &ThirdCumulant) -> Tensor3<Complex64> {
    let a = &c3.c3_2_1;
    let b = &c3.c3_1_2;
    let n = a.dim();
    Tensor3::from_fn(n, |j, l, k| {
        I * 0.5 * (a[(j, l, k)] - b[(l, k, j)] + a[(l, k, j)] - b[(k, j, l)] - a[(k, j, l)] + b[(j, l, k)])
    })
}

pub fn quantum_christoffel<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<Tensor3<Complex64>> {
    Ok(quantum_christoffel_from(&third_cumulant(family, s)?))
}

/// Second-kind quantum symbol `sum_k (C2^-1)[m][k] [jl;k]_q`, stored as
/// `(m, j, l)`. Only defined for an invertible Hermitian `C2`.
pub fn quantum_christoffel_second_kind(
    c2: &DMatrix<Complex64>,
    quantum: &Tensor3<Complex64>,
) -> Result<Tensor3<Complex64>> {
    let det = c2.clone().determinant();
    if det.norm() <= SINGULAR_DET {
        return Err(Error::SingularMetric(det.norm()));
    }
    let inv = c2.clone().try_inverse().ok_or(Error::SingularMetric(det.norm()))?;
    let n = c2.nrows();
    Ok(Tensor3::from_fn(n, |m, j, l| {
        (0..n).map(|k| inv[(m, k)] * quantum[(j, l, k)]).sum()
    }))
}

/// A Riemannian metric field on parameter space.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;

    fn metric(&self, s: &ParameterPoint) -> Result<DMatrix<f64>>;

    /// `dg[(i, j, k)] = d_i g_jk`; central differences by default.
    fn metric_derivative(&self, s: &ParameterPoint) -> Result<Tensor3<f64>> {
        fd_metric_derivative(self, s, &FDScheme::default())
    }

    /// Step for differentiating Christoffel fields.
    fn fd_step(&self) -> f64 {
        1e-3
    }
}

pub fn fd_metric_derivative<M: MetricField + ?Sized>(
    metric: &M,
    s: &ParameterPoint,
    scheme: &FDScheme,
) -> Result<Tensor3<f64>> {
    let n = metric.dim();
    let mut out = Tensor3::zeros(n);
    for i in 0..n {
        let (d, _) = extrapolate(scheme, |h| {
            let plus = metric.metric(&s.shifted(i, h))?;
            let minus = metric.metric(&s.shifted(i, -h))?;
            Ok((plus - minus) / (2.0 * h))
        })?;
        for j in 0..n {
            for k in 0..n {
                out[(i, j, k)] = d[(j, k)];
            }
        }
    }
    Ok(out)
}

/// Metric given by a closure.
pub struct FnMetric<G> {
    dim: usize,
    f: G,
}

impl<G> FnMetric<G>
where
    G: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    pub fn new(dim: usize, f: G) -> Self {
        Self { dim, f }
    }
}

impl<G> MetricField for FnMetric<G>
where
    G: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn metric(&self, s: &ParameterPoint) -> Result<DMatrix<f64>> {
        if s.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: s.dim(),
            });
        }
        let g = (self.f)(s.coords());
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("metric field".into()));
        }
        Ok(g)
    }
}

/// How a family metric obtains its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricDerivative {
    /// Real part of `i (C3(jl;k) - C3(j;kl))`.
    Cumulant,
    /// Central differences of `g`.
    FiniteDifference,
}

/// The quantum metric `g = Re C2` of a state family.
pub struct FamilyMetric<'a, F: ?Sized> {
    family: &'a F,
    derivative: MetricDerivative,
}

impl<'a, F: StateFamily + ?Sized> FamilyMetric<'a, F> {
    pub fn new(family: &'a F) -> Self {
        Self {
            family,
            derivative: MetricDerivative::Cumulant,
        }
    }

    pub fn with_derivative(family: &'a F, derivative: MetricDerivative) -> Self {
        Self { family, derivative }
    }
}

impl<F: StateFamily + ?Sized> MetricField for FamilyMetric<'_, F> {
    fn dim(&self) -> usize {
        self.family.param_dim()
    }

    fn metric(&self, s: &ParameterPoint) -> Result<DMatrix<f64>> {
        Ok(
            qgt_with_scheme(self.family, s, QgtEngine::TangentState, &FDScheme::default())?
                .g()
                .clone(),
        )
    }

    fn metric_derivative(&self, s: &ParameterPoint) -> Result<Tensor3<f64>> {
        match self.derivative {
            MetricDerivative::Cumulant => Ok(c2_derivative_from_c3(&third_cumulant(self.family, s)?).re()),
            MetricDerivative::FiniteDifference => fd_metric_derivative(self, s, &FDScheme::default()),
        }
    }
}

/// Christoffel symbols at one point. `first_kind[(i, j, k)] = [ij,k]`,
/// `second_kind[(l, i, j)] = Gamma^l_ij`, `quantum[(j, l, k)] = [jl;k]_q`.
#[derive(Debug, Clone)]
pub struct ChristoffelField {
    pub quantum: Option<Tensor3<Complex64>>,
    pub first_kind: Tensor3<f64>,
    pub second_kind: Option<Tensor3<f64>>,
    pub det_g: f64,
    pub point: ParameterPoint,
}

fn first_kind_from(dg: &Tensor3<f64>) -> Tensor3<f64> {
    Tensor3::from_fn(dg.dim(), |i, j, k| {
        0.5 * (dg[(j, i, k)] + dg[(i, k, j)] - dg[(k, i, j)])
    })
}

fn raise(g: &DMatrix<f64>, first: &Tensor3<f64>) -> Result<Tensor3<f64>> {
    let det = g.determinant();
    if det <= SINGULAR_DET {
        return Err(Error::SingularMetric(det));
    }
    let inv = g.clone().try_inverse().ok_or(Error::SingularMetric(det))?;
    let n = g.nrows();
    Ok(Tensor3::from_fn(n, |l, i, j| {
        (0..n).map(|k| inv[(l, k)] * first[(i, j, k)]).sum()
    }))
}

/// First-kind symbols, plus second-kind ones when `det g > 1e-12`.
pub fn christoffel<M: MetricField + ?Sized>(metric: &M, s: &ParameterPoint) -> Result<ChristoffelField> {
    let g = metric.metric(s)?;
    let first_kind = first_kind_from(&metric.metric_derivative(s)?);
    let det_g = g.determinant();
    let second_kind = if det_g > SINGULAR_DET {
        Some(raise(&g, &first_kind)?)
    } else {
        None
    };
    Ok(ChristoffelField {
        quantum: None,
        first_kind,
        second_kind,
        det_g,
        point: s.clone(),
    })
}

/// Second-kind symbols; `SingularMetric` when `det g <= 1e-12`.
pub fn second_kind<M: MetricField + ?Sized>(metric: &M, s: &ParameterPoint) -> Result<Tensor3<f64>> {
    let g = metric.metric(s)?;
    raise(&g, &first_kind_from(&metric.metric_derivative(s)?))
}

/// Quantum symbols from third cumulants together with the metric symbols
/// from finite differences of `g`, so the two can be compared.
pub fn christoffel_field<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<ChristoffelField> {
    let metric = FamilyMetric::with_derivative(family, MetricDerivative::FiniteDifference);
    let mut field = christoffel(&metric, s)?;
    field.quantum = Some(quantum_christoffel(family, s)?);
    Ok(field)
}
