use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::cumulants::{cumulant_cached, DerivativeSpec};
use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::statefam::{check_index, CVector, ParameterPoint, StateCache, StateFamily};

/// How `C2` is obtained from the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QgtEngine {
    /// Projected overlap of finite-difference tangent vectors.
    TangentState,
    /// Mixed second derivative of the log-overlap.
    LogOverlapFD,
}

impl QgtEngine {
    pub fn name(&self) -> &'static str {
        match self {
            QgtEngine::TangentState => "tangent",
            QgtEngine::LogOverlapFD => "logoverlap",
        }
    }
}

/// Complex quantum geometric tensor. Rows carry the primed (bra) index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGeometricTensor {
    c2: DMatrix<Complex64>,
    g: DMatrix<f64>,
    sigma: DMatrix<f64>,
    point: ParameterPoint,
    estimated_error: f64,
}

impl QuantumGeometricTensor {
    /// Validates Hermiticity (1e-8) and symmetrizes.
    pub fn from_c2(c2: DMatrix<Complex64>, point: ParameterPoint, estimated_error: f64) -> Result<Self> {
        let n = c2.nrows();
        if c2.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c2.ncols(),
            });
        }
        if point.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: point.dim(),
            });
        }
        if c2.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("quantum geometric tensor".into()));
        }
        let adj = c2.adjoint();
        let herm = (&c2 - &adj).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if herm > 1e-8 {
            return Err(Error::IdentityViolation {
                what: "Hermiticity of C2".into(),
                deviation: herm,
                tolerance: 1e-8,
            });
        }
        let c2 = (c2 + adj) * Complex64::new(0.5, 0.0);
        let g = c2.map(|z| z.re);
        let sigma = c2.map(|z| z.im);
        if let Some(i) = (0..n).find(|&i| g[(i, i)] < -1e-10) {
            return Err(Error::IdentityViolation {
                what: format!("nonnegative variance g[{i}][{i}]"),
                deviation: -g[(i, i)],
                tolerance: 1e-10,
            });
        }
        Ok(Self {
            c2,
            g,
            sigma,
            point,
            estimated_error,
        })
    }

    pub fn c2(&self) -> &DMatrix<Complex64> {
        &self.c2
    }

    /// Real symmetric part (quantum metric).
    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    /// Imaginary antisymmetric part (Berry curvature).
    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn point(&self) -> &ParameterPoint {
        &self.point
    }

    pub fn dim(&self) -> usize {
        self.c2.nrows()
    }

    pub fn estimated_error(&self) -> f64 {
        self.estimated_error
    }

    /// Determinant of `C2`; real for a Hermitian matrix.
    pub fn det(&self) -> f64 {
        self.c2.clone().determinant().re
    }

    /// Eigenvalues of `g` in ascending order.
    pub fn g_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.g.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn max_abs_diff(&self, other: &DMatrix<Complex64>) -> f64 {
        (&self.c2 - other).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

pub fn qgt<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    engine: QgtEngine,
) -> Result<QuantumGeometricTensor> {
    qgt_with_scheme(family, s, engine, &FDScheme::default())
}

pub fn qgt_with_scheme<F: StateFamily + ?Sized>(
    family: &F,
    s: &ParameterPoint,
    engine: QgtEngine,
    scheme: &FDScheme,
) -> Result<QuantumGeometricTensor> {
    check_index(family, s, 0)?;
    let mut cache = StateCache::new(family);
    let (c2, err) = match engine {
        QgtEngine::TangentState => tangent_c2(&mut cache, s.coords(), scheme)?,
        QgtEngine::LogOverlapFD => log_overlap_c2(&mut cache, s.coords(), scheme)?,
    };
    QuantumGeometricTensor::from_c2(c2, s.clone(), err)
}

pub(crate) struct Tangents {
    pub psi: CVector,
    pub t: Vec<CVector>,
    pub err: f64,
}

pub(crate) fn tangents<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    scheme: &FDScheme,
) -> Result<Tangents> {
    let psi = (*cache.get(s)?).clone();
    let mut t = Vec::with_capacity(s.len());
    let mut err = 0.0_f64;
    for k in 0..s.len() {
        let (v, e) = cache.first_derivative(s, k, scheme)?;
        err = err.max(e);
        t.push(v);
    }
    Ok(Tangents { psi, t, err })
}

fn tangent_c2<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    scheme: &FDScheme,
) -> Result<(DMatrix<Complex64>, f64)> {
    let tg = tangents(cache, s, scheme)?;
    let n = s.len();
    let b: Vec<Complex64> = tg.t.iter().map(|t| tg.psi.dotc(t)).collect();
    let c2 = DMatrix::from_fn(n, n, |j, k| tg.t[j].dotc(&tg.t[k]) - b[j].conj() * b[k]);
    let scale = tg.t.iter().fold(1.0_f64, |m, t| m.max(t.norm()));
    Ok((c2, 4.0 * scale * tg.err))
}

fn log_overlap_c2<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    scheme: &FDScheme,
) -> Result<(DMatrix<Complex64>, f64)> {
    let n = s.len();
    let mut c2 = DMatrix::zeros(n, n);
    let mut err = 0.0_f64;
    for j in 0..n {
        for k in 0..n {
            let spec = DerivativeSpec::new(vec![j], vec![k])?;
            let (v, e) = cumulant_cached(cache, s, &spec, scheme)?;
            c2[(j, k)] = v;
            err = err.max(e);
        }
    }
    Ok((c2, err))
}

/// Result of running both engines at one point.
#[derive(Debug, Clone)]
pub struct EngineComparison {
    pub tangent: QuantumGeometricTensor,
    pub log_overlap: QuantumGeometricTensor,
    pub deviation: f64,
    pub tolerance: f64,
}

/// Runs both engines and fails with `EngineMismatch` when they differ by
/// more than `max(1e-6, 100 * (e1 + e2))`.
pub fn qgt_cross_checked<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<EngineComparison> {
    let tangent = qgt(family, s, QgtEngine::TangentState)?;
    let log_overlap = qgt(family, s, QgtEngine::LogOverlapFD)?;
    let deviation = tangent.max_abs_diff(log_overlap.c2());
    let tolerance = (100.0 * (tangent.estimated_error() + log_overlap.estimated_error())).max(1e-6);
    if deviation > tolerance {
        return Err(Error::EngineMismatch { deviation, tolerance });
    }
    Ok(EngineComparison {
        tangent,
        log_overlap,
        deviation,
        tolerance,
    })
}

/// `beta_j = -i <Psi|d_j Psi>` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerryConnection {
    pub beta: Vec<f64>,
    pub point: ParameterPoint,
}

pub fn berry_connection<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<BerryConnection> {
    check_index(family, s, 0)?;
    let mut cache = StateCache::new(family);
    let beta = beta_cached(&mut cache, s.coords(), &FDScheme::default())?;
    Ok(BerryConnection { beta, point: s.clone() })
}

pub(crate) fn beta_cached<F: StateFamily + ?Sized>(
    cache: &mut StateCache<'_, F>,
    s: &[f64],
    scheme: &FDScheme,
) -> Result<Vec<f64>> {
    let tg = tangents(cache, s, scheme)?;
    let mut beta = Vec::with_capacity(s.len());
    for t in &tg.t {
        let z = tg.psi.dotc(t) * Complex64::new(0.0, -1.0);
        if z.im.abs() > 1e-6 {
            return Err(Error::NonRealConnection(z.im.abs()));
        }
        beta.push(z.re);
    }
    Ok(beta)
}

/// `d_j beta_k - d_k beta_j` by finite differences of the connection field.
pub fn berry_curl<F: StateFamily + ?Sized>(family: &F, s: &ParameterPoint) -> Result<DMatrix<f64>> {
    check_index(family, s, 0)?;
    let n = s.dim();
    let inner = FDScheme::default();
    let mut cache = StateCache::new(family);
    let mut dbeta = Vec::with_capacity(n);
    for j in 0..n {
        let (d, _) = extrapolate(&FDScheme::default(), |h| {
            let plus = beta_cached(&mut cache, s.shifted(j, h).coords(), &inner)?;
            let minus = beta_cached(&mut cache, s.shifted(j, -h).coords(), &inner)?;
            Ok(plus
                .iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>())
        })?;
        dbeta.push(d);
    }
    Ok(DMatrix::from_fn(n, n, |j, k| dbeta[j][k] - dbeta[k][j]))
}
