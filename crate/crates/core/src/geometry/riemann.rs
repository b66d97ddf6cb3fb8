use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::geometry::christoffel::{second_kind, MetricField, SINGULAR_DET};
use crate::statefam::ParameterPoint;
use crate::tensor::{Tensor3, Tensor4};

/// Curvature at a point.
///
/// `r[(l, m, k, j)] = d_j G^l_km - d_k G^l_jm + G^l_jn G^n_km - G^l_kn G^n_jm`,
/// so the last index pair is the transport plane. Ricci contracts the upper
/// index with the last one: `ricci[(m, k)] = r[(l, m, k, l)]`; with this
/// choice the unit sphere has scalar curvature +2.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    pub r: Tensor4<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
    pub estimated_error: f64,
    pub point: ParameterPoint,
}

impl RiemannTensor {
    /// Largest deviation from `R^l_mkj = -R^l_mjk`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.r.dim();
        let mut res = 0.0_f64;
        for l in 0..n {
            for m in 0..n {
                for k in 0..n {
                    for j in 0..n {
                        res = res.max((self.r[(l, m, k, j)] + self.r[(l, m, j, k)]).abs());
                    }
                }
            }
        }
        res
    }
}

pub fn riemann<M: MetricField + ?Sized>(metric: &M, s: &ParameterPoint) -> Result<RiemannTensor> {
    let n = metric.dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.dim(),
        });
    }
    let g = metric.metric(s)?;
    let det = g.determinant();
    if det <= SINGULAR_DET {
        return Err(Error::SingularMetric(det));
    }
    let gamma = second_kind(metric, s)?;
    let scheme = FDScheme::new(metric.fd_step(), true)?;
    let mut dgamma: Vec<Tensor3<f64>> = Vec::with_capacity(n);
    let mut err = 0.0_f64;
    for j in 0..n {
        let (d, e) = extrapolate(&scheme, |h| {
            let plus = second_kind(metric, &s.shifted(j, h))?;
            let minus = second_kind(metric, &s.shifted(j, -h))?;
            Ok(plus.zip_map(&minus, |a, b| (a - b) / (2.0 * h)))
        })?;
        err = err.max(e);
        dgamma.push(d);
    }
    let mut r = Tensor4::zeros(n);
    for l in 0..n {
        for m in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let mut v = dgamma[j][(l, k, m)] - dgamma[k][(l, j, m)];
                    for q in 0..n {
                        v += gamma[(l, j, q)] * gamma[(q, k, m)] - gamma[(l, k, q)] * gamma[(q, j, m)];
                    }
                    r[(l, m, k, j)] = v;
                }
            }
        }
    }
    let estimated_error = 2.0 * err;
    let magnitude = r.max_abs();
    if estimated_error > (0.1 * magnitude).max(1e-6) {
        return Err(Error::NoiseDominated {
            error: estimated_error,
            magnitude,
        });
    }
    let ricci = DMatrix::from_fn(n, n, |m, k| (0..n).map(|l| r[(l, m, k, l)]).sum());
    let inv = g.try_inverse().ok_or(Error::SingularMetric(det))?;
    let scalar = (0..n)
        .flat_map(|m| (0..n).map(move |k| (m, k)))
        .map(|(m, k)| inv[(m, k)] * ricci[(m, k)])
        .sum();
    Ok(RiemannTensor {
        r,
        ricci,
        scalar,
        estimated_error,
        point: s.clone(),
    })
}
