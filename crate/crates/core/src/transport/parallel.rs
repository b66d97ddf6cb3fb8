use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{second_kind, MetricField};
use crate::statefam::ParameterPoint;
use crate::tensor::Tensor3;

/// `dV^i = -Gamma^i_jk V^j ds^k` along the path, midpoint rule.
///
/// `gamma` returns second-kind symbols laid out as `(l, i, j)`.
pub fn transport_vector<G>(mut gamma: G, path: &super::Path, v0: &DVector<f64>) -> Result<Vec<DVector<f64>>>
where
    G: FnMut(&ParameterPoint) -> Result<Tensor3<f64>>,
{
    let n = path.dim();
    if v0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v0.len(),
        });
    }
    let rate = |g: &Tensor3<f64>, v: &DVector<f64>, ds: &[f64]| {
        DVector::from_fn(n, |i, _| {
            let mut acc = 0.0;
            for j in 0..n {
                for (k, dk) in ds.iter().enumerate() {
                    acc += g[(i, j, k)] * v[j] * dk;
                }
            }
            -acc
        })
    };
    let samples = path.samples();
    let mut out = Vec::with_capacity(samples.len());
    out.push(v0.clone());
    let mut g_here = gamma(&samples[0])?;
    for w in samples.windows(2) {
        let v = out.last().expect("nonempty");
        let ds: Vec<f64> = w[1].coords().iter().zip(w[0].coords()).map(|(b, a)| b - a).collect();
        let mid = ParameterPoint::new(
            w[0].coords()
                .iter()
                .zip(w[1].coords())
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        )?;
        let v_half = v + rate(&g_here, v, &ds) * 0.5;
        let g_mid = gamma(&mid)?;
        let next = v + rate(&g_mid, &v_half, &ds);
        check_finite(&next)?;
        out.push(next);
        g_here = gamma(&w[1])?;
    }
    Ok(out)
}

fn check_finite(v: &DVector<f64>) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("transported vector".into()))
    }
}

/// Transport in the Levi-Civita connection of a metric field.
#[derive(Debug, Clone)]
pub struct Transported {
    pub vectors: Vec<DVector<f64>>,
    /// `|g(V,V) - g(V0,V0)| / g(V0,V0)` at the end of the path.
    pub norm_drift: f64,
}

pub fn transport_in_metric<M: MetricField + ?Sized>(
    metric: &M,
    path: &super::Path,
    v0: &DVector<f64>,
) -> Result<Transported> {
    let vectors = transport_vector(|s| second_kind(metric, s), path, v0)?;
    let g0 = metric.metric(path.first())?;
    let g1 = metric.metric(path.last())?;
    let last = vectors.last().expect("nonempty");
    let n0 = v0.dot(&(&g0 * v0));
    let n1 = last.dot(&(&g1 * last));
    if n0 <= 0.0 {
        return Err(Error::InvalidArgument("initial vector has zero metric norm".into()));
    }
    Ok(Transported {
        norm_drift: (n1 - n0).abs() / n0,
        vectors,
    })
}

/// Signed angle from `v0` to `v1` in a `g`-orthonormal frame of a 2D
/// tangent space, wrapped to `(-pi, pi]`.
pub fn holonomy_angle(g: &DMatrix<f64>, v0: &DVector<f64>, v1: &DVector<f64>) -> Result<f64> {
    if g.nrows() != 2 || v0.len() != 2 || v1.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.nrows().max(v0.len()).max(v1.len()),
        });
    }
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularMetric(g.determinant()))?;
    let lt = chol.l().transpose();
    let (a, b) = (&lt * v0, &lt * v1);
    Ok(wrap_angle((a[0] * b[1] - a[1] * b[0]).atan2(a.dot(&b))))
}

/// Wraps to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FnMetric;
    use crate::transport::Path;

    fn sphere() -> FnMetric<impl Fn(&[f64]) -> DMatrix<f64> + Sync> {
        FnMetric::new(2, |s: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s[0].sin().powi(2)])
        })
    }

    #[test]
    fn flat_metric_leaves_vector_unchanged() {
        let flat = FnMetric::new(2, |_: &[f64]| DMatrix::identity(2, 2));
        let path = Path::circle([0.3, 0.1], 0.5, 64).unwrap();
        let v0 = DVector::from_vec(vec![0.2, -1.0]);
        let t = transport_in_metric(&flat, &path, &v0).unwrap();
        assert!((t.vectors.last().unwrap() - &v0).norm() < 1e-10);
    }

    #[test]
    fn sphere_latitude_holonomy() {
        let theta0 = PI / 3.0;
        let metric = sphere();
        let path = Path::latitude(theta0, 400).unwrap();
        let v0 = DVector::from_vec(vec![1.0, 0.0]);
        let t = transport_in_metric(&metric, &path, &v0).unwrap();
        let g = metric.metric(path.last()).unwrap();
        let angle = holonomy_angle(&g, &v0, t.vectors.last().unwrap()).unwrap();
        let expected = wrap_angle(2.0 * PI * (1.0 - theta0.cos()));
        assert!(
            wrap_angle(angle.abs() - expected.abs()).abs() < 1e-4,
            "{angle} vs {expected}"
        );
        assert!(t.norm_drift < 1e-4);
    }
}
