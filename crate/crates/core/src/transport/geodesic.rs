use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::geometry::{second_kind, MetricField};
use crate::statefam::ParameterPoint;
use crate::transport::Path;

/// Largest allowed arc-length step.
pub const MAX_GEODESIC_STEP: f64 = 0.1;
/// Allowed drift of the unit speed `g(v, v)`.
pub const SPEED_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Geodesic {
    pub path: Path,
    pub velocities: Vec<DVector<f64>>,
    /// Largest `|g(v, v) - 1|` along the curve.
    pub speed_drift: f64,
}

/// Unit-speed geodesic from `s0` along `v0`, `steps` fixed RK4 steps over
/// `arc_length`.
pub fn geodesic<M: MetricField + ?Sized>(
    metric: &M,
    s0: &ParameterPoint,
    v0: &DVector<f64>,
    arc_length: f64,
    steps: usize,
) -> Result<Geodesic> {
    let n = metric.dim();
    if s0.dim() != n || v0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if s0.dim() != n { s0.dim() } else { v0.len() },
        });
    }
    if !(arc_length.is_finite() && arc_length > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "arc length {arc_length} must be positive"
        )));
    }
    if steps + 1 < super::path::MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {} steps",
            super::path::MIN_SAMPLES - 1
        )));
    }
    let h = arc_length / steps as f64;
    if h > MAX_GEODESIC_STEP {
        return Err(Error::StepSizeTooLarge(format!(
            "step {h:.3e} exceeds {MAX_GEODESIC_STEP}"
        )));
    }
    let g0 = metric.metric(s0)?;
    let speed0 = v0.dot(&(&g0 * v0));
    if speed0 <= 0.0 {
        return Err(Error::InvalidArgument("initial velocity has zero metric norm".into()));
    }
    let v = v0 / speed0.sqrt();

    let accel = |s: &DVector<f64>, v: &DVector<f64>| -> Result<DVector<f64>> {
        let p = ParameterPoint::new(s.iter().copied().collect())?;
        let gamma = second_kind(metric, &p)?;
        Ok(DVector::from_fn(n, |l, _| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += gamma[(l, i, j)] * v[i] * v[j];
                }
            }
            -acc
        }))
    };

    let mut s = DVector::from_column_slice(s0.coords());
    let mut v = v;
    let mut points = vec![s0.clone()];
    let mut velocities = vec![v.clone()];
    for _ in 0..steps {
        let k1s = v.clone();
        let k1v = accel(&s, &v)?;
        let k2s = &v + &k1v * (h / 2.0);
        let k2v = accel(&(&s + &k1s * (h / 2.0)), &k2s)?;
        let k3s = &v + &k2v * (h / 2.0);
        let k3v = accel(&(&s + &k2s * (h / 2.0)), &k3s)?;
        let k4s = &v + &k3v * h;
        let k4v = accel(&(&s + &k3s * h), &k4s)?;
        s += (k1s + k2s * 2.0 + k3s * 2.0 + k4s) * (h / 6.0);
        v += (k1v + k2v * 2.0 + k3v * 2.0 + k4v) * (h / 6.0);
        if s.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("geodesic state".into()));
        }
        points.push(ParameterPoint::new(s.iter().copied().collect())?);
        velocities.push(v.clone());
    }
    let mut speed_drift = 0.0_f64;
    for (p, v) in points.iter().zip(&velocities) {
        let g = metric.metric(p)?;
        speed_drift = speed_drift.max((v.dot(&(&g * v)) - 1.0).abs());
    }
    if speed_drift > SPEED_TOLERANCE {
        return Err(Error::StepSizeTooLarge(format!(
            "speed drift {speed_drift:.3e} exceeds {SPEED_TOLERANCE}"
        )));
    }
    Ok(Geodesic {
        path: Path::new(points)?,
        velocities,
        speed_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::FnMetric;
    use nalgebra::DMatrix;
    use std::f64::consts::PI;

    #[test]
    fn flat_geodesic_is_straight() {
        let flat = FnMetric::new(2, |_: &[f64]| DMatrix::identity(2, 2));
        let s0 = ParameterPoint::new(vec![0.0, 1.0]).unwrap();
        let g = geodesic(&flat, &s0, &DVector::from_vec(vec![3.0, 4.0]), 1.0, 20).unwrap();
        let end = g.path.last().coords();
        assert!((end[0] - 0.6).abs() < 1e-12 && (end[1] - 1.8).abs() < 1e-12);
    }

    #[test]
    fn sphere_meridian_reaches_pole() {
        let sphere = FnMetric::new(2, |s: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s[0].sin().powi(2)])
        });
        let s0 = ParameterPoint::new(vec![PI / 2.0, 0.3]).unwrap();
        let g = geodesic(&sphere, &s0, &DVector::from_vec(vec![-1.0, 0.0]), PI / 2.0 - 0.2, 100).unwrap();
        let end = g.path.last().coords();
        assert!((end[0] - 0.2).abs() < 1e-4);
        assert!((end[1] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn oversized_step_rejected() {
        let flat = FnMetric::new(2, |_: &[f64]| DMatrix::identity(2, 2));
        let s0 = ParameterPoint::new(vec![0.0, 0.0]).unwrap();
        let r = geodesic(&flat, &s0, &DVector::from_vec(vec![1.0, 0.0]), 10.0, 20);
        assert!(matches!(r, Err(Error::StepSizeTooLarge(_))));
    }
}
