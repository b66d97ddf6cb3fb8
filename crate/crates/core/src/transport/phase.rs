use crate::error::{Error, Result};
use crate::fd::gauss_legendre;
use crate::geometry::{berry_connection, qgt, QgtEngine};
use crate::statefam::{evaluate, ParameterPoint, StateFamily, StateVector};
use crate::transport::parallel::wrap_angle;
use crate::transport::Path;

/// Consecutive overlaps below this magnitude mean the loop is undersampled.
pub const MIN_STEP_OVERLAP: f64 = 0.99;
/// A loop whose end state matches its start state to this tolerance is
/// closed even when its coordinates are not.
pub const RAY_CLOSURE_TOL: f64 = 1e-10;

/// Geometric phase around a closed loop, wrapped to `(-pi, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPhase {
    /// Trapezoid rule for the integral of `beta . ds`, plus the phase
    /// mismatch between the end and start states.
    pub integral: f64,
    /// `arg prod <Psi_i|Psi_i+1>` closed back to the first state.
    pub discrete: f64,
    /// Smallest `|<Psi_i|Psi_i+1>|` along the loop.
    pub min_overlap: f64,
}

pub fn berry_phase_loop<F: StateFamily + ?Sized>(family: &F, path: &Path) -> Result<LoopPhase> {
    let samples = path.samples();
    let states: Vec<StateVector> = samples.iter().map(|s| evaluate(family, s)).collect::<Result<_>>()?;
    let first = &states[0];
    let last = states.last().expect("nonempty");
    let closing = last.inner(first);
    if !path.is_closed() && (1.0 - closing.norm()) > RAY_CLOSURE_TOL {
        return Err(Error::OpenPath(path.closure_gap()));
    }
    let mut min_overlap = f64::INFINITY;
    let mut discrete = closing.arg();
    for w in states.windows(2) {
        let z = w[0].inner(&w[1]);
        min_overlap = min_overlap.min(z.norm());
        discrete += z.arg();
    }
    if min_overlap < MIN_STEP_OVERLAP {
        return Err(Error::Undersampled(min_overlap));
    }
    let betas: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| berry_connection(family, s).map(|b| b.beta))
        .collect::<Result<_>>()?;
    let mut integral = closing.arg();
    for (i, w) in samples.windows(2).enumerate() {
        for (k, (b, a)) in w[1].coords().iter().zip(w[0].coords()).enumerate() {
            integral += 0.5 * (betas[i][k] + betas[i + 1][k]) * (b - a);
        }
    }
    Ok(LoopPhase {
        integral: wrap_angle(integral),
        discrete: wrap_angle(discrete),
        min_overlap,
    })
}

/// Flux of `2 sigma_01` through `[lo0, hi0] x [lo1, hi1]`, Gauss-Legendre
/// with `order` nodes per axis. Orientation follows `(s0, s1)`.
pub fn sigma_flux<F: StateFamily + ?Sized>(family: &F, lo: [f64; 2], hi: [f64; 2], order: usize) -> Result<f64> {
    if family.param_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: family.param_dim(),
        });
    }
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be positive".into()));
    }
    let (x, w) = gauss_legendre(order);
    let half = [(hi[0] - lo[0]) / 2.0, (hi[1] - lo[1]) / 2.0];
    let mid = [(hi[0] + lo[0]) / 2.0, (hi[1] + lo[1]) / 2.0];
    let mut flux = 0.0;
    for (xa, wa) in x.iter().zip(&w) {
        for (xb, wb) in x.iter().zip(&w) {
            let s = ParameterPoint::new(vec![mid[0] + half[0] * xa, mid[1] + half[1] * xb])?;
            let q = qgt(family, &s, QgtEngine::TangentState)?;
            flux += wa * wb * 2.0 * q.sigma()[(0, 1)];
        }
    }
    Ok(flux * half[0] * half[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, ModelSpec};
    use std::f64::consts::PI;

    #[test]
    fn su2_half_spin_latitude_phase() {
        let f = build_model(&ModelSpec::su2(0.5, 0.5)).unwrap();
        let p = berry_phase_loop(&f, &Path::latitude(PI / 2.0, 128).unwrap()).unwrap();
        assert!(wrap_angle(p.integral - PI).abs() < 1e-6, "{p:?}");
        assert!(wrap_angle(p.discrete - p.integral).abs() < 1e-3, "{p:?}");
    }

    #[test]
    fn tiny_loop_has_tiny_phase() {
        let f = build_model(&ModelSpec::su2(1.0, 0.0)).unwrap();
        let p = berry_phase_loop(&f, &Path::circle([1.0, 0.5], 5e-4, 32).unwrap()).unwrap();
        assert!(p.integral.abs() < 1e-5);
    }

    #[test]
    fn open_loop_rejected() {
        let f = build_model(&ModelSpec::su2(1.0, 0.0)).unwrap();
        let path = Path::from_fn(32, |l| vec![0.5 + l, 0.3]).unwrap();
        assert!(matches!(berry_phase_loop(&f, &path), Err(Error::OpenPath(_))));
    }

    #[test]
    fn coarse_loop_is_undersampled() {
        let f = build_model(&ModelSpec::su2(2.0, 0.0)).unwrap();
        let path = Path::latitude(PI / 2.0, 16).unwrap();
        assert!(matches!(berry_phase_loop(&f, &path), Err(Error::Undersampled(_))));
    }
}
