//! Finite-difference schemes and Richardson extrapolation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Central-difference scheme with optional Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FDScheme {
    step: f64,
    richardson: bool,
}

impl FDScheme {
    pub const MIN_STEP: f64 = 1e-6;
    pub const MAX_STEP: f64 = 1e-1;

    pub fn new(step: f64, richardson: bool) -> Result<Self> {
        if !(Self::MIN_STEP..=Self::MAX_STEP).contains(&step) {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step {step} outside [1e-6, 1e-1]"
            )));
        }
        Ok(Self { step, richardson })
    }

    /// Step used for third-order stencils on the log-overlap, where roundoff
    /// scales as eps / h^3.
    pub fn third_order() -> Self {
        Self {
            step: 1e-2,
            richardson: true,
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn richardson(&self) -> bool {
        self.richardson
    }

    pub fn with_step(self, step: f64) -> Result<Self> {
        Self::new(step, self.richardson)
    }
}

impl Default for FDScheme {
    fn default() -> Self {
        Self {
            step: 1e-3,
            richardson: true,
        }
    }
}

/// Values that can be linearly combined by the extrapolation step.
pub trait FdValue: Sized {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self;
    fn dist(a: &Self, b: &Self) -> f64;
}

impl FdValue for f64 {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a * wa + b * wb
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        (a - b).abs()
    }
}

impl FdValue for Complex64 {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a * wa + b * wb
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        (a - b).norm()
    }
}

impl FdValue for Vec<f64> {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a.iter().zip(b).map(|(x, y)| x * wa + y * wb).collect()
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

impl FdValue for DVector<Complex64> {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a.zip_map(b, |x, y| x * wa + y * wb)
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }
}

impl FdValue for DMatrix<Complex64> {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a.zip_map(b, |x, y| x * wa + y * wb)
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
    }
}

impl FdValue for DMatrix<f64> {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a.zip_map(b, |x, y| x * wa + y * wb)
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        a.iter().zip(b.iter()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }
}

impl FdValue for Tensor3<f64> {
    fn lin(a: &Self, wa: f64, b: &Self, wb: f64) -> Self {
        a.zip_map(b, |x, y| x * wa + y * wb)
    }
    fn dist(a: &Self, b: &Self) -> f64 {
        a.max_abs_diff(b)
    }
}

/// Evaluates a second-order accurate difference quotient at `h` and `h/2`
/// and returns the extrapolated value with the error estimate
/// `|D(h) - D(h/2)| / 15`. Without extrapolation the coarse value is
/// returned and the error is `|D(h) - D(h/2)| / 3`.
pub fn extrapolate<T: FdValue>(scheme: &FDScheme, mut quotient: impl FnMut(f64) -> Result<T>) -> Result<(T, f64)> {
    let h = scheme.step();
    let coarse = quotient(h)?;
    let fine = quotient(h / 2.0)?;
    let diff = T::dist(&coarse, &fine);
    if scheme.richardson() {
        Ok((T::lin(&fine, 4.0 / 3.0, &coarse, -1.0 / 3.0), diff / 15.0))
    } else {
        Ok((coarse, diff / 3.0))
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_bounds() {
        assert!(FDScheme::new(1e-7, true).is_err());
        assert!(FDScheme::new(0.2, true).is_err());
        assert!(FDScheme::new(1e-3, false).is_ok());
    }

    #[test]
    fn richardson_is_fourth_order() {
        let f = |x: f64| x.sin();
        let x0 = 0.7;
        let quotient = |h: f64| Ok((f(x0 + h) - f(x0 - h)) / (2.0 * h));
        let err = |h: f64| {
            let s = FDScheme::new(h, true).unwrap();
            (extrapolate(&s, quotient).unwrap().0 - x0.cos()).abs()
        };
        let ratio = err(0.08) / err(0.04);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
