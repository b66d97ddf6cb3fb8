use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::QuantumGeometricTensor;
use crate::models::spec::{GroupTag, ModelSpec};
use crate::statefam::ParameterPoint;

fn casimir(spec: &ModelSpec) -> Complex64 {
    let j = spec.j();
    j * (j + 1.0)
}

/// Closed-form `C2` at `s`. Covers every series, including the ones without
/// a numerical construction.
pub fn analytic_c2(spec: &ModelSpec, s: &[f64]) -> Result<DMatrix<Complex64>> {
    if s.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: s.len(),
        });
    }
    spec.validate()?;
    let m = spec.m();
    let i = Complex64::i();
    let c2 = match spec.group() {
        GroupTag::WeylHeisenberg => {
            let d = Complex64::new(2.0 * m + 1.0, 0.0);
            DMatrix::from_row_slice(2, 2, &[d, i, -i, d])
        }
        GroupTag::SU2 | GroupTag::SU11 => {
            let (x, f) = if spec.group() == GroupTag::SU2 {
                (casimir(spec).re - m * m, s[0].sin())
            } else {
                (-casimir(spec).re + m * m, s[0].sinh())
            };
            let half = 0.5;
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::new(half * x, 0.0),
                    -i * (half * m * f),
                    i * (half * m * f),
                    Complex64::new(half * x * f * f, 0.0),
                ],
            )
        }
    };
    Ok(c2)
}

pub fn analytic_qgt(spec: &ModelSpec, s: &ParameterPoint) -> Result<QuantumGeometricTensor> {
    let c2 = analytic_c2(spec, s.coords())?;
    QuantumGeometricTensor::from_c2(c2, s.clone(), 0.0)
}

/// Closed-form determinant of `C2`, in factored form.
pub fn analytic_det(spec: &ModelSpec, s: &[f64]) -> Result<f64> {
    if s.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: s.len(),
        });
    }
    spec.validate()?;
    let m = spec.m();
    let c = casimir(spec).re;
    let factor = 0.25 * (c - m * (m + 1.0)) * (c - m * (m - 1.0));
    Ok(match spec.group() {
        GroupTag::WeylHeisenberg => (2.0 * m + 1.0).powi(2) - 1.0,
        GroupTag::SU2 => factor * s[0].sin().powi(2),
        GroupTag::SU11 => factor * s[0].sinh().powi(2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spec::Su11Series;

    #[test]
    fn su11_det_example() {
        let spec = ModelSpec::su11(Su11Series::Dplus, -1.0, 2.0, 128);
        let det = analytic_det(&spec, &[1.0, 0.3]).unwrap();
        assert!((det - 3.0 * 1f64.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn factored_det_matches_matrix_det() {
        let spec = ModelSpec::su2(2.5, 0.5);
        let s = [0.8, 1.9];
        let c2 = analytic_c2(&spec, &s).unwrap();
        let det = (c2[(0, 0)] * c2[(1, 1)] - c2[(0, 1)] * c2[(1, 0)]).re;
        assert!((det - analytic_det(&spec, &s).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn extremal_su2_state_is_trivial() {
        let spec = ModelSpec::su2(0.5, 0.5);
        let s = [std::f64::consts::FRAC_PI_3, 0.0];
        let c2 = analytic_c2(&spec, &s).unwrap();
        assert!((c2[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!((c2[(1, 1)].re - 3.0 / 16.0).abs() < 1e-15);
        assert!((c2[(0, 1)].im + 3f64.sqrt() / 8.0).abs() < 1e-15);
        assert!(analytic_det(&spec, &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn continuous_series_has_positive_det() {
        let spec = ModelSpec::Su11 {
            series: Su11Series::Ck12,
            j: Complex64::new(-0.5, 0.8),
            m: 1.5,
            truncation: 64,
        };
        assert!(analytic_det(&spec, &[0.7, 0.0]).unwrap() > 0.0);
        assert!(analytic_qgt(&spec, &ParameterPoint::new(vec![0.7, 0.0]).unwrap()).is_ok());
    }
}
