use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::models::family::ModelFamily;

/// Residual above which `D^+ dD` is not spanned by the algebra.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-6;

/// `D^+ d_k D = a[k,0] J+ + a[k,1] J- + stability[k,0] Jz + stability[k,1] I`,
/// with `a+, a, n, I` in place of the ladder operators for Glauber states.
#[derive(Debug, Clone)]
pub struct CosetDecomposition {
    pub a_matrix: DMatrix<Complex64>,
    pub stability: DMatrix<Complex64>,
    /// Largest entrywise misfit over the trusted block, relative to the
    /// largest entry of `D^+ dD` there (or 1).
    pub residual: f64,
}

impl CosetDecomposition {
    /// `C2` rebuilt from the coefficients and the base-state covariance of
    /// the generators.
    pub fn propagated_c2(&self, family: &ModelFamily) -> DMatrix<Complex64> {
        let alg = family.algebra();
        let d = alg.dim();
        let ops = [
            alg.j_plus.clone(),
            alg.j_minus.clone(),
            alg.j_z.clone(),
            DMatrix::identity(d, d),
        ];
        let base = family.base_index();
        let cols: Vec<_> = ops.iter().map(|o| o.column(base).clone_owned()).collect();
        let mean: Vec<Complex64> = cols.iter().map(|c| c[base]).collect();
        let cov = DMatrix::from_fn(4, 4, |l, m| cols[l].dotc(&cols[m]) - mean[l].conj() * mean[m]);
        let n = self.a_matrix.nrows();
        let coef = DMatrix::from_fn(n, 4, |k, l| {
            if l < 2 {
                self.a_matrix[(k, l)]
            } else {
                self.stability[(k, l - 2)]
            }
        });
        coef.conjugate() * cov * coef.transpose()
    }
}

/// Expands `D^+ d_k D` over the algebra by least squares on the block of
/// basis states unaffected by truncation.
pub fn coset_derivative(family: &ModelFamily, s: &[f64]) -> Result<CosetDecomposition> {
    let n = 2;
    if s.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.len(),
        });
    }
    let d0 = family.displacement_matrix(s)?;
    let alg = family.algebra();
    let d = alg.dim();
    let block = family.trusted_block();
    let ops = [
        alg.j_plus.clone(),
        alg.j_minus.clone(),
        alg.j_z.clone(),
        DMatrix::<Complex64>::identity(d, d),
    ];
    let rows = block.len() * block.len();
    let design = DMatrix::from_fn(rows, 4, |r, c| ops[c][(block[r / block.len()], block[r % block.len()])]);
    let svd = design.clone().svd(true, true);
    let scheme = FDScheme::default();
    let mut a_matrix = DMatrix::zeros(n, 2);
    let mut stability = DMatrix::zeros(n, 2);
    let mut residual = 0.0_f64;
    for k in 0..n {
        let (dd, _) = extrapolate(&scheme, |h| {
            let mut plus = s.to_vec();
            let mut minus = s.to_vec();
            plus[k] += h;
            minus[k] -= h;
            Ok(
                (family.displacement_matrix(&plus)? - family.displacement_matrix(&minus)?)
                    / Complex64::new(2.0 * h, 0.0),
            )
        })?;
        let m = d0.adjoint() * dd;
        let target = DMatrix::from_fn(rows, 1, |r, _| m[(block[r / block.len()], block[r % block.len()])]);
        let coef = svd
            .solve(&target, 1e-12)
            .map_err(|e| Error::InvalidArgument(format!("coset least squares: {e}")))?;
        let misfit = &design * &coef - &target;
        let scale = target.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        residual = residual.max(misfit.iter().fold(0.0, |acc: f64, z| acc.max(z.norm())) / scale);
        a_matrix[(k, 0)] = coef[0];
        a_matrix[(k, 1)] = coef[1];
        stability[(k, 0)] = coef[2];
        stability[(k, 1)] = coef[3];
    }
    if residual > DECOMPOSITION_TOLERANCE {
        return Err(Error::DecompositionResidual(residual));
    }
    Ok(CosetDecomposition {
        a_matrix,
        stability,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::analytic::analytic_c2;
    use crate::models::family::build_model;
    use crate::models::spec::{ModelSpec, Su11Series};

    fn close(z: Complex64, re: f64, im: f64) -> bool {
        (z - Complex64::new(re, im)).norm() < 1e-7
    }

    #[test]
    fn su2_theta_coefficients_at_zero_phi() {
        let f = build_model(&ModelSpec::su2(1.5, 0.5)).unwrap();
        let c = coset_derivative(&f, &[0.9, 0.0]).unwrap();
        assert!(close(c.a_matrix[(0, 0)], 0.5, 0.0), "{}", c.a_matrix);
        assert!(close(c.a_matrix[(0, 1)], -0.5, 0.0), "{}", c.a_matrix);
    }

    #[test]
    fn su11_rho_coefficients_at_zero_phi() {
        let f = build_model(&ModelSpec::su11(Su11Series::Dplus, -1.0, 2.0, 128)).unwrap();
        let c = coset_derivative(&f, &[0.8, 0.0]).map_err(|e| e.to_string()).unwrap();
        assert!(close(c.a_matrix[(0, 0)], -0.5, 0.0), "{}", c.a_matrix);
        assert!(close(c.a_matrix[(0, 1)], 0.5, 0.0), "{}", c.a_matrix);
    }

    #[test]
    fn glauber_coefficients() {
        let f = build_model(&ModelSpec::glauber(1, 128)).unwrap();
        let c = coset_derivative(&f, &[0.3, 0.2]).unwrap();
        assert!(close(c.a_matrix[(0, 0)], 1.0, 0.0));
        assert!(close(c.a_matrix[(0, 1)], -1.0, 0.0));
        assert!(close(c.stability[(0, 1)], 0.0, -0.2));
    }

    #[test]
    fn propagated_c2_matches_closed_form() {
        let spec = ModelSpec::su11(Su11Series::Dminus, -1.5, -2.5, 128);
        let f = build_model(&spec).unwrap();
        let s = [0.7, 1.3];
        let c = coset_derivative(&f, &s).unwrap();
        let diff = (c.propagated_c2(&f) - analytic_c2(&spec, &s).unwrap()).norm();
        assert!(diff < 1e-7, "{diff}");
    }
}
