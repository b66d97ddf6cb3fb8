use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::models::UnitaryFamily;
use crate::statefam::{evaluate, Domain, ParameterPoint, StateFamily};

/// Gram-matrix tolerance for an orthonormal set.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// An ordered orthonormal set of `rank` states at each parameter point.
pub trait BasisFamily: Send + Sync {
    fn param_dim(&self) -> usize;
    fn hilbert_dim(&self) -> usize;
    fn rank(&self) -> usize;
    fn domain(&self) -> &Domain;
    /// `hilbert_dim x rank` matrix whose columns are the states.
    fn basis(&self, s: &[f64]) -> Result<DMatrix<Complex64>>;
}

impl BasisFamily for UnitaryFamily {
    fn param_dim(&self) -> usize {
        UnitaryFamily::param_dim(self)
    }
    fn hilbert_dim(&self) -> usize {
        self.dim()
    }
    fn rank(&self) -> usize {
        self.dim()
    }
    fn domain(&self) -> &Domain {
        UnitaryFamily::domain(self)
    }
    fn basis(&self, s: &[f64]) -> Result<DMatrix<Complex64>> {
        self.unitary(s)
    }
}

/// A state family seen as a rank-one basis.
pub struct SingleState<F>(pub F);

impl<F: StateFamily> BasisFamily for SingleState<F> {
    fn param_dim(&self) -> usize {
        self.0.param_dim()
    }
    fn hilbert_dim(&self) -> usize {
        self.0.hilbert_dim()
    }
    fn rank(&self) -> usize {
        1
    }
    fn domain(&self) -> &Domain {
        self.0.domain()
    }
    fn basis(&self, s: &[f64]) -> Result<DMatrix<Complex64>> {
        let psi = evaluate(&self.0, &ParameterPoint::new(s.to_vec())?)?;
        Ok(DMatrix::from_column_slice(psi.dim(), 1, psi.amplitudes().as_slice()))
    }
}

/// Selected columns of another basis.
pub struct Projected<B> {
    inner: B,
    columns: Vec<usize>,
}

impl<B: BasisFamily> Projected<B> {
    pub fn new(inner: B, columns: Vec<usize>) -> Result<Self> {
        if columns.is_empty() || columns.iter().any(|&c| c >= inner.rank()) {
            return Err(Error::InvalidArgument(format!(
                "columns {columns:?} not in 0..{}",
                inner.rank()
            )));
        }
        Ok(Self { inner, columns })
    }
}

impl<B: BasisFamily> BasisFamily for Projected<B> {
    fn param_dim(&self) -> usize {
        self.inner.param_dim()
    }
    fn hilbert_dim(&self) -> usize {
        self.inner.hilbert_dim()
    }
    fn rank(&self) -> usize {
        self.columns.len()
    }
    fn domain(&self) -> &Domain {
        self.inner.domain()
    }
    fn basis(&self, s: &[f64]) -> Result<DMatrix<Complex64>> {
        Ok(self.inner.basis(s)?.select_columns(&self.columns))
    }
}

fn checked_basis<B: BasisFamily + ?Sized>(basis: &B, s: &[f64]) -> Result<DMatrix<Complex64>> {
    basis.domain().check(s)?;
    let b = basis.basis(s)?;
    if b.nrows() != basis.hilbert_dim() || b.ncols() != basis.rank() {
        return Err(Error::DimensionMismatch {
            expected: basis.hilbert_dim() * basis.rank(),
            got: b.nrows() * b.ncols(),
        });
    }
    let p = b.ncols();
    let dev = (b.adjoint() * &b - DMatrix::identity(p, p)).camax();
    if dev > ORTHONORMAL_TOL {
        return Err(Error::NonOrthonormalBasis(dev));
    }
    Ok(b)
}

fn connection_at<B: BasisFamily + ?Sized>(
    basis: &B,
    s: &[f64],
    k: usize,
    scheme: &FDScheme,
) -> Result<(DMatrix<Complex64>, f64)> {
    let b = checked_basis(basis, s)?;
    let (db, err) = extrapolate(scheme, |h| {
        let mut plus = s.to_vec();
        let mut minus = s.to_vec();
        plus[k] += h;
        minus[k] -= h;
        Ok((checked_basis(basis, &plus)? - checked_basis(basis, &minus)?) / Complex64::new(2.0 * h, 0.0))
    })?;
    Ok((b.adjoint() * db, err))
}

/// `G_k[lambda, iota] = <lambda(s)| d_k iota(s)>`, anti-Hermitian for an
/// orthonormal set.
pub fn hilbert_connection<B: BasisFamily + ?Sized>(
    basis: &B,
    s: &ParameterPoint,
    k: usize,
) -> Result<DMatrix<Complex64>> {
    if s.dim() != basis.param_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.param_dim(),
            got: s.dim(),
        });
    }
    if k >= s.dim() {
        return Err(Error::InvalidArgument(format!("index {k} out of range")));
    }
    Ok(connection_at(basis, s.coords(), k, &FDScheme::default())?.0)
}

/// Curvature of the connection restricted to the retained states.
#[derive(Debug, Clone)]
pub struct HilbertCurvature {
    n: usize,
    /// `r_tilde[l * n + k]` is the `rank x rank` matrix `R^lambda_{mu l k}`.
    r_tilde: Vec<DMatrix<Complex64>>,
    /// `contraction[(l, k)] = sum_lambda R^lambda_{lambda l k}`.
    pub contraction: DMatrix<Complex64>,
    pub estimated_error: f64,
}

impl HilbertCurvature {
    pub fn component(&self, l: usize, k: usize) -> &DMatrix<Complex64> {
        &self.r_tilde[l * self.n + k]
    }

    pub fn param_dim(&self) -> usize {
        self.n
    }

    pub fn max_abs(&self) -> f64 {
        self.r_tilde.iter().fold(0.0, |m, r| m.max(r.camax()))
    }

    /// Largest `|R_lk + R_kl|` over components.
    pub fn antisymmetry_residual(&self) -> f64 {
        let mut res = 0.0_f64;
        for l in 0..self.n {
            for k in 0..self.n {
                res = res.max((self.component(l, k) + self.component(k, l)).camax());
            }
        }
        res
    }
}

/// `R_lk = d_k G_l - d_l G_k + G_k G_l - G_l G_k`; sums run over the
/// retained states only, with indices lowered by the Hilbert-space metric.
pub fn hilbert_riemann<B: BasisFamily + ?Sized>(basis: &B, s: &ParameterPoint) -> Result<HilbertCurvature> {
    let n = basis.param_dim();
    if s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: s.dim(),
        });
    }
    let scheme = FDScheme::default();
    let x = s.coords();
    let mut g = Vec::with_capacity(n);
    for l in 0..n {
        g.push(connection_at(basis, x, l, &scheme)?.0);
    }
    // dg[k][l] = d_k G_l
    let mut dg = vec![Vec::with_capacity(n); n];
    let mut err = 0.0_f64;
    for (k, row) in dg.iter_mut().enumerate() {
        for l in 0..n {
            let (d, e) = extrapolate(&scheme, |h| {
                let plus = connection_at(basis, s.shifted(k, h).coords(), l, &scheme)?.0;
                let minus = connection_at(basis, s.shifted(k, -h).coords(), l, &scheme)?.0;
                Ok((plus - minus) / Complex64::new(2.0 * h, 0.0))
            })?;
            err = err.max(e);
            row.push(d);
        }
    }
    let p = basis.rank();
    let mut r_tilde = Vec::with_capacity(n * n);
    let mut contraction = DMatrix::zeros(n, n);
    for l in 0..n {
        for k in 0..n {
            let r = &dg[k][l] - &dg[l][k] + &g[k] * &g[l] - &g[l] * &g[k];
            contraction[(l, k)] = r.trace();
            r_tilde.push(r);
        }
    }
    debug_assert_eq!(r_tilde[0].nrows(), p);
    Ok(HilbertCurvature {
        n,
        r_tilde,
        contraction,
        estimated_error: 2.0 * err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_basis_has_zero_connection() {
        let fam = UnitaryFamily::new(vec![DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)]).unwrap();
        let s = ParameterPoint::new(vec![0.2, 0.4]).unwrap();
        assert!(hilbert_connection(&fam, &s, 1).unwrap().norm() < 1e-14);
    }

    #[test]
    fn full_basis_connection_is_anti_hermitian_and_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fam = UnitaryFamily::random(4, 2, &mut rng);
        let s = ParameterPoint::new(vec![0.3, -0.5]).unwrap();
        let g = hilbert_connection(&fam, &s, 0).unwrap();
        assert!((&g + g.adjoint()).camax() < 1e-8);
        let r = hilbert_riemann(&fam, &s).unwrap();
        assert!(r.max_abs() < 1e-6, "{}", r.max_abs());
    }

    #[test]
    fn projection_rejects_bad_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(Projected::new(UnitaryFamily::random(3, 2, &mut rng), vec![3]).is_err());
    }
}
