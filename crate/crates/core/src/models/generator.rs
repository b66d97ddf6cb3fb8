use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::statefam::{CVector, Domain, StateFamily, StateVector};

const HERMITIAN_TOL: f64 = 1e-12;

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn check_hermitian(a: &DMatrix<Complex64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let dev = (a - a.adjoint()).camax();
    if dev > HERMITIAN_TOL {
        return Err(Error::InvalidArgument(format!(
            "generator not Hermitian (deviation {dev:.3e})"
        )));
    }
    Ok(())
}

fn is_diagonal(a: &DMatrix<Complex64>) -> bool {
    a.iter().enumerate().all(|(idx, z)| {
        let (r, c) = (idx % a.nrows(), idx / a.nrows());
        r == c || *z == Complex64::new(0.0, 0.0)
    })
}

/// `exp(i sum_j s_j A_j)` for Hermitian generators.
fn exp_i_hermitian(h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, l)),
    ));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex64> {
    let scale = 1.0 / (d as f64).sqrt();
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng)) * scale
    });
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector {
    let v = CVector::from_fn(d, |_, _| Complex64::new(standard_normal(rng), standard_normal(rng)));
    StateVector::new(v).expect("Gaussian vector is nonzero")
}

/// `|psi(s)> = exp(i sum_j s_j A_j) |psi0>`.
#[derive(Debug, Clone)]
pub struct GeneratorFamily {
    generators: Vec<DMatrix<Complex64>>,
    base: StateVector,
    domain: Domain,
    diagonal: bool,
}

impl GeneratorFamily {
    pub fn new(generators: Vec<DMatrix<Complex64>>, base: StateVector) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("need at least one generator".into()));
        }
        for a in &generators {
            check_hermitian(a)?;
            if a.nrows() != base.dim() {
                return Err(Error::DimensionMismatch {
                    expected: base.dim(),
                    got: a.nrows(),
                });
            }
        }
        let diagonal = generators.iter().all(is_diagonal);
        let domain = Domain::unbounded(generators.len());
        Ok(Self {
            generators,
            base,
            domain,
            diagonal,
        })
    }

    /// Diagonal generators with entries uniform in `[-1, 1]`.
    pub fn commuting_random<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Self {
        let generators = (0..n)
            .map(|_| {
                DMatrix::from_diagonal(&CVector::from_fn(d, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..=1.0), 0.0)
                }))
            })
            .collect();
        let base = random_state(d, rng);
        Self::new(generators, base).expect("valid by construction")
    }

    /// Dense Hermitian generators with Gaussian entries.
    pub fn noncommuting_random<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Self {
        let generators = (0..n).map(|_| random_hermitian(d, rng)).collect();
        let base = random_state(d, rng);
        Self::new(generators, base).expect("valid by construction")
    }

    pub fn generators(&self) -> &[DMatrix<Complex64>] {
        &self.generators
    }

    pub fn base(&self) -> &StateVector {
        &self.base
    }

    pub fn is_commuting(&self) -> bool {
        self.diagonal
    }

    fn hamiltonian(&self, s: &[f64]) -> DMatrix<Complex64> {
        let d = self.base.dim();
        self.generators
            .iter()
            .zip(s)
            .fold(DMatrix::zeros(d, d), |acc, (a, &x)| acc + a * Complex64::new(x, 0.0))
    }
}

impl StateFamily for GeneratorFamily {
    fn param_dim(&self) -> usize {
        self.generators.len()
    }

    fn hilbert_dim(&self) -> usize {
        self.base.dim()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        let psi0 = self.base.amplitudes();
        if self.diagonal {
            let d = psi0.len();
            return Ok(CVector::from_fn(d, |i, _| {
                let phase: f64 = self.generators.iter().zip(s).map(|(a, &x)| a[(i, i)].re * x).sum();
                psi0[i] * Complex64::from_polar(1.0, phase)
            }));
        }
        Ok(exp_i_hermitian(&self.hamiltonian(s)) * psi0)
    }
}

/// A parametrized orthonormal basis `U(s) = exp(i sum_j s_j H_j)`.
#[derive(Debug, Clone)]
pub struct UnitaryFamily {
    generators: Vec<DMatrix<Complex64>>,
    domain: Domain,
}

impl UnitaryFamily {
    pub fn new(generators: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let d = generators
            .first()
            .ok_or_else(|| Error::InvalidArgument("need at least one generator".into()))?
            .nrows();
        for h in &generators {
            check_hermitian(h)?;
            if h.nrows() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: h.nrows(),
                });
            }
        }
        let domain = Domain::unbounded(generators.len());
        Ok(Self { generators, domain })
    }

    pub fn random<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Self {
        Self::new((0..n).map(|_| random_hermitian(d, rng)).collect()).expect("valid by construction")
    }

    pub fn generators(&self) -> &[DMatrix<Complex64>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators[0].nrows()
    }

    pub fn param_dim(&self) -> usize {
        self.generators.len()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Columns are the basis states.
    pub fn unitary(&self, s: &[f64]) -> Result<DMatrix<Complex64>> {
        if s.len() != self.generators.len() {
            return Err(Error::DimensionMismatch {
                expected: self.generators.len(),
                got: s.len(),
            });
        }
        let d = self.dim();
        let h = self
            .generators
            .iter()
            .zip(s)
            .fold(DMatrix::zeros(d, d), |acc, (a, &x)| acc + a * Complex64::new(x, 0.0));
        Ok(exp_i_hermitian(&h))
    }
}
