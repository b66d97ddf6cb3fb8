//! Born-Oppenheimer effective fields for a Hermitian inverse-mass tensor
//! `Q = Q' + i Q''`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fd::{extrapolate, FDScheme};
use crate::geometry::{berry_connection, qgt, quantum_christoffel, QgtEngine, QuantumGeometricTensor};
use crate::statefam::{check_index, ParameterPoint, StateFamily};

/// Tolerance on the imaginary residue of `Phi`.
pub const REALITY_TOL: f64 = 1e-10;
/// Tolerance between the force and the finite-difference gradient of `Phi`.
pub const FORCE_TOL: f64 = 1e-5;

/// `Q = Q' + i Q''`, with `Q'` symmetric positive semidefinite and `Q''`
/// antisymmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseMassTensor {
    q_real: DMatrix<f64>,
    q_imag: DMatrix<f64>,
}

impl InverseMassTensor {
    pub fn new(q_real: DMatrix<f64>, q_imag: DMatrix<f64>) -> Result<Self> {
        let n = q_real.nrows();
        for m in [&q_real, &q_imag] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.ncols().max(m.nrows()),
                });
            }
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("inverse mass tensor".into()));
            }
        }
        if q_real != q_real.transpose() {
            return Err(Error::InvalidArgument("Q' must be symmetric".into()));
        }
        if q_imag != -q_imag.transpose() {
            return Err(Error::InvalidArgument("Q'' must be antisymmetric".into()));
        }
        let scale = q_real.amax().max(1.0);
        let min_eig = q_real.clone().symmetric_eigen().eigenvalues.min();
        if min_eig < -1e-12 * scale {
            return Err(Error::InvalidArgument(format!(
                "Q' must be positive semidefinite (eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Self { q_real, q_imag })
    }

    /// Splits a Hermitian matrix, projecting away rounding asymmetry.
    pub fn from_hermitian(q: &DMatrix<Complex64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                got: q.ncols(),
            });
        }
        let dev = (q - q.adjoint()).camax();
        if dev > 1e-12 * q.camax().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "Q is not Hermitian (deviation {dev:.3e})"
            )));
        }
        let re = q.map(|z| z.re);
        let im = q.map(|z| z.im);
        Self::new((&re + re.transpose()) * 0.5, (&im - im.transpose()) * 0.5)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            q_real: DMatrix::identity(n, n),
            q_imag: DMatrix::zeros(n, n),
        }
    }

    /// `Q' = A A^T / n + I / 10` and `Q'' = scale (B - B^T) / 2`, Gaussian `A, B`.
    pub fn random<R: Rng + ?Sized>(n: usize, imag_scale: f64, rng: &mut R) -> Self {
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q_real = &a * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.1;
        let q_real = (&q_real + q_real.transpose()) * 0.5;
        let q_imag = (&b - b.transpose()) * (0.5 * imag_scale);
        Self::new(q_real, q_imag).expect("valid by construction")
    }

    pub fn dim(&self) -> usize {
        self.q_real.nrows()
    }

    pub fn q_real(&self) -> &DMatrix<f64> {
        &self.q_real
    }

    pub fn q_imag(&self) -> &DMatrix<f64> {
        &self.q_imag
    }

    pub fn complex(&self) -> DMatrix<Complex64> {
        self.q_real.zip_map(&self.q_imag, Complex64::new)
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: n,
            });
        }
        Ok(())
    }
}

/// `Phi = 1/2 sum Q*_jk C2(j;k) = 1/2 sum (Q'_jk g_jk + Q''_jk sigma_jk)`.
pub fn effective_potential(q: &InverseMassTensor, qgt: &QuantumGeometricTensor) -> Result<f64> {
    q.check_dim(qgt.dim())?;
    let complex_form: Complex64 = q
        .complex()
        .iter()
        .zip(qgt.c2().iter())
        .map(|(a, c)| a.conj() * c)
        .sum::<Complex64>()
        * 0.5;
    let real_form = 0.5 * (q.q_real.component_mul(qgt.g()).sum() + q.q_imag.component_mul(qgt.sigma()).sum());
    if complex_form.im.abs() > REALITY_TOL {
        return Err(Error::IdentityViolation {
            what: "imaginary part of Phi".into(),
            deviation: complex_form.im.abs(),
            tolerance: REALITY_TOL,
        });
    }
    let dev = (complex_form.re - real_form).abs();
    let tol = 1e-12 * real_form.abs().max(1.0);
    if dev > tol {
        return Err(Error::IdentityViolation {
            what: "complex and real forms of Phi".into(),
            deviation: dev,
            tolerance: tol,
        });
    }
    Ok(real_form)
}

/// Force at one point with its finite-difference cross-check.
#[derive(Debug, Clone, PartialEq)]
pub struct Force {
    /// `F_l = -Re sum_jk Q_jk [jl;k]_q`.
    pub value: Vec<f64>,
    /// `-d_l Phi` by central differences.
    pub fd_gradient: Vec<f64>,
    pub deviation: f64,
}

/// Contracts the quantum Christoffel symbols with `Q`:
/// `F_l = -sum_jk (Q'_jk Re[jl;k]_q - Q''_jk Im[jl;k]_q) = -d_l Phi`.
pub fn force<F: StateFamily + ?Sized>(q: &InverseMassTensor, family: &F, s: &ParameterPoint) -> Result<Force> {
    let n = family.param_dim();
    q.check_dim(n)?;
    check_index(family, s, 0)?;
    let chris = quantum_christoffel(family, s)?;
    let qc = q.complex();
    let value: Vec<f64> = (0..n)
        .map(|l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += qc[(j, k)] * chris[(j, l, k)];
                }
            }
            -acc.re
        })
        .collect();
    let phi_at = |p: &ParameterPoint| effective_potential(q, &qgt(family, p, QgtEngine::TangentState)?);
    let mut fd_gradient = Vec::with_capacity(n);
    for l in 0..n {
        let (d, _) = extrapolate(&FDScheme::default(), |h| {
            Ok((phi_at(&s.shifted(l, h))? - phi_at(&s.shifted(l, -h))?) / (2.0 * h))
        })?;
        fd_gradient.push(-d);
    }
    let deviation = value
        .iter()
        .zip(&fd_gradient)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    if deviation > FORCE_TOL {
        return Err(Error::IdentityViolation {
            what: "force against -grad Phi".into(),
            deviation,
            tolerance: FORCE_TOL,
        });
    }
    Ok(Force {
        value,
        fd_gradient,
        deviation,
    })
}

/// `-1/2 sum_jk Q*_jk [jl;k]_q` exactly as written in the classical
/// analogy. Kept for comparison: it is complex in general and is not
/// `-grad Phi`.
pub fn force_conjugate_half<F: StateFamily + ?Sized>(
    q: &InverseMassTensor,
    family: &F,
    s: &ParameterPoint,
) -> Result<Vec<Complex64>> {
    let n = family.param_dim();
    q.check_dim(n)?;
    let chris = quantum_christoffel(family, s)?;
    let qc = q.complex();
    Ok((0..n)
        .map(|l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    acc += qc[(j, k)].conj() * chris[(j, l, k)];
                }
            }
            -0.5 * acc
        })
        .collect())
}

/// Fields at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveFields {
    pub point: ParameterPoint,
    pub phi: f64,
    /// Vector potential, equal to the Berry connection.
    pub a_vec: Vec<f64>,
    pub force: Vec<f64>,
}

pub fn effective_fields<F: StateFamily + ?Sized>(
    q: &InverseMassTensor,
    family: &F,
    s: &ParameterPoint,
) -> Result<EffectiveFields> {
    let phi = effective_potential(q, &qgt(family, s, QgtEngine::TangentState)?)?;
    let a_vec = berry_connection(family, s)?.beta;
    let force = force(q, family, s)?.value;
    Ok(EffectiveFields {
        point: s.clone(),
        phi,
        a_vec,
        force,
    })
}

/// `Q = U diag(1/M_r) U^+` and the rotated geometric fields.
#[derive(Debug, Clone)]
pub struct MassDiagonalization {
    pub u: DMatrix<Complex64>,
    /// Eigenvalues `1/M_r` of `Q`.
    pub inv_masses: Vec<f64>,
    /// `sum_jk Re(U_jr U*_kr) g_jk`.
    pub g_tilde: Vec<f64>,
    /// `sum_jk Im(U_jr U*_kr) sigma_jk`.
    pub sigma_tilde: Vec<f64>,
    /// `1/2 sum_r (g_tilde_r + sigma_tilde_r) / M_r`.
    pub phi: f64,
    /// Largest off-diagonal entry of `U^+ Q U`.
    pub off_diagonal: f64,
}

fn is_diagonal(q: &InverseMassTensor) -> bool {
    let n = q.dim();
    q.q_imag.iter().all(|&x| x == 0.0) && (0..n).all(|i| (0..n).all(|j| i == j || q.q_real[(i, j)] == 0.0))
}

pub fn diagonalize_mass(q: &InverseMassTensor, qgt: &QuantumGeometricTensor) -> Result<MassDiagonalization> {
    let n = qgt.dim();
    q.check_dim(n)?;
    let qc = q.complex();
    let (u, inv_masses) = if is_diagonal(q) {
        (
            DMatrix::identity(n, n),
            (0..n).map(|i| q.q_real[(i, i)]).collect::<Vec<_>>(),
        )
    } else {
        let eig = qc.clone().symmetric_eigen();
        (eig.eigenvectors, eig.eigenvalues.iter().copied().collect())
    };
    let rotated = u.adjoint() * &qc * &u;
    let mut off_diagonal = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off_diagonal = off_diagonal.max(rotated[(i, j)].norm());
            }
        }
    }
    let (g, sigma) = (qgt.g(), qgt.sigma());
    let mut g_tilde = vec![0.0; n];
    let mut sigma_tilde = vec![0.0; n];
    for r in 0..n {
        for j in 0..n {
            for k in 0..n {
                let w = u[(j, r)] * u[(k, r)].conj();
                g_tilde[r] += w.re * g[(j, k)];
                sigma_tilde[r] += w.im * sigma[(j, k)];
            }
        }
    }
    let phi = 0.5
        * (0..n)
            .map(|r| inv_masses[r] * (g_tilde[r] + sigma_tilde[r]))
            .sum::<f64>();
    Ok(MassDiagonalization {
        u,
        inv_masses,
        g_tilde,
        sigma_tilde,
        phi,
        off_diagonal,
    })
}
