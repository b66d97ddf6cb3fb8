//! Comparisons against hand-derived closed forms that do not go through the
//! cumulant engine.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qgeom::bo::{force, InverseMassTensor};
use qgeom::geometry::{
    c2_derivative_from_c3, qgt, riemann, second_kind, third_cumulant, FamilyMetric, FnMetric, QgtEngine,
};
use qgeom::models::{build_model, GeneratorFamily, ModelSpec};
use qgeom::statefam::Domain;
use qgeom::transport::{berry_phase_loop, geodesic, wrap_angle, Path};
use qgeom::{CVector, ParameterPoint, Result, StateFamily, StateVector};

fn pt(x: &[f64]) -> ParameterPoint {
    ParameterPoint::new(x.to_vec()).unwrap()
}

/// `(cos(theta/2), e^{i phi} sin(theta/2))`.
struct Bloch {
    domain: Domain,
}

impl Bloch {
    fn new() -> Self {
        Self {
            domain: Domain::unbounded(2),
        }
    }
}

impl StateFamily for Bloch {
    fn param_dim(&self) -> usize {
        2
    }
    fn hilbert_dim(&self) -> usize {
        2
    }
    fn domain(&self) -> &Domain {
        &self.domain
    }
    fn amplitudes(&self, s: &[f64]) -> Result<CVector> {
        Ok(CVector::from_vec(vec![
            Complex64::new((s[0] / 2.0).cos(), 0.0),
            Complex64::from_polar((s[0] / 2.0).sin(), s[1]),
        ]))
    }
}

#[test]
fn bloch_qgt_closed_form() {
    let f = Bloch::new();
    for theta in [0.3, 1.1, 2.5] {
        let q = qgt(&f, &pt(&[theta, 0.8]), QgtEngine::TangentState).unwrap();
        let c = q.c2();
        assert!((c[(0, 0)] - Complex64::new(0.25, 0.0)).norm() < 1e-9);
        assert!((c[(1, 1)] - Complex64::new(theta.sin().powi(2) / 4.0, 0.0)).norm() < 1e-9);
        assert!((c[(0, 1)] - Complex64::new(0.0, theta.sin() / 4.0)).norm() < 1e-9);
        assert!((c[(1, 0)] - Complex64::new(0.0, -theta.sin() / 4.0)).norm() < 1e-9);
    }
}

#[test]
fn bloch_c2_derivative_closed_form() {
    let f = Bloch::new();
    let theta = 0.9;
    let d = c2_derivative_from_c3(&third_cumulant(&f, &pt(&[theta, 0.2])).unwrap());
    // d_theta C2(phi;phi) = sin cos / 2, d_theta C2(theta;phi) = i cos / 4.
    assert!((d[(0, 1, 1)] - Complex64::new(theta.sin() * theta.cos() / 2.0, 0.0)).norm() < 1e-8);
    assert!((d[(0, 0, 1)] - Complex64::new(0.0, theta.cos() / 4.0)).norm() < 1e-8);
    for (j, k) in [(0, 0), (1, 1), (0, 1)] {
        assert!(d[(1, j, k)].norm() < 1e-8, "phi derivative ({j},{k})");
    }
}

#[test]
fn bloch_loop_encloses_half_solid_angle() {
    let f = Bloch::new();
    for theta0 in [0.4, 1.3, 2.0] {
        let phase = berry_phase_loop(&f, &Path::latitude(theta0, 256).unwrap()).unwrap();
        // beta_phi = sin^2(theta/2) so the phase is 2 pi sin^2(theta0/2) = pi (1 - cos theta0).
        let expected = PI * (1.0 - theta0.cos());
        assert!(
            wrap_angle(phase.integral - expected).abs() < 1e-8,
            "theta0 {theta0}: {phase:?}"
        );
    }
}

#[test]
fn two_level_commuting_cumulants() {
    let (a, b, p): (f64, f64, f64) = (0.7, -0.4, 0.3);
    let gen = DMatrix::from_diagonal(&DVector::from_vec(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)]));
    let base = StateVector::new(CVector::from_vec(vec![
        Complex64::new(p.sqrt(), 0.0),
        Complex64::new((1.0 - p).sqrt(), 0.0),
    ]))
    .unwrap();
    let fam = GeneratorFamily::new(vec![gen], base).unwrap();
    let s = pt(&[0.37]);
    let q = qgt(&fam, &s, QgtEngine::TangentState).unwrap();
    let c3 = third_cumulant(&fam, &s).unwrap();
    let delta = a - b;
    assert!((q.c2()[(0, 0)].re - p * (1.0 - p) * delta * delta).abs() < 1e-10);
    let skew = p * (1.0 - p) * (1.0 - 2.0 * p) * delta.powi(3);
    assert!((c3.c3_1_2[(0, 0, 0)] - Complex64::new(-skew, 0.0)).norm() < 1e-8);
    assert!((c3.c3_2_1[(0, 0, 0)] - Complex64::new(-skew, 0.0)).norm() < 1e-8);
}

#[test]
fn glauber_vacuum_is_poissonian() {
    let f = build_model(&ModelSpec::glauber(0, 48)).unwrap();
    let (x, y) = (0.8, -0.5);
    let v = f.amplitudes(&[x, y]).unwrap();
    let n_bar: f64 = x * x + y * y;
    let mut weight = (-n_bar).exp();
    for n in 0..20 {
        assert!((v[n].norm_sqr() - weight).abs() < 1e-14, "n={n}");
        weight *= n_bar / (n + 1) as f64;
    }
}

#[test]
fn sphere_christoffel_closed_form() {
    let sphere = FnMetric::new(2, |s: &[f64]| {
        DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, s[0].sin().powi(2)])
    });
    let theta: f64 = 1.2;
    let g = second_kind(&sphere, &pt(&[theta, 0.3])).unwrap();
    assert!((g[(0, 1, 1)] + theta.sin() * theta.cos()).abs() < 1e-8);
    assert!((g[(1, 0, 1)] - theta.cos() / theta.sin()).abs() < 1e-8);
    assert!((g[(1, 1, 0)] - theta.cos() / theta.sin()).abs() < 1e-8);
    for (l, i, j) in [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 1, 1)] {
        assert!(g[(l, i, j)].abs() < 1e-8);
    }
}

#[test]
fn half_plane_has_scalar_curvature_minus_two() {
    let half_plane = FnMetric::new(2, |s: &[f64]| DMatrix::identity(2, 2) / (s[1] * s[1]));
    let r = riemann(&half_plane, &pt(&[0.3, 1.7])).unwrap();
    assert!((r.scalar + 2.0).abs() < 1e-5, "{}", r.scalar);
}

#[test]
fn su2_extremal_geodesic_is_great_circle() {
    // j = 2, m = -2 has the unit-sphere metric.
    let f = build_model(&ModelSpec::su2(2.0, -2.0)).unwrap();
    let metric = FamilyMetric::new(&f);
    let (t0, p0, a): (f64, f64, f64) = (1.0, 0.2, 0.6);
    let v0 = DVector::from_vec(vec![a.cos(), a.sin() / t0.sin()]);
    let length = 1.5;
    let geo = geodesic(&metric, &pt(&[t0, p0]), &v0, length, 30).unwrap();

    let cart = |t: f64, p: f64| nalgebra::Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
    let x0 = cart(t0, p0);
    let e_t = nalgebra::Vector3::new(t0.cos() * p0.cos(), t0.cos() * p0.sin(), -t0.sin());
    let e_p = nalgebra::Vector3::new(-p0.sin(), p0.cos(), 0.0);
    let u = e_t * a.cos() + e_p * a.sin();
    let expected = x0 * length.cos() + u * length.sin();
    let end = geo.path.last().coords();
    assert!((cart(end[0], end[1]) - expected).norm() < 1e-6);
}

#[test]
fn su2_spin_one_force_by_hand() {
    // g = diag(1, sin^2), so Phi = (1 + sin^2 theta) / 2 for Q = I.
    let f = build_model(&ModelSpec::su2(1.0, 0.0)).unwrap();
    let theta: f64 = 0.7;
    let fr = force(&InverseMassTensor::identity(2), &f, &pt(&[theta, 1.0])).unwrap();
    assert!((fr.value[0] + theta.sin() * theta.cos()).abs() < 1e-7);
    assert!(fr.value[1].abs() < 1e-7);
}
