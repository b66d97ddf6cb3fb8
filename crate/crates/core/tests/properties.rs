use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qgeom::bo::{diagonalize_mass, effective_potential, InverseMassTensor};
use qgeom::geometry::{
    berry_curl, christoffel_field, qgt, riemann, third_cumulant, uncertainty_check, FnMetric, QgtEngine,
};
use qgeom::models::{build_model, GeneratorFamily, ModelFamily, ModelSpec, Su11Series, UnitaryFamily};
use qgeom::statefam::{apply_gauge, GaugeFunction};
use qgeom::transport::{hilbert_connection, wrap_angle};
use qgeom::{ParameterPoint, StateFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pt(x: &[f64]) -> ParameterPoint {
    ParameterPoint::new(x.to_vec()).unwrap()
}

fn model_strategy() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (0u32..3).prop_map(|m| ModelSpec::glauber(m, 64)),
        (1u32..5, 0u32..5).prop_map(|(tj, k)| {
            let j = tj as f64 / 2.0;
            ModelSpec::su2(j, -j + (k % (tj + 1)) as f64)
        }),
        (1u32..4, 0u32..3).prop_map(|(tj, k)| {
            let j = -(tj as f64) / 2.0;
            ModelSpec::su11(Su11Series::Dplus, j, -j + k as f64, 128)
        }),
        (1u32..4, 0u32..3).prop_map(|(tj, k)| {
            let j = -(tj as f64) / 2.0;
            ModelSpec::su11(Su11Series::Dminus, j, j - k as f64, 128)
        }),
    ]
}

/// A model together with a point in its sampling chart.
fn model_point() -> impl Strategy<Value = (ModelFamily, ParameterPoint)> {
    (model_strategy(), 0.0..1.0f64, 0.0..1.0f64).prop_map(|(spec, u, v)| {
        let f = build_model(&spec).unwrap();
        let c = f.chart();
        let s = pt(&[c[0].0 + u * (c[0].1 - c[0].0), c[1].0 + v * (c[1].1 - c[1].0)]);
        (f, s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn model_states_are_normalized((f, s) in model_point()) {
        let v = f.amplitudes(s.coords()).unwrap();
        prop_assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn c2_is_hermitian_and_g_is_psd((f, s) in model_point()) {
        let q = qgt(&f, &s, QgtEngine::TangentState).unwrap();
        prop_assert!((q.c2() - q.c2().adjoint()).camax() < 1e-12);
        prop_assert!(q.g_eigenvalues().iter().all(|&e| e >= -1e-10));
        for i in 0..2 {
            prop_assert!(q.sigma()[(i, i)].abs() < 1e-12);
        }
    }

    #[test]
    fn uncertainty_holds_on_models((f, s) in model_point()) {
        let r = uncertainty_check(&qgt(&f, &s, QgtEngine::TangentState).unwrap());
        prop_assert!(r.all_ok(), "det {} minors {:?}", r.det, r.pairwise);
    }

    #[test]
    fn engines_agree((f, s) in model_point()) {
        let a = qgt(&f, &s, QgtEngine::TangentState).unwrap();
        let b = qgt(&f, &s, QgtEngine::LogOverlapFD).unwrap();
        prop_assert!(a.max_abs_diff(b.c2()) < 1e-6);
    }

    #[test]
    fn curl_of_beta_is_twice_sigma((f, s) in model_point()) {
        let q = qgt(&f, &s, QgtEngine::TangentState).unwrap();
        let curl = berry_curl(&f, &s).unwrap();
        prop_assert!((curl[(0, 1)] - 2.0 * q.sigma()[(0, 1)]).abs() < 1e-6);
    }

    #[test]
    fn metric_contracted_with_sigma_vanishes((f, s) in model_point()) {
        let q = qgt(&f, &s, QgtEngine::TangentState).unwrap();
        prop_assume!(q.g().determinant().abs() > 1e-6);
        let ginv = q.g().clone().try_inverse().unwrap();
        prop_assert!(ginv.component_mul(q.sigma()).sum().abs() < 1e-12);
    }

    #[test]
    fn third_cumulant_pairing((f, s) in model_point()) {
        let t = third_cumulant(&f, &s).unwrap();
        prop_assert!(t.pairing_residual() < 1e-6, "{}", t.pairing_residual());
    }

    #[test]
    fn christoffel_symbols_are_symmetric((f, s) in model_point()) {
        let ch = christoffel_field(&f, &s).unwrap();
        for k in 0..2 {
            prop_assert!((ch.first_kind[(0, 1, k)] - ch.first_kind[(1, 0, k)]).abs() < 1e-9);
        }
        if let Some(g2) = &ch.second_kind {
            for l in 0..2 {
                prop_assert!((g2[(l, 0, 1)] - g2[(l, 1, 0)]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn gauge_leaves_c2_unchanged((f, s) in model_point(), seed in any::<u64>(), degree in 0u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = GaugeFunction::random(2, degree, 1.0, &mut rng).recentered(s.coords()).unwrap();
        let g = apply_gauge(f.clone(), alpha).unwrap();
        let a = qgt(&f, &s, QgtEngine::TangentState).unwrap();
        let b = qgt(&g, &s, QgtEngine::TangentState).unwrap();
        prop_assert!(a.max_abs_diff(b.c2()) < 1e-6);
    }

    #[test]
    fn effective_potential_is_real_and_diagonalizable((f, s) in model_point(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = InverseMassTensor::random(2, 1.0, &mut rng);
        let t = qgt(&f, &s, QgtEngine::TangentState).unwrap();
        let phi = effective_potential(&q, &t).unwrap();
        let d = diagonalize_mass(&q, &t).unwrap();
        prop_assert!((d.phi - phi).abs() < 1e-10);
        prop_assert!(d.off_diagonal < 1e-10);
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            2,
            d.inv_masses.iter().map(|&m| Complex64::new(m, 0.0)),
        ));
        prop_assert!((&d.u * lambda * d.u.adjoint() - q.complex()).camax() < 1e-12);
    }

    #[test]
    fn commuting_generators_give_real_cumulants(seed in any::<u64>(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = GeneratorFamily::commuting_random(6, 2, &mut rng);
        let s = pt(&[x, y]);
        let q = qgt(&fam, &s, QgtEngine::TangentState).unwrap();
        prop_assert!(q.c2().iter().all(|z| z.im.abs() < 1e-9));
        let t = third_cumulant(&fam, &s).unwrap();
        prop_assert!(t.c3_1_2.as_slice().iter().all(|z| z.im.abs() < 1e-7));
    }

    #[test]
    fn unitary_connection_is_anti_hermitian(seed in any::<u64>(), x in -1.0..1.0f64, y in -1.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = UnitaryFamily::random(3, 2, &mut rng);
        let g = hilbert_connection(&fam, &pt(&[x, y]), 0).unwrap();
        prop_assert!((&g + g.adjoint()).camax() < 1e-8);
    }

    #[test]
    fn wrapped_angles_lie_in_half_open_interval(a in -100.0..100.0f64) {
        let w = wrap_angle(a);
        prop_assert!(w > -PI && w <= PI);
        let turns = (a - w) / (2.0 * PI);
        prop_assert!((turns - turns.round()).abs() < 1e-9);
    }

    #[test]
    fn gauge_recentering_is_a_shift(seed in any::<u64>(), cx in -2.0..2.0f64, cy in -2.0..2.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = GaugeFunction::random(2, 3, 1.0, &mut rng);
        let shifted = alpha.recentered(&[cx, cy]).unwrap();
        prop_assert!((shifted.value(&[x, y]) - alpha.value(&[x - cx, y - cy])).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn riemann_is_antisymmetric_in_last_pair(a in 0.5..2.0f64, b in 0.5..2.0f64, x in 0.3..1.5f64, y in 0.3..1.5f64) {
        let metric = FnMetric::new(2, move |s: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[a + s[1] * s[1], 0.1 * s[0], 0.1 * s[0], b + s[0].sin().powi(2)])
        });
        let r = riemann(&metric, &pt(&[x, y])).unwrap();
        prop_assert!(r.antisymmetry_residual() < 1e-6);
        prop_assert!((r.ricci.clone() - r.ricci.transpose()).amax() < 1e-5);
    }

    #[test]
    fn hermitian_mass_tensor_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = InverseMassTensor::random(3, 0.5, &mut rng);
        let back = InverseMassTensor::from_hermitian(&q.complex()).unwrap();
        prop_assert!((back.complex() - q.complex()).camax() < 1e-15);
        prop_assert!(q.complex().iter().all(|z: &Complex64| z.re.is_finite()));
    }
}
