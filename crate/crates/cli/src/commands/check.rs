//! Invariant suites behind `qgeom check`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use clap::ValueEnum;
use num_complex::Complex64;
use qgeom::bo::{diagonalize_mass, effective_potential, force, InverseMassTensor};
use qgeom::geometry::{
    berry_connection, qgt, qgt_with_scheme, quantum_christoffel_from, third_cumulant, uncertainty_check, QgtEngine,
    DET_TOLERANCE, MINOR_TOLERANCE,
};
use qgeom::models::{analytic_c2, build_model, GroupTag, ModelFamily, ModelSpec, Su11Series, TwoOscillatorBranch};
use qgeom::statefam::{apply_gauge, GaugeFunction};
use qgeom::transport::{berry_phase_loop, sigma_flux, wrap_angle, Path};
use qgeom::{ParameterPoint, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::commands::grid::grid_points;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{to_json_string, write_text, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Gauge,
    Uncertainty,
    Stokes,
    Oracle,
    Bo,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Gauge => "gauge",
            Suite::Uncertainty => "uncertainty",
            Suite::Stokes => "stokes",
            Suite::Oracle => "oracle",
            Suite::Bo => "bo",
        }
    }
}

/// One invariant: passes when `residual <= tolerance`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub suite: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn measured(suite: &'static str, name: String, residual: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name,
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: String::new(),
        }
    }

    fn from_result(suite: &'static str, name: String, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(residual) => Self::measured(suite, name, residual, tolerance),
            Err(e) => Self {
                suite,
                name,
                residual: f64::NAN,
                tolerance,
                pass: false,
                detail: format!("{e:?}"),
            },
        }
    }

    fn to_value(&self) -> Value {
        json!({
            "suite": self.suite,
            "invariant": self.name,
            "residual": if self.residual.is_finite() { json!(self.residual) } else { Value::Null },
            "tolerance": self.tolerance,
            "pass": self.pass,
            "detail": self.detail,
        })
    }
}

fn model(spec: ModelSpec) -> Result<ModelFamily> {
    build_model(&spec)
}

fn chart_point(f: &ModelFamily, rng: &mut ChaCha8Rng) -> Result<ParameterPoint> {
    ParameterPoint::new(f.chart().iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect())
}

fn configured_or(cfg: &RunConfig, defaults: Vec<ModelSpec>) -> CliResult<Vec<ModelSpec>> {
    if cfg.has("model") || cfg.has("series") {
        Ok(vec![cfg.model_spec()?])
    } else {
        Ok(defaults)
    }
}

fn gauge_defaults() -> Vec<ModelSpec> {
    vec![
        ModelSpec::glauber(1, 64),
        ModelSpec::su2(1.0, 0.0),
        ModelSpec::su2(1.5, 0.5),
        ModelSpec::su11(Su11Series::Dplus, -1.0, 2.0, 128),
        ModelSpec::su11(Su11Series::Dminus, -1.0, -2.0, 128),
        ModelSpec::two_oscillator(TwoOscillatorBranch::Quarter, 1.25, 128),
    ]
}

/// Largest change of `C2`, `C3` and `[jl;k]_q`, and of `beta + grad alpha`,
/// over random polynomial gauges.
fn gauge_residual(spec: &ModelSpec, seed: u64) -> Result<f64> {
    let f = model(spec.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..3 {
        let s = chart_point(&f, &mut rng)?;
        let degree = rng.gen_range(1..=3);
        let alpha = GaugeFunction::random(2, degree, 1.0, &mut rng).recentered(s.coords())?;
        let g = apply_gauge(f.clone(), alpha.clone())?;
        worst = worst
            .max((qgt(&f, &s, QgtEngine::TangentState)?.c2() - qgt(&g, &s, QgtEngine::TangentState)?.c2()).camax());
        let (t0, t1) = (third_cumulant(&f, &s)?, third_cumulant(&g, &s)?);
        worst = worst
            .max(t0.c3_1_2.max_abs_diff(&t1.c3_1_2))
            .max(t0.c3_2_1.max_abs_diff(&t1.c3_2_1))
            .max(quantum_christoffel_from(&t0).max_abs_diff(&quantum_christoffel_from(&t1)));
        let (b0, b1) = (berry_connection(&f, &s)?.beta, berry_connection(&g, &s)?.beta);
        for (k, d) in alpha.gradient(s.coords()).iter().enumerate() {
            worst = worst.max((b1[k] - b0[k] + d).abs());
        }
    }
    Ok(worst)
}

fn gauge_suite(cfg: &RunConfig) -> CliResult<Vec<Outcome>> {
    let specs = configured_or(cfg, gauge_defaults())?;
    Ok(specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            Outcome::from_result(
                "gauge",
                spec.label(),
                1e-6,
                gauge_residual(spec, cfg.seed.wrapping_add(i as u64)),
            )
        })
        .collect())
}

pub fn builtin_models() -> Vec<ModelSpec> {
    let mut specs: Vec<ModelSpec> = (0..4).map(|m| ModelSpec::glauber(m, 64)).collect();
    for twice_j in 1..=4 {
        let j = twice_j as f64 / 2.0;
        for k in 0..=twice_j {
            specs.push(ModelSpec::su2(j, -j + k as f64));
        }
    }
    for j in [-0.5, -1.0, -1.5] {
        for k in 0..3 {
            specs.push(ModelSpec::su11(Su11Series::Dplus, j, -j + k as f64, 128));
            specs.push(ModelSpec::su11(Su11Series::Dminus, j, j - k as f64, 128));
        }
    }
    for k in 0..2 {
        specs.push(ModelSpec::su11(
            Su11Series::ProjectiveDiscrete,
            -0.3,
            0.3 + k as f64,
            128,
        ));
    }
    for k in 0..3 {
        specs.push(ModelSpec::two_oscillator(
            TwoOscillatorBranch::Quarter,
            0.25 + k as f64,
            256,
        ));
        specs.push(ModelSpec::two_oscillator(
            TwoOscillatorBranch::ThreeQuarters,
            0.75 + k as f64,
            256,
        ));
    }
    specs
}

/// `(-min det, -min minor)` over a 6x6 chart grid.
fn uncertainty_margins(spec: &ModelSpec) -> Result<(f64, f64)> {
    let f = model(spec.clone())?;
    let c = f.chart().to_vec();
    let (mut det, mut minor) = (f64::INFINITY, f64::INFINITY);
    for a in 0..6 {
        for b in 0..6 {
            let s = ParameterPoint::new(vec![
                c[0].0 + (c[0].1 - c[0].0) * a as f64 / 5.0,
                c[1].0 + (c[1].1 - c[1].0) * b as f64 / 5.0,
            ])?;
            let u = uncertainty_check(&qgt(&f, &s, QgtEngine::TangentState)?);
            det = det.min(u.det);
            for p in &u.pairwise {
                minor = minor.min(p.margin);
            }
        }
    }
    Ok((-det, -minor))
}

fn uncertainty_suite(cfg: &RunConfig) -> CliResult<Vec<Outcome>> {
    let specs = configured_or(cfg, builtin_models())?;
    let nested: Vec<Vec<Outcome>> = specs
        .par_iter()
        .map(|spec| match uncertainty_margins(spec) {
            Ok((d, m)) => vec![
                Outcome::measured("uncertainty", format!("det/{}", spec.label()), d, DET_TOLERANCE),
                Outcome::measured("uncertainty", format!("minor/{}", spec.label()), m, MINOR_TOLERANCE),
            ],
            Err(e) => vec![Outcome::from_result("uncertainty", spec.label(), DET_TOLERANCE, Err(e))],
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

fn stokes_residual(j: f64, m: f64, theta0: f64) -> Result<f64> {
    let f = model(ModelSpec::su2(j, m))?;
    let phase = berry_phase_loop(&f, &Path::latitude(theta0, 512)?)?;
    let flux = sigma_flux(&f, [0.0, 0.0], [theta0, 2.0 * PI], 32)?;
    let closed = -2.0 * PI * m * (1.0 - theta0.cos());
    Ok(wrap_angle(phase.integral - flux)
        .abs()
        .max(wrap_angle(phase.integral - closed).abs()))
}

fn stokes_suite() -> Vec<Outcome> {
    let mut jobs = Vec::new();
    for twice_j in 1..=3 {
        let j = twice_j as f64 / 2.0;
        for k in 0..=twice_j {
            for theta0 in [PI / 3.0, PI / 2.0] {
                jobs.push((j, -j + k as f64, theta0));
            }
        }
    }
    jobs.par_iter()
        .map(|&(j, m, t)| {
            Outcome::from_result(
                "stokes",
                format!("su2(j={j}, m={m}) theta0={t:.4}"),
                1e-4,
                stokes_residual(j, m, t),
            )
        })
        .collect()
}

fn oracle_defaults() -> Vec<ModelSpec> {
    vec![
        ModelSpec::glauber(0, 64),
        ModelSpec::glauber(1, 64),
        ModelSpec::glauber(2, 64),
        ModelSpec::su2(1.0, 0.0),
        ModelSpec::su2(1.5, -1.5),
        ModelSpec::su2(1.5, 0.5),
        ModelSpec::su11(Su11Series::Dplus, -1.0, 1.0, 128),
        ModelSpec::su11(Su11Series::Dplus, -0.5, 1.5, 128),
        ModelSpec::su11(Su11Series::Dminus, -1.0, -2.0, 128),
        ModelSpec::two_oscillator(TwoOscillatorBranch::Quarter, 1.25, 128),
        ModelSpec::two_oscillator(TwoOscillatorBranch::ThreeQuarters, 0.75, 128),
    ]
}

fn oracle_tolerance(spec: &ModelSpec) -> f64 {
    match spec.group() {
        GroupTag::WeylHeisenberg => 1e-6,
        GroupTag::SU2 => 1e-7,
        GroupTag::SU11 => 1e-5,
    }
}

fn oracle_points(f: &ModelFamily, cfg: &RunConfig) -> CliResult<Vec<ParameterPoint>> {
    if cfg.has("grid") {
        return grid_points(cfg, f);
    }
    let c = f.chart().to_vec();
    let mut pts = Vec::new();
    for a in 0..5 {
        for b in 0..5 {
            pts.push(ParameterPoint::new(vec![
                c[0].0 + (c[0].1 - c[0].0) * a as f64 / 4.0,
                c[1].0 + (c[1].1 - c[1].0) * b as f64 / 4.0,
            ])?);
        }
    }
    Ok(pts)
}

/// Largest deviation of numerical `C2` and metric eigenvalues from the closed form.
fn oracle_residual(spec: &ModelSpec, f: &ModelFamily, points: &[ParameterPoint], cfg: &RunConfig) -> Result<f64> {
    let mut worst = 0.0_f64;
    for s in points {
        let q = qgt_with_scheme(f, s, cfg.engine, &cfg.scheme)?;
        let exact = analytic_c2(spec, s.coords())?;
        worst = worst.max((q.c2() - &exact).camax());
        let mut e_num = q.g_eigenvalues();
        let mut e_exact: Vec<f64> = exact
            .map(|z| z.re)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        e_num.sort_by(f64::total_cmp);
        e_exact.sort_by(f64::total_cmp);
        for (a, b) in e_num.iter().zip(&e_exact) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

fn oracle_outcome(spec: &ModelSpec, cfg: &RunConfig) -> Outcome {
    let tol = oracle_tolerance(spec);
    let name = spec.label();
    let f = match model(spec.clone()) {
        Ok(f) => f,
        Err(e) => return Outcome::from_result("oracle", name, tol, Err(e)),
    };
    match oracle_points(&f, cfg) {
        Ok(points) => Outcome::from_result("oracle", name, tol, oracle_residual(spec, &f, &points, cfg)),
        Err(e) => Outcome {
            suite: "oracle",
            name,
            residual: f64::NAN,
            tolerance: tol,
            pass: false,
            detail: e.to_string(),
        },
    }
}

fn oracle_suite(cfg: &RunConfig) -> CliResult<Vec<Outcome>> {
    let specs = configured_or(cfg, oracle_defaults())?;
    Ok(specs.par_iter().map(|spec| oracle_outcome(spec, cfg)).collect())
}

/// Force against `-grad Phi`, diagonal reconstruction and `|Im Phi|`.
fn bo_residuals(spec: &ModelSpec, seed: u64) -> Result<(f64, f64, f64)> {
    let f = model(spec.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut dev, mut recon, mut imag) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..2 {
        let q = InverseMassTensor::random(2, 1.0, &mut rng);
        for _ in 0..2 {
            let s = chart_point(&f, &mut rng)?;
            dev = dev.max(force(&q, &f, &s)?.deviation);
            let t = qgt(&f, &s, QgtEngine::TangentState)?;
            let phi = effective_potential(&q, &t)?;
            recon = recon.max((diagonalize_mass(&q, &t)?.phi - phi).abs());
            let z: Complex64 = q
                .complex()
                .iter()
                .zip(t.c2().iter())
                .map(|(a, c)| a.conj() * c)
                .sum::<Complex64>()
                * 0.5;
            imag = imag.max(z.im.abs());
        }
    }
    Ok((dev, recon, imag))
}

fn bo_suite(cfg: &RunConfig) -> CliResult<Vec<Outcome>> {
    let specs = configured_or(
        cfg,
        vec![
            ModelSpec::su2(1.0, 0.0),
            ModelSpec::su2(1.5, 0.5),
            ModelSpec::su11(Su11Series::Dplus, -1.0, 2.0, 128),
            ModelSpec::su11(Su11Series::Dplus, -0.5, 1.5, 128),
        ],
    )?;
    let nested: Vec<Vec<Outcome>> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| match bo_residuals(spec, cfg.seed.wrapping_add(i as u64)) {
            Ok((d, r, im)) => vec![
                Outcome::measured("bo", format!("force/{}", spec.label()), d, 1e-5),
                Outcome::measured("bo", format!("diagonal/{}", spec.label()), r, 1e-10),
                Outcome::measured("bo", format!("real-phi/{}", spec.label()), im, 1e-10),
            ],
            Err(e) => vec![Outcome::from_result("bo", spec.label(), 1e-5, Err(e))],
        })
        .collect();
    Ok(nested.into_iter().flatten().collect())
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> CliResult<Vec<Outcome>> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Gauge {
        out.extend(gauge_suite(cfg)?);
    }
    if all || suite == Suite::Uncertainty {
        out.extend(uncertainty_suite(cfg)?);
    }
    if all || suite == Suite::Stokes {
        out.extend(stokes_suite());
    }
    if all || suite == Suite::Oracle {
        out.extend(oracle_suite(cfg)?);
    }
    if all || suite == Suite::Bo {
        out.extend(bo_suite(cfg)?);
    }
    Ok(out)
}

fn table(outcomes: &[Outcome]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<12} {:<56} {:>12} {:>10}  status",
        "suite", "invariant", "residual", "tolerance"
    );
    for o in outcomes {
        let _ = writeln!(
            s,
            "{:<12} {:<56} {:>12.3e} {:>10.1e}  {}{}",
            o.suite,
            o.name,
            o.residual,
            o.tolerance,
            if o.pass { "PASS" } else { "FAIL" },
            if o.detail.is_empty() {
                String::new()
            } else {
                format!("  {}", o.detail)
            }
        );
    }
    s
}

pub fn run_check(suite: Suite, cfg: &RunConfig) -> CliResult<()> {
    let outcomes = run_suite(suite, cfg)?;
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    let dump = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "qgeom", "version": env!("CARGO_PKG_VERSION")},
        "command": "check",
        "suite": suite.name(),
        "config": cfg.entries,
        "seed": cfg.seed,
        "passed": outcomes.len() - failed,
        "failed": failed,
        "results": outcomes.iter().map(Outcome::to_value).collect::<Vec<_>>(),
    });
    // The table goes to stderr so stdout stays valid JSON.
    eprint!("{}", table(&outcomes));
    write_text(cfg.out.as_deref(), &to_json_string(&dump)?)?;
    match outcomes.iter().find(|o| !o.pass) {
        Some(o) if o.detail.is_empty() => Err(CliError::CheckFailed(format!(
            "{}/{} (residual {:.3e} > {:.1e})",
            o.suite, o.name, o.residual, o.tolerance
        ))),
        Some(o) => Err(CliError::CheckFailed(format!("{}/{}: {}", o.suite, o.name, o.detail))),
        None => Ok(()),
    }
}
