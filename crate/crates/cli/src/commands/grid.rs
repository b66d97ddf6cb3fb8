//! Commands that sweep a 2D grid of parameter points.

use qgeom::bo::{diagonalize_mass, effective_potential, force, InverseMassTensor};
use qgeom::geometry::{
    berry_connection, christoffel_field, qgt_with_scheme, riemann, uncertainty_check, FamilyMetric, DET_TOLERANCE,
};
use qgeom::models::ModelFamily;
use qgeom::{ParameterPoint, StateFamily};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Report;

/// Grid points in row-major order (first coordinate outermost).
pub fn grid_points(cfg: &RunConfig, family: &ModelFamily) -> CliResult<Vec<ParameterPoint>> {
    let axes = cfg.grid(family)?;
    let (xs, ys) = (axes[0].values(), axes[1].values());
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &x in &xs {
        for &y in &ys {
            out.push(ParameterPoint::new(vec![x, y])?);
        }
    }
    Ok(out)
}

/// Evaluates every point on the worker pool; results and the first error
/// are reported in grid order.
fn sweep<F>(points: &[ParameterPoint], f: F) -> CliResult<Vec<Value>>
where
    F: Fn(usize, &ParameterPoint) -> CliResult<Value> + Sync,
{
    let results: Vec<CliResult<Value>> = points.par_iter().enumerate().map(|(i, s)| f(i, s)).collect();
    results.into_iter().collect()
}

fn model_report(command: &'static str, family: &ModelFamily, fields: &'static [&'static str]) -> Report {
    let mut r = Report::new(command, Some(family.spec().label()), fields);
    let names = family.coordinate_names();
    r.metadata.insert("coordinates".into(), json!(names));
    r.metadata.insert("hilbert_dim".into(), json!(family.hilbert_dim()));
    r.metadata.insert("chart".into(), json!(family.chart()));
    r
}

/// Row-major flattening.
fn flat(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    m.transpose().iter().copied().collect()
}

pub fn run_tensor(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let points = grid_points(cfg, &family)?;
    let mass = if cfg.has("mass-q") { Some(cfg.mass_q()?) } else { None };
    let records = sweep(&points, |i, s| {
        let q = qgt_with_scheme(&family, s, cfg.engine, &cfg.scheme)?;
        let beta = berry_connection(&family, s)?.beta;
        let eig = q.g_eigenvalues();
        let mut rec = json!({
            "index": i,
            "coords": s.coords(),
            "c2_re": flat(&q.c2().map(|z| z.re)),
            "c2_im": flat(&q.c2().map(|z| z.im)),
            "det": q.det(),
            "g_eigenvalues": eig,
            "g_min_eigenvalue": eig.iter().copied().fold(f64::INFINITY, f64::min),
            "beta": beta,
            "error_estimate": q.estimated_error(),
        });
        if let Some(m) = &mass {
            rec["phi"] = json!(effective_potential(m, &q)?);
            rec["force"] = json!(force(m, &family, s)?.value);
        }
        Ok(rec)
    })?;
    let mut report = model_report("tensor", &family, &["det", "g_min_eigenvalue", "phi"]);
    report.records = records;
    report.emit(cfg)?;
    check_det(&report.records)
}

fn check_det(records: &[Value]) -> CliResult<()> {
    for r in records {
        let det = r["det"].as_f64().unwrap_or(f64::NAN);
        if det.is_nan() || det < -DET_TOLERANCE {
            return Err(CliError::Invariant(format!(
                "det C2 = {det:.3e} < -1e-10 at {}",
                r["coords"]
            )));
        }
    }
    Ok(())
}

pub fn run_christoffel(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let points = grid_points(cfg, &family)?;
    let records = sweep(&points, |i, s| {
        let ch = christoffel_field(&family, s)?;
        let (q_re, q_im) = match &ch.quantum {
            Some(q) => (json!(q.re().as_slice()), json!(q.im().as_slice())),
            None => (Value::Null, Value::Null),
        };
        Ok(json!({
            "index": i,
            "coords": s.coords(),
            "det_g": ch.det_g,
            "first_kind": ch.first_kind.as_slice(),
            "second_kind": ch.second_kind.as_ref().map(|t| t.as_slice().to_vec()),
            "quantum_re": q_re,
            "quantum_im": q_im,
        }))
    })?;
    let mut report = model_report("christoffel", &family, &["det_g"]);
    report.records = records;
    report.emit(cfg)
}

pub fn run_riemann(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let points = grid_points(cfg, &family)?;
    let records = sweep(&points, |i, s| {
        // Coordinate singularities (poles, rho = 0) are reported, not fatal.
        match riemann(&FamilyMetric::new(&family), s) {
            Ok(r) => Ok(json!({
                "index": i,
                "coords": s.coords(),
                "singular": false,
                "riemann": r.r.as_slice(),
                "ricci": flat(&r.ricci),
                "scalar": r.scalar,
                "error_estimate": r.estimated_error,
            })),
            Err(qgeom::Error::SingularMetric(_)) => Ok(json!({
                "index": i,
                "coords": s.coords(),
                "singular": true,
                "riemann": Value::Null,
                "ricci": Value::Null,
                "scalar": Value::Null,
                "error_estimate": Value::Null,
            })),
            Err(e) => Err(e.into()),
        }
    })?;
    let mut report = model_report("riemann", &family, &["scalar"]);
    report.records = records;
    report.emit(cfg)
}

fn mass_metadata(q: &InverseMassTensor) -> Value {
    json!({"q_real": flat(q.q_real()), "q_imag": flat(q.q_imag())})
}

pub fn run_bo(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let points = grid_points(cfg, &family)?;
    let q = cfg.mass_q()?;
    let records = sweep(&points, |i, s| {
        let t = qgt_with_scheme(&family, s, cfg.engine, &cfg.scheme)?;
        let phi = effective_potential(&q, &t)?;
        let f = force(&q, &family, s)?;
        let d = diagonalize_mass(&q, &t)?;
        Ok(json!({
            "index": i,
            "coords": s.coords(),
            "phi": phi,
            "phi_diagonal": d.phi,
            "a_vec": berry_connection(&family, s)?.beta,
            "force": f.value,
            "fd_gradient": f.fd_gradient,
            "force_deviation": f.deviation,
            "inv_masses": d.inv_masses,
            "g_tilde": d.g_tilde,
            "sigma_tilde": d.sigma_tilde,
        }))
    })?;
    let mut report = model_report("bo", &family, &["phi", "force_deviation"]);
    report.metadata.insert("mass_q".into(), mass_metadata(&q));
    report.records = records;
    report.emit(cfg)
}

pub fn run_uncertainty(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let points = grid_points(cfg, &family)?;
    let records = sweep(&points, |i, s| {
        let u = uncertainty_check(&qgt_with_scheme(&family, s, cfg.engine, &cfg.scheme)?);
        let margins: Vec<f64> = u.pairwise.iter().map(|p| p.margin).collect();
        Ok(json!({
            "index": i,
            "coords": s.coords(),
            "det": u.det,
            "minor_margins": margins,
            "min_minor": margins.iter().copied().fold(f64::INFINITY, f64::min),
            "ok": u.all_ok(),
        }))
    })?;
    let mut report = model_report("uncertainty", &family, &["det", "min_minor"]);
    report.records = records;
    report.emit(cfg)?;
    if let Some(r) = report.records.iter().find(|r| r["ok"] != json!(true)) {
        return Err(CliError::Invariant(format!(
            "uncertainty relation violated at {} (det {})",
            r["coords"], r["det"]
        )));
    }
    Ok(())
}
