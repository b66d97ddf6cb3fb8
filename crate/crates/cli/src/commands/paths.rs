//! Loop phases, vector holonomy and geodesics.

use std::f64::consts::PI;

use nalgebra::DVector;
use qgeom::geometry::{berry_connection, FamilyMetric, MetricField};
use qgeom::models::{GroupTag, ModelFamily};
use qgeom::transport::{berry_phase_loop, geodesic, holonomy_angle, sigma_flux, transport_in_metric, wrap_angle, Path};
use qgeom::ParameterPoint;
use serde_json::json;

use crate::config::{LoopSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::Report;

const FLUX_ORDER: usize = 32;

fn build_path(spec: &LoopSpec) -> CliResult<Path> {
    Ok(match *spec {
        LoopSpec::Latitude { theta0, count } => Path::latitude(theta0, count)?,
        LoopSpec::Circle { center, radius, count } => Path::circle(center, radius, count)?,
        LoopSpec::Rect { lo, hi, per_side } => Path::rectangle(lo, hi, per_side)?,
    })
}

/// Region bounded by the loop when it is a coordinate rectangle, or the cap
/// above a latitude on the sphere.
fn enclosed_region(spec: &LoopSpec, family: &ModelFamily) -> Option<([f64; 2], [f64; 2])> {
    match *spec {
        LoopSpec::Rect { lo, hi, .. } => Some((lo, hi)),
        LoopSpec::Latitude { theta0, .. } if family.spec().group() == GroupTag::SU2 => {
            Some(([0.0, 0.0], [theta0, 2.0 * PI]))
        }
        _ => None,
    }
}

pub fn run_holonomy(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let spec = cfg
        .loop_spec()?
        .ok_or_else(|| CliError::Config("holonomy needs --loop".into()))?;
    let path = build_path(&spec)?;
    let phase = berry_phase_loop(&family, &path)?;
    let flux = match enclosed_region(&spec, &family) {
        Some((lo, hi)) => Some(sigma_flux(&family, lo, hi, FLUX_ORDER)?),
        None => None,
    };
    let metric = FamilyMetric::new(&family);
    let v0 = DVector::from_vec(vec![1.0, 0.0]);
    let transported = transport_in_metric(&metric, &path, &v0)?;
    let g_end = metric.metric(path.last())?;
    let angle = holonomy_angle(&g_end, &v0, transported.vectors.last().expect("nonempty"))?;

    let mut records = Vec::with_capacity(path.len());
    for (i, (s, v)) in path.samples().iter().zip(&transported.vectors).enumerate() {
        records.push(json!({
            "index": i,
            "coords": s.coords(),
            "beta": berry_connection(&family, s)?.beta,
            "transported": v.as_slice(),
        }));
    }
    let mut report = Report::new("holonomy", Some(family.spec().label()), &[]);
    report.metadata.insert(
        "holonomy".into(),
        json!({
            "phase_integral": phase.integral,
            "phase_discrete": phase.discrete,
            "min_overlap": phase.min_overlap,
            "sigma_flux": flux,
            "stokes_residual": flux.map(|f| wrap_angle(phase.integral - f)),
            "vector_rotation": angle,
            "transport_norm_drift": transported.norm_drift,
        }),
    );
    report.records = records;
    report.emit(cfg)
}

pub fn run_geodesic(cfg: &RunConfig) -> CliResult<()> {
    let family = cfg.model()?;
    let spec = cfg.geodesic_spec()?;
    let (start, velocity, length, steps) = match spec {
        Some(g) => (g.start, g.velocity, g.length, g.steps),
        None => {
            let c = family.chart();
            ([(c[0].0 + c[0].1) / 2.0, (c[1].0 + c[1].1) / 2.0], [1.0, 0.0], 1.0, 20)
        }
    };
    let metric = FamilyMetric::new(&family);
    let g = geodesic(
        &metric,
        &ParameterPoint::new(start.to_vec())?,
        &DVector::from_vec(velocity.to_vec()),
        length,
        steps,
    )?;
    let records = g
        .path
        .samples()
        .iter()
        .zip(&g.velocities)
        .enumerate()
        .map(|(i, (s, v))| {
            json!({
                "index": i,
                "arc_length": length * i as f64 / steps as f64,
                "coords": s.coords(),
                "velocity": v.as_slice(),
            })
        })
        .collect();
    let mut report = Report::new("geodesic", Some(family.spec().label()), &[]);
    report.metadata.insert(
        "geodesic".into(),
        json!({"start": start, "velocity": velocity, "length": length, "steps": steps, "speed_drift": g.speed_drift}),
    );
    report.records = records;
    report.emit(cfg)
}
