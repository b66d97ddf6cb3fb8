use qgeom::models::{validate_series, SeriesTag};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Report;

fn tag_name(tag: SeriesTag) -> String {
    match tag {
        SeriesTag::WeylHeisenberg => "glauber".into(),
        SeriesTag::Su2 => "su2".into(),
        SeriesTag::TwoOscillator => "two-oscillator".into(),
        SeriesTag::Su11(s) => format!("su11-{s}"),
    }
}

/// Validates `(j, m)` against the configured series without building a model.
pub fn run_series(cfg: &RunConfig) -> CliResult<()> {
    let tag = cfg.series_tag()?;
    let j = cfg.j_complex()?;
    let m = cfg.m()?;
    let v = validate_series(j, m, tag);
    let mut report = Report::new("series", None, &[]);
    report.records.push(json!({
        "series": tag_name(tag),
        "j_re": j.re,
        "j_im": j.im,
        "m": m,
        "valid": v.valid,
        "reason": v.reason,
    }));
    report.emit(cfg)?;
    if v.valid {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "({j}, {m}) not in {}: {}",
            tag_name(tag),
            v.reason
        )))
    }
}
