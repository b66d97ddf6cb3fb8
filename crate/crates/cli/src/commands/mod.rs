pub mod check;
pub mod grid;
pub mod paths;
pub mod series;

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::{resummarize, to_json_string};

/// Re-reads a report and checks that its summary is reproduced exactly.
pub fn run_summary(path: &Path) -> CliResult<()> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let report: Value = serde_json::from_str(&text)?;
    let recomputed = resummarize(&report)?;
    print!("{}", to_json_string(&recomputed)?);
    if report.get("summary") != Some(&recomputed) {
        return Err(CliError::Invariant(
            "stored summary differs from the recomputed one".into(),
        ));
    }
    Ok(())
}
