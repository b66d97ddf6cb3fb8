use std::process::ExitCode;

use qgeom::Error;
use thiserror::Error as ThisError;

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain or truncation failure: {0}")]
    Domain(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("check failed: first failing invariant is {0}")]
    CheckFailed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Invariant(_) => 4,
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidArgument(_)
            | Error::InvalidModel(_)
            | Error::UnsupportedSeries(_)
            | Error::DimensionMismatch { .. }
            | Error::OpenPath(_)
            | Error::Undersampled(_)
            | Error::StepSizeTooLarge(_) => CliError::Config(msg),
            Error::OutOfDomain { .. }
            | Error::TruncationInsufficient { .. }
            | Error::NonFinite(_)
            | Error::VanishingOverlap(_)
            | Error::StencilTooWide(_)
            | Error::SingularMetric(_)
            | Error::NoiseDominated { .. } => CliError::Domain(msg),
            Error::IncompleteMomentSet(_)
            | Error::EngineMismatch { .. }
            | Error::NonRealConnection(_)
            | Error::IdentityViolation { .. }
            | Error::NonOrthonormalBasis(_)
            | Error::DecompositionResidual(_) => CliError::Invariant(msg),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(format!("csv: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
