use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate {index} = {value} lies outside the domain interval [{lo}, {hi}]")]
    OutOfDomain { index: usize, value: f64, lo: f64, hi: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("overlap magnitude {0:.3e} is too small for a logarithm")]
    VanishingOverlap(f64),

    #[error("finite-difference stencil too wide: |S - 1| = {0:.3e} exceeds 0.5")]
    StencilTooWide(f64),

    #[error("incomplete moment set: missing {0}")]
    IncompleteMomentSet(String),

    #[error("engine mismatch: deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    EngineMismatch { deviation: f64, tolerance: f64 },

    #[error("Berry connection has an imaginary residue of {0:.3e}")]
    NonRealConnection(f64),

    #[error("identity violation in {what}: deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    IdentityViolation {
        what: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("metric is singular (det g = {0:.3e})")]
    SingularMetric(f64),

    #[error("finite-difference noise dominates: error estimate {error:.3e} vs magnitude {magnitude:.3e}")]
    NoiseDominated { error: f64, magnitude: f64 },

    #[error("path is not closed (endpoint gap {0:.3e})")]
    OpenPath(f64),

    #[error("path undersampled: neighbouring overlap {0:.4} below 0.99")]
    Undersampled(f64),

    #[error("basis is not orthonormal: Gram deviation {0:.3e}")]
    NonOrthonormalBasis(f64),

    #[error("integration step too large: {0}")]
    StepSizeTooLarge(String),

    #[error("truncation insufficient: norm drift {drift:.3e} with dimension {dim}")]
    TruncationInsufficient { drift: f64, dim: usize },

    #[error("series {0} has no faithful truncated ladder construction")]
    UnsupportedSeries(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("coset decomposition residual {0:.3e} exceeds 1e-6")]
    DecompositionResidual(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
