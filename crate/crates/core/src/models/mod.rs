//! Built-in coherent-state families, their ladder algebras and closed-form
//! geometry.

mod analytic;
mod coset;
mod family;
mod generator;
mod ladder;
mod spec;

pub use analytic::{analytic_c2, analytic_det, analytic_qgt};
pub use coset::{coset_derivative, CosetDecomposition, DECOMPOSITION_TOLERANCE};
pub use family::{build_model, ModelFamily, DEFAULT_ALPHA_MAX, DEFAULT_RHO_MAX, POLE_MARGIN, TRUNCATION_DRIFT};
pub use generator::{random_hermitian, random_state, GeneratorFamily, UnitaryFamily};
pub use ladder::{ladder_algebra_check, LadderAlgebra, LadderReport, TruncationEdge};
pub use spec::{
    validate_series, GroupTag, ModelSpec, SeriesTag, SeriesValidation, Su11Series, TwoOscillatorBranch,
    DEFAULT_TRUNCATION,
};
