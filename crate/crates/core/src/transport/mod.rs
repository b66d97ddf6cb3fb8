//! Parallel transport, loop phases, Hilbert-space curvature and geodesics.

mod geodesic;
mod hilbert;
mod parallel;
mod path;
mod phase;

pub use geodesic::{geodesic, Geodesic, MAX_GEODESIC_STEP, SPEED_TOLERANCE};
pub use hilbert::{
    hilbert_connection, hilbert_riemann, BasisFamily, HilbertCurvature, Projected, SingleState, ORTHONORMAL_TOL,
};
pub use parallel::{holonomy_angle, transport_in_metric, transport_vector, wrap_angle, Transported};
pub use path::{Path, CLOSURE_TOL, MIN_SAMPLES};
pub use phase::{berry_phase_loop, sigma_flux, LoopPhase, MIN_STEP_OVERLAP, RAY_CLOSURE_TOL};
