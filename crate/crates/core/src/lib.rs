//! Quantum geometry of parametrized state families.
//!
//! The crate computes the complex quantum geometric tensor and the
//! higher-order objects built from gauge-invariant cumulants of the overlap
//! `S(s', s) = <Psi(s')|Psi(s)>`: third cumulants, quantum and classical
//! Christoffel symbols, Riemann curvature, parallel transport and Berry
//! phases, coherent-state models and Born-Oppenheimer effective fields.

pub mod bo;
pub mod cumulants;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod models;
pub mod statefam;
pub mod tensor;
pub mod transport;

pub use error::{Error, Result};
pub use fd::FDScheme;
pub use statefam::{CVector, ParameterPoint, StateFamily, StateVector};
