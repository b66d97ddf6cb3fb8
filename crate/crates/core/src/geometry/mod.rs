//! Quantum geometric tensor, third cumulants, Christoffel symbols,
//! curvature and uncertainty determinants.

mod christoffel;
mod qgt;
mod riemann;
mod uncertainty;

pub use christoffel::{
    c2_derivative_fd, c2_derivative_from_c3, c2_derivative_half_inverse_i, christoffel, christoffel_field,
    fd_metric_derivative, qgt_derivative, quantum_christoffel, quantum_christoffel_from,
    quantum_christoffel_second_kind, second_kind, third_cumulant, third_cumulant_with, ChristoffelField, FamilyMetric,
    FnMetric, MetricDerivative, MetricField, QgtDerivative, ThirdCumulant, SINGULAR_DET,
};
pub use qgt::{
    berry_connection, berry_curl, qgt, qgt_cross_checked, qgt_with_scheme, BerryConnection, EngineComparison,
    QgtEngine, QuantumGeometricTensor,
};
pub use riemann::{riemann, RiemannTensor};
pub use uncertainty::{uncertainty_check, PairwiseMinor, UncertaintyReport, DET_TOLERANCE, MINOR_TOLERANCE};
