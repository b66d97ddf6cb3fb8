use crate::geometry::qgt::QuantumGeometricTensor;

/// Tolerance on `det C2 >= 0`.
pub const DET_TOLERANCE: f64 = 1e-10;
/// Tolerance on each 2x2 principal minor.
pub const MINOR_TOLERANCE: f64 = 1e-8;

/// Principal 2x2 minor `(j, k)`: `g_jj g_kk >= g_jk^2 + sigma_jk^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseMinor {
    pub j: usize,
    pub k: usize,
    pub variance_product: f64,
    pub covariance_sq: f64,
    pub curvature_sq: f64,
    /// `variance_product - covariance_sq - curvature_sq`, the minor of `C2`.
    pub margin: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyReport {
    pub det: f64,
    pub schroedinger_ok: bool,
    pub pairwise: Vec<PairwiseMinor>,
}

impl UncertaintyReport {
    pub fn all_ok(&self) -> bool {
        self.schroedinger_ok && self.pairwise.iter().all(|p| p.satisfied)
    }
}

pub fn uncertainty_check(qgt: &QuantumGeometricTensor) -> UncertaintyReport {
    let n = qgt.dim();
    let (g, sigma) = (qgt.g(), qgt.sigma());
    let det = qgt.det();
    let mut pairwise = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            let variance_product = g[(j, j)] * g[(k, k)];
            let covariance_sq = g[(j, k)] * g[(j, k)];
            let curvature_sq = sigma[(j, k)] * sigma[(j, k)];
            let margin = variance_product - covariance_sq - curvature_sq;
            pairwise.push(PairwiseMinor {
                j,
                k,
                variance_product,
                covariance_sq,
                curvature_sq,
                margin,
                satisfied: margin >= -MINOR_TOLERANCE,
            });
        }
    }
    UncertaintyReport {
        det,
        schroedinger_ok: det >= -DET_TOLERANCE,
        pairwise,
    }
}
