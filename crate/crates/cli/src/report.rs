//! Machine-readable run reports.

use l1pca::SignVector;
use serde::Serialize;

/// One JSON document per run: command, tool version, seed, config echo,
/// and numeric results. Re-running with the echoed config and seed
/// reproduces the numeric results exactly.
#[derive(Debug, Serialize)]
pub struct RunReport<C: Serialize, R: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: C,
    pub results: R,
    pub elapsed_s: f64,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Results of a solver invocation on one matrix.
#[derive(Debug, Serialize)]
pub struct ComponentResults {
    /// Sum of absolute projections onto the basis.
    pub objective_l1: f64,
    /// Frobenius norm of the projected data, for reference.
    pub objective_l2: f64,
    /// Basis columns, each of length D.
    pub components: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_vector: Option<SignVector>,
    /// Sign-matrix columns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_matrix: Option<Vec<SignVector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_deficient: Option<bool>,
}

/// Results of an oracle (brute-force) invocation.
#[derive(Debug, Serialize)]
pub struct OracleResults {
    pub objective: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_vector: Option<SignVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_matrix: Option<Vec<SignVector>>,
}
