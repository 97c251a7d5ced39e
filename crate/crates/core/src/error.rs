//! Error type shared by all solver and experiment modules.

use thiserror::Error;

/// Errors from solvers, kernels, and experiment harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The input matrix has no nonzero entry, so no factorization or
    /// component direction is defined.
    #[error("matrix is identically zero")]
    ZeroMatrix,

    /// A NaN or infinite entry was found in an input.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// Input dimensions are incompatible with the operation.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// An exhaustive search would exceed the configured cap.
    #[error("{cap_name} exceeded: search size driver {required} > cap {cap}")]
    CapExceeded {
        cap_name: &'static str,
        cap: usize,
        required: usize,
    },

    /// Requested component count exceeds the numerical rank of the data.
    #[error("requested {k} components but data rank is {rank}")]
    KExceedsRank { k: usize, rank: usize },

    /// Deflation consumed all of the data's rank before producing the
    /// requested number of components.
    #[error("rank exhausted after {produced} of {requested} deflation stages")]
    RankExhausted { produced: usize, requested: usize },

    /// The rank-one projection X sgn(q1) vanished, so the cheap
    /// approximation direction is undefined.
    #[error("sign-quantized projection is zero; approximation undefined")]
    DegenerateProjection,

    /// A vector required to be unit-norm was not.
    #[error("expected unit vector, got norm {norm}")]
    NonUnitVector { norm: f64 },

    /// A covariance matrix was not symmetric positive definite.
    #[error("covariance is not symmetric positive definite")]
    NonSpdCovariance,

    /// A configured index points outside the data.
    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
