//! Exact L1-norm principal component analysis.
//!
//! Finds unit directions maximizing the summed absolute projections of
//! data columns, a subspace criterion far less sensitive to outliers
//! than the usual least-squares one. The crate provides:
//!
//! - [`single`]: exact single-component solvers (closed form for rank-one
//!   data, exhaustive sign search, polynomial candidate enumeration),
//! - [`multi`]: exact joint computation of K components by nuclear-norm
//!   maximization over sign matrices,
//! - [`baselines`]: reference methods (L2 PCA, the fixed-point sign
//!   iteration, greedy deflation),
//! - [`experiments`]: seeded harnesses for outlier-robust dimensionality
//!   reduction and MUSIC direction-of-arrival estimation,
//! - [`numlin`]: the dense linear-algebra kernels behind all of it.
//!
//! Matrices are `nalgebra::DMatrix<f64>` with samples as columns: a data
//! set of N samples in dimension D is a D x N matrix.

pub mod baselines;
pub mod error;
pub mod experiments;
pub mod multi;
pub mod numlin;
pub mod rng;
pub mod sign;
pub mod single;

pub use baselines::{
    fixed_point_l1, fixed_point_multistart, greedy_deflation_l1, l2_subspace, FixedPointOutcome,
};
pub use error::{Error, Result};
pub use multi::{
    l1_multi_optimal, l1_multi_optimal_with_cap, procrustes_basis, solve_exhaustive_multi,
    solve_exhaustive_multi_with_cap, MultiResult, Procrustes, SubspaceBasis, DEFAULT_MULTI_CAP,
};
pub use numlin::{
    compact_svd, default_rel_tol, effective_rank, nuclear_norm, null_space_unit, NullSpaceOutcome,
    SvdFactors,
};
pub use sign::{sign_quantize, SignMatrix, SignVector};
pub use single::{
    candidate_count_estimate, compute_candidates, gram_factor, l1pc_optimal, l1pc_optimal_with_cap,
    rank1_approx_component, solve_exhaustive, solve_exhaustive_with_cap, Algorithm, CandidateSet,
    L1Result, DEFAULT_EXHAUSTIVE_CAP,
};
