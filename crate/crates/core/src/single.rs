//! Exact single-component maximum-L1-projection solver.
//!
//! The unit vector maximizing the summed absolute projections of the data
//! columns is `X b / ||X b||` for the best sign vector `b`, so the search
//! runs over {-1,+1}^N. Three exact routes are provided:
//!
//! - a closed form when the data has numerical rank one,
//! - exhaustive enumeration of the 2^(N-1) canonical sign vectors,
//! - enumeration of the candidate set swept out by `sgn(Q c)` as `c` scans
//!   the unit hypersphere, which has polynomial size for fixed rank.

use std::collections::HashSet;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::{compact_svd, ensure_finite, null_space_unit, NullSpaceOutcome};
use crate::sign::{sign_quantize, SignVector};

/// Default cap on N for the exhaustive 2^(N-1) search (~17M candidates).
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

/// Which exact route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Rank1,
    Exhaustive,
    Candidates,
}

/// Output of the single-component solver.
#[derive(Debug, Clone)]
pub struct L1Result {
    /// Unit-norm principal component (length D).
    pub component: DVector<f64>,
    /// Optimal sign vector, canonicalized to first entry +1.
    pub sign_vector: SignVector,
    /// Attained objective: sum of absolute projections of the columns.
    pub objective: f64,
    /// Route taken by the dispatcher.
    pub algorithm: Algorithm,
    /// Wall time in seconds.
    pub elapsed: f64,
}

/// Deduplicated sign vectors produced by the hypersphere scan.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    candidates: Vec<SignVector>,
    index: HashSet<SignVector>,
    source_rank: usize,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Candidates in construction order (canonical form, first entry +1).
    pub fn candidates(&self) -> &[SignVector] {
        &self.candidates
    }

    /// Column count of the factor the set was built from.
    pub fn source_rank(&self) -> usize {
        self.source_rank
    }

    /// Membership of the canonical form of `b`.
    pub fn contains(&self, b: &SignVector) -> bool {
        self.index.contains(&b.clone().canonical())
    }

    fn push(&mut self, b: SignVector) {
        let b = b.canonical();
        if self.index.insert(b.clone()) {
            self.candidates.push(b);
        }
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .saturating_mul((n - i) as u128)
            .checked_div((i + 1) as u128)
            .expect("exact division in binomial recurrence");
    }
    acc
}

/// Size of the candidate set for data of rank `d` in general position:
/// sum over g < d of C(n-1, g). Saturating.
pub fn candidate_count_estimate(n: usize, d: usize) -> u128 {
    (0..d).fold(0u128, |acc, g| acc.saturating_add(binomial(n.saturating_sub(1), g)))
}

/// Size-`k` subsets of `0..n` in colexicographic order.
struct Subsets {
    n: usize,
    state: Option<Vec<usize>>,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        let state = (k <= n).then(|| (0..k).collect());
        Self { n, state }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.state.clone()?;
        let k = current.len();
        let next = {
            let mut s = current.clone();
            let mut advanced = false;
            for t in 0..k {
                let bound = if t + 1 < k { s[t + 1] } else { self.n };
                if s[t] + 1 < bound {
                    s[t] += 1;
                    for (j, slot) in s.iter_mut().enumerate().take(t) {
                        *slot = j;
                    }
                    advanced = true;
                    break;
                }
            }
            advanced.then_some(s)
        };
        self.state = next;
        Some(current)
    }
}

/// Factor `Q` (N x d) with `Q Q^T = X^T X` and orthogonal columns, built
/// from the compact SVD of `X^T` as the singular-value-weighted left
/// factor. Column order follows nonincreasing singular values.
pub fn gram_factor(x: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let f = compact_svd(&x.transpose(), rel_tol)?;
    let mut q = f.u;
    for j in 0..q.ncols() {
        q.column_mut(j).scale_mut(f.singvals[j]);
    }
    Ok(q)
}

fn rows_of(q: &DMatrix<f64>, rows: &[usize], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols, |r, c| q[(rows[r], c)])
}

/// One subset of the scan: the null direction of the selected rows gives a
/// base sign pattern; each selected row's ambiguous entry is resolved from
/// the null direction of the remaining rows restricted to the leading
/// columns. Returns `None` for rank-deficient subsets.
fn candidate_for_subset(q: &DMatrix<f64>, subset: &[usize]) -> Result<Option<SignVector>> {
    let m = q.ncols();
    let qbar = rows_of(q, subset, m);
    let c = match null_space_unit(&qbar)? {
        NullSpaceOutcome::Unit(c) => c,
        NullSpaceOutcome::Degenerate => return Ok(None),
    };
    let mut b = sign_quantize(&(q * &c));
    for (j, &row) in subset.iter().enumerate() {
        let reduced = DMatrix::from_fn(m - 2, m - 1, |r, col| {
            let src = if r < j { r } else { r + 1 };
            qbar[(src, col)]
        });
        let sign = match null_space_unit(&reduced)? {
            NullSpaceOutcome::Unit(cp) => {
                let dot: f64 = (0..m - 1).map(|t| qbar[(j, t)] * cp[t]).sum();
                if dot < 0.0 {
                    -1
                } else {
                    1
                }
            }
            // Off general position the adjacent cell is not isolated;
            // fall back to the sign-quantize zero convention.
            NullSpaceOutcome::Degenerate => 1,
        };
        b.set(row, sign);
    }
    Ok(Some(b))
}

fn collect_candidates(q: &DMatrix<f64>, set: &mut CandidateSet) -> Result<()> {
    let n = q.nrows();
    let m = q.ncols();
    match m {
        1 => {
            set.push(sign_quantize(&q.column(0).into_owned()));
        }
        2 => {
            for i in 0..n {
                let row = DMatrix::from_fn(1, 2, |_, c| q[(i, c)]);
                let c = match null_space_unit(&row)? {
                    NullSpaceOutcome::Unit(c) => c,
                    NullSpaceOutcome::Degenerate => continue,
                };
                let mut b = sign_quantize(&(q * &c));
                b.set(i, if q[(i, 0)] < 0.0 { -1 } else { 1 });
                set.push(b);
            }
        }
        _ => {
            let subsets: Vec<Vec<usize>> = Subsets::new(n, m - 1).collect();
            let produced: Vec<Option<SignVector>> = subsets
                .par_iter()
                .map(|s| candidate_for_subset(q, s))
                .collect::<Result<_>>()?;
            for b in produced.into_iter().flatten() {
                set.push(b);
            }
            collect_candidates(&q.columns(0, m - 2).into_owned(), set)?;
        }
    }
    Ok(())
}

/// Builds the candidate sign-vector set of the factor `Q` (N x m).
///
/// For data in general position the set has size sum over g < m of
/// C(N-1, g) and contains an optimal sign vector for the matrix whose
/// factor `Q` is. Total work is O(N^m).
pub fn compute_candidates(q: &DMatrix<f64>) -> Result<CandidateSet> {
    let n = q.nrows();
    let m = q.ncols();
    if m < 1 || n < m {
        return Err(Error::DimensionMismatch {
            context: format!("compute_candidates needs N >= m >= 1, got N={n}, m={m}"),
        });
    }
    ensure_finite(q)?;
    let mut set = CandidateSet {
        candidates: Vec::new(),
        index: HashSet::new(),
        source_rank: m,
    };
    collect_candidates(q, &mut set)?;
    Ok(set)
}

/// Decodes enumeration index `k` into the canonical sign vector of length
/// `n` whose integer order matches lexicographic order (-1 < +1).
fn decode_canonical(k: u64, n: usize) -> SignVector {
    let mut entries = vec![1i8; n];
    for (r, e) in entries.iter_mut().enumerate().skip(1) {
        let bit = (k >> (n - 1 - r)) & 1;
        *e = if bit == 1 { 1 } else { -1 };
    }
    SignVector::from_signs(entries).expect("entries are +/-1")
}

fn exhaustive_scan(x: &DMatrix<f64>) -> (SignVector, f64) {
    let n = x.ncols();
    let total: u64 = 1 << (n - 1);
    let best = (0..total)
        .into_par_iter()
        .map(|k| {
            let b = decode_canonical(k, n);
            ((x * b.to_dvector()).norm(), k)
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    (decode_canonical(best.1, n), best.0)
}

/// Exhaustive search over the 2^(N-1) canonical sign vectors, default cap.
pub fn solve_exhaustive(x: &DMatrix<f64>) -> Result<(SignVector, f64)> {
    solve_exhaustive_with_cap(x, DEFAULT_EXHAUSTIVE_CAP)
}

/// Exhaustive search with an explicit cap on N.
///
/// Sign symmetry halves the space: the first entry is fixed to +1. Ties
/// resolve to the lexicographically smallest sign vector.
pub fn solve_exhaustive_with_cap(x: &DMatrix<f64>, cap: usize) -> Result<(SignVector, f64)> {
    let n = x.ncols();
    if n > cap {
        return Err(Error::CapExceeded {
            cap_name: "exhaustive_cap",
            cap,
            required: n,
        });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch {
            context: "exhaustive search needs at least one column".to_string(),
        });
    }
    ensure_finite(x)?;
    Ok(exhaustive_scan(x))
}

fn candidates_scan(x: &DMatrix<f64>, set: &CandidateSet) -> (SignVector, f64) {
    let mut best: Option<(f64, &SignVector)> = None;
    for b in set.candidates() {
        let value = (x * b.to_dvector()).norm();
        let better = match &best {
            None => true,
            Some((v, kept)) => value > *v || (value == *v && b < *kept),
        };
        if better {
            best = Some((value, b));
        }
    }
    let (value, b) = best.expect("candidate set is nonempty");
    (b.clone(), value)
}

/// Exact maximum-L1-projection principal component.
///
/// Dispatch: rank-one data uses the O(N) closed form; otherwise the
/// cheaper of exhaustive enumeration (when 2^(N-1) does not exceed the
/// estimated candidate count and N is within `exhaustive_cap`) and the
/// candidate scan. Every route returns the global optimum.
pub fn l1pc_optimal(x: &DMatrix<f64>, rel_tol: f64) -> Result<L1Result> {
    l1pc_optimal_with_cap(x, rel_tol, DEFAULT_EXHAUSTIVE_CAP)
}

/// [`l1pc_optimal`] with an explicit exhaustive-dispatch cap.
pub fn l1pc_optimal_with_cap(x: &DMatrix<f64>, rel_tol: f64, exhaustive_cap: usize) -> Result<L1Result> {
    let start = Instant::now();
    ensure_finite(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }

    let n = x.ncols();
    let q = gram_factor(x, rel_tol)?;
    let d = q.ncols();

    let (sign_vector, algorithm) = if d == 1 {
        (sign_quantize(&q.column(0).into_owned()).canonical(), Algorithm::Rank1)
    } else {
        let est = candidate_count_estimate(n, d);
        let exhaustive_size = 1u128 << (n - 1).min(127);
        if n <= exhaustive_cap && exhaustive_size <= est {
            (exhaustive_scan(x).0, Algorithm::Exhaustive)
        } else {
            let set = compute_candidates(&q)?;
            (candidates_scan(x, &set).0, Algorithm::Candidates)
        }
    };

    let proj = x * sign_vector.to_dvector();
    let norm = proj.norm();
    debug_assert!(norm > 0.0, "optimal projection of nonzero data is nonzero");
    let component = proj / norm;
    let objective = (x.transpose() * &component).iter().map(|v| v.abs()).sum();

    Ok(L1Result {
        component,
        sign_vector,
        objective,
        algorithm,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Cheap approximation: sign-quantize the dominant factor column and
/// project. Exact when the data has rank one; otherwise a quality
/// low-cost stand-in for the exact component.
pub fn rank1_approx_component(x: &DMatrix<f64>) -> Result<DVector<f64>> {
    ensure_finite(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let q = gram_factor(x, crate::numlin::default_rel_tol(x.nrows(), x.ncols()))?;
    let b = sign_quantize(&q.column(0).into_owned());
    let proj = x * b.to_dvector();
    let norm = proj.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateProjection);
    }
    Ok(proj / norm)
}
