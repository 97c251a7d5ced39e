//! Exact joint computation of K principal components.
//!
//! The best orthonormal D x K basis under the summed-absolute-projection
//! criterion is recovered from the sign matrix maximizing the nuclear norm
//! of `X B`: factor `X B_opt = U S V^T` and return `R = U V^T`. The sign
//! search is exhaustive over canonical N x K sign matrices (first row all
//! +1, columns nondecreasing), which is exact at desk scale.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numlin::{compact_svd, complete_orthonormal, default_rel_tol, ensure_finite, nuclear_norm};
use crate::sign::{SignMatrix, SignVector};

/// Default cap on (N-1)*K for the exhaustive sign-matrix search
/// (~4M canonical matrices).
pub const DEFAULT_MULTI_CAP: usize = 22;

/// Orthonormal D x K basis: `R^T R = I_K` within 1e-10.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    r: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Validates orthonormality of the columns.
    pub fn new(r: DMatrix<f64>) -> Result<Self> {
        ensure_finite(&r)?;
        let k = r.ncols();
        let dev = (r.transpose() * &r - DMatrix::identity(k, k)).amax();
        if dev > 1e-10 {
            return Err(Error::NonUnitVector { norm: dev });
        }
        Ok(Self { r })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    pub fn k(&self) -> usize {
        self.r.ncols()
    }

    /// Summed absolute projections of the columns of `x` onto the basis.
    pub fn l1_objective(&self, x: &DMatrix<f64>) -> f64 {
        (self.r.transpose() * x).iter().map(|v| v.abs()).sum()
    }
}

/// Output of [`procrustes_basis`].
#[derive(Debug, Clone)]
pub struct Procrustes {
    pub basis: SubspaceBasis,
    /// True when `rank(A) < K`: the completion directions are not pinned
    /// by `A` and were chosen deterministically.
    pub rank_deficient: bool,
}

/// Orthonormal maximizer of `tr(R^T A)` over D x K bases: `R = U V^T`
/// from the compact SVD of `A`, orthonormally completed when `A` has
/// rank below K. The attained trace equals the nuclear norm of `A`.
pub fn procrustes_basis(a: &DMatrix<f64>) -> Result<Procrustes> {
    let (d, k) = (a.nrows(), a.ncols());
    if k > d {
        return Err(Error::DimensionMismatch {
            context: format!("no orthonormal {d} x {k} basis exists with K > D"),
        });
    }
    let f = compact_svd(a, default_rel_tol(d, k))?;
    let rank = f.rank();
    if rank == k {
        return Ok(Procrustes {
            basis: SubspaceBasis::new(&f.u * f.v.transpose())?,
            rank_deficient: false,
        });
    }
    let u = complete_orthonormal(&f.u, k)?;
    let v = complete_orthonormal(&f.v, k)?;
    Ok(Procrustes {
        basis: SubspaceBasis::new(u * v.transpose())?,
        rank_deficient: true,
    })
}

/// Sum of singular values of the matrix whose Gram matrix is `g` (K x K,
/// symmetric PSD): sum of square roots of the eigenvalues.
fn nuclear_from_gram(g: &DMatrix<f64>) -> f64 {
    match g.nrows() {
        1 => g[(0, 0)].max(0.0).sqrt(),
        2 => {
            let (a, b, c) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
            let half_tr = 0.5 * (a + c);
            let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
            (half_tr + disc).max(0.0).sqrt() + (half_tr - disc).max(0.0).sqrt()
        }
        _ => SymmetricEigen::new(g.clone())
            .eigenvalues
            .iter()
            .map(|l| l.max(0.0).sqrt())
            .sum(),
    }
}

/// Decodes pattern index `p` into a canonical sign column of length `n`
/// (first entry +1); integer order equals lexicographic order (-1 < +1).
fn decode_column(p: u64, n: usize) -> SignVector {
    let mut entries = vec![1i8; n];
    for (r, e) in entries.iter_mut().enumerate().skip(1) {
        *e = if (p >> (n - 1 - r)) & 1 == 1 { 1 } else { -1 };
    }
    SignVector::from_signs(entries).expect("entries are +/-1")
}

fn sign_at(pattern: u64, row: usize, n: usize) -> u64 {
    if row == 0 {
        1
    } else {
        (pattern >> (n - 1 - row)) & 1
    }
}

/// Row-major flattened comparison of two pattern tuples (-1 < +1).
fn cmp_tuples(a: &[u64], b: &[u64], n: usize) -> std::cmp::Ordering {
    for row in 0..n {
        for j in 0..a.len() {
            let sa = sign_at(a[j], row, n);
            let sb = sign_at(b[j], row, n);
            if sa != sb {
                return sa.cmp(&sb);
            }
        }
    }
    std::cmp::Ordering::Equal
}

/// Enumerates nondecreasing completions of a pattern tuple and keeps the
/// best (value, tuple) under the flattened tie-break.
fn scan_completions(
    prefix: &mut Vec<u64>,
    k: usize,
    p_total: u64,
    n: usize,
    cols: &[nalgebra::DVector<f64>],
    gcols: &[nalgebra::DVector<f64>],
    best: &mut Option<(f64, Vec<u64>)>,
) {
    if prefix.len() == k {
        let mut gram = DMatrix::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = cols[prefix[i] as usize].dot(&gcols[prefix[j] as usize]);
                gram[(i, j)] = v;
                gram[(j, i)] = v;
            }
        }
        let value = nuclear_from_gram(&gram);
        let better = match best {
            None => true,
            Some((bv, bt)) => {
                value > *bv || (value == *bv && cmp_tuples(prefix, bt, n) == std::cmp::Ordering::Less)
            }
        };
        if better {
            *best = Some((value, prefix.clone()));
        }
        return;
    }
    let lo = prefix.last().copied().unwrap_or(0);
    for p in lo..p_total {
        prefix.push(p);
        scan_completions(prefix, k, p_total, n, cols, gcols, best);
        prefix.pop();
    }
}

/// Exhaustive search for the sign matrix maximizing the nuclear norm of
/// `X B`, with the default cap on (N-1)*K.
pub fn solve_exhaustive_multi(x: &DMatrix<f64>, k: usize) -> Result<(SignMatrix, f64)> {
    solve_exhaustive_multi_with_cap(x, k, DEFAULT_MULTI_CAP)
}

/// Exhaustive sign-matrix search with an explicit cap.
///
/// Column flips and column permutations leave the nuclear norm of `X B`
/// unchanged, so the space is reduced to canonical matrices: first row
/// all +1, columns in nondecreasing lexicographic order. Ties resolve to
/// the row-major-flattened lexicographically smallest matrix.
pub fn solve_exhaustive_multi_with_cap(
    x: &DMatrix<f64>,
    k: usize,
    cap: usize,
) -> Result<(SignMatrix, f64)> {
    let n = x.ncols();
    let d = x.nrows();
    if k == 0 || k > d {
        return Err(Error::DimensionMismatch {
            context: format!("need 1 <= K <= D, got K={k}, D={d}"),
        });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch {
            context: "sign-matrix search needs at least one column".to_string(),
        });
    }
    let required = (n - 1) * k;
    if required > cap {
        return Err(Error::CapExceeded {
            cap_name: "multi_cap",
            cap,
            required,
        });
    }
    ensure_finite(x)?;

    let gram = x.transpose() * x;
    let p_total: u64 = 1 << (n - 1);
    let cols: Vec<nalgebra::DVector<f64>> =
        (0..p_total).map(|p| decode_column(p, n).to_dvector()).collect();
    let gcols: Vec<nalgebra::DVector<f64>> = cols.par_iter().map(|c| &gram * c).collect();

    let best = (0..p_total)
        .into_par_iter()
        .map(|first| {
            let mut local = None;
            let mut prefix = vec![first];
            scan_completions(&mut prefix, k, p_total, n, &cols, &gcols, &mut local);
            local
        })
        .reduce(
            || None,
            |a, b| match (a, b) {
                (None, x) => x,
                (x, None) => x,
                (Some(a), Some(b)) => {
                    if b.0 > a.0 || (b.0 == a.0 && cmp_tuples(&b.1, &a.1, n) == std::cmp::Ordering::Less)
                    {
                        Some(b)
                    } else {
                        Some(a)
                    }
                }
            },
        )
        .expect("nonempty search space");

    let columns: Vec<SignVector> = best.1.iter().map(|&p| decode_column(p, n)).collect();
    let b = SignMatrix::from_columns(columns)?;
    // Report the SVD-grade value rather than the Gram-path scan metric.
    let value = nuclear_norm(&(x * b.to_dmatrix()));
    Ok((b, value))
}

/// Output of the joint K-component solver.
#[derive(Debug, Clone)]
pub struct MultiResult {
    /// Orthonormal D x K basis maximizing the L1 projection objective.
    pub basis: SubspaceBasis,
    /// Optimal canonical sign matrix.
    pub sign_matrix: SignMatrix,
    /// Attained objective: sum of absolute projections onto the basis.
    pub objective: f64,
    /// True when `rank(X B_opt) < K`; completion columns were drawn from
    /// the left singular vectors of `X` (then coordinate axes) and are
    /// not pinned by the sign search.
    pub rank_deficient: bool,
    /// Wall time in seconds.
    pub elapsed: f64,
}

/// Exact K-component L1 subspace with the default cap.
pub fn l1_multi_optimal(x: &DMatrix<f64>, k: usize) -> Result<MultiResult> {
    l1_multi_optimal_with_cap(x, k, DEFAULT_MULTI_CAP)
}

/// Exact K-component L1 subspace: sign-matrix search, then the
/// orthonormal factor of `X B_opt`.
pub fn l1_multi_optimal_with_cap(x: &DMatrix<f64>, k: usize, cap: usize) -> Result<MultiResult> {
    let start = Instant::now();
    ensure_finite(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let (sign_matrix, _) = solve_exhaustive_multi_with_cap(x, k, cap)?;
    let a = x * sign_matrix.to_dmatrix();

    let f = compact_svd(&a, default_rel_tol(a.nrows(), a.ncols()))?;
    let rank = f.rank();
    let (basis, rank_deficient) = if rank == k {
        (SubspaceBasis::new(&f.u * f.v.transpose())?, false)
    } else {
        // Deterministic completion: next left singular vectors of X
        // itself, then coordinate axes once X's rank is exhausted.
        let mut u = DMatrix::zeros(x.nrows(), k);
        u.view_mut((0, 0), (x.nrows(), rank)).copy_from(&f.u);
        let mut filled = rank;
        let fx = compact_svd(x, default_rel_tol(x.nrows(), x.ncols()))?;
        for j in 0..fx.u.ncols() {
            if filled == k {
                break;
            }
            let mut c = fx.u.column(j).into_owned();
            for _ in 0..2 {
                for t in 0..filled {
                    let proj = u.column(t).dot(&c);
                    for i in 0..c.len() {
                        c[i] -= proj * u[(i, t)];
                    }
                }
            }
            let norm = c.norm();
            if norm > 1e-8 {
                c /= norm;
                u.column_mut(filled).copy_from(&c);
                filled += 1;
            }
        }
        let u = complete_orthonormal(&u.columns(0, filled).into_owned(), k)?;
        let v = complete_orthonormal(&f.v, k)?;
        (SubspaceBasis::new(u * v.transpose())?, true)
    };

    let objective = basis.l1_objective(x);
    Ok(MultiResult {
        basis,
        sign_matrix,
        objective,
        rank_deficient,
        elapsed: start.elapsed().as_secs_f64(),
    })
}
