//! Dense linear-algebra kernels shared by every solver module.
//!
//! All routines operate on `nalgebra::DMatrix<f64>` and are pure functions
//! of their inputs. The SVD itself is delegated to nalgebra; this module
//! fixes a reproducible sign convention, applies a relative rank cutoff,
//! and adds the derived quantities the solvers need (one-dimensional null
//! spaces, nuclear norm, effective rank).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default relative singular-value cutoff: `1e-9 * max(rows, cols)`.
///
/// Singular values at or below `rel_tol * sigma_1` are treated as zero.
pub fn default_rel_tol(rows: usize, cols: usize) -> f64 {
    1e-9 * rows.max(cols) as f64
}

/// Rejects matrices containing NaN or infinite entries.
pub fn ensure_finite(m: &DMatrix<f64>) -> Result<()> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            if !m[(row, col)].is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

fn is_zero(m: &DMatrix<f64>) -> bool {
    m.iter().all(|&x| x == 0.0)
}

/// Compact SVD `M = U diag(singvals) V^T` truncated at the relative cutoff.
///
/// `U` is `rows x d`, `V` is `cols x d`, and `singvals` holds the `d`
/// singular values above `rel_tol * sigma_1`, sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DMatrix<f64>,
    pub singvals: DVector<f64>,
    pub v: DMatrix<f64>,
}

impl SvdFactors {
    /// Numerical rank retained by the factorization.
    pub fn rank(&self) -> usize {
        self.singvals.len()
    }

    /// Reconstructs `U diag(singvals) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = {
            let mut u = self.u.clone();
            for j in 0..u.ncols() {
                u.column_mut(j).scale_mut(self.singvals[j]);
            }
            u
        };
        scaled * self.v.transpose()
    }
}

/// Compact SVD with a deterministic sign convention.
///
/// Keeps only singular triplets with `sigma_i > rel_tol * sigma_1`. Each
/// column of `U` is flipped so its largest-magnitude entry is positive,
/// with the matching column of `V` flipped to preserve the product. This
/// makes the factorization reproducible across runs and platforms.
pub fn compact_svd(m: &DMatrix<f64>, rel_tol: f64) -> Result<SvdFactors> {
    ensure_finite(m)?;
    if is_zero(m) {
        return Err(Error::ZeroMatrix);
    }

    let svd = m.clone().svd(true, true);
    let u_full = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let sigma = svd.singular_values;

    // nalgebra sorts descending, but ordering is re-derived here so the
    // cutoff and sign pass never depend on upstream guarantees.
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).expect("finite singular values"));

    let sigma_max = sigma[order[0]];
    let cutoff = rel_tol * sigma_max;
    let kept: Vec<usize> = order.into_iter().filter(|&i| sigma[i] > cutoff).collect();
    debug_assert!(!kept.is_empty(), "nonzero matrix has sigma_1 > 0");

    let d = kept.len();
    let mut u = DMatrix::zeros(m.nrows(), d);
    let mut v = DMatrix::zeros(m.ncols(), d);
    let mut singvals = DVector::zeros(d);
    for (j, &src) in kept.iter().enumerate() {
        singvals[j] = sigma[src];
        u.column_mut(j).copy_from(&u_full.column(src));
        v.column_mut(j).copy_from(&v_t.row(src).transpose());

        let mut imax = 0;
        let mut best = -1.0;
        for i in 0..u.nrows() {
            let a = u[(i, j)].abs();
            if a > best {
                best = a;
                imax = i;
            }
        }
        if u[(imax, j)] < 0.0 {
            u.column_mut(j).neg_mut();
            v.column_mut(j).neg_mut();
        }
    }

    Ok(SvdFactors { u, singvals, v })
}

/// Outcome of a one-dimensional null-space extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum NullSpaceOutcome {
    /// Unit vector `c` with `M c = 0` and the last entry nonnegative.
    Unit(DVector<f64>),
    /// `M` is row-rank-deficient: its null space has dimension >= 2 and
    /// carries no isolated direction. Callers skip such subsets.
    Degenerate,
}

/// Unit null vector of a `(k-1) x k` matrix.
///
/// For a full-row-rank input the null space is one-dimensional and the
/// returned `c` satisfies `||c|| = 1`, `M c = 0`, `c[k-1] >= 0`. A
/// row-rank-deficient input yields [`NullSpaceOutcome::Degenerate`].
pub fn null_space_unit(m: &DMatrix<f64>) -> Result<NullSpaceOutcome> {
    if m.nrows() + 1 != m.ncols() {
        return Err(Error::DimensionMismatch {
            context: format!("null_space_unit needs (k-1) x k, got {} x {}", m.nrows(), m.ncols()),
        });
    }
    ensure_finite(m)?;

    let k = m.ncols();
    if m.nrows() == 0 {
        return Ok(NullSpaceOutcome::Unit(DVector::from_element(1, 1.0)));
    }

    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t"); // (k-1) x k, rows span the row space
    let sigma = svd.singular_values;

    let sigma_max = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    if sigma_max == 0.0 {
        return Ok(NullSpaceOutcome::Degenerate);
    }
    let cutoff = default_rel_tol(m.nrows(), m.ncols()) * sigma_max;
    if sigma.iter().any(|&s| s <= cutoff) {
        return Ok(NullSpaceOutcome::Degenerate);
    }

    // Seed with the coordinate axis least represented in the row space,
    // project it out, and re-orthogonalize once for eps-level residuals.
    let mut seed = 0;
    let mut least = f64::INFINITY;
    for j in 0..k {
        let energy: f64 = (0..k - 1).map(|i| v_t[(i, j)] * v_t[(i, j)]).sum();
        if energy < least {
            least = energy;
            seed = j;
        }
    }
    let mut c = DVector::zeros(k);
    c[seed] = 1.0;
    for _ in 0..2 {
        for i in 0..k - 1 {
            let row = v_t.row(i);
            let proj = row.transpose().dot(&c);
            for j in 0..k {
                c[j] -= proj * v_t[(i, j)];
            }
        }
    }
    let norm = c.norm();
    debug_assert!(norm > 0.0);
    c /= norm;

    if c[k - 1] < 0.0 {
        c.neg_mut();
    } else if c[k - 1] == 0.0 {
        if let Some(last) = (0..k).rev().find(|&j| c[j] != 0.0) {
            if c[last] < 0.0 {
                c.neg_mut();
            }
        }
    }

    Ok(NullSpaceOutcome::Unit(c))
}

/// Sum of singular values. Zero exactly for the zero matrix.
pub fn nuclear_norm(m: &DMatrix<f64>) -> f64 {
    debug_assert!(m.iter().all(|x| x.is_finite()));
    if is_zero(m) {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Count of singular values above `rel_tol * sigma_1`.
pub fn effective_rank(m: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    ensure_finite(m)?;
    if is_zero(m) {
        return Err(Error::ZeroMatrix);
    }
    let sigma = m.clone().svd(false, false).singular_values;
    let sigma_max = sigma.iter().fold(0.0_f64, |a, &b| a.max(b));
    Ok(sigma.iter().filter(|&&s| s > rel_tol * sigma_max).count())
}

/// Extends orthonormal columns to `total` columns by orthogonalizing
/// coordinate axes against the existing span (two Gram-Schmidt passes).
pub(crate) fn complete_orthonormal(basis: &DMatrix<f64>, total: usize) -> Result<DMatrix<f64>> {
    let dim = basis.nrows();
    let have = basis.ncols();
    if total > dim {
        return Err(Error::DimensionMismatch {
            context: format!("cannot fit {total} orthonormal columns in dimension {dim}"),
        });
    }
    let mut out = DMatrix::zeros(dim, total);
    out.view_mut((0, 0), (dim, have)).copy_from(basis);

    let mut filled = have;
    let mut axis = 0;
    while filled < total {
        if axis >= dim {
            return Err(Error::DimensionMismatch {
                context: "orthonormal completion ran out of directions".to_string(),
            });
        }
        let mut c = DVector::zeros(dim);
        c[axis] = 1.0;
        axis += 1;
        for _ in 0..2 {
            for j in 0..filled {
                let col = out.column(j);
                let proj = col.dot(&c);
                for i in 0..dim {
                    c[i] -= proj * out[(i, j)];
                }
            }
        }
        let norm = c.norm();
        if norm < 1e-8 {
            continue; // axis already inside the span
        }
        c /= norm;
        out.column_mut(filled).copy_from(&c);
        filled += 1;
    }
    Ok(out)
}
