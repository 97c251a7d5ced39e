//! Reference methods the exact solvers are compared against: L2 PCA,
//! the fixed-point sign iteration, and greedy deflation.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::multi::SubspaceBasis;
use crate::numlin::{compact_svd, default_rel_tol, effective_rank, ensure_finite};
use crate::rng::substream;
use crate::sign::{sign_quantize, SignVector};
use crate::single::{gram_factor, l1pc_optimal};

/// Top-K left singular vectors of `x`: the orthonormal basis maximizing
/// the summed squared projections of the columns.
pub fn l2_subspace(x: &DMatrix<f64>, k: usize) -> Result<SubspaceBasis> {
    let f = compact_svd(x, default_rel_tol(x.nrows(), x.ncols()))?;
    if k == 0 || k > f.rank() {
        return Err(Error::KExceedsRank { k, rank: f.rank() });
    }
    SubspaceBasis::new(f.u.columns(0, k).into_owned())
}

/// Outcome of the fixed-point sign iteration.
#[derive(Debug, Clone)]
pub struct FixedPointOutcome {
    /// Final sign vector, canonicalized to first entry +1.
    pub sign_vector: SignVector,
    /// True when an iteration reproduced its input exactly.
    pub converged: bool,
    /// Iterations performed.
    pub iters: usize,
}

/// Iterates `b <- sgn(X^T X b)` from `b0` until a fixed point or
/// `max_iter`. Zero products keep the previous sign of that coordinate,
/// which prevents cycling. The projection norm `||X b||` never decreases
/// along the iteration, but the reached fixed point is in general only a
/// local maximizer.
pub fn fixed_point_l1(x: &DMatrix<f64>, b0: &SignVector, max_iter: usize) -> Result<FixedPointOutcome> {
    ensure_finite(x)?;
    if b0.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            context: format!("start vector length {} != column count {}", b0.len(), x.ncols()),
        });
    }
    let gram = x.transpose() * x;
    let mut b = b0.clone();
    for iter in 1..=max_iter {
        let v = &gram * b.to_dvector();
        let mut next = b.clone();
        for i in 0..v.len() {
            if v[i] > 0.0 {
                next.set(i, 1);
            } else if v[i] < 0.0 {
                next.set(i, -1);
            }
        }
        if next == b {
            return Ok(FixedPointOutcome {
                sign_vector: b.canonical(),
                converged: true,
                iters: iter,
            });
        }
        b = next;
    }
    Ok(FixedPointOutcome {
        sign_vector: b.canonical(),
        converged: false,
        iters: max_iter,
    })
}

/// Best-of-restarts fixed-point iteration: one start at the sign of the
/// dominant factor column plus `restarts` random sign starts. Returns the
/// best sign vector and its projection norm `||X b||`; ties resolve to
/// the lexicographically smallest vector.
pub fn fixed_point_multistart(
    x: &DMatrix<f64>,
    restarts: usize,
    max_iter: usize,
    seed: u64,
) -> Result<(SignVector, f64)> {
    ensure_finite(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let n = x.ncols();
    let q = gram_factor(x, default_rel_tol(x.nrows(), n))?;
    let mut starts = vec![sign_quantize(&q.column(0).into_owned())];
    for idx in 0..restarts {
        let mut rng = substream(seed, "fixed_point.start", idx as u64);
        let g = DVector::from_fn(n, |_, _| rand::Rng::sample::<f64, _>(&mut rng, rand_distr::StandardNormal));
        starts.push(sign_quantize(&g));
    }

    let outcomes: Vec<(SignVector, f64)> = starts
        .par_iter()
        .map(|b0| {
            let out = fixed_point_l1(x, b0, max_iter)?;
            let value = (x * out.sign_vector.to_dvector()).norm();
            Ok((out.sign_vector, value))
        })
        .collect::<Result<_>>()?;
    let best = outcomes
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
        .expect("at least one start");
    Ok(best)
}

/// Greedy K-component construction: each stage solves the exact
/// single-component problem on data projected orthogonally to the
/// components found so far. Dominated by the joint solver in objective,
/// but polynomial for any K.
pub fn greedy_deflation_l1(x: &DMatrix<f64>, k: usize) -> Result<SubspaceBasis> {
    ensure_finite(x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let rank = effective_rank(x, default_rel_tol(x.nrows(), x.ncols()))?;
    if k == 0 || k > rank {
        return Err(Error::KExceedsRank { k, rank });
    }

    let rel_tol = default_rel_tol(x.nrows(), x.ncols());
    let mut basis = DMatrix::zeros(x.nrows(), k);
    let mut deflated = x.clone();
    for stage in 0..k {
        let res = l1pc_optimal(&deflated, rel_tol).map_err(|e| match e {
            Error::ZeroMatrix => Error::RankExhausted {
                produced: stage,
                requested: k,
            },
            other => other,
        })?;
        let mut c = res.component;
        // The component already lies in the deflated column space; one
        // cleanup pass keeps the accumulated basis orthonormal to 1e-10.
        for j in 0..stage {
            let proj = basis.column(j).dot(&c);
            for i in 0..c.len() {
                c[i] -= proj * basis[(i, j)];
            }
        }
        let norm = c.norm();
        if norm < 1e-10 {
            return Err(Error::RankExhausted {
                produced: stage,
                requested: k,
            });
        }
        c /= norm;
        basis.column_mut(stage).copy_from(&c);
        let coeffs = c.transpose() * &deflated;
        deflated -= &c * coeffs;
    }
    SubspaceBasis::new(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multi::l1_multi_optimal;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn l2_subspace_of_diagonal_picks_dominant_axis() {
        let r = l2_subspace(&mat(2, 2, &[3.0, 0.0, 0.0, 1.0]), 1).unwrap();
        let col = r.matrix().column(0);
        assert_relative_eq!(col[0].abs(), 1.0, max_relative = 1e-12);
        assert!(col[1].abs() < 1e-12);
    }

    #[test]
    fn l2_subspace_of_rank_one_data() {
        let r = l2_subspace(&mat(2, 2, &[1.0, 2.0, 2.0, 4.0]), 1).unwrap();
        let s5 = 5.0_f64.sqrt();
        let col = r.matrix().column(0);
        assert_relative_eq!(col[0].abs(), 1.0 / s5, max_relative = 1e-10);
        assert_relative_eq!(col[1].abs(), 2.0 / s5, max_relative = 1e-10);
        assert!(matches!(
            l2_subspace(&mat(2, 2, &[1.0, 2.0, 2.0, 4.0]), 2),
            Err(Error::KExceedsRank { k: 2, rank: 1 })
        ));
    }

    #[test]
    fn full_l2_basis_preserves_frobenius_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let x = DMatrix::from_fn(3, 6, |_, _| rng.random_range(-1.0..1.0));
        let r = l2_subspace(&x, 3).unwrap();
        assert_relative_eq!((r.matrix().transpose() * &x).norm(), x.norm(), max_relative = 1e-10);
    }

    #[test]
    fn fixed_point_stays_at_the_optimum() {
        let x = mat(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let opt = l1pc_optimal(&x, default_rel_tol(2, 3)).unwrap();
        let out = fixed_point_l1(&x, &opt.sign_vector, 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.iters, 1);
        assert_eq!(out.sign_vector, opt.sign_vector);
    }

    #[test]
    fn fixed_point_objective_is_bounded_by_the_optimum() {
        let x = mat(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let b0 = SignVector::from_signs(vec![1, -1, -1]).unwrap();
        let out = fixed_point_l1(&x, &b0, 50).unwrap();
        let value = (&x * out.sign_vector.to_dvector()).norm();
        assert!(value <= 8.0_f64.sqrt() + 1e-12);
    }

    #[test]
    fn fixed_point_on_rank_one_data_recovers_the_closed_form() {
        let x = mat(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b0 = SignVector::from_signs(vec![-1, 1]).unwrap();
        let out = fixed_point_l1(&x, &b0, 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.sign_vector.as_slice(), &[1, 1]);
    }

    #[test]
    fn fixed_point_objective_never_decreases() {
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..20 {
            let d = rng.random_range(2..=4);
            let n = rng.random_range(4..=9);
            let x = DMatrix::from_fn(d, n, |_, _| rng.random_range(-1.0..1.0));
            let gram = x.transpose() * &x;
            let entries: Vec<i8> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            let mut b = SignVector::from_signs(entries).unwrap();
            let mut value = (&x * b.to_dvector()).norm();
            for _ in 0..64 {
                let v = &gram * b.to_dvector();
                let mut next = b.clone();
                for i in 0..n {
                    if v[i] > 0.0 {
                        next.set(i, 1);
                    } else if v[i] < 0.0 {
                        next.set(i, -1);
                    }
                }
                if next == b {
                    break;
                }
                let next_value = (&x * next.to_dvector()).norm();
                assert!(next_value >= value - 1e-12);
                value = next_value;
                b = next;
            }
        }
    }

    #[test]
    fn multistart_is_deterministic_and_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..10 {
            let d = rng.random_range(2..=4);
            let n = rng.random_range(4..=9);
            let x = DMatrix::from_fn(d, n, |_, _| rng.random_range(-1.0..1.0));
            let (b1, v1) = fixed_point_multistart(&x, 8, 100, 5).unwrap();
            let (b2, v2) = fixed_point_multistart(&x, 8, 100, 5).unwrap();
            assert_eq!(b1, b2);
            assert_eq!(v1, v2);
            let opt = l1pc_optimal(&x, default_rel_tol(d, n)).unwrap();
            let opt_value = (&x * opt.sign_vector.to_dvector()).norm();
            assert!(v1 <= opt_value + 1e-9 * opt_value);
        }
    }

    #[test]
    fn deflation_single_stage_matches_the_exact_component() {
        let x = mat(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]);
        let r = greedy_deflation_l1(&x, 1).unwrap();
        let opt = l1pc_optimal(&x, default_rel_tol(2, 3)).unwrap();
        let dot = r.matrix().column(0).dot(&opt.component);
        assert_relative_eq!(dot.abs(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn deflation_is_orthonormal_and_dominated_by_joint_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for _ in 0..10 {
            let x = DMatrix::from_fn(3, 5, |_, _| rng.random_range(-1.0..1.0));
            let greedy = greedy_deflation_l1(&x, 2).unwrap();
            let gram = greedy.matrix().transpose() * greedy.matrix();
            assert!((gram - DMatrix::identity(2, 2)).amax() <= 1e-10);
            let joint = l1_multi_optimal(&x, 2).unwrap();
            assert!(greedy.l1_objective(&x) <= joint.objective + 1e-9 * joint.objective);
            let l2 = l2_subspace(&x, 2).unwrap();
            assert!(l2.l1_objective(&x) <= joint.objective + 1e-9 * joint.objective);
        }
    }

    #[test]
    fn deflation_on_identity_matches_the_joint_optimum() {
        let r = greedy_deflation_l1(&DMatrix::identity(2, 2), 2).unwrap();
        assert_relative_eq!(r.l1_objective(&DMatrix::identity(2, 2)), 2.0 * 2.0_f64.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn deflation_rejects_k_beyond_rank() {
        let x = mat(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(greedy_deflation_l1(&x, 2), Err(Error::KExceedsRank { .. })));
    }
}
