//! Shared generators and independent oracles for the integration suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// D x N matrix with i.i.d. standard normal entries.
pub fn gauss_matrix(rng: &mut impl Rng, d: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Independent brute force for the joint problem: enumerates all
/// 2^((N-1)K) sign matrices with first row +1 (no column-order
/// reduction) and scores each by the SVD-based nuclear norm.
pub fn brute_force_multi_value(x: &DMatrix<f64>, k: usize) -> f64 {
    let n = x.ncols();
    let bits = (n - 1) * k;
    assert!(bits < 63, "oracle only runs at desk scale");
    let mut best = f64::NEG_INFINITY;
    for mask in 0..(1u64 << bits) {
        let mut b = DMatrix::from_element(n, k, 1.0);
        for j in 0..k {
            for r in 1..n {
                if (mask >> (j * (n - 1) + r - 1)) & 1 == 1 {
                    b[(r, j)] = -1.0;
                }
            }
        }
        let value = l1pca::nuclear_norm(&(x * b));
        if value > best {
            best = value;
        }
    }
    best
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}
