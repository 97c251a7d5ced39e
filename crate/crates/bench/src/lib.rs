//! Shared instance generators for the solver benchmarks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random D x N matrix with i.i.d. uniform(-1, 1) entries.
pub fn random_matrix(d: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(d, n, |_, _| rng.random_range(-1.0..1.0))
}
