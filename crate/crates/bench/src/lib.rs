//! Shared fixtures for the benchmarks in `benches/`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use segmint_core::Matrix;

/// `n` points scattered uniformly around `centers` random centres in `d` dimensions.
pub fn blobs(n: usize, d: usize, centers: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..centers * d).map(|_| rng.random_range(-5.0..5.0)).collect();
    let data = (0..n)
        .flat_map(|i| (0..d).map(move |j| (i % centers) * d + j))
        .map(|idx| c[idx] + rng.random_range(-1.0..1.0))
        .collect();
    Matrix::from_vec(n, d, data).expect("shape")
}
