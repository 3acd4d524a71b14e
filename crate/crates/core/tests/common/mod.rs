#![allow(dead_code)]

use markov2::generator::{random_positive, RandomTensorSpec};
use markov2::TransitionTensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Valid tensor with roughly `zero_fraction` of its entries set to zero.
/// Every fiber keeps at least one positive entry.
pub fn sparse_tensor(n: usize, zero_fraction: f64, seed: u64) -> TransitionTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = (0..n * n * n).map(|_| rng.random::<f64>()).collect();
    for fiber in data.chunks_mut(n) {
        let keep = rng.random_range(0..n);
        for (i, v) in fiber.iter_mut().enumerate() {
            if i != keep && rng.random::<f64>() < zero_fraction {
                *v = 0.0;
            }
        }
        fiber[keep] += 1e-3;
        let s: f64 = fiber.iter().sum();
        fiber.iter_mut().for_each(|v| *v /= s);
    }
    TransitionTensor::new(n, data, 1e-12).unwrap()
}

/// Positive tensor satisfying the delta condition, with `n delta` drawn from
/// `(0.5, 1)` so the contraction factor varies across seeds.
pub fn delta_condition_tensor(n: usize, seed: u64) -> TransitionTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let nd = rng.random_range(0.52..0.98);
    random_positive(&RandomTensorSpec::with_delta(n, nd / n as f64, seed)).unwrap()
}
