//! Test tensors: the two DNA-sequence fixtures and the seeded random-positive recipe.
//!
//! All randomness comes from [`ChaCha8Rng`] seeded with a `u64`, which is
//! portable across platforms, so identical seeds give bit-identical output.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::simplex::SimplexVector;
use crate::tensor::TransitionTensor;

/// Tolerance the 4-decimal fixtures are validated with.
pub const FIXTURE_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    DnaI,
    DnaII,
}

impl Fixture {
    pub fn name(self) -> &'static str {
        match self {
            Fixture::DnaI => "dna_i",
            Fixture::DnaII => "dna_ii",
        }
    }

    pub fn from_name(name: &str) -> Option<Fixture> {
        match name {
            "dna_i" => Some(Fixture::DnaI),
            "dna_ii" => Some(Fixture::DnaII),
            _ => None,
        }
    }

    /// Slices in `P(:,:,k)` layout: `slices()[k][i][j] = p[i][j][k]`.
    pub fn slices(self) -> &'static [[[f64; 3]; 3]; 3] {
        match self {
            Fixture::DnaI => &DNA_I,
            Fixture::DnaII => &DNA_II,
        }
    }
}

const DNA_I: [[[f64; 3]; 3]; 3] = [
    [
        [0.6000, 0.4083, 0.4935],
        [0.2000, 0.2568, 0.2426],
        [0.2000, 0.3349, 0.2639],
    ],
    [
        [0.5217, 0.3300, 0.4152],
        [0.2232, 0.2800, 0.2658],
        [0.2551, 0.3900, 0.3190],
    ],
    [
        [0.5565, 0.3648, 0.4500],
        [0.2174, 0.2742, 0.2600],
        [0.2261, 0.3610, 0.2900],
    ],
];

const DNA_II: [[[f64; 3]; 3]; 3] = [
    [
        [0.5200, 0.2986, 0.4462],
        [0.2700, 0.3930, 0.3192],
        [0.2100, 0.3084, 0.2346],
    ],
    [
        [0.6514, 0.4300, 0.5776],
        [0.1970, 0.3200, 0.2462],
        [0.1516, 0.2500, 0.1762],
    ],
    [
        [0.5638, 0.3424, 0.4900],
        [0.2408, 0.3638, 0.2900],
        [0.1954, 0.2938, 0.2200],
    ],
];

/// The transcribed 3x3x3 DNA tensors, validated at [`FIXTURE_TOLERANCE`].
pub fn fixture(which: Fixture) -> TransitionTensor {
    let s = which.slices();
    TransitionTensor::from_fn(3, FIXTURE_TOLERANCE, |i, j, k| s[k][i][j])
        .expect("fixture tables are valid transition tensors")
}

/// Parameters of [`random_positive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomTensorSpec {
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
}

impl RandomTensorSpec {
    /// Uses the default lower bound `delta = 13 / (20 n)`.
    pub fn new(n: usize, seed: u64) -> Self {
        RandomTensorSpec {
            n,
            delta: default_delta(n),
            seed,
        }
    }

    pub fn with_delta(n: usize, delta: f64, seed: u64) -> Self {
        RandomTensorSpec { n, delta, seed }
    }
}

/// `13 / (20 n)`, which gives `n * delta = 0.65`.
pub fn default_delta(n: usize) -> f64 {
    13.0 / (20.0 * n as f64)
}

/// Random positive tensor with every entry at least `spec.delta`.
///
/// Entries are drawn uniformly on the open interval (0,1), every fiber is
/// scaled to sum to one, `delta / (1 - n delta)` is added to every entry, and
/// the fibers are scaled to one again.
pub fn random_positive(spec: &RandomTensorSpec) -> Result<TransitionTensor> {
    let RandomTensorSpec { n, delta, seed } = *spec;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let nd = n as f64 * delta;
    if delta.is_nan() || delta <= 0.0 || nd >= 1.0 {
        return Err(Error::InfeasibleDelta { n, delta });
    }
    let shift = delta / (1.0 - nd);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data: Vec<f64> = (0..n * n * n).map(|_| rng.sample::<f64, _>(Open01)).collect();
    for fiber in data.chunks_mut(n) {
        normalize(fiber);
        fiber.iter_mut().for_each(|p| *p += shift);
        normalize(fiber);
    }
    TransitionTensor::new(n, data, crate::tensor::DEFAULT_VALIDATION_TOLERANCE)
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= s);
}

/// Dirichlet(1, ..., 1) point drawn from a fresh generator seeded with `seed`.
pub fn random_simplex(n: usize, seed: u64) -> SimplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_simplex(&mut rng, n)
}

/// Dirichlet(1, ..., 1) point: normalized i.i.d. standard exponentials.
pub fn sample_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SimplexVector {
    assert!(n >= 1);
    loop {
        let e: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
        if e.iter().sum::<f64>() > 0.0 {
            return SimplexVector::normalized(e).expect("exponential draws are nonnegative");
        }
    }
}

/// `count` seeded random points, followed by the barycenter and the `n`
/// vertices pulled `1e-6` toward it.
pub fn simplex_samples(n: usize, count: usize, seed: u64) -> Vec<SimplexVector> {
    const INWARD: f64 = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SimplexVector> = (0..count).map(|_| sample_simplex(&mut rng, n)).collect();
    out.push(SimplexVector::uniform(n));
    for i in 0..n {
        let mut v = vec![INWARD / n as f64; n];
        v[i] += 1.0 - INWARD;
        out.push(SimplexVector::normalized(v).expect("positive"));
    }
    out
}
