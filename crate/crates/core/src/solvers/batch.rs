use rayon::prelude::*;

use super::{markov_process, power_method, Solution, SolveOptions};
use crate::error::{Error, Result};
use crate::generator::random_simplex;
use crate::tensor::TransitionTensor;

/// How a batch run is started from its seeded random `x^(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartProtocol {
    /// Power method from `x^(0)`.
    Power,
    /// Markov process from `x^(0)` and `x^(1) = P (x^(0))^2`.
    MarkovFromMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchRun {
    pub run: usize,
    pub seed: u64,
    pub converged: bool,
    pub solution: Solution,
}

/// Seed of run `run` in a batch seeded with `seed`.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    seed.wrapping_add(run as u64)
}

/// `runs` independent solves from seeded random starts, in run order.
///
/// Runs that hit the iteration cap are returned with `converged = false`.
pub fn run_batch(
    p: &TransitionTensor,
    protocol: StartProtocol,
    runs: usize,
    seed: u64,
    opts: &SolveOptions,
) -> Result<Vec<BatchRun>> {
    (0..runs)
        .into_par_iter()
        .map(|run| {
            let seed = run_seed(seed, run);
            let x0 = random_simplex(p.dim(), seed);
            let outcome = match protocol {
                StartProtocol::Power => power_method(p, &x0, opts),
                StartProtocol::MarkovFromMap => {
                    let x1 = p.f_p(&x0)?;
                    markov_process(p, &x0, &x1, opts)
                }
            };
            let (converged, solution) = match outcome {
                Ok(s) => (true, s),
                Err(Error::MaxIterationsExceeded { partial, .. }) => (false, *partial),
                Err(e) => return Err(e),
            };
            Ok(BatchRun {
                run,
                seed,
                converged,
                solution,
            })
        })
        .collect()
}

/// Mean of `iterations_used` over the runs.
pub fn mean_iterations(runs: &[BatchRun]) -> f64 {
    let total: usize = runs.iter().map(|r| r.solution.trace.iterations_used).sum();
    total as f64 / runs.len() as f64
}
