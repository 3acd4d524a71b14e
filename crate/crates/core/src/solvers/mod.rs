//! Stationary-vector solvers and their theoretical error bounds.
//!
//! Iterate indexing follows the chain: the power method starts from `x^(0)`
//! and returns `x^(k)`; the Markov process takes `x^(0), x^(1)` and its first
//! computed iterate is `x^(2)`. In both cases `iterations_used` is the index of
//! the returned iterate, and iteration stops as soon as
//! `||x^(k) - x^(k-1)||_1 < tolerance`.

mod batch;
mod markov;
mod power;
mod quadratic;

use serde::{Deserialize, Serialize};

use crate::analysis::check_delta_condition;
use crate::error::{Error, Result};
use crate::simplex::SimplexVector;
use crate::tensor::TransitionTensor;

pub use batch::{mean_iterations, run_batch, run_seed, BatchRun, StartProtocol};
pub use markov::markov_process;
pub use power::power_method;
pub use quadratic::{solve_2x2x2, Quadratic222, QuadraticKind, QuadraticSolution};

/// Residual the reference ("oracle") run drives the power method to.
pub const ORACLE_TOLERANCE: f64 = 1e-13;
/// Iteration cap for the reference run.
pub const ORACLE_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tolerance: f64,
    /// Upper bound on the number of map evaluations.
    pub max_iterations: usize,
    pub record_trace: bool,
    /// Fills the error and ratio columns of the trace.
    pub reference: Option<SimplexVector>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-6,
            max_iterations: 10_000,
            record_trace: false,
            reference: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tolerance(tolerance: f64) -> Self {
        SolveOptions {
            tolerance,
            ..Default::default()
        }
    }

    pub fn traced(mut self, reference: Option<SimplexVector>) -> Self {
        self.record_trace = true;
        self.reference = reference;
        self
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if let Some(r) = &self.reference {
            if r.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.dim(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Power,
    Markov,
    Quadratic,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Power => "power",
            Method::Markov => "markov",
            Method::Quadratic => "quadratic",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(Method::Power),
            "markov" => Ok(Method::Markov),
            "quadratic" => Ok(Method::Quadratic),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub k: usize,
    pub iterate: SimplexVector,
    /// `||x^(k) - x^(k-1)||_1`
    pub residual: f64,
    /// `||F_P(x^(k)) - x^(k)||_1`
    pub fixed_point_residual: f64,
    /// `||x^(k) - x*||_1` against the reference, if one was given.
    pub error: Option<f64>,
    /// `error_k / error_{k-1}`, the previous iterate being an input for the first step.
    pub observed_ratio: Option<f64>,
    /// Power method: the contraction factor `2(1 - n delta)`.
    /// Markov process: the bound on `error_k`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub method: Method,
    pub steps: Vec<TraceStep>,
    pub converged: bool,
    pub iterations_used: usize,
    /// Markov process only: the index `s0` such that `(x^(s0), x^(s0-1))` is the
    /// first pair with both components at least `delta` entrywise; the bound
    /// column is measured from there.
    pub bound_origin: Option<usize>,
}

impl IterationTrace {
    pub(crate) fn new(method: Method) -> Self {
        IterationTrace {
            method,
            steps: Vec::new(),
            converged: false,
            iterations_used: 0,
            bound_origin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: SimplexVector,
    pub trace: IterationTrace,
}

/// Per-step 1-norm contraction factor `2(1 - n delta)` of the power method.
pub fn power_contraction_bound(p: &TransitionTensor) -> Result<f64> {
    let c = check_delta_condition(p);
    if !c.holds {
        return Err(Error::HypothesisNotSatisfied {
            delta: c.delta,
            threshold: c.threshold,
        });
    }
    Ok(2.0 * (1.0 - p.dim() as f64 * c.delta))
}

/// R-linear bounds for the Markov process, for `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovBound {
    pub rate: f64,
    /// `r^ceil((k+2)/2) + r^ceil((k+1)/2)`, bounding `||z^(k+1) - z*||_1`.
    pub z: Vec<f64>,
    /// `r^ceil((k+2)/2)`, bounding `||x^(k+1) - x*||_1`.
    pub x: Vec<f64>,
}

pub fn markov_bound_curve(p: &TransitionTensor, k_max: usize) -> Result<MarkovBound> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let rate = power_contraction_bound(p)?;
    let x: Vec<f64> = (1..=k_max).map(|k| markov_x_bound(rate, k + 1)).collect();
    let z = (1..=k_max)
        .map(|k| markov_x_bound(rate, k + 1) + markov_x_bound(rate, k))
        .collect();
    Ok(MarkovBound { rate, z, x })
}

/// `r^ceil((m+1)/2)`: bound on `||x^(m) - x*||_1` counted from the first
/// admissible pair `z^(1) = (x^(1), x^(0))`, valid for `m >= 0`.
pub fn markov_x_bound(rate: f64, m: usize) -> f64 {
    rate.powi((m + 1).div_ceil(2) as i32)
}

/// Power method from the barycenter to [`ORACLE_TOLERANCE`].
pub fn reference_solution(p: &TransitionTensor) -> Result<SimplexVector> {
    let opts = SolveOptions {
        tolerance: ORACLE_TOLERANCE,
        max_iterations: ORACLE_MAX_ITERATIONS,
        record_trace: false,
        reference: None,
    };
    Ok(power_method(p, &SimplexVector::uniform(p.dim()), &opts)?.x)
}
