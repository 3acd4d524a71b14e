use thiserror::Error;

use crate::solvers::Solution;

/// Errors raised by the library.
///
/// Index fields are zero-based; the `Display` messages print them one-based
/// so they read like the usual `p_{ijk}` notation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a cubic n x n x n array with n >= 1: {0}")]
    ShapeMismatch(String),

    #[error("negative entry at p[{},{},{}]", .0 + 1, .1 + 1, .2 + 1)]
    NegativeEntry(usize, usize, usize),

    #[error("entry above one at p[{},{},{}]", .0 + 1, .1 + 1, .2 + 1)]
    EntryAboveOne(usize, usize, usize),

    #[error("non-finite entry at p[{},{},{}]", .0 + 1, .1 + 1, .2 + 1)]
    NonFiniteEntry(usize, usize, usize),

    #[error("fiber (j,k)=({},{}) sums to {sum} instead of 1", .0 + 1, .1 + 1, sum = .2)]
    FiberSumViolation(usize, usize, f64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("not a point of the simplex: {0}")]
    NotOnSimplex(String),

    #[error("singular value computation did not converge")]
    NumericalFailure,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("n*delta = {0} is (numerically) one; the tensor is uniform and the factor S is undefined")]
    DegenerateDelta(f64),

    #[error("exact irreducibility check enumerates 2^n subsets; refusing for n = {0} > 20 with zero entries")]
    DimensionTooLargeForExactCheck(usize),

    #[error("min entry {delta} does not exceed 1/(2n) = {threshold}; the bound is not a contraction")]
    HypothesisNotSatisfied { delta: f64, threshold: f64 },

    #[error("no iteration converged within {iterations} iterations")]
    MaxIterationsExceeded { iterations: usize, partial: Box<Solution> },

    #[error("no root of the fixed-point quadratic in (0,1); boundary candidates: {boundary:?}")]
    NoRootInUnitInterval { boundary: Vec<f64> },

    #[error("two interior roots {0} and {1} found for a 2x2x2 tensor; at most one may exist")]
    TheoryViolation(f64, f64),

    #[error("delta = {delta} is infeasible for n = {n}: need 0 < delta < 1/n")]
    InfeasibleDelta { n: usize, delta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
