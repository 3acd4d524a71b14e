//! Jacobian of `F_P` and sufficient conditions for a unique stationary vector.
//!
//! The certificates here are the ones that can be checked numerically:
//!
//! * the min-entry ("delta") condition `min p_{ijk} > 1/(2n)`, which rules out
//!   eigenvalue 1 of the Jacobian everywhere on the simplex and makes the power
//!   method a contraction with factor `2(1 - n delta)`;
//! * the pointwise condition `min_{i,k} sum_j (p_{ijk} + p_{ikj}) x_j > 1/n` at a given `x`;
//! * a sampled surrogate for "1 is not an eigenvalue of the Jacobian",
//!   via the smallest singular value of `J(x) - I`;
//! * irreducibility by subset enumeration.

use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::simplex_samples;
use crate::simplex::SimplexVector;
use crate::tensor::TransitionTensor;

/// Default threshold on `sigma_min(J - I)`.
pub const EIGEN_ONE_TOLERANCE: f64 = 1e-10;

/// Largest `n` for which [`is_irreducible`] enumerates subsets.
pub const MAX_EXACT_IRREDUCIBILITY_DIM: usize = 20;

/// Jacobian of `F_P` at `x`: row `i` is `x^T (A_i + A_i^T)`.
///
/// Every column sums to 2 when `x` is on the simplex.
pub fn jacobian(p: &TransitionTensor, x: &SimplexVector) -> Result<DMatrix<f64>> {
    p.check_dim(x.dim())?;
    let n = p.dim();
    let x = x.as_slice();
    let mut m = DMatrix::zeros(n, n);
    // m[i][k] = sum_j x_j (p[i][j][k] + p[i][k][j])
    for k in 0..n {
        for (j, &xj) in x.iter().enumerate() {
            let a = p.fiber(j, k);
            let b = p.fiber(k, j);
            for i in 0..n {
                m[(i, k)] += xj * (a[i] + b[i]);
            }
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaCondition {
    pub holds: bool,
    pub delta: f64,
    pub threshold: f64,
}

/// `min_entry(P) > 1/(2n)`.
pub fn check_delta_condition(p: &TransitionTensor) -> DeltaCondition {
    let delta = p.min_entry();
    let threshold = 1.0 / (2.0 * p.dim() as f64);
    DeltaCondition {
        holds: delta > threshold,
        delta,
        threshold,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointwiseCondition {
    pub holds: bool,
    pub margin: f64,
}

/// `m = min_{i,k} sum_j (p[i][j][k] + p[i][k][j]) x_j`; holds when `m > 1/n`,
/// and `margin = m - 1/n`.
pub fn check_pointwise_condition(p: &TransitionTensor, x: &SimplexVector) -> Result<PointwiseCondition> {
    p.check_dim(x.dim())?;
    let n = p.dim();
    let mut m = f64::INFINITY;
    for i in 0..n {
        for k in 0..n {
            let s: f64 = (0..n).map(|j| (p.get(i, j, k) + p.get(i, k, j)) * x[j]).sum();
            m = m.min(s);
        }
    }
    let margin = m - 1.0 / n as f64;
    Ok(PointwiseCondition {
        holds: margin > 0.0,
        margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenOneCheck {
    /// `margin > tol`.
    pub excluded: bool,
    /// `sigma_min(J(x) - I)`; zero exactly when 1 is an eigenvalue.
    pub margin: f64,
    /// The delta condition certifies exclusion independently of `margin`.
    pub certified: bool,
}

/// Numerical test that 1 is not an eigenvalue of the Jacobian at `x`.
pub fn eigen_one_excluded(p: &TransitionTensor, x: &SimplexVector, tol: f64) -> Result<EigenOneCheck> {
    let mut m = jacobian(p, x)?;
    for i in 0..p.dim() {
        m[(i, i)] -= 1.0;
    }
    let svd = m
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or(Error::NumericalFailure)?;
    let margin = svd.singular_values.min();
    Ok(EigenOneCheck {
        excluded: margin > tol,
        margin,
        certified: check_delta_condition(p).holds,
    })
}

/// Eigenvalues of a square matrix via the real Schur form.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or(Error::NumericalFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// `M = (1 - n delta)(2S) + n delta (2/n) e e^T` with `S` column stochastic.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticDecomposition {
    pub n_delta: f64,
    pub s: DMatrix<f64>,
    /// Max-norm error of [`StochasticDecomposition::reconstruct`] against the input.
    pub residual: f64,
}

impl StochasticDecomposition {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.s.nrows();
        let shift = 2.0 * self.n_delta / n as f64;
        self.s.map(|v| (1.0 - self.n_delta) * 2.0 * v + shift)
    }
}

/// Splits a matrix with column sums 2 and entries at least `2 delta`.
pub fn decompose_stochastic(m: &DMatrix<f64>, delta: f64) -> Result<StochasticDecomposition> {
    const SUM_TOL: f64 = 1e-10;
    const ENTRY_SLACK: f64 = 1e-12;
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::PreconditionViolated("matrix must be square and nonempty".into()));
    }
    for (c, col) in m.column_iter().enumerate() {
        let s = col.sum();
        if (s - 2.0).abs() > SUM_TOL {
            return Err(Error::PreconditionViolated(format!(
                "column {} sums to {s}, expected 2",
                c + 1
            )));
        }
    }
    let n_delta = n as f64 * delta;
    if n_delta >= 1.0 - 1e-12 {
        return Err(Error::DegenerateDelta(n_delta));
    }
    let floor = 2.0 * delta;
    if let Some(v) = m.iter().find(|&&v| v < floor - ENTRY_SLACK) {
        return Err(Error::PreconditionViolated(format!(
            "entry {v} below 2 delta = {floor}"
        )));
    }
    let scale = 2.0 * (1.0 - n_delta);
    let s = m.map(|v| ((v - floor) / scale).max(0.0));
    let mut d = StochasticDecomposition {
        n_delta,
        s,
        residual: 0.0,
    };
    d.residual = (d.reconstruct() - m).amax();
    Ok(d)
}

/// True when no nonempty proper `I` has `p[i][j][k] = 0` for all `i in I`, `j, k not in I`.
pub fn is_irreducible(p: &TransitionTensor) -> Result<bool> {
    if p.entries().iter().all(|&v| v > 0.0) {
        return Ok(true);
    }
    let n = p.dim();
    if n > MAX_EXACT_IRREDUCIBILITY_DIM {
        return Err(Error::DimensionTooLargeForExactCheck(n));
    }
    let full: u32 = (1u32 << n) - 1;
    for mask in 1..full {
        let inside = |i: usize| mask & (1 << i) != 0;
        let reducible = (0..n).filter(|&i| inside(i)).all(|i| {
            (0..n)
                .filter(|&j| !inside(j))
                .all(|j| (0..n).filter(|&k| !inside(k)).all(|k| p.get(i, j, k) == 0.0))
        });
        if reducible {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Irreducibility {
    Irreducible,
    Reducible,
    UnknownCapped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleCheck {
    pub point: Vec<f64>,
    pub eigen_one_excluded: bool,
    pub eigen_one_margin: f64,
    pub pointwise_margin: f64,
}

/// Outcome of every sufficient-condition check on one tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub n: usize,
    pub delta: f64,
    pub threshold: f64,
    pub delta_condition_holds: bool,
    pub is_positive: bool,
    pub irreducibility: Irreducibility,
    /// `2(1 - n delta)` when the delta condition holds.
    pub contraction: Option<f64>,
    pub samples: Vec<SampleCheck>,
    pub min_eigen_one_margin: f64,
    pub all_samples_excluded: bool,
}

/// Runs all checks, sampling `samples` seeded interior points plus the
/// barycenter and the inward-pulled vertices.
pub fn diagnose(p: &TransitionTensor, samples: usize, seed: u64) -> Result<ConditionReport> {
    let cond = check_delta_condition(p);
    let is_positive = cond.delta > 0.0;
    let irreducibility = match is_irreducible(p) {
        Ok(true) => Irreducibility::Irreducible,
        Ok(false) => Irreducibility::Reducible,
        Err(Error::DimensionTooLargeForExactCheck(_)) => Irreducibility::UnknownCapped,
        Err(e) => return Err(e),
    };
    let mut checks = Vec::new();
    for x in simplex_samples(p.dim(), samples, seed) {
        let eig = eigen_one_excluded(p, &x, EIGEN_ONE_TOLERANCE)?;
        let point = check_pointwise_condition(p, &x)?;
        checks.push(SampleCheck {
            point: x.into_inner(),
            eigen_one_excluded: eig.excluded,
            eigen_one_margin: eig.margin,
            pointwise_margin: point.margin,
        });
    }
    let min_margin = checks.iter().map(|c| c.eigen_one_margin).fold(f64::INFINITY, f64::min);
    Ok(ConditionReport {
        n: p.dim(),
        delta: cond.delta,
        threshold: cond.threshold,
        delta_condition_holds: cond.holds,
        is_positive,
        irreducibility,
        contraction: cond.holds.then(|| 2.0 * (1.0 - p.dim() as f64 * cond.delta)),
        all_samples_excluded: checks.iter().all(|c| c.eigen_one_excluded),
        samples: checks,
        min_eigen_one_margin: min_margin,
    })
}
