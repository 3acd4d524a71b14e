use super::{markov_x_bound, power_contraction_bound, IterationTrace, Method, Solution, SolveOptions, TraceStep};
use crate::error::{Error, Result};
use crate::simplex::SimplexVector;
use crate::tensor::TransitionTensor;

/// Slack on the entrywise test `x >= delta e`.
const FLOOR_SLACK: f64 = 1e-12;

/// Second-order Markov process `x^(s) = P x^(s-1) x^(s-2)` for `s = 2, 3, ...`.
///
/// Stops at the first `x^(s)` with `||x^(s) - x^(s-1)||_1 < tolerance`;
/// `iterations_used` is `s`. When the delta condition holds, the bound column
/// holds `r^ceil((m+1)/2)` with `r = 2 - 2 n delta` and `m = s - s0 + 1`, where
/// `s0` is the first index with `x^(s0)` and `x^(s0-1)` both at least `delta`
/// entrywise. Any image of the map satisfies that floor, so `s0 <= 3`.
pub fn markov_process(
    p: &TransitionTensor,
    x0: &SimplexVector,
    x1: &SimplexVector,
    opts: &SolveOptions,
) -> Result<Solution> {
    p.check_dim(x0.dim())?;
    p.check_dim(x1.dim())?;
    opts.check(p.dim())?;
    let rate = power_contraction_bound(p).ok();
    let delta = p.min_entry();
    let above_floor = |v: &SimplexVector| v.min() >= delta - FLOOR_SLACK;

    let mut trace = IterationTrace::new(Method::Markov);
    if rate.is_some() {
        trace.bound_origin = Some(match (above_floor(x1), above_floor(x0)) {
            (true, true) => 1,
            (true, false) => 2,
            _ => 3,
        });
    }

    let mut older = x0.clone();
    let mut newer = x1.clone();
    let mut prev_error = opts.reference.as_ref().map(|r| newer.l1_distance(r));

    for s in 2..=opts.max_iterations + 1 {
        let next = p.bilinear_apply(&newer, &older)?;
        let residual = next.l1_distance(&newer);
        if opts.record_trace {
            let error = opts.reference.as_ref().map(|r| next.l1_distance(r));
            let observed_ratio = match (error, prev_error) {
                (Some(e), Some(pe)) if pe > 0.0 => Some(e / pe),
                _ => None,
            };
            prev_error = error;
            let bound = match (rate, trace.bound_origin) {
                (Some(r), Some(s0)) if s + 1 >= s0 => Some(markov_x_bound(r, s + 1 - s0)),
                _ => None,
            };
            trace.steps.push(TraceStep {
                k: s,
                fixed_point_residual: p.f_p(&next)?.l1_distance(&next),
                iterate: next.clone(),
                residual,
                error,
                observed_ratio,
                bound,
            });
        }
        older = std::mem::replace(&mut newer, next);
        trace.iterations_used = s;
        if residual < opts.tolerance {
            trace.converged = true;
            break;
        }
    }

    let solution = Solution { x: newer, trace };
    if solution.trace.converged {
        Ok(solution)
    } else {
        Err(Error::MaxIterationsExceeded {
            iterations: solution.trace.iterations_used,
            partial: Box::new(solution),
        })
    }
}
