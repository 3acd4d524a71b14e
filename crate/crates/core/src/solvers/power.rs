use super::{power_contraction_bound, IterationTrace, Method, Solution, SolveOptions, TraceStep};
use crate::error::{Error, Result};
use crate::simplex::SimplexVector;
use crate::tensor::TransitionTensor;

/// Power method `x^(k+1) = P (x^(k))^2`.
///
/// Returns the first `x^(k)` with `||x^(k) - x^(k-1)||_1 < tolerance`. When
/// the delta condition holds the bound column carries the contraction factor
/// `2(1 - n delta)`, which bounds every `observed_ratio`.
pub fn power_method(p: &TransitionTensor, x0: &SimplexVector, opts: &SolveOptions) -> Result<Solution> {
    p.check_dim(x0.dim())?;
    opts.check(p.dim())?;
    let contraction = power_contraction_bound(p).ok();
    let mut trace = IterationTrace::new(Method::Power);
    let mut x = x0.clone();
    let mut prev_error = opts.reference.as_ref().map(|r| x.l1_distance(r));

    for k in 1..=opts.max_iterations {
        let next = p.f_p(&x)?;
        let residual = next.l1_distance(&x);
        if opts.record_trace {
            // The step residual is the fixed-point residual of the previous iterate.
            if let Some(last) = trace.steps.last_mut() {
                last.fixed_point_residual = residual;
            }
            let error = opts.reference.as_ref().map(|r| next.l1_distance(r));
            let observed_ratio = match (error, prev_error) {
                (Some(e), Some(pe)) if pe > 0.0 => Some(e / pe),
                _ => None,
            };
            prev_error = error;
            trace.steps.push(TraceStep {
                k,
                iterate: next.clone(),
                residual,
                fixed_point_residual: f64::NAN,
                error,
                observed_ratio,
                bound: contraction,
            });
        }
        x = next;
        trace.iterations_used = k;
        if residual < opts.tolerance {
            trace.converged = true;
            break;
        }
    }

    if let Some(last) = trace.steps.last_mut() {
        last.fixed_point_residual = p.f_p(&x)?.l1_distance(&x);
    }
    let solution = Solution { x, trace };
    if solution.trace.converged {
        Ok(solution)
    } else {
        Err(Error::MaxIterationsExceeded {
            iterations: solution.trace.iterations_used,
            partial: Box::new(solution),
        })
    }
}
