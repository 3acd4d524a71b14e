//! Closed-form stationary vector of a 2x2x2 tensor.
//!
//! With `s = x_1`, the fixed-point equation reduces to
//! `(alpha + tau - beta - gamma) s^2 + (beta + gamma - 1 - 2 tau) s + tau = 0`
//! where `alpha = p_111`, `beta = p_112`, `gamma = p_121`, `tau = p_122`.

use crate::error::{Error, Result};
use crate::simplex::SimplexVector;
use crate::tensor::{TransitionTensor, DEFAULT_VALIDATION_TOLERANCE};

/// Roots within this distance outside `[0, 1]` are clamped onto it.
const ROOT_SLACK: f64 = 1e-12;
/// Coefficients with magnitude at most this are treated as zero.
const COEFF_ZERO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic222 {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
}

impl Quadratic222 {
    pub fn new(alpha: f64, beta: f64, gamma: f64, tau: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("tau", tau)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(Quadratic222 {
            alpha,
            beta,
            gamma,
            tau,
        })
    }

    pub fn from_tensor(p: &TransitionTensor) -> Result<Self> {
        p.check_dim(2)?;
        Self::new(p.get(0, 0, 0), p.get(0, 0, 1), p.get(0, 1, 0), p.get(0, 1, 1))
    }

    /// The full tensor, with `p_2jk = 1 - p_1jk`.
    pub fn to_tensor(&self) -> TransitionTensor {
        let first = [[self.alpha, self.beta], [self.gamma, self.tau]];
        TransitionTensor::from_fn(2, DEFAULT_VALIDATION_TOLERANCE, |i, j, k| {
            if i == 0 {
                first[j][k]
            } else {
                1.0 - first[j][k]
            }
        })
        .expect("parameters in [0,1] give a valid tensor")
    }

    /// `(a, b, c)` of `a s^2 + b s + c = 0`.
    pub fn coefficients(&self) -> (f64, f64, f64) {
        let Quadratic222 {
            alpha,
            beta,
            gamma,
            tau,
        } = *self;
        (alpha + tau - beta - gamma, beta + gamma - 1.0 - 2.0 * tau, tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticKind {
    /// Exactly one root in `(0, 1)`.
    Unique,
    /// All coefficients vanish: every `s` solves the equation. The barycenter is returned.
    LineOfFixedPoints,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSolution {
    pub x: SimplexVector,
    pub kind: QuadraticKind,
    pub coefficients: (f64, f64, f64),
    /// `b^2 - 4ac`; `None` when the equation is linear.
    pub discriminant: Option<f64>,
    /// Roots equal to 0 or 1 (after clamping). These are fixed points only of reducible tensors.
    pub boundary_roots: Vec<f64>,
}

/// Solves the 2x2x2 fixed-point equation in closed form.
pub fn solve_2x2x2(q: &Quadratic222) -> Result<QuadraticSolution> {
    let (a, b, c) = q.coefficients();
    let mut discriminant = None;
    let roots: Vec<f64> = if a.abs() <= COEFF_ZERO {
        if b.abs() <= COEFF_ZERO {
            if c.abs() <= COEFF_ZERO {
                return Ok(QuadraticSolution {
                    x: SimplexVector::uniform(2),
                    kind: QuadraticKind::LineOfFixedPoints,
                    coefficients: (a, b, c),
                    discriminant: None,
                    boundary_roots: Vec::new(),
                });
            }
            Vec::new()
        } else {
            vec![-c / b]
        }
    } else {
        let d = b * b - 4.0 * a * c;
        discriminant = Some(d);
        if d < -COEFF_ZERO {
            Vec::new()
        } else {
            let sq = d.max(0.0).sqrt();
            // Avoids cancellation between -b and the square root.
            let t = -0.5 * (b + b.signum() * sq);
            if t == 0.0 {
                vec![0.0]
            } else {
                let (r1, r2) = (t / a, c / t);
                if (r1 - r2).abs() <= ROOT_SLACK {
                    vec![r1]
                } else {
                    vec![r1, r2]
                }
            }
        }
    };

    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for r in roots {
        if !(-ROOT_SLACK..=1.0 + ROOT_SLACK).contains(&r) {
            continue;
        }
        if r <= ROOT_SLACK {
            boundary.push(0.0);
        } else if r >= 1.0 - ROOT_SLACK {
            boundary.push(1.0);
        } else {
            interior.push(r);
        }
    }
    boundary.sort_by(f64::total_cmp);
    boundary.dedup();

    match interior.as_slice() {
        [] => Err(Error::NoRootInUnitInterval { boundary }),
        [s] => Ok(QuadraticSolution {
            x: SimplexVector::normalized(vec![*s, 1.0 - *s])?,
            kind: QuadraticKind::Unique,
            coefficients: (a, b, c),
            discriminant,
            boundary_roots: boundary,
        }),
        [s, t, ..] => Err(Error::TheoryViolation(*s, *t)),
    }
}
