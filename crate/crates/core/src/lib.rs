//! Stationary distributions of second-order Markov chains.
//!
//! A second-order chain on `n` states is described by a transition probability
//! tensor `P` with `p[i][j][k] = Prob(X_t = i | X_{t-1} = j, X_{t-2} = k)`.
//! Its stationary distributions are the fixed points `x = P x x` on the simplex.
//!
//! ```
//! use markov2::generator::{fixture, Fixture};
//! use markov2::solvers::{power_method, SolveOptions};
//! use markov2::SimplexVector;
//!
//! let p = fixture(Fixture::DnaI);
//! let x0 = SimplexVector::uniform(3);
//! let sol = power_method(&p, &x0, &SolveOptions::with_tolerance(1e-10)).unwrap();
//! let moved = p.f_p(&sol.x).unwrap().l1_distance(&sol.x);
//! assert!(moved < 1e-10);
//! ```

pub mod analysis;
pub mod error;
pub mod format;
pub mod generator;
pub mod simplex;
pub mod solvers;
pub mod tensor;

pub use error::{Error, Result};
pub use simplex::{SimplexVector, StatePair};
pub use tensor::TransitionTensor;
