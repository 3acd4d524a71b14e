//! Points of the standard simplex `{x >= 0, sum x = 1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|sum x - 1|` accepted by [`SimplexVector::new`].
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;

/// A probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    /// Checks nonnegativity and `|sum - 1| <= 1e-12`. Entries are stored as given.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::NotOnSimplex("empty vector".into()));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NotOnSimplex(format!("entry {} is {}", i + 1, entries[i])));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::NotOnSimplex(format!("entries sum to {sum}")));
        }
        Ok(SimplexVector(entries))
    }

    /// Divides a nonnegative vector with positive sum by its sum.
    pub fn normalized(mut entries: Vec<f64>) -> Result<Self> {
        if entries.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NotOnSimplex("negative or non-finite entry".into()));
        }
        let sum: f64 = entries.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotOnSimplex("zero vector".into()));
        }
        entries.iter_mut().for_each(|v| *v /= sum);
        Ok(SimplexVector(entries))
    }

    /// The barycenter `e/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        SimplexVector(vec![1.0 / n as f64; n])
    }

    /// The unit vector `e_i`.
    pub fn vertex(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        SimplexVector(v)
    }

    /// Renormalizes a vector known to be nonnegative with sum close to 1.
    pub(crate) fn from_raw_renormalized(mut entries: Vec<f64>) -> Self {
        let sum: f64 = entries.iter().sum();
        entries.iter_mut().for_each(|v| *v /= sum);
        SimplexVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `||self - other||_1`.
    pub fn l1_distance(&self, other: &SimplexVector) -> f64 {
        l1_distance(&self.0, &other.0)
    }
}

impl TryFrom<Vec<f64>> for SimplexVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        SimplexVector::new(v)
    }
}

impl From<SimplexVector> for Vec<f64> {
    fn from(v: SimplexVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for SimplexVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// An element `z = (x, y)` of the product of two simplices.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    pub x: SimplexVector,
    pub y: SimplexVector,
}

impl StatePair {
    pub fn new(x: SimplexVector, y: SimplexVector) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: y.dim(),
            });
        }
        Ok(StatePair { x, y })
    }

    /// `||z - other||_1` on the stacked vector.
    pub fn l1_distance(&self, other: &StatePair) -> f64 {
        self.x.l1_distance(&other.x) + self.y.l1_distance(&other.y)
    }
}
