//! Third-order transition probability tensors and their multilinear maps.
//!
//! A tensor `P` of dimension `n` has entries `p[i][j][k] = Prob(X_t = i | X_{t-1} = j, X_{t-2} = k)`,
//! so every fiber `p[.][j][k]` is a probability vector. Storage is dense and
//! fiber-major: the `n` entries of fiber `(j, k)` are contiguous.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::simplex::{SimplexVector, StatePair};

/// Default tolerance on `|sum_i p[i][j][k] - 1|`.
pub const DEFAULT_VALIDATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTensor {
    n: usize,
    data: Vec<f64>,
    tolerance: f64,
}

impl TransitionTensor {
    /// Validates `data` laid out as `data[i + n*(j + n*k)] = p[i][j][k]`.
    ///
    /// Entries are stored unmodified; nothing is renormalized.
    pub fn new(n: usize, data: Vec<f64>, tolerance: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ShapeMismatch("n = 0".into()));
        }
        if data.len() != n * n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for n = {n} (expected {})",
                data.len(),
                n * n * n
            )));
        }
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "validation tolerance {tolerance} must be nonnegative"
            )));
        }
        for k in 0..n {
            for j in 0..n {
                let base = n * (j + n * k);
                for i in 0..n {
                    let p = data[base + i];
                    if !p.is_finite() {
                        return Err(Error::NonFiniteEntry(i, j, k));
                    }
                    if p < 0.0 {
                        return Err(Error::NegativeEntry(i, j, k));
                    }
                    if p > 1.0 {
                        return Err(Error::EntryAboveOne(i, j, k));
                    }
                }
            }
        }
        // Fibers in (j, k) order, j fastest within each k: report the first
        // violation by (j, k) lexicographic order.
        for j in 0..n {
            for k in 0..n {
                let base = n * (j + n * k);
                let sum: f64 = data[base..base + n].iter().sum();
                if (sum - 1.0).abs() > tolerance {
                    return Err(Error::FiberSumViolation(j, k, sum));
                }
            }
        }
        Ok(TransitionTensor { n, data, tolerance })
    }

    /// Builds from `f(i, j, k) = p[i][j][k]`.
    pub fn from_fn(n: usize, tolerance: f64, f: impl Fn(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new(n, data, tolerance)
    }

    /// Builds from the slice layout `slices[k][i][j] = p[i][j][k]`, i.e. the
    /// matrices `P(:,:,k)` of multi-dimensional array notation.
    pub fn from_slices(slices: &[Vec<Vec<f64>>], tolerance: f64) -> Result<Self> {
        let n = slices.len();
        if n == 0 {
            return Err(Error::ShapeMismatch("no slices".into()));
        }
        for (k, m) in slices.iter().enumerate() {
            if m.len() != n || m.iter().any(|row| row.len() != n) {
                return Err(Error::ShapeMismatch(format!("slice {} is not {n} x {n}", k + 1)));
            }
        }
        Self::from_fn(n, tolerance, |i, j, k| slices[k][i][j])
    }

    /// The tensor with every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        Self::from_fn(n, DEFAULT_VALIDATION_TOLERANCE, |_, _, _| 1.0 / n as f64).expect("uniform tensor is valid")
    }

    /// Inverse of [`TransitionTensor::from_slices`].
    pub fn to_slices(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.n;
        (0..n)
            .map(|k| (0..n).map(|i| (0..n).map(|j| self.get(i, j, k)).collect()).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn validation_tolerance(&self) -> f64 {
        self.tolerance
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[i + self.n * (j + self.n * k)]
    }

    /// The probability vector `p[.][j][k]`.
    pub fn fiber(&self, j: usize, k: usize) -> &[f64] {
        let base = self.n * (j + self.n * k);
        &self.data[base..base + self.n]
    }

    /// Raw storage in fiber-major order.
    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    /// `A_i` with `(A_i)[j][k] = p[i][j][k]`.
    pub fn slice(&self, i: usize) -> Result<DMatrix<f64>> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(DMatrix::from_fn(self.n, self.n, |j, k| self.get(i, j, k)))
    }

    /// The smallest entry, i.e. the largest admissible uniform lower bound `delta`.
    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `v_i = sum_{j,k} p[i][j][k] x_j y_k` for arbitrary real vectors, without
    /// renormalization.
    pub fn contract_raw(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let n = self.n;
        let mut out = vec![0.0; n];
        for (k, &yk) in y.iter().enumerate() {
            if yk == 0.0 {
                continue;
            }
            for (j, &xj) in x.iter().enumerate() {
                let w = xj * yk;
                if w == 0.0 {
                    continue;
                }
                for (o, p) in out.iter_mut().zip(self.fiber(j, k)) {
                    *o += w * p;
                }
            }
        }
        Ok(out)
    }

    /// `P x y`, renormalized to sum exactly to one.
    pub fn bilinear_apply(&self, x: &SimplexVector, y: &SimplexVector) -> Result<SimplexVector> {
        let raw = self.contract_raw(x.as_slice(), y.as_slice())?;
        Ok(SimplexVector::from_raw_renormalized(raw))
    }

    /// `F_P(x) = P x x`.
    pub fn f_p(&self, x: &SimplexVector) -> Result<SimplexVector> {
        self.bilinear_apply(x, x)
    }

    /// `g(x, y) = (P x y, x)`; fixed points are `(x*, x*)`.
    pub fn augmented_map(&self, z: &StatePair) -> Result<StatePair> {
        let next = self.bilinear_apply(&z.x, &z.y)?;
        Ok(StatePair {
            x: next,
            y: z.x.clone(),
        })
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{fixture, Fixture};
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_n2_is_accepted() {
        let p = TransitionTensor::from_fn(2, 1e-12, |_, _, _| 0.5).unwrap();
        assert_eq!(p.min_entry(), 0.5);
    }

    #[test]
    fn perturbed_fiber_is_rejected() {
        let mut slices = fixture(Fixture::DnaI).to_slices();
        assert_eq!(slices[0][0][0], 0.6);
        slices[0][0][0] = 0.7;
        match TransitionTensor::from_slices(&slices, 1e-3) {
            Err(Error::FiberSumViolation(0, 0, s)) => assert_abs_diff_eq!(s, 1.1, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn entry_errors_carry_indices() {
        let mut data = vec![0.5; 8];
        // p[1][0][1] sits at i + n (j + n k) = 5.
        data[5] = -0.1;
        assert!(matches!(
            TransitionTensor::new(2, data, 1e-12),
            Err(Error::NegativeEntry(1, 0, 1))
        ));
        let mut data = vec![0.5; 8];
        data[0] = 1.5;
        assert!(matches!(
            TransitionTensor::new(2, data, 1e-12),
            Err(Error::EntryAboveOne(0, 0, 0))
        ));
        assert!(matches!(
            TransitionTensor::new(2, vec![0.5; 7], 1e-12),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            TransitionTensor::new(0, vec![], 1e-12),
            Err(Error::ShapeMismatch(_))
        ));
        let ragged = vec![vec![vec![1.0]], vec![vec![1.0]]];
        assert!(matches!(
            TransitionTensor::from_slices(&ragged, 1e-12),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn error_messages_are_one_based() {
        let e = Error::FiberSumViolation(0, 0, 1.1);
        assert!(e.to_string().contains("(j,k)=(1,1)"));
    }

    #[test]
    fn uniform_map_is_constant() {
        let p = TransitionTensor::uniform(3);
        let x = SimplexVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let y = SimplexVector::vertex(3, 1);
        for v in p.bilinear_apply(&x, &y).unwrap().as_slice() {
            assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-15);
        }
        let v = p.f_p(&SimplexVector::vertex(3, 0)).unwrap();
        assert_abs_diff_eq!(v[2], 1.0 / 3.0, epsilon = 1e-15);
        let p2 = TransitionTensor::uniform(2);
        let half = SimplexVector::uniform(2);
        assert_eq!(p2.f_p(&half).unwrap(), half);
    }

    #[test]
    fn dna_i_at_barycenter() {
        // Oracle: slice sums of A_i divided by 9.
        let p = fixture(Fixture::DnaI);
        let expected: Vec<f64> = (0..3).map(|i| p.slice(i).unwrap().sum() / 9.0).collect();
        assert_abs_diff_eq!(expected[0], 0.46, epsilon = 1e-12);
        assert_abs_diff_eq!(expected[1], 0.74 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(expected[2], 0.88 / 3.0, epsilon = 1e-12);
        let u = SimplexVector::uniform(3);
        let v = p.f_p(&u).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(v[i], expected[i], epsilon = 1e-12);
        }
        assert_eq!(v, p.bilinear_apply(&u, &u).unwrap());
    }

    #[test]
    fn unit_vectors_select_a_fiber() {
        let p = fixture(Fixture::DnaII);
        let v = p
            .bilinear_apply(&SimplexVector::vertex(3, 0), &SimplexVector::vertex(3, 1))
            .unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(v[i], p.get(i, 0, 1), epsilon = 1e-4);
        }
        // Un-normalized contraction reproduces the fiber exactly.
        let raw = p.contract_raw(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(raw, p.fiber(0, 1));
    }

    #[test]
    fn slice_reindexes_table_layout() {
        let a1 = fixture(Fixture::DnaI).slice(0).unwrap();
        let expected = [
            [0.6000, 0.5217, 0.5565],
            [0.4083, 0.3300, 0.3648],
            [0.4935, 0.4152, 0.4500],
        ];
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(a1[(j, k)], expected[j][k]);
            }
        }
        assert!(matches!(
            fixture(Fixture::DnaI).slice(3),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
        let u = TransitionTensor::uniform(4).slice(2).unwrap();
        assert!(u.iter().all(|v| *v == 0.25));
    }

    #[test]
    fn slices_sum_to_ones_matrix() {
        let p = fixture(Fixture::DnaII);
        let total = (0..3).fold(DMatrix::zeros(3, 3), |acc, i| acc + p.slice(i).unwrap());
        for v in total.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn min_entries_of_fixtures() {
        assert_eq!(fixture(Fixture::DnaI).min_entry(), 0.2);
        assert_eq!(fixture(Fixture::DnaII).min_entry(), 0.1516);
        assert_eq!(TransitionTensor::uniform(5).min_entry(), 0.2);
    }

    #[test]
    fn dimension_mismatch() {
        let p = TransitionTensor::uniform(3);
        let x = SimplexVector::uniform(2);
        assert!(matches!(
            p.f_p(&x),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn augmented_map_examples() {
        let p = TransitionTensor::uniform(3);
        let z = StatePair::new(SimplexVector::vertex(3, 0), SimplexVector::vertex(3, 1)).unwrap();
        let g = p.augmented_map(&z).unwrap();
        assert_eq!(g.y, SimplexVector::vertex(3, 0));
        assert!(g.x.as_slice().iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));

        let p = fixture(Fixture::DnaI);
        let u = SimplexVector::uniform(3);
        let g = p.augmented_map(&StatePair::new(u.clone(), u.clone()).unwrap()).unwrap();
        assert_abs_diff_eq!(g.x[0], 0.46, epsilon = 1e-12);
        assert_eq!(g.y, u);
    }
}
