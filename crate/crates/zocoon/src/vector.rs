//! Dense and sparse vector primitives shared by every solver and objective.

use crate::error::{Error, Result};

/// A dense vector of `f64` coordinates with a fixed dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseVector {
    values: Vec<f64>,
}

impl DenseVector {
    pub fn new(values: Vec<f64>) -> Self {
        DenseVector { values }
    }

    pub fn zeros(dim: usize) -> Self {
        DenseVector {
            values: vec![0.0; dim],
        }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.values[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `self + a * other`, allocating the result.
    pub fn add_scaled(&self, a: f64, other: &DenseVector) -> DenseVector {
        debug_assert_eq!(self.dim(), other.dim());
        DenseVector {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x + a * y)
                .collect(),
        }
    }

    /// `self += a * other`.
    pub fn add_scaled_assign(&mut self, a: f64, other: &DenseVector) {
        debug_assert_eq!(self.dim(), other.dim());
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn add_assign(&mut self, other: &DenseVector) {
        self.add_scaled_assign(1.0, other);
    }

    pub fn scale(&self, a: f64) -> DenseVector {
        DenseVector {
            values: self.values.iter().map(|v| a * v).collect(),
        }
    }

    pub fn scale_assign(&mut self, a: f64) {
        for v in &mut self.values {
            *v *= a;
        }
    }

    pub fn copy_from(&mut self, other: &DenseVector) {
        debug_assert_eq!(self.dim(), other.dim());
        self.values.copy_from_slice(&other.values);
    }

    pub fn fill(&mut self, v: f64) {
        self.values.fill(v);
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(values: Vec<f64>) -> Self {
        DenseVector::new(values)
    }
}

impl From<&[f64]> for DenseVector {
    fn from(values: &[f64]) -> Self {
        DenseVector::new(values.to_vec())
    }
}

/// One row of a sparse dataset: strictly increasing 0-based feature
/// indices, their values, and a binary label in `{+1, -1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseExample {
    indices: Vec<u32>,
    values: Vec<f64>,
    label: f64,
}

impl SparseExample {
    pub fn new(indices: Vec<u32>, values: Vec<f64>, label: f64) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::parameter(
                "values",
                format!(
                    "index/value length mismatch ({} vs {})",
                    indices.len(),
                    values.len()
                ),
            ));
        }
        if !indices.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::parameter(
                "indices",
                "feature indices must be strictly increasing",
            ));
        }
        if label != 1.0 && label != -1.0 {
            return Err(Error::parameter("label", format!("must be +1 or -1, got {label}")));
        }
        Ok(SparseExample {
            indices,
            values,
            label,
        })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> f64 {
        self.label
    }

    pub fn max_index(&self) -> Option<u32> {
        self.indices.last().copied()
    }

    /// Sparse-dense inner product over the stored indices.
    pub fn sparse_dot(&self, x: &DenseVector) -> Result<f64> {
        if let Some(max) = self.max_index() {
            if max as usize >= x.dim() {
                return Err(Error::Dimension {
                    expected: max as usize + 1,
                    got: x.dim(),
                });
            }
        }
        let xs = x.as_slice();
        Ok(self
            .indices
            .iter()
            .zip(&self.values)
            .map(|(&i, &v)| v * xs[i as usize])
            .sum())
    }

    /// Densify into a vector of the given dimension.
    pub fn to_dense(&self, dim: usize) -> Result<DenseVector> {
        let mut out = DenseVector::zeros(dim);
        if let Some(max) = self.max_index() {
            if max as usize >= dim {
                return Err(Error::Dimension {
                    expected: max as usize + 1,
                    got: dim,
                });
            }
        }
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out.as_mut_slice()[i as usize] = v;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_formula() {
        let a = DenseVector::from(vec![1.0, 2.0]);
        let b = DenseVector::from(vec![3.0, 4.0]);
        assert_eq!(a.dot(&b).unwrap(), 11.0);
    }

    #[test]
    fn dot_with_zero_vector() {
        let a = DenseVector::from(vec![1.5, -2.0, 7.0]);
        let z = DenseVector::zeros(3);
        assert_eq!(a.dot(&z).unwrap(), 0.0);
    }

    #[test]
    fn dot_orthogonal_basis() {
        let e1 = DenseVector::basis(4, 0);
        let e2 = DenseVector::basis(4, 1);
        assert_eq!(e1.dot(&e2).unwrap(), 0.0);
    }

    #[test]
    fn dot_length_mismatch_errors() {
        let a = DenseVector::zeros(2);
        let b = DenseVector::zeros(3);
        assert!(matches!(a.dot(&b), Err(Error::Dimension { .. })));
    }

    #[test]
    fn norm_three_four_five() {
        assert_eq!(DenseVector::from(vec![3.0, 4.0]).norm2(), 5.0);
        assert_eq!(DenseVector::zeros(7).norm2(), 0.0);
        assert_eq!(DenseVector::basis(5, 2).norm2(), 1.0);
    }

    #[test]
    fn sparse_dot_examples() {
        let ex = SparseExample::new(vec![0, 2], vec![1.0, 2.0], 1.0).unwrap();
        let x = DenseVector::from(vec![5.0, 9.0, 1.0]);
        assert_eq!(ex.sparse_dot(&x).unwrap(), 7.0);

        let empty = SparseExample::new(vec![], vec![], -1.0).unwrap();
        assert_eq!(empty.sparse_dot(&x).unwrap(), 0.0);

        let neg = SparseExample::new(vec![1], vec![-1.0], 1.0).unwrap();
        let y = DenseVector::from(vec![0.0, 4.0]);
        assert_eq!(neg.sparse_dot(&y).unwrap(), -4.0);
    }

    #[test]
    fn sparse_dot_out_of_range_errors() {
        let ex = SparseExample::new(vec![5], vec![1.0], 1.0).unwrap();
        let x = DenseVector::zeros(3);
        assert!(matches!(ex.sparse_dot(&x), Err(Error::Dimension { .. })));
    }

    #[test]
    fn sparse_dot_against_densified_self() {
        let ex = SparseExample::new(vec![1, 3, 6], vec![0.5, -2.0, 4.0], -1.0).unwrap();
        let dense = ex.to_dense(8).unwrap();
        let sq: f64 = ex.values().iter().map(|v| v * v).sum();
        assert_eq!(ex.sparse_dot(&dense).unwrap(), sq);
    }

    #[test]
    fn example_rejects_bad_inputs() {
        assert!(SparseExample::new(vec![2, 1], vec![1.0, 1.0], 1.0).is_err());
        assert!(SparseExample::new(vec![1, 1], vec![1.0, 1.0], 1.0).is_err());
        assert!(SparseExample::new(vec![0], vec![1.0], 0.5).is_err());
        assert!(SparseExample::new(vec![0], vec![1.0, 2.0], 1.0).is_err());
    }
}
