use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::condexp::SpaceFunction;
use crate::weighted::OperatorMatrix;

/// Singular value decomposition of `D^{1/2} M D^{-1/2}` with the singular
/// values in decreasing order.
///
/// Singular vectors are mapped back to functions so that they are
/// orthonormal for the μ-weighted inner product.
#[derive(Debug, Clone)]
pub struct WeightedSvd {
    pub singular_values: Vec<f64>,
    left: DMatrix<Complex64>,
    right: DMatrix<Complex64>,
    weights: Vec<f64>,
}

impl WeightedSvd {
    pub fn new(op: &OperatorMatrix) -> Self {
        let n = op.dim();
        let svd = op.weighted().svd(true, true);
        let u = svd.u.expect("left vectors requested");
        let v_t = svd.v_t.expect("right vectors requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .total_cmp(&svd.singular_values[a])
                .then(a.cmp(&b))
        });
        let singular_values = order.iter().map(|&i| svd.singular_values[i]).collect();
        let left = DMatrix::from_fn(n, order.len(), |x, k| u[(x, order[k])]);
        let right = DMatrix::from_fn(n, order.len(), |y, k| v_t[(order[k], y)].conj());
        WeightedSvd {
            singular_values,
            left,
            right,
            weights: op.weights().to_vec(),
        }
    }

    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `factor · σ_max`.
    pub fn rank(&self, factor: f64) -> usize {
        let cutoff = factor * self.largest();
        self.singular_values
            .iter()
            .filter(|&&s| s > cutoff && s > 0.0)
            .count()
    }

    fn unweight(&self, column: nalgebra::DVectorView<'_, Complex64>) -> SpaceFunction {
        SpaceFunction::new(
            column
                .iter()
                .zip(&self.weights)
                .map(|(v, w)| v / w.sqrt())
                .collect(),
        )
    }

    /// Right singular function `k` (input side).
    pub fn right_function(&self, k: usize) -> SpaceFunction {
        self.unweight(self.right.column(k))
    }

    /// Left singular function `k` (output side).
    pub fn left_function(&self, k: usize) -> SpaceFunction {
        self.unweight(self.left.column(k))
    }

    /// Orthonormal basis of the numerical kernel.
    pub fn kernel_basis(&self, factor: f64) -> Vec<SpaceFunction> {
        let rank = self.rank(factor);
        (rank..self.right.ncols())
            .map(|k| self.right_function(k))
            .collect()
    }

    /// Orthonormal basis of the orthogonal complement of the kernel.
    pub fn coimage_basis(&self, factor: f64) -> Vec<SpaceFunction> {
        (0..self.rank(factor))
            .map(|k| self.right_function(k))
            .collect()
    }

    /// Orthonormal basis of the range.
    pub fn range_basis(&self, factor: f64) -> Vec<SpaceFunction> {
        (0..self.rank(factor))
            .map(|k| self.left_function(k))
            .collect()
    }
}
