//! Sparse coding primitives shared by every learner.

mod normalize;
mod omp;
mod omp2d;
mod select;
mod simplex;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use normalize::normalize_columns;
pub use omp::{omp, OmpCoder, DEFAULT_TOL};
pub use omp2d::{omp2d, omp2d_with_stats, synthesize_pair, Omp2dCoder, Omp2dStats};
pub use select::select_threshold;
pub use simplex::{project_simplex_type, SimplexTypeSet};

/// Sparse vector: `values[k]` sits at `support[k]` in a vector of length
/// `ambient_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCode {
    pub support: Vec<usize>,
    pub values: Vec<f64>,
    pub ambient_dim: usize,
}

impl SparseCode {
    pub fn new(support: Vec<usize>, values: Vec<f64>, ambient_dim: usize) -> Self {
        debug_assert_eq!(support.len(), values.len());
        debug_assert!(support.iter().all(|&j| j < ambient_dim));
        SparseCode { support, values, ambient_dim }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        SparseCode { support: Vec::new(), values: Vec::new(), ambient_dim }
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.support.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_dense(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.ambient_dim);
        for (j, v) in self.iter() {
            x[j] += v;
        }
        x
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// `D x` for this code.
    pub fn synthesize(&self, d: &DMatrix<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(d.nrows());
        for (j, v) in self.iter() {
            y.axpy(v, &d.column(j), 1.0);
        }
        y
    }
}

/// Stack codes as the columns of a dense `n × N` matrix.
pub fn codes_to_dense(codes: &[SparseCode], n: usize) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, codes.len());
    for (i, c) in codes.iter().enumerate() {
        for (j, v) in c.iter() {
            x[(j, i)] += v;
        }
    }
    x
}
