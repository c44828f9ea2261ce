use nalgebra::{DMatrix, DVector};

use super::graph::WeightedGraph;
use crate::error::{Error, Result};

/// Combinatorial graph Laplacian `Deg - W`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    matrix: DMatrix<f64>,
}

impl LaplacianMatrix {
    /// Wrap a matrix after checking the structural Laplacian invariants
    /// (symmetry, zero row sums, sign pattern). Positive semidefiniteness
    /// follows from those for real matrices.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let out = LaplacianMatrix { matrix };
        out.check().map_err(Error::invalid)?;
        Ok(out)
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Describe the first violated invariant, if any.
    pub fn check(&self) -> std::result::Result<(), String> {
        let l = &self.matrix;
        let m = l.nrows();
        if l.ncols() != m {
            return Err(format!("laplacian is {}x{}", m, l.ncols()));
        }
        let scale = l.amax().max(1.0);
        for i in 0..m {
            let mut row = 0.0;
            for j in 0..m {
                let x = l[(i, j)];
                row += x;
                if (x - l[(j, i)]).abs() > 1e-12 * scale {
                    return Err(format!("asymmetric at ({i}, {j})"));
                }
                if i != j && x > 0.0 {
                    return Err(format!("positive off-diagonal at ({i}, {j})"));
                }
            }
            if l[(i, i)] < 0.0 {
                return Err(format!("negative diagonal at {i}"));
            }
            if row.abs() > 1e-10 * m as f64 * scale {
                return Err(format!("row {i} sums to {row}"));
            }
        }
        Ok(())
    }
}

pub fn laplacian(g: &WeightedGraph) -> LaplacianMatrix {
    let m = g.node_count();
    let mut l = DMatrix::zeros(m, m);
    for e in g.edges() {
        l[(e.u, e.v)] -= e.weight;
        l[(e.v, e.u)] -= e.weight;
        l[(e.u, e.u)] += e.weight;
        l[(e.v, e.v)] += e.weight;
    }
    LaplacianMatrix { matrix: l }
}

/// Row-stacking vectorization: block `ℓ` of the result is row `ℓ`.
pub fn vec_rows(l: &DMatrix<f64>) -> DVector<f64> {
    let (r, c) = l.shape();
    DVector::from_iterator(r * c, (0..r).flat_map(|i| (0..c).map(move |j| l[(i, j)])))
}

/// Inverse of [`vec_rows`] for square matrices.
pub fn unvec_rows(v: &[f64]) -> Result<DMatrix<f64>> {
    let m = square_side(v.len())?;
    Ok(DMatrix::from_row_slice(m, m, v))
}

/// Side of a square matrix with `len` entries.
pub fn square_side(len: usize) -> Result<usize> {
    let m = (len as f64).sqrt().round() as usize;
    if m * m != len {
        return Err(Error::invalid(format!("length {len} is not a perfect square")));
    }
    Ok(m)
}

/// Positions of the diagonal entries inside a row-vectorized m×m matrix.
pub fn diagonal_positions(m: usize) -> impl Iterator<Item = usize> {
    (0..m).map(move |j| j * (m + 1))
}
