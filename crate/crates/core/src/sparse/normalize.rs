use nalgebra::DMatrix;
use rand::Rng;

use crate::linalg::gaussian_vector;

/// Scale every column to unit Euclidean norm. Zero (or non-finite) columns
/// are replaced by random unit vectors; their indices are returned so the
/// caller can react.
pub fn normalize_columns<R: Rng + ?Sized>(d: &DMatrix<f64>, rng: &mut R) -> (DMatrix<f64>, Vec<usize>) {
    let mut out = d.clone();
    let mut replaced = Vec::new();
    for j in 0..out.ncols() {
        let n = out.column(j).norm();
        if n > 0.0 && n.is_finite() {
            out.column_mut(j).unscale_mut(n);
        } else {
            let v = gaussian_vector(out.nrows(), rng);
            let vn = v.norm();
            out.set_column(j, &(v / vn));
            replaced.push(j);
        }
    }
    (out, replaced)
}
