//! 2D OMP for separable dictionaries.
//!
//! Codes `Y ≈ D₁ X D₂ᵀ` by picking atom pairs `(j₁, j₂)`. The pair index in
//! the returned [`SparseCode`] is `j₂·n₁ + j₁`, i.e. the column of the
//! Kronecker dictionary `D₂ ⊗ D₁` acting on column-stacked signals, so the
//! result is interchangeable with [`super::omp`] on that dictionary. The
//! Kronecker product itself is never formed.

use nalgebra::{DMatrix, DVector};

use super::omp::greedy_pursuit;
use super::SparseCode;
use crate::error::{Error, Result};
use crate::linalg::vec_cols;

/// Multiply-add counts collected while coding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Omp2dStats {
    pub iterations: usize,
    pub correlation_madds: usize,
}

pub fn omp2d(
    d1: &DMatrix<f64>,
    d2: &DMatrix<f64>,
    y: &DMatrix<f64>,
    sparsity: usize,
    tol: f64,
) -> Result<SparseCode> {
    omp2d_with_stats(d1, d2, y, sparsity, tol).map(|(c, _)| c)
}

pub fn omp2d_with_stats(
    d1: &DMatrix<f64>,
    d2: &DMatrix<f64>,
    y: &DMatrix<f64>,
    sparsity: usize,
    tol: f64,
) -> Result<(SparseCode, Omp2dStats)> {
    let (m1, n1) = d1.shape();
    let (m2, n2) = d2.shape();
    if y.shape() != (m1, m2) {
        return Err(Error::dims(format!(
            "signal is {}x{}, dictionaries expect {m1}x{m2}",
            y.nrows(),
            y.ncols()
        )));
    }
    let mut stats = Omp2dStats::default();
    let n = n1 * n2;
    let code = greedy_pursuit(
        &vec_cols(y),
        n,
        sparsity.min(n),
        tol,
        |r, _, _, out| {
            let rm = DMatrix::from_column_slice(m1, m2, r.as_slice());
            // (D₁ᵀ R) D₂ : n₁·m₁·m₂ + n₁·m₂·n₂ multiply-adds.
            let c = d1.tr_mul(&rm) * d2;
            stats.iterations += 1;
            stats.correlation_madds += n1 * m1 * m2 + n1 * m2 * n2;
            out.copy_from_slice(c.as_slice());
        },
        |j| pair_column(d1, d2, j),
    );
    Ok((code, stats))
}

/// 2D OMP with cached Gram matrices for coding many signals against one
/// pair. Correlations come from `D₁ᵀ Y D₂ − Σₖ xₖ G₁[:, aₖ] G₂[bₖ, :]`,
/// which avoids touching the m₁×m₂ residual inside the greedy loop.
#[derive(Debug, Clone)]
pub struct Omp2dCoder {
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    g1: DMatrix<f64>,
    g2: DMatrix<f64>,
}

impl Omp2dCoder {
    pub fn new(d1: &DMatrix<f64>, d2: &DMatrix<f64>) -> Self {
        Omp2dCoder { g1: d1.tr_mul(d1), g2: d2.tr_mul(d2), d1: d1.clone(), d2: d2.clone() }
    }

    pub fn code(&self, y: &DMatrix<f64>, sparsity: usize, tol: f64) -> Result<SparseCode> {
        let (m1, n1) = self.d1.shape();
        let (m2, n2) = self.d2.shape();
        if y.shape() != (m1, m2) {
            return Err(Error::dims(format!(
                "signal is {}x{}, dictionaries expect {m1}x{m2}",
                y.nrows(),
                y.ncols()
            )));
        }
        let c0 = self.d1.tr_mul(y) * &self.d2;
        let n = n1 * n2;
        Ok(greedy_pursuit(
            &vec_cols(y),
            n,
            sparsity.min(n),
            tol,
            |_, support, coef, out| {
                out.copy_from_slice(c0.as_slice());
                for (&j, &x) in support.iter().zip(coef) {
                    let (a, b) = (j % n1, j / n1);
                    let ga = self.g1.column(a);
                    for q in 0..n2 {
                        let w = x * self.g2[(b, q)];
                        if w == 0.0 {
                            continue;
                        }
                        for (o, g) in out[q * n1..(q + 1) * n1].iter_mut().zip(ga.iter()) {
                            *o -= w * g;
                        }
                    }
                }
            },
            |j| pair_column(&self.d1, &self.d2, j),
        ))
    }
}

fn pair_column(d1: &DMatrix<f64>, d2: &DMatrix<f64>, j: usize) -> DVector<f64> {
    let n1 = d1.ncols();
    let a = d1.column(j % n1);
    let b = d2.column(j / n1);
    DVector::from_iterator(a.len() * b.len(), b.iter().flat_map(|&bv| a.iter().map(move |&av| av * bv)))
}

/// `D₁ X D₂ᵀ` for a pair-indexed code.
pub fn synthesize_pair(d1: &DMatrix<f64>, d2: &DMatrix<f64>, code: &SparseCode) -> DMatrix<f64> {
    let n1 = d1.ncols();
    let mut out = DMatrix::zeros(d1.nrows(), d2.nrows());
    for (j, v) in code.iter() {
        out.ger(v, &d1.column(j % n1), &d2.column(j / n1), 1.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::rng::seeded;
    use crate::sparse::normalize_columns;

    #[test]
    fn rank_one_pair_is_found() {
        let mut rng = seeded(1);
        let d1 = normalize_columns(&gaussian_matrix(5, 8, &mut rng), &mut rng).0;
        let d2 = normalize_columns(&gaussian_matrix(4, 6, &mut rng), &mut rng).0;
        let y = d1.column(2) * d2.column(5).transpose();
        let c = omp2d(&d1, &d2, &y, 1, 1e-9).unwrap();
        assert_eq!(c.support, vec![5 * 8 + 2]);
        assert!((c.values[0] - 1.0).abs() < 1e-12);
        assert!((synthesize_pair(&d1, &d2, &c) - y).amax() < 1e-12);
    }

    #[test]
    fn counts_correlation_work() {
        let mut rng = seeded(2);
        let d1 = normalize_columns(&gaussian_matrix(6, 12, &mut rng), &mut rng).0;
        let d2 = normalize_columns(&gaussian_matrix(6, 12, &mut rng), &mut rng).0;
        let y = gaussian_matrix(6, 6, &mut rng);
        let (_, stats) = omp2d_with_stats(&d1, &d2, &y, 3, 0.0).unwrap();
        assert_eq!(stats.iterations, 3);
        assert_eq!(stats.correlation_madds, 3 * (12 * 36 + 12 * 6 * 12));
    }

    #[test]
    fn gram_coder_agrees_with_direct() {
        let mut rng = seeded(3);
        let d1 = normalize_columns(&gaussian_matrix(5, 9, &mut rng), &mut rng).0;
        let d2 = normalize_columns(&gaussian_matrix(4, 7, &mut rng), &mut rng).0;
        let coder = Omp2dCoder::new(&d1, &d2);
        for _ in 0..20 {
            let y = gaussian_matrix(5, 4, &mut rng);
            let a = omp2d(&d1, &d2, &y, 4, 1e-9).unwrap();
            let b = coder.code(&y, 4, 1e-9).unwrap();
            assert_eq!(a.support, b.support);
            for (x, z) in a.values.iter().zip(&b.values) {
                assert!((x - z).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let d1 = DMatrix::identity(3, 3);
        let d2 = DMatrix::identity(4, 4);
        assert!(omp2d(&d1, &d2, &DMatrix::zeros(4, 3), 1, 0.0).is_err());
    }
}
