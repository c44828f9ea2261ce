//! Separable dictionary learning on matrix-shaped signals and the
//! pair-per-class classifier built on it.

mod pair;
mod train;

use nalgebra::DMatrix;

pub use pair::{sep_rmse, SeparableDictPair, UNIT_TOL};
pub use train::{init_pair, pairwise_aksvd_train, SepDLConfig, SepTrainResult};

use crate::classify::{argmin_labels, ClassModelSet};
use crate::error::{Error, Result};
use crate::graphgen::LabeledDataset;
use crate::sparse::{Omp2dCoder, DEFAULT_TOL};

/// Every signal of `ds` as a square matrix.
pub fn as_matrices(ds: &LabeledDataset) -> Result<Vec<DMatrix<f64>>> {
    (0..ds.len()).map(|i| ds.signal_matrix(i)).collect()
}

/// Squared representation error of every signal under one pair.
pub fn sep_errors(pair: &SeparableDictPair, ys: &[DMatrix<f64>], sparsity: usize) -> Result<Vec<f64>> {
    let coder = Omp2dCoder::new(pair.d1(), pair.d2());
    ys.iter()
        .map(|y| {
            let code = coder.code(y, sparsity, DEFAULT_TOL)?;
            Ok((y - pair.synthesize(&code)).norm_squared())
        })
        .collect()
}

/// Label each signal with the class whose pair represents it best.
pub fn sep_classify(
    models: &ClassModelSet<SeparableDictPair>,
    ys: &[DMatrix<f64>],
    sparsity: usize,
) -> Result<Vec<u32>> {
    let (m1, _, m2, _) = models.models().next().map(|p| p.shape()).unwrap_or_default();
    if models.models().any(|p| (p.shape().0, p.shape().2) != (m1, m2)) {
        return Err(Error::dims("class pairs act on different signal shapes"));
    }
    let errors = models.models().map(|p| sep_errors(p, ys, sparsity)).collect::<Result<Vec<_>>>()?;
    Ok(argmin_labels(&models.classes(), &errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::gaussian_matrix;
    use crate::rng::seeded;
    use crate::sparse::{normalize_columns, SparseCode};

    fn random_pair(seed: u64) -> SeparableDictPair {
        let mut rng = seeded(seed);
        let d1 = normalize_columns(&gaussian_matrix(5, 5, &mut rng), &mut rng).0;
        let d2 = normalize_columns(&gaussian_matrix(5, 5, &mut rng), &mut rng).0;
        SeparableDictPair::new(d1, d2).unwrap()
    }

    #[test]
    fn own_class_wins_on_exact_signal() {
        let a = random_pair(1);
        let b = random_pair(2);
        let y = a.synthesize(&SparseCode::new(vec![3], vec![2.0], 25));
        let models = ClassModelSet::new(vec![(0, b), (1, a)]).unwrap();
        assert_eq!(sep_classify(&models, &[y], 1).unwrap(), vec![1]);
    }

    #[test]
    fn single_class_labels_everything() {
        let models = ClassModelSet::new(vec![(4, random_pair(3))]).unwrap();
        let ys: Vec<_> = (0..3).map(|k| gaussian_matrix(5, 5, &mut seeded(k))).collect();
        assert_eq!(sep_classify(&models, &ys, 2).unwrap(), vec![4, 4, 4]);
    }

    #[test]
    fn matches_kronecker_src() {
        let mut rng = seeded(11);
        let pairs: Vec<SeparableDictPair> = (0..3)
            .map(|_| {
                let d1 = normalize_columns(&gaussian_matrix(4, 6, &mut rng), &mut rng).0;
                let d2 = normalize_columns(&gaussian_matrix(4, 7, &mut rng), &mut rng).0;
                SeparableDictPair::new(d1, d2).unwrap()
            })
            .collect();
        let ys: Vec<_> = (0..40).map(|_| gaussian_matrix(4, 4, &mut rng)).collect();
        let models = ClassModelSet::new(pairs.iter().cloned().enumerate().map(|(c, p)| (c as u32, p)).collect()).unwrap();
        for s in [1, 3, 5] {
            let got = sep_classify(&models, &ys, s).unwrap();
            let errors: Vec<Vec<f64>> = pairs
                .iter()
                .map(|p| {
                    let big = p.d2().kronecker(p.d1());
                    ys.iter()
                        .map(|y| {
                            let v = nalgebra::DVector::from_column_slice(y.as_slice());
                            let code = crate::sparse::omp(&big, &v, s, 0.0).unwrap();
                            (&v - code.synthesize(&big)).norm_squared()
                        })
                        .collect()
                })
                .collect();
            let want: Vec<u32> = (0..ys.len())
                .map(|i| (0..3).min_by(|&a, &b| errors[a][i].total_cmp(&errors[b][i])).unwrap() as u32)
                .collect();
            assert_eq!(got, want, "s = {s}");
        }
    }
}
