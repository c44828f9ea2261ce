//! Unstructured dictionary learning (approximate K-SVD) and SRC-style
//! classification by smallest per-class OMP residual.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::models::{argmin_labels, ClassModelSet};
use crate::error::{Error, Result};
use crate::sparse::{normalize_columns, OmpCoder, SparseCode, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DlConfig {
    /// Atoms; `None` means twice the signal length, capped at half the
    /// number of training signals.
    pub n: Option<usize>,
    pub sparsity: usize,
    pub iters: usize,
}

impl Default for DlConfig {
    fn default() -> Self {
        DlConfig { n: None, sparsity: 30, iters: 10 }
    }
}

impl DlConfig {
    pub fn atoms_for(&self, dim: usize, n_train: usize) -> usize {
        self.n.unwrap_or_else(|| (2 * dim).min(n_train / 2)).max(1)
    }
}

#[derive(Debug, Clone)]
pub struct DlTrainResult {
    pub dictionary: DMatrix<f64>,
    pub codes: Vec<SparseCode>,
    /// `‖Y − DX‖²_F` after every coding step and every dictionary sweep.
    pub error_trace: Vec<f64>,
    pub replaced_atoms: usize,
}

fn residual_matrix(d: &DMatrix<f64>, y: &DMatrix<f64>, codes: &[SparseCode]) -> DMatrix<f64> {
    let mut r = y.clone();
    for (i, c) in codes.iter().enumerate() {
        let mut col = r.column_mut(i);
        for (j, v) in c.iter() {
            col.axpy(-v, &d.column(j), 1.0);
        }
    }
    r
}

/// Approximate K-SVD on the columns of `y`.
pub fn baseline_dl_train<R: Rng + ?Sized>(y: &DMatrix<f64>, config: &DlConfig, rng: &mut R) -> Result<DlTrainResult> {
    let (dim, count) = y.shape();
    if count == 0 || dim == 0 {
        return Err(Error::invalid("no training signals"));
    }
    if config.sparsity == 0 {
        return Err(Error::invalid("sparsity must be positive"));
    }
    let n = config.atoms_for(dim, count);
    let s = config.sparsity;

    let picks: Vec<usize> = if count >= n {
        index::sample(rng, count, n).into_vec()
    } else {
        (0..n).map(|_| rng.random_range(0..count)).collect()
    };
    let (mut d, _) = normalize_columns(&y.select_columns(&picks), rng);

    let mut codes = vec![SparseCode::zero(n); count];
    let mut r = y.clone();
    let mut trace = Vec::with_capacity(2 * config.iters);
    let mut replaced = 0;
    for _ in 0..config.iters {
        let fresh = OmpCoder::new(&d).code_all(y, s, DEFAULT_TOL)?;
        let candidate = residual_matrix(&d, y, &fresh);
        for (i, code) in fresh.into_iter().enumerate() {
            if candidate.column(i).norm_squared() <= r.column(i).norm_squared() {
                r.set_column(i, &candidate.column(i));
                codes[i] = code;
            }
        }
        trace.push(r.norm_squared());

        // (signal, position in its code) for every use of every atom.
        let mut uses: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, c) in codes.iter().enumerate() {
            for (k, &j) in c.support.iter().enumerate() {
                uses[j].push((i, k));
            }
        }
        let mut unused = Vec::new();
        for (j, list) in uses.iter().enumerate() {
            if list.is_empty() {
                unused.push(j);
                continue;
            }
            let cols: Vec<usize> = list.iter().map(|&(i, _)| i).collect();
            let x = DVector::from_iterator(list.len(), list.iter().map(|&(i, k)| codes[i].values[k]));
            let mut e = r.select_columns(&cols);
            e.ger(1.0, &d.column(j), &x, 1.0);
            let g = &e * &x;
            let gn = g.norm();
            if gn == 0.0 || !gn.is_finite() {
                continue;
            }
            let atom = g / gn;
            let x_new = e.tr_mul(&atom);
            e.ger(-1.0, &atom, &x_new, 1.0);
            for (c, &i) in cols.iter().enumerate() {
                r.set_column(i, &e.column(c));
            }
            for (&(i, k), &v) in list.iter().zip(x_new.iter()) {
                codes[i].values[k] = v;
            }
            d.set_column(j, &atom);
        }
        if !unused.is_empty() {
            let err: Vec<f64> = r.column_iter().map(|c| c.norm_squared()).collect();
            let mut order: Vec<usize> = (0..count).collect();
            order.sort_by(|&a, &b| err[b].total_cmp(&err[a]));
            for (&j, &i) in unused.iter().zip(&order) {
                let yn = y.column(i).norm();
                if err[i] <= 0.0 || yn == 0.0 {
                    break;
                }
                d.set_column(j, &(y.column(i) / yn));
                replaced += 1;
            }
        }
        trace.push(r.norm_squared());
    }
    Ok(DlTrainResult { dictionary: d, codes, error_trace: trace, replaced_atoms: replaced })
}

/// Squared OMP residual of every column of `y` under each class dictionary.
pub fn class_errors(models: &ClassModelSet<DMatrix<f64>>, y: &DMatrix<f64>, s: usize) -> Result<Vec<Vec<f64>>> {
    models.models().map(|d| OmpCoder::new(d).residual_energies(y, s, DEFAULT_TOL)).collect()
}

/// Label each column of `y` with the class whose dictionary leaves the
/// smallest OMP residual.
pub fn src_classify(models: &ClassModelSet<DMatrix<f64>>, y: &DMatrix<f64>, s: usize) -> Result<Vec<u32>> {
    let errors = class_errors(models, y, s)?;
    Ok(argmin_labels(&models.classes(), &errors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, gaussian_vector};
    use crate::rng::seeded;

    fn synthetic(m: usize, n: usize, count: usize, s: usize, noise: f64, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut rng = seeded(seed);
        let d = normalize_columns(&gaussian_matrix(m, n, &mut rng), &mut rng).0;
        let mut y = DMatrix::zeros(m, count);
        for i in 0..count {
            let support = index::sample(&mut rng, n, s).into_vec();
            let values = support.iter().map(|_| rng.random_range(1.0..2.0) * if rng.random() { 1.0 } else { -1.0 }).collect();
            let col = SparseCode::new(support, values, n).synthesize(&d) + gaussian_vector(m, &mut rng) * noise;
            y.set_column(i, &col);
        }
        (d, y)
    }

    #[test]
    fn error_trace_never_increases() {
        let (_, y) = synthetic(12, 20, 200, 3, 0.01, 1);
        let cfg = DlConfig { n: Some(20), sparsity: 3, iters: 8 };
        let res = baseline_dl_train(&y, &cfg, &mut seeded(2)).unwrap();
        for w in res.error_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "trace {:?}", res.error_trace);
        }
        for c in res.dictionary.column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_sparse_data_reaches_small_error() {
        let (_, y) = synthetic(16, 24, 400, 2, 0.0, 3);
        let cfg = DlConfig { n: Some(24), sparsity: 2, iters: 60 };
        let res = baseline_dl_train(&y, &cfg, &mut seeded(4)).unwrap();
        let rel = res.error_trace.last().unwrap() / y.norm_squared();
        assert!(rel < 0.05, "relative error {rel}");
    }

    #[test]
    fn default_size_rule() {
        let cfg = DlConfig::default();
        assert_eq!(cfg.atoms_for(50, 1000), 100);
        assert_eq!(cfg.atoms_for(2500, 800), 400);
    }

    #[test]
    fn src_picks_the_spanning_class() {
        let mut rng = seeded(5);
        let a = normalize_columns(&gaussian_matrix(10, 3, &mut rng), &mut rng).0;
        let b = normalize_columns(&gaussian_matrix(10, 3, &mut rng), &mut rng).0;
        let y = DMatrix::from_columns(&[a.column(1) * 2.0 - a.column(2), b.column(0).into_owned()]);
        let models = ClassModelSet::new(vec![(0, a), (1, b)]).unwrap();
        assert_eq!(src_classify(&models, &y, 2).unwrap(), vec![0, 1]);
    }
}
