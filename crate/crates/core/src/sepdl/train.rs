//! Pairwise approximate K-SVD for `Y ≈ D₁ X D₂ᵀ`.
//!
//! Each round codes every signal with 2D OMP, then refreshes the atoms of
//! D₁ with D₂ frozen and afterwards the atoms of D₂ with D₁ frozen. An atom
//! update is one AK-SVD alternation on the rank-one term it contributes:
//! with `wᵢ` the D₂-side combination paired with atom `a` in signal `i` and
//! `Eᵢ` the residual without that term, `d ← Σ Eᵢwᵢ / ‖Σ Eᵢwᵢ‖` followed by
//! a least-squares refit of the coefficients on `Eᵢᵀd`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pair::SeparableDictPair;
use crate::error::{Error, Result};
use crate::linalg::{leading_left_singular, sign_normalize, sign_normalize_columns};
use crate::sparse::{normalize_columns, Omp2dCoder, SparseCode, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SepDLConfig {
    /// Atoms in D₁; `None` means 2·m₁.
    pub n1: Option<usize>,
    /// Atoms in D₂; `None` means 2·m₂.
    pub n2: Option<usize>,
    /// Atom pairs per signal.
    pub sparsity: usize,
    pub iters: usize,
}

impl Default for SepDLConfig {
    fn default() -> Self {
        SepDLConfig { n1: None, n2: None, sparsity: 30, iters: 6 }
    }
}

impl SepDLConfig {
    pub fn sizes(&self, m1: usize, m2: usize) -> (usize, usize) {
        (self.n1.unwrap_or(2 * m1), self.n2.unwrap_or(2 * m2))
    }
}

#[derive(Debug, Clone)]
pub struct SepTrainResult {
    pub pair: SeparableDictPair,
    pub codes: Vec<SparseCode>,
    /// Training RMSE after every coding step and every dictionary update.
    pub rmse_trace: Vec<f64>,
    /// Atoms re-seeded because no signal used them.
    pub replaced_atoms: usize,
}

/// Random starting pair: D₁ from columns and D₂ from rows of randomly
/// drawn training signals, normalized.
pub fn init_pair<R: Rng + ?Sized>(ys: &[DMatrix<f64>], n1: usize, n2: usize, rng: &mut R) -> SeparableDictPair {
    let (m1, m2) = ys[0].shape();
    let mut d1 = DMatrix::zeros(m1, n1);
    for j in 0..n1 {
        let y = &ys[rng.random_range(0..ys.len())];
        d1.set_column(j, &y.column(rng.random_range(0..m2)));
    }
    let mut d2 = DMatrix::zeros(m2, n2);
    for j in 0..n2 {
        let y = &ys[rng.random_range(0..ys.len())];
        d2.set_column(j, &y.row(rng.random_range(0..m1)).transpose());
    }
    let (mut d1, _) = normalize_columns(&d1, rng);
    let (mut d2, _) = normalize_columns(&d2, rng);
    sign_normalize_columns(&mut d1);
    sign_normalize_columns(&mut d2);
    SeparableDictPair::from_parts_unchecked(d1, d2)
}

/// Which factor an update works on; decides how a pair index splits into
/// (updated atom, partner atom).
#[derive(Clone, Copy)]
enum Side {
    First { n1: usize },
    Second { n1: usize },
}

impl Side {
    fn split(self, j: usize) -> (usize, usize) {
        match self {
            Side::First { n1 } => (j % n1, j / n1),
            Side::Second { n1 } => (j / n1, j % n1),
        }
    }
}

fn least_squares(a: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    if a.ncols() == 1 {
        let c = a.column(0);
        let nn = c.norm_squared();
        return DVector::from_element(1, if nn > 0.0 { c.dot(v) / nn } else { 0.0 });
    }
    a.clone().svd(true, true).solve(v, 1e-12).unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Refresh every atom of `upd` in place. `residuals` are oriented so that
/// their rows live in the space of `upd`'s columns. Returns the number of
/// re-seeded atoms.
fn update_side(
    upd: &mut DMatrix<f64>,
    other: &DMatrix<f64>,
    residuals: &mut [DMatrix<f64>],
    codes: &mut [SparseCode],
    side: Side,
) -> usize {
    let n = upd.ncols();
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, c) in codes.iter().enumerate() {
        for &j in &c.support {
            let (a, _) = side.split(j);
            if users[a].last() != Some(&i) {
                users[a].push(i);
            }
        }
    }

    let mut unused = Vec::new();
    for a in 0..n {
        if users[a].is_empty() {
            unused.push(a);
            continue;
        }
        let old = upd.column(a).into_owned();
        // Partner combination wᵢ for every user.
        let ws: Vec<DVector<f64>> = users[a]
            .iter()
            .map(|&i| {
                let mut w = DVector::zeros(other.nrows());
                for (j, x) in codes[i].iter() {
                    let (aa, b) = side.split(j);
                    if aa == a {
                        w.axpy(x, &other.column(b), 1.0);
                    }
                }
                w
            })
            .collect();
        let mut g = DVector::zeros(upd.nrows());
        for (&i, w) in users[a].iter().zip(&ws) {
            // Eᵢwᵢ = Rᵢwᵢ + d (wᵢᵀwᵢ).
            g.gemv(1.0, &residuals[i], w, 1.0);
            g.axpy(w.norm_squared(), &old, 1.0);
        }
        let gn = g.norm();
        if gn == 0.0 || !gn.is_finite() {
            continue;
        }
        let d = g / gn;
        for (&i, w) in users[a].iter().zip(&ws) {
            // Eᵢᵀd = Rᵢᵀd + wᵢ (oldᵀd).
            let mut v = residuals[i].tr_mul(&d);
            v.axpy(old.dot(&d), w, 1.0);
            let positions: Vec<usize> =
                (0..codes[i].nnz()).filter(|&k| side.split(codes[i].support[k]).0 == a).collect();
            let partners: Vec<usize> = positions.iter().map(|&k| side.split(codes[i].support[k]).1).collect();
            let a_mat = other.select_columns(&partners);
            let c = least_squares(&a_mat, &v);
            let u = &a_mat * &c;
            residuals[i].ger(1.0, &old, w, 1.0);
            residuals[i].ger(-1.0, &d, &u, 1.0);
            for (&k, &ck) in positions.iter().zip(c.iter()) {
                codes[i].values[k] = ck;
            }
        }
        upd.set_column(a, &d);
    }

    // Re-seed unused atoms from the worst represented signals, one signal
    // per atom.
    let mut replaced = 0;
    if !unused.is_empty() {
        let energy: Vec<f64> = residuals.iter().map(|r| r.norm_squared()).collect();
        let mut order: Vec<usize> = (0..residuals.len()).collect();
        order.sort_by(|&x, &y| energy[y].total_cmp(&energy[x]));
        for (&a, &i) in unused.iter().zip(&order) {
            if energy[i] <= 0.0 {
                break;
            }
            upd.set_column(a, &leading_left_singular(&residuals[i]));
            replaced += 1;
        }
    }

    // Fix each atom's sign, moving the flip into its coefficients.
    for a in 0..n {
        let mut col = upd.column(a).into_owned();
        if sign_normalize(col.as_mut_slice()) {
            upd.set_column(a, &col);
            for c in codes.iter_mut() {
                for k in 0..c.nnz() {
                    if side.split(c.support[k]).0 == a {
                        c.values[k] = -c.values[k];
                    }
                }
            }
        }
    }
    replaced
}

fn residual_of(pair: &SeparableDictPair, y: &DMatrix<f64>, code: &SparseCode) -> DMatrix<f64> {
    y - pair.synthesize(code)
}

fn total_rmse(residuals: &[DMatrix<f64>]) -> f64 {
    let cells: usize = residuals.iter().map(|r| r.len()).sum();
    if cells == 0 {
        return 0.0;
    }
    (residuals.iter().map(|r| r.norm_squared()).sum::<f64>() / cells as f64).sqrt()
}

/// Learn a separable dictionary pair for one class of matrix signals.
pub fn pairwise_aksvd_train<R: Rng + ?Sized>(
    ys: &[DMatrix<f64>],
    config: &SepDLConfig,
    init: Option<SeparableDictPair>,
    rng: &mut R,
) -> Result<SepTrainResult> {
    let first = ys.first().ok_or_else(|| Error::invalid("no training signals"))?;
    let (m1, m2) = first.shape();
    if ys.iter().any(|y| y.shape() != (m1, m2)) {
        return Err(Error::dims("training signals differ in shape"));
    }
    let (n1, n2) = config.sizes(m1, m2);
    if n1 == 0 || n2 == 0 {
        return Err(Error::invalid("dictionaries need at least one atom"));
    }
    if config.sparsity == 0 || config.sparsity > n1 * n2 {
        return Err(Error::invalid(format!(
            "sparsity {} outside 1..={} atom pairs",
            config.sparsity,
            n1 * n2
        )));
    }
    let pair = match init {
        Some(p) if p.shape() == (m1, n1, m2, n2) => p,
        Some(_) => return Err(Error::dims("initial pair does not match signals and config")),
        None => init_pair(ys, n1, n2, rng),
    };
    let (mut d1, mut d2) = (pair.d1().clone(), pair.d2().clone());

    let mut codes = vec![SparseCode::zero(n1 * n2); ys.len()];
    let mut residuals: Vec<DMatrix<f64>> = ys.to_vec();
    let mut trace = Vec::with_capacity(3 * config.iters);
    let mut replaced = 0;
    for _ in 0..config.iters {
        let coder = Omp2dCoder::new(&d1, &d2);
        let current = SeparableDictPair::from_parts_unchecked(d1.clone(), d2.clone());
        for (i, y) in ys.iter().enumerate() {
            let fresh = coder.code(y, config.sparsity, DEFAULT_TOL)?;
            let r = residual_of(&current, y, &fresh);
            // Keep the previous code unless the new one is at least as good.
            if r.norm_squared() <= residuals[i].norm_squared() {
                residuals[i] = r;
                codes[i] = fresh;
            }
        }
        trace.push(total_rmse(&residuals));

        replaced += update_side(&mut d1, &d2, &mut residuals, &mut codes, Side::First { n1 });
        trace.push(total_rmse(&residuals));

        let mut transposed: Vec<DMatrix<f64>> = residuals.iter().map(|r| r.transpose()).collect();
        replaced += update_side(&mut d2, &d1, &mut transposed, &mut codes, Side::Second { n1 });
        for (r, t) in residuals.iter_mut().zip(&transposed) {
            *r = t.transpose();
        }
        trace.push(total_rmse(&residuals));
    }
    let pair = SeparableDictPair::new(d1, d2)?;
    Ok(SepTrainResult { pair, codes, rmse_trace: trace, replaced_atoms: replaced })
}
