//! Orthogonal matching pursuit.
//!
//! The least-squares refit keeps an incrementally updated thin QR of the
//! selected atoms (modified Gram-Schmidt with one reorthogonalization pass),
//! so coefficients never go through the normal equations. Candidates whose
//! new QR column collapses are rejected and the next best atom is tried.

use nalgebra::{DMatrix, DVector};

use super::SparseCode;
use crate::error::{Error, Result};

/// Residual tolerance, relative to `‖y‖`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative size below which a new QR column counts as linearly dependent.
const RANK_TOL: f64 = 1e-10;

pub(crate) struct IncrementalQr {
    q: Vec<DVector<f64>>,
    /// `r[k]` holds column k of R (entries 0..=k).
    r: Vec<Vec<f64>>,
    /// Qᵀy.
    z: Vec<f64>,
    residual: DVector<f64>,
}

impl IncrementalQr {
    pub(crate) fn new(y: &DVector<f64>) -> Self {
        IncrementalQr { q: Vec::new(), r: Vec::new(), z: Vec::new(), residual: y.clone() }
    }

    pub(crate) fn residual(&self) -> &DVector<f64> {
        &self.residual
    }

    /// Append column `a`; returns false (and leaves the state unchanged) when
    /// `a` is numerically in the span of the current columns.
    pub(crate) fn try_push(&mut self, a: &DVector<f64>) -> bool {
        let anorm = a.norm();
        if anorm == 0.0 {
            return false;
        }
        let mut w = a.clone();
        let mut coef = vec![0.0; self.q.len() + 1];
        for _ in 0..2 {
            for (k, q) in self.q.iter().enumerate() {
                let p = q.dot(&w);
                coef[k] += p;
                w.axpy(-p, q, 1.0);
            }
        }
        let rho = w.norm();
        if rho <= RANK_TOL * anorm {
            return false;
        }
        w /= rho;
        coef[self.q.len()] = rho;
        let zk = w.dot(&self.residual);
        self.residual.axpy(-zk, &w, 1.0);
        self.z.push(zk);
        self.q.push(w);
        self.r.push(coef);
        true
    }

    /// Solve `R x = Qᵀy` by back substitution.
    pub(crate) fn coefficients(&self) -> Vec<f64> {
        let k = self.z.len();
        let mut x = self.z.clone();
        for i in (0..k).rev() {
            let mut acc = x[i];
            for j in (i + 1)..k {
                acc -= self.r[j][i] * x[j];
            }
            x[i] = acc / self.r[i][i];
        }
        x
    }
}

/// Index of the largest `|c_j|` among non-excluded entries (lowest index on
/// ties). Returns `None` when nothing is left or every candidate is zero.
pub(crate) fn argmax_abs(c: &[f64], excluded: &[bool]) -> Option<usize> {
    let mut best = None;
    let mut best_abs = 0.0;
    for (j, &v) in c.iter().enumerate() {
        if excluded[j] {
            continue;
        }
        if v.abs() > best_abs {
            best_abs = v.abs();
            best = Some(j);
        }
    }
    best
}

/// Greedy loop shared by the dense, Gram-based and separable variants.
///
/// `correlate(residual, support, coefficients, out)` must fill `out` with
/// `Dᵀ r`; `column(j)` yields atom `j`.
pub(crate) fn greedy_pursuit<C, A>(
    y: &DVector<f64>,
    n_atoms: usize,
    sparsity: usize,
    tol: f64,
    mut correlate: C,
    column: A,
) -> SparseCode
where
    C: FnMut(&DVector<f64>, &[usize], &[f64], &mut [f64]),
    A: Fn(usize) -> DVector<f64>,
{
    let ynorm = y.norm();
    if ynorm == 0.0 || sparsity == 0 {
        return SparseCode::zero(n_atoms);
    }
    let mut qr = IncrementalQr::new(y);
    let mut excluded = vec![false; n_atoms];
    let mut support = Vec::with_capacity(sparsity);
    let mut coef: Vec<f64> = Vec::new();
    let mut corr = vec![0.0; n_atoms];
    while support.len() < sparsity && qr.residual().norm() > tol * ynorm {
        correlate(qr.residual(), &support, &coef, &mut corr);
        let mut added = false;
        while let Some(j) = argmax_abs(&corr, &excluded) {
            excluded[j] = true;
            if qr.try_push(&column(j)) {
                support.push(j);
                added = true;
                break;
            }
        }
        if !added {
            break;
        }
        coef = qr.coefficients();
    }
    SparseCode::new(support, coef, n_atoms)
}

fn check_dims(d: &DMatrix<f64>, y: &DVector<f64>) -> Result<()> {
    if d.nrows() != y.len() {
        return Err(Error::dims(format!(
            "dictionary has {} rows, signal has {} entries",
            d.nrows(),
            y.len()
        )));
    }
    Ok(())
}

/// OMP of `y` over the unit-norm columns of `d`, stopping after `sparsity`
/// atoms or once `‖r‖ ≤ tol · ‖y‖`. Support is in selection order.
pub fn omp(d: &DMatrix<f64>, y: &DVector<f64>, sparsity: usize, tol: f64) -> Result<SparseCode> {
    check_dims(d, y)?;
    let n = d.ncols();
    Ok(greedy_pursuit(
        y,
        n,
        sparsity.min(n),
        tol,
        |r, _, _, out| {
            let c = d.tr_mul(r);
            out.copy_from_slice(c.as_slice());
        },
        |j| d.column(j).into_owned(),
    ))
}

/// OMP with a cached Gram matrix, for coding many signals against one
/// dictionary. Correlations are updated as `Dᵀy − G_S x_S`, which costs
/// `n·|S|` per step instead of `m·n`.
///
/// The dictionary does not need unit columns: atoms are normalized
/// internally for selection and coefficients are mapped back to the
/// original scaling, so `D x` is the same approximation either way.
#[derive(Debug, Clone)]
pub struct OmpCoder {
    unit: DMatrix<f64>,
    gram: DMatrix<f64>,
    scale: Vec<f64>,
}

impl OmpCoder {
    pub fn new(d: &DMatrix<f64>) -> Self {
        let mut unit = d.clone();
        let mut scale = vec![1.0; d.ncols()];
        for (j, mut col) in unit.column_iter_mut().enumerate() {
            let n = col.norm();
            if n > 0.0 {
                col /= n;
                scale[j] = n;
            }
        }
        let gram = unit.tr_mul(&unit);
        OmpCoder { unit, gram, scale }
    }

    pub fn n_atoms(&self) -> usize {
        self.unit.ncols()
    }

    pub fn dim(&self) -> usize {
        self.unit.nrows()
    }

    fn code_with_dty(&self, y: &DVector<f64>, dty: &[f64], sparsity: usize, tol: f64) -> SparseCode {
        let n = self.n_atoms();
        let zero = |j: usize| self.scale[j] == 0.0;
        let mut code = greedy_pursuit(
            y,
            n,
            sparsity.min(n),
            tol,
            |_, support, coef, out| {
                out.copy_from_slice(dty);
                for (&j, &x) in support.iter().zip(coef) {
                    let g = self.gram.column(j);
                    for (o, gv) in out.iter_mut().zip(g.iter()) {
                        *o -= x * gv;
                    }
                }
                for (j, o) in out.iter_mut().enumerate() {
                    if zero(j) {
                        *o = 0.0;
                    }
                }
            },
            |j| self.unit.column(j).into_owned(),
        );
        for (j, v) in code.support.iter().zip(code.values.iter_mut()) {
            *v /= self.scale[*j];
        }
        code
    }

    pub fn code(&self, y: &DVector<f64>, sparsity: usize, tol: f64) -> Result<SparseCode> {
        check_dims(&self.unit, y)?;
        let dty = self.unit.tr_mul(y);
        Ok(self.code_with_dty(y, dty.as_slice(), sparsity, tol))
    }

    /// Code every column of `signals`.
    pub fn code_all(&self, signals: &DMatrix<f64>, sparsity: usize, tol: f64) -> Result<Vec<SparseCode>> {
        if signals.nrows() != self.dim() {
            return Err(Error::dims(format!(
                "dictionary has {} rows, signals have {}",
                self.dim(),
                signals.nrows()
            )));
        }
        let dty = self.unit.tr_mul(signals);
        Ok((0..signals.ncols())
            .map(|i| {
                let y = signals.column(i).into_owned();
                self.code_with_dty(&y, dty.column(i).as_slice(), sparsity, tol)
            })
            .collect())
    }

    /// Squared residual of each column of `signals` after coding.
    pub fn residual_energies(&self, signals: &DMatrix<f64>, sparsity: usize, tol: f64) -> Result<Vec<f64>> {
        let codes = self.code_all(signals, sparsity, tol)?;
        Ok(codes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut r = signals.column(i).into_owned();
                for (j, v) in c.iter() {
                    r.axpy(-v * self.scale[j], &self.unit.column(j), 1.0);
                }
                r.norm_squared()
            })
            .collect())
    }
}
