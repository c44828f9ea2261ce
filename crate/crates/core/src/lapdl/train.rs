use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::bcgd::{bcgd_dict_update, BcgdOptions};
use super::dictionary::{init_lap_atoms, LapAtomDictionary};
use super::objective::f_rho;
use crate::error::{Error, Result};
use crate::graphgen::square_side;
use crate::sparse::{codes_to_dense, OmpCoder, SparseCode, DEFAULT_TOL};

/// Relative objective decrease below which alternation stops.
const AM_REL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LapDLConfig {
    /// Number of atoms.
    pub n: usize,
    pub sparsity: usize,
    pub rho: f64,
    pub am_iters: usize,
    /// Block steps per dictionary update; `None` means 5·n·m.
    pub bcgd_iters: Option<usize>,
    pub grad_tol: f64,
}

impl Default for LapDLConfig {
    fn default() -> Self {
        LapDLConfig { n: 60, sparsity: 30, rho: 100.0, am_iters: 10, bcgd_iters: None, grad_tol: 1e-6 }
    }
}

impl LapDLConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.sparsity == 0 || self.sparsity > self.n {
            return Err(Error::invalid(format!(
                "need 0 < sparsity <= atoms (got s = {}, n = {})",
                self.sparsity, self.n
            )));
        }
        if !(self.rho >= 0.0) {
            return Err(Error::invalid(format!("rho = {} must be nonnegative", self.rho)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AmResult {
    pub dictionary: LapAtomDictionary,
    pub codes: Vec<SparseCode>,
    /// `f_ρ` after every half step (coding, then dictionary update).
    pub trace: Vec<f64>,
}

fn residual_energy(d: &DMatrix<f64>, y: &DMatrix<f64>, i: usize, code: &SparseCode) -> f64 {
    (y.column(i) - code.synthesize(d)).norm_squared()
}

/// Sparse coding step. A signal keeps its previous code when fresh OMP does
/// not improve on it, so the objective never rises here.
fn code_step(d: &LapAtomDictionary, y: &DMatrix<f64>, s: usize, previous: &mut [SparseCode]) -> Result<()> {
    let coder = OmpCoder::new(d.atoms());
    let fresh = coder.code_all(y, s, DEFAULT_TOL)?;
    for (i, (new, old)) in fresh.into_iter().zip(previous.iter_mut()).enumerate() {
        if residual_energy(d.atoms(), y, i, &new) <= residual_energy(d.atoms(), y, i, old) {
            *old = new;
        }
    }
    Ok(())
}

/// Alternating minimization: OMP codes with the dictionary fixed, then BCGD
/// on the dictionary with the codes fixed.
pub fn am_train<R: Rng + ?Sized>(
    y: &DMatrix<f64>,
    config: &LapDLConfig,
    init: Option<LapAtomDictionary>,
    rng: &mut R,
) -> Result<AmResult> {
    config.validate()?;
    let m = square_side(y.nrows())?;
    let mut d = match init {
        Some(d) if d.m() == m && d.n() == config.n => d,
        Some(_) => return Err(Error::dims("initial dictionary does not match signals and config")),
        None => init_lap_atoms(m, config.n, rng)?,
    };
    let n = config.n;
    let opts = BcgdOptions {
        iters: config.bcgd_iters.unwrap_or(5 * n * m),
        rho: config.rho,
        grad_tol: config.grad_tol,
    };
    let mut codes = vec![SparseCode::zero(n); y.ncols()];
    let mut trace = Vec::with_capacity(2 * config.am_iters);
    for _ in 0..config.am_iters {
        code_step(&d, y, config.sparsity, &mut codes)?;
        let x = codes_to_dense(&codes, n);
        trace.push(f_rho(&d, &x, y, config.rho));
        bcgd_dict_update(&mut d, &x, y, &opts, rng);
        let f = f_rho(&d, &x, y, config.rho);
        let prev = trace.last().copied().unwrap_or(f);
        trace.push(f);
        if prev > 0.0 && (prev - f) / prev < AM_REL_TOL {
            break;
        }
        if prev == 0.0 {
            break;
        }
    }
    Ok(AmResult { dictionary: d, codes, trace })
}
