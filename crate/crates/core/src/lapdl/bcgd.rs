//! Randomized block coordinate gradient descent for the dictionary step.
//!
//! Each step picks an atom `i` and a row `ℓ` uniformly, moves that length-m
//! block along its negative gradient with step `1/Lᵢ` and projects it back
//! onto the row set. With `G = XXᵀ` and `P = YXᵀ` cached, the block gradient
//! is `D_ℓ G_{:,i} − P_{ℓ,i}` plus the trace penalty, which costs `O(mn)`.

use nalgebra::DMatrix;
use rand::Rng;

use super::dictionary::LapAtomDictionary;
use super::objective::LIPSCHITZ_FLOOR;
use crate::sparse::project_simplex_type;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BcgdOptions {
    pub iters: usize,
    pub rho: f64,
    /// Stop once every step of a sweep (n·m consecutive steps) moved its
    /// block by a gradient-mapping norm below this. Zero disables.
    pub grad_tol: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BcgdReport {
    pub steps: usize,
    /// Largest gradient-mapping norm seen in the last completed sweep.
    pub last_sweep_max: f64,
}

/// Cached products for one fixed code matrix.
pub struct BcgdState<'a> {
    x: &'a DMatrix<f64>,
    gram: DMatrix<f64>,
    cross: DMatrix<f64>,
    traces: Vec<f64>,
    rho: f64,
    grad: Vec<f64>,
}

impl<'a> BcgdState<'a> {
    pub fn new(d: &LapAtomDictionary, x: &'a DMatrix<f64>, y: &DMatrix<f64>, rho: f64) -> Self {
        let gram = x * x.transpose();
        let cross = y * x.transpose();
        let traces = (0..d.n()).map(|i| d.trace(i)).collect();
        BcgdState { x, gram, cross, traces, rho, grad: vec![0.0; d.m()] }
    }

    pub fn codes(&self) -> &DMatrix<f64> {
        self.x
    }

    pub fn lipschitz(&self, i: usize) -> f64 {
        (self.gram[(i, i)] + self.rho).max(LIPSCHITZ_FLOOR)
    }

    /// Block gradient from the cached products.
    pub fn block_gradient(&mut self, d: &LapAtomDictionary, i: usize, ell: usize) -> &[f64] {
        let m = d.m();
        let r0 = ell * m;
        let g = &mut self.grad;
        for (r, gr) in g.iter_mut().enumerate() {
            *gr = -self.cross[(r0 + r, i)];
        }
        let gcol = self.gram.column(i);
        for (j, &gji) in gcol.iter().enumerate() {
            if gji == 0.0 {
                continue;
            }
            let blk = d.block(j, ell);
            for (gr, &dv) in g.iter_mut().zip(blk) {
                *gr += dv * gji;
            }
        }
        g[ell] += self.rho * (self.traces[i] - m as f64);
        &self.grad
    }

    /// One projected gradient step on block `ell` of atom `i`; returns the
    /// gradient-mapping norm `Lᵢ‖new − old‖`.
    pub fn step(&mut self, d: &mut LapAtomDictionary, i: usize, ell: usize) -> f64 {
        let lip = self.lipschitz(i);
        self.block_gradient(d, i, ell);
        let old = d.block(i, ell).to_vec();
        let trial: Vec<f64> = old.iter().zip(&self.grad).map(|(b, g)| b - g / lip).collect();
        let new = project_simplex_type(&trial, ell);
        let moved = old.iter().zip(&new).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        self.traces[i] += new[ell] - old[ell];
        d.block_mut(i, ell).copy_from_slice(&new);
        lip * moved
    }
}

/// Run `opts.iters` randomized block steps on `d` with `x` held fixed.
pub fn bcgd_dict_update<R: Rng + ?Sized>(
    d: &mut LapAtomDictionary,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    opts: &BcgdOptions,
    rng: &mut R,
) -> BcgdReport {
    bcgd_with_observer(d, x, y, opts, rng, |_, _, _| {})
}

/// As [`bcgd_dict_update`], calling `observe(d, i, ell)` after every step.
pub fn bcgd_with_observer<R, F>(
    d: &mut LapAtomDictionary,
    x: &DMatrix<f64>,
    y: &DMatrix<f64>,
    opts: &BcgdOptions,
    rng: &mut R,
    mut observe: F,
) -> BcgdReport
where
    R: Rng + ?Sized,
    F: FnMut(&LapAtomDictionary, usize, usize),
{
    let (m, n) = (d.m(), d.n());
    let mut state = BcgdState::new(d, x, y, opts.rho);
    let sweep = (n * m).max(1);
    let mut report = BcgdReport::default();
    let mut sweep_max: f64 = 0.0;
    for k in 0..opts.iters {
        let i = rng.random_range(0..n);
        let ell = rng.random_range(0..m);
        let moved = state.step(d, i, ell);
        observe(d, i, ell);
        sweep_max = sweep_max.max(moved);
        report.steps = k + 1;
        if (k + 1) % sweep == 0 {
            report.last_sweep_max = sweep_max;
            if sweep_max < opts.grad_tol {
                break;
            }
            sweep_max = 0.0;
        }
    }
    report
}
