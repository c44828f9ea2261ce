//! SBO training with parallel basis expansion.
//!
//! Blocks are refined K-SVD style: every signal goes to its best block,
//! each block's codes are re-thresholded and the block is replaced by the
//! Procrustes solution for its signals. While the union is smaller than the
//! target, the worst represented fraction `nu` of the signals is collected
//! in `W` and `parallel_batch` new blocks are seeded from `W`'s left
//! singular basis, trained briefly on `W` and appended.

use nalgebra::DMatrix;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::union::{assign_blocks, procrustes_update, BlockUnion};
use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, gaussian_matrix, orthonormality_defect, polar_factor};
use crate::sparse::select_threshold;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SboConfig {
    /// Final number of blocks.
    pub l_target: usize,
    pub sparsity: usize,
    /// Refinement rounds between expansions and after the last one.
    pub rounds: usize,
    /// Fraction of worst represented signals used to seed new blocks.
    pub nu: f64,
    /// Blocks added per expansion.
    pub parallel_batch: usize,
    /// Training rounds of a new batch on the worst signals.
    pub new_block_rounds: usize,
    /// Fraction of the signals used to refine the initial blocks first.
    pub init_fraction: f64,
    /// Scale of the random rotation separating members of a batch.
    pub jitter: f64,
    /// Starting point of every new block before its training on `W`.
    pub new_block_init: NewBlockInit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NewBlockInit {
    /// The first initial block (the orthogonalized class Laplacian).
    Seed,
    /// The completed left singular basis of `W`.
    WorstSvd,
}

impl Default for SboConfig {
    fn default() -> Self {
        SboConfig {
            l_target: 48,
            sparsity: 4,
            rounds: 7,
            nu: 0.3,
            parallel_batch: 6,
            new_block_rounds: 2,
            init_fraction: 0.125,
            jitter: 0.1,
            new_block_init: NewBlockInit::WorstSvd,
        }
    }
}

impl SboConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::invalid(format!("nu = {} outside (0, 1]", self.nu)));
        }
        if self.parallel_batch == 0 {
            return Err(Error::invalid("parallel batch must be at least 1"));
        }
        if !(self.init_fraction > 0.0 && self.init_fraction <= 1.0) {
            return Err(Error::invalid(format!("init fraction {} outside (0, 1]", self.init_fraction)));
        }
        if !(self.jitter >= 0.0) {
            return Err(Error::invalid("jitter must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SboTrainResult {
    pub union: BlockUnion,
    /// Total squared representation error at every re-assignment.
    pub error_trace: Vec<f64>,
    /// Blocks re-seeded because no signal chose them.
    pub replaced_blocks: usize,
}

/// Per-column squared norms.
fn energies(y: &DMatrix<f64>) -> Vec<f64> {
    y.column_iter().map(|c| c.norm_squared()).collect()
}

/// Procrustes refresh of every block given an assignment. Returns the
/// blocks nobody chose.
fn refresh_blocks(blocks: &mut [DMatrix<f64>], y: &DMatrix<f64>, assign: &[usize], s: usize) -> Vec<usize> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for (i, &j) in assign.iter().enumerate() {
        members[j].push(i);
    }
    let mut empty = Vec::new();
    for (j, idx) in members.iter().enumerate() {
        if idx.is_empty() {
            empty.push(j);
            continue;
        }
        let yj = y.select_columns(idx);
        let c = blocks[j].tr_mul(&yj);
        let mut x = DMatrix::zeros(c.nrows(), c.ncols());
        for (k, col) in c.column_iter().enumerate() {
            for (r, v) in select_threshold(col.as_slice(), s).iter() {
                x[(r, k)] = v;
            }
        }
        if let Some(q) = procrustes_update(&yj, &x) {
            blocks[j] = q;
        }
    }
    empty
}

/// Indices of the `ceil(nu·N)` signals with the largest residual (lowest
/// index first on ties).
fn worst_signals(residual: &[f64], nu: f64) -> Vec<usize> {
    let k = ((nu * residual.len() as f64).ceil() as usize).clamp(1, residual.len());
    let mut order: Vec<usize> = (0..residual.len()).collect();
    order.sort_by(|&a, &b| residual[b].total_cmp(&residual[a]));
    let mut w = order[..k].to_vec();
    w.sort_unstable();
    w
}

/// `count` blocks started from `seed` or the left singular basis of `w`,
/// each rotated by its own small random orthogonal matrix, then trained on
/// `w`.
fn new_blocks<R: Rng + ?Sized>(
    w: &DMatrix<f64>,
    seed: &DMatrix<f64>,
    count: usize,
    config: &SboConfig,
    rng: &mut R,
) -> Vec<DMatrix<f64>> {
    let m = w.nrows();
    let base = match config.new_block_init {
        NewBlockInit::Seed => seed.clone(),
        NewBlockInit::WorstSvd => {
            let u = w.clone().svd(true, false).u.expect("svd u");
            complete_orthonormal(&u, rng)
        }
    };
    let mut batch: Vec<DMatrix<f64>> = (0..count)
        .map(|_| {
            let near_identity = DMatrix::identity(m, m) + gaussian_matrix(m, m, rng) * config.jitter;
            &base * polar_factor(&near_identity)
        })
        .collect();
    for _ in 0..config.new_block_rounds {
        let (assign, _) = assign_blocks(&batch, w, config.sparsity);
        refresh_blocks(&mut batch, w, &assign, config.sparsity);
    }
    batch
}

fn total_error(norms: &[f64], captured: &[f64]) -> f64 {
    norms.iter().zip(captured).map(|(a, b)| (a - b).max(0.0)).sum()
}

/// Train a union of orthonormal blocks for one class, starting from
/// `init` and growing it to `config.l_target` blocks.
pub fn sbo_train<R: Rng + ?Sized>(
    y: &DMatrix<f64>,
    config: &SboConfig,
    init: Vec<DMatrix<f64>>,
    class: u32,
    rng: &mut R,
) -> Result<SboTrainResult> {
    config.validate()?;
    let start = BlockUnion::for_class(init, class)?;
    if start.m() != y.nrows() {
        return Err(Error::dims(format!("blocks are {0}x{0}, signals have length {1}", start.m(), y.nrows())));
    }
    if y.ncols() == 0 {
        return Err(Error::invalid("no training signals"));
    }
    if config.l_target < start.len() {
        return Err(Error::invalid(format!(
            "target of {} blocks is below the {} initial blocks",
            config.l_target,
            start.len()
        )));
    }
    let s = config.sparsity;
    let mut blocks = start.blocks().to_vec();
    let seed = blocks[0].clone();

    if config.init_fraction < 1.0 && config.rounds > 0 {
        let k = ((config.init_fraction * y.ncols() as f64).ceil() as usize).clamp(1, y.ncols());
        let mut idx = index::sample(rng, y.ncols(), k).into_vec();
        idx.sort_unstable();
        let sub = y.select_columns(&idx);
        for _ in 0..config.rounds {
            let (assign, _) = assign_blocks(&blocks, &sub, s);
            refresh_blocks(&mut blocks, &sub, &assign, s);
        }
    }

    let norms = energies(y);
    let mut trace = Vec::new();
    let mut replaced = 0;
    loop {
        for _ in 0..config.rounds {
            let (assign, captured) = assign_blocks(&blocks, y, s);
            trace.push(total_error(&norms, &captured));
            let empty = refresh_blocks(&mut blocks, y, &assign, s);
            if !empty.is_empty() {
                let residual: Vec<f64> = norms.iter().zip(&captured).map(|(a, b)| a - b).collect();
                let w = y.select_columns(&worst_signals(&residual, config.nu));
                let fresh = new_blocks(&w, &seed, empty.len(), config, rng);
                for (j, q) in empty.into_iter().zip(fresh) {
                    blocks[j] = q;
                    replaced += 1;
                }
            }
        }
        if blocks.len() >= config.l_target {
            break;
        }
        let (_, captured) = assign_blocks(&blocks, y, s);
        let residual: Vec<f64> = norms.iter().zip(&captured).map(|(a, b)| a - b).collect();
        let w = y.select_columns(&worst_signals(&residual, config.nu));
        let count = config.parallel_batch.min(config.l_target - blocks.len());
        blocks.extend(new_blocks(&w, &seed, count, config, rng));
    }
    let (_, captured) = assign_blocks(&blocks, y, s);
    trace.push(total_error(&norms, &captured));

    debug_assert!(blocks.iter().all(|q| orthonormality_defect(q) < 1e-10));
    let union = BlockUnion::for_class(blocks, class)?;
    Ok(SboTrainResult { union, error_trace: trace, replaced_blocks: replaced })
}
