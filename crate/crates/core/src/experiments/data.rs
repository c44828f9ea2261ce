//! Synthetic datasets of both experiments.

use rand::Rng;

use super::config::{Experiment, ExperimentConfig, GraphConfig};
use crate::error::Result;
use crate::graphgen::{
    assign_weights, gen_graph_signals_from, gen_sbm, gen_watts_strogatz, implant_anomaly, laplacian, split_dataset,
    vec_rows, LabeledDataset, LaplacianMatrix, Layout, SignalParams, WeightedGraph,
};
use crate::linalg::gaussian_matrix;
use crate::rng::substream;

pub const NORMAL: u32 = 0;
pub const ANOMALY: u32 = 1;

/// Train/test split of one experiment. For the signal experiment the
/// generating Laplacian of each class is kept, indexed by class id.
#[derive(Debug, Clone)]
pub struct ExperimentData {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub class_laplacians: Vec<LaplacianMatrix>,
}

fn normal_graph<R: Rng + ?Sized>(g: &GraphConfig, rng: &mut R) -> Result<WeightedGraph> {
    gen_sbm(g.nodes, g.modules, g.p_intra, g.p_inter, rng)
}

fn anomalous_graph<R: Rng + ?Sized>(g: &GraphConfig, host: &WeightedGraph, rng: &mut R) -> Result<WeightedGraph> {
    let ws = gen_watts_strogatz(g.anomaly_nodes, g.anomaly_k, g.anomaly_beta, rng)?;
    Ok(implant_anomaly(host, &ws, rng)?.graph)
}

/// Weighted Laplacians: `normal` SBM graphs and `anomalous` SBM graphs
/// carrying an implanted ring, every weight drawn afresh.
pub fn laplacian_dataset(config: &ExperimentConfig) -> Result<LabeledDataset> {
    let g = &config.graph;
    let (n_normal, n_anomaly) = config.class_sizes();
    let dim = g.nodes * g.nodes;
    let mut parts = Vec::with_capacity(2);
    for (label, count, stream) in [(NORMAL, n_normal, "exp1/normal"), (ANOMALY, n_anomaly, "exp1/anomaly")] {
        let mut rng = substream(config.seed, stream);
        let mut signals = nalgebra::DMatrix::zeros(dim, count);
        for i in 0..count {
            let host = normal_graph(g, &mut rng)?;
            let graph = if label == ANOMALY { anomalous_graph(g, &host, &mut rng)? } else { host };
            let l = laplacian(&assign_weights(&graph, &mut rng));
            signals.set_column(i, &vec_rows(l.matrix()));
        }
        parts.push(LabeledDataset::new(signals, vec![label; count], Layout::VectorizedLaplacian)?);
    }
    LabeledDataset::concat(&parts)
}

/// The two class Laplacians of the signal experiment: an SBM graph and the
/// same graph with a ring implanted. Unit edge weights unless
/// `signals.weighted` is set.
pub fn class_laplacians(config: &ExperimentConfig) -> Result<Vec<LaplacianMatrix>> {
    let g = &config.graph;
    let mut rng = substream(config.seed, "exp2/graphs");
    let mut host = normal_graph(g, &mut rng)?;
    let mut ws = gen_watts_strogatz(g.anomaly_nodes, g.anomaly_k, g.anomaly_beta, &mut rng)?;
    if config.signals.weighted {
        host = assign_weights(&host, &mut rng);
        ws = assign_weights(&ws, &mut rng);
    }
    let implanted = implant_anomaly(&host, &ws, &mut rng)?.graph;
    Ok(vec![laplacian(&host), laplacian(&implanted)])
}

/// Noisy sparse signals generated from each class Laplacian.
pub fn signal_dataset(config: &ExperimentConfig, laplacians: &[LaplacianMatrix]) -> Result<LabeledDataset> {
    let s = &config.signals;
    let params = SignalParams { lambda: s.lambda, n_atoms: s.n_atoms, sparsity: s.sparsity, snr_db: s.snr_db };
    let (n_normal, n_anomaly) = config.class_sizes();
    let m = config.graph.nodes;
    let shared = gaussian_matrix(m, s.n_atoms, &mut substream(config.seed, "exp2/d0"));
    let mut parts = Vec::with_capacity(2);
    for (label, count, stream) in [(NORMAL, n_normal, "exp2/normal"), (ANOMALY, n_anomaly, "exp2/anomaly")] {
        let mut rng = substream(config.seed, stream);
        let d0 = if s.shared_d0 { shared.clone() } else { gaussian_matrix(m, s.n_atoms, &mut rng) };
        let batch = gen_graph_signals_from(&laplacians[label as usize], &d0, &params, count, label, &mut rng)?;
        parts.push(batch.dataset);
    }
    LabeledDataset::concat(&parts)
}

/// Generate and split the data of `config.experiment`.
pub fn generate(config: &ExperimentConfig) -> Result<ExperimentData> {
    let (full, class_laplacians) = match config.experiment {
        Experiment::Exp1 => (laplacian_dataset(config)?, Vec::new()),
        Experiment::Exp2 => {
            let ls = class_laplacians(config)?;
            (signal_dataset(config, &ls)?, ls)
        }
    };
    let (train, test) = split_dataset(&full, config.split, &mut substream(config.seed, "split"))?;
    Ok(ExperimentData { train, test, class_laplacians })
}
