//! Synthetic graphs, Laplacians, anomaly implants and graph-coupled signals.

mod dataset;
mod generators;
mod graph;
mod laplacian;
mod signals;

pub use dataset::{split_dataset, LabeledDataset, Layout};
pub use generators::{
    assign_weights, gen_sbm, gen_watts_strogatz, implant_anomaly, sbm_blocks, Implanted, WEIGHT_MAX,
    WEIGHT_MEAN, WEIGHT_STD,
};
pub use graph::{Edge, WeightedGraph};
pub use laplacian::{diagonal_positions, laplacian, square_side, unvec_rows, vec_rows, LaplacianMatrix};
pub use signals::{coupled_dictionary, gen_graph_signals, gen_graph_signals_from, GraphSignalBatch, SignalParams};
