//! Reproduction of the two synthetic benchmarks: configuration, data
//! generation, per-class training, reports and model files.

mod config;
mod data;
mod methods;
mod run;
mod store;

pub use config::{Experiment, ExperimentConfig, GraphConfig, Method, SignalConfig, SweepConfig};
pub use data::{class_laplacians, generate, laplacian_dataset, signal_dataset, ExperimentData, ANOMALY, NORMAL};
pub use methods::{train_method, train_sbo, TrainedModels};
pub use run::{
    layout_of, method_report, read_data, run_exp1, run_exp2, run_experiment, run_method, run_methods, sbo_sweep,
    write_data, write_json, write_reports, write_sweep, MethodOutcome, RunLayout, RunSummary, SweepRow, Timing,
};
pub use store::{load_models, save_models, ClassEntry, ModelManifest, MANIFEST};
