//! Experiment orchestration and result files.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::{Experiment, ExperimentConfig, Method};
use super::data::{generate, ExperimentData};
use super::methods::{train_method, train_sbo, TrainedModels};
use super::store::save_models;
use crate::classify::{evaluate, ClassifierReport};
use crate::error::{Error, Result};
use crate::graphgen::{LabeledDataset, LaplacianMatrix, Layout};
use crate::io::{load_dataset, load_matrix, save_dataset, save_matrix};
use crate::sbo::SboConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub train_seconds: f64,
    pub classify_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub l_target: usize,
    pub nu: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct MethodOutcome {
    pub report: ClassifierReport,
    pub models: TrainedModels,
    pub timing: Timing,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcomes: Vec<MethodOutcome>,
    pub sweep: Vec<SweepRow>,
}

impl RunSummary {
    pub fn reports(&self) -> Vec<ClassifierReport> {
        self.outcomes.iter().map(|o| o.report.clone()).collect()
    }

    pub fn report(&self, method: Method) -> Option<&ClassifierReport> {
        self.outcomes.iter().find(|o| o.models.method() == method).map(|o| &o.report)
    }
}

/// Paths of one run directory.
#[derive(Debug, Clone)]
pub struct RunLayout {
    pub root: PathBuf,
}

impl RunLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunLayout { root: root.into() }
    }

    pub fn data_dir(&self) -> PathBuf {
        self.root.join("data")
    }

    pub fn train_set(&self) -> PathBuf {
        self.data_dir().join("train.lds")
    }

    pub fn test_set(&self) -> PathBuf {
        self.data_dir().join("test.lds")
    }

    pub fn laplacian(&self, class: usize) -> PathBuf {
        self.data_dir().join(format!("laplacian{class}.ldm"))
    }

    pub fn models(&self, method: Method) -> PathBuf {
        self.root.join("models").join(method.name())
    }
}

pub fn layout_of(experiment: Experiment) -> Layout {
    match experiment {
        Experiment::Exp1 => Layout::VectorizedLaplacian,
        Experiment::Exp2 => Layout::GraphSignal,
    }
}

/// Build the report of `method` from its predictions.
pub fn method_report(config: &ExperimentConfig, method: Method, test: &LabeledDataset, pred: &[u32]) -> Result<ClassifierReport> {
    let mut report = evaluate(&test.labels, pred)?;
    report.method = method.name().to_string();
    report.config = json!({
        "experiment": config.experiment,
        "seed": config.seed,
        "scale": config.scale,
        "split": config.split,
        method.name(): config.method_config(method),
    });
    Ok(report)
}

/// Train and evaluate one method.
pub fn run_method(config: &ExperimentConfig, method: Method, data: &ExperimentData) -> Result<MethodOutcome> {
    let t0 = Instant::now();
    let models = train_method(config, method, &data.train, &data.class_laplacians)?;
    let train_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let pred = models.classify(&data.test, config.sparsity(method))?;
    let classify_seconds = t1.elapsed().as_secs_f64();
    let report = method_report(config, method, &data.test, &pred)?;
    Ok(MethodOutcome { report, models, timing: Timing { train_seconds, classify_seconds } })
}

/// SBO test accuracy over the `(l_target, nu)` grid, block counts outer.
pub fn sbo_sweep(config: &ExperimentConfig, data: &ExperimentData) -> Result<Vec<SweepRow>> {
    let grid: Vec<(usize, f64)> = config
        .sweep
        .l_targets
        .iter()
        .flat_map(|&l| config.sweep.nus.iter().map(move |&nu| (l, nu)))
        .collect();
    let rows: Vec<Result<SweepRow>> = thread::scope(|scope| {
        let handles: Vec<_> = grid
            .iter()
            .map(|&(l_target, nu)| {
                scope.spawn(move || {
                    let sbo = SboConfig { l_target, nu, ..config.sbo.clone() };
                    let models = TrainedModels::Sbo(train_sbo(config, &sbo, &data.train, &data.class_laplacians)?);
                    let pred = models.classify(&data.test, sbo.sparsity)?;
                    Ok(SweepRow { l_target, nu, accuracy: evaluate(&data.test.labels, &pred)?.accuracy })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep thread panicked")).collect()
    });
    rows.into_iter().collect()
}

/// Run every configured method in parallel, then the SBO sweep for the
/// signal experiment.
pub fn run_methods(config: &ExperimentConfig, data: &ExperimentData) -> Result<RunSummary> {
    let outcomes: Vec<Result<MethodOutcome>> = thread::scope(|scope| {
        let handles: Vec<_> =
            config.methods.iter().map(|&m| scope.spawn(move || run_method(config, m, data))).collect();
        handles.into_iter().map(|h| h.join().expect("method thread panicked")).collect()
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let sweep = if config.experiment == Experiment::Exp2 && config.sweep.enabled {
        sbo_sweep(config, data)?
    } else {
        Vec::new()
    };
    Ok(RunSummary { outcomes, sweep })
}

fn check_experiment(config: &ExperimentConfig, expected: Experiment) -> Result<()> {
    if config.experiment != expected {
        return Err(Error::invalid(format!("config is for {:?}, not {expected:?}", config.experiment)));
    }
    Ok(())
}

/// Laplacian classification experiment; writes everything under `config.out`.
pub fn run_exp1(config: &ExperimentConfig) -> Result<RunSummary> {
    check_experiment(config, Experiment::Exp1)?;
    run_experiment(config)
}

/// Graph signal experiment with the SBO sweep; writes under `config.out`.
pub fn run_exp2(config: &ExperimentConfig) -> Result<RunSummary> {
    check_experiment(config, Experiment::Exp2)?;
    run_experiment(config)
}

/// Generate, train, classify and write all outputs of `config.experiment`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let data = generate(config)?;
    let layout = RunLayout::new(&config.out);
    write_data(&layout, &data)?;
    let summary = run_methods(config, &data)?;
    for o in &summary.outcomes {
        let m = o.models.method();
        save_models(&layout.models(m), &o.models, config.sparsity(m), config.seed)?;
    }
    write_reports(&layout.root, &summary.reports())?;
    if !summary.sweep.is_empty() {
        write_sweep(&layout.root.join("sweep.csv"), &summary.sweep)?;
    }
    let timings: BTreeMap<&str, Timing> = summary.outcomes.iter().map(|o| (o.models.method().name(), o.timing)).collect();
    write_json(&layout.root.join("timings.json"), &timings)?;
    write_json(&layout.root.join("config.json"), config)?;
    Ok(summary)
}

pub fn write_data(layout: &RunLayout, data: &ExperimentData) -> Result<()> {
    fs::create_dir_all(layout.data_dir())?;
    save_dataset(&layout.train_set(), &data.train)?;
    save_dataset(&layout.test_set(), &data.test)?;
    for (c, l) in data.class_laplacians.iter().enumerate() {
        save_matrix(&layout.laplacian(c), l.matrix())?;
    }
    Ok(())
}

/// Read back what [`write_data`] wrote.
pub fn read_data(layout: &RunLayout, experiment: Experiment) -> Result<ExperimentData> {
    let hint = Some(layout_of(experiment));
    let train = load_dataset(&layout.train_set(), hint)?;
    let test = load_dataset(&layout.test_set(), hint)?;
    let mut class_laplacians = Vec::new();
    if experiment == Experiment::Exp2 {
        for c in 0..train.class_count() {
            let m = load_matrix(&layout.laplacian(c))?;
            class_laplacians.push(LaplacianMatrix::from_matrix(m).map_err(|e| Error::Format(e.to_string()))?);
        }
    }
    Ok(ExperimentData { train, test, class_laplacians })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `report.json` (all reports) and `report.csv` (one row per method and
/// class) in `dir`.
pub fn write_reports(dir: &Path, reports: &[ClassifierReport]) -> Result<()> {
    write_json(&dir.join("report.json"), reports)?;
    let mut w = csv::Writer::from_path(dir.join("report.csv")).map_err(csv_error)?;
    w.write_record(["method", "accuracy", "n_test", "class", "support", "precision", "recall"]).map_err(csv_error)?;
    for r in reports {
        for (k, &c) in r.classes.iter().enumerate() {
            let support: u64 = r.confusion[k].iter().sum();
            w.write_record([
                r.method.clone(),
                r.accuracy.to_string(),
                r.n_test.to_string(),
                c.to_string(),
                support.to_string(),
                opt(r.precision[k]),
                opt(r.recall[k]),
            ])
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["l_target", "nu", "accuracy"]).map_err(csv_error)?;
    for r in rows {
        w.write_record([r.l_target.to_string(), r.nu.to_string(), r.accuracy.to_string()]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format(format!("{other:?}")),
    }
}
