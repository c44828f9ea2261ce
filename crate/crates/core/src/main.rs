use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use lapdict::experiments::{
    generate, layout_of, load_models, method_report, read_data, run_experiment, save_models, train_method,
    write_data, write_reports, ExperimentConfig, Method, RunLayout,
};
use lapdict::io::export_csv;
use lapdict::Result;

#[derive(Parser)]
#[command(name = "lapdict", version, about = "Laplacian-structured dictionary learning for graph classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the train and test sets into <out>/data.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Also write train.csv and test.csv.
        #[arg(long)]
        csv: bool,
    },
    /// Train models on <out>/data/train.lds into <out>/models/<method>.
    Train(Common),
    /// Classify <out>/data/test.lds with stored models; writes report.json and report.csv.
    Classify(Common),
    /// Run a whole experiment: generate, train, classify, sweep.
    Bench(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Fraction of the full-size class counts.
    #[arg(long)]
    scale: Option<f64>,
    /// Restrict to these methods (lapdl, sepdl, sbo, src); repeatable.
    #[arg(long = "method")]
    methods: Vec<Method>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(scale) = self.scale {
            c.scale = scale;
        }
        if !self.methods.is_empty() {
            c.methods = self.methods.clone();
        }
        if let Some(out) = &self.out {
            c.out = out.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

fn gen(common: &Common, csv: bool) -> Result<()> {
    let config = common.config()?;
    let layout = RunLayout::new(&config.out);
    let data = generate(&config)?;
    write_data(&layout, &data)?;
    if csv {
        export_csv(&layout.data_dir().join("train.csv"), &data.train)?;
        export_csv(&layout.data_dir().join("test.csv"), &data.test)?;
    }
    println!("wrote {} training and {} test signals to {}", data.train.len(), data.test.len(), layout.data_dir().display());
    Ok(())
}

fn train(common: &Common) -> Result<()> {
    let config = common.config()?;
    let layout = RunLayout::new(&config.out);
    let data = read_data(&layout, config.experiment)?;
    for &method in &config.methods {
        let t = Instant::now();
        let models = train_method(&config, method, &data.train, &data.class_laplacians)?;
        let dir = layout.models(method);
        save_models(&dir, &models, config.sparsity(method), config.seed)?;
        println!("{method}: trained in {:.1}s, saved to {}", t.elapsed().as_secs_f64(), dir.display());
    }
    Ok(())
}

fn classify(common: &Common) -> Result<()> {
    let config = common.config()?;
    let layout = RunLayout::new(&config.out);
    let test = lapdict::io::load_dataset(&layout.test_set(), Some(layout_of(config.experiment)))?;
    let mut reports = Vec::new();
    for &method in &config.methods {
        let (models, manifest) = load_models(&layout.models(method))?;
        let pred = models.classify(&test, manifest.s)?;
        let report = method_report(&config, method, &test, &pred)?;
        println!("{method}: accuracy {:.4}", report.accuracy);
        reports.push(report);
    }
    write_reports(&layout.root, &reports)
}

fn bench(common: &Common) -> Result<()> {
    let config = common.config()?;
    let summary = run_experiment(&config)?;
    for o in &summary.outcomes {
        println!(
            "{}: accuracy {:.4} (train {:.1}s, classify {:.1}s)",
            o.report.method, o.report.accuracy, o.timing.train_seconds, o.timing.classify_seconds
        );
    }
    for r in &summary.sweep {
        println!("sweep L={} nu={}: accuracy {:.4}", r.l_target, r.nu, r.accuracy);
    }
    println!("results in {}", config.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { common, csv } => gen(common, *csv),
        Command::Train(c) => train(c),
        Command::Classify(c) => classify(c),
        Command::Bench(c) => bench(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
