//! Experiment configuration.
//!
//! A config file is a JSON object. Its `experiment` field selects a set of
//! defaults and every other field present in the file overrides them;
//! nested objects are merged key by key.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::DlConfig;
use crate::error::{Error, Result};
use crate::lapdl::LapDLConfig;
use crate::sbo::SboConfig;
use crate::sepdl::SepDLConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// Classifying weighted graph Laplacians.
    Exp1,
    /// Classifying signals supported on two graphs.
    Exp2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lapdl,
    Sepdl,
    Sbo,
    Src,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lapdl, Method::Sepdl, Method::Sbo, Method::Src];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lapdl => "lapdl",
            Method::Sepdl => "sepdl",
            Method::Sbo => "sbo",
            Method::Src => "src",
        }
    }

    fn supports(self, exp: Experiment) -> bool {
        match exp {
            Experiment::Exp1 => matches!(self, Method::Lapdl | Method::Sepdl | Method::Src),
            Experiment::Exp2 => matches!(self, Method::Sbo | Method::Src),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method {s:?} (expected lapdl, sepdl, sbo or src)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GraphConfig {
    pub nodes: usize,
    pub modules: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    pub anomaly_nodes: usize,
    /// Mean degree of the implanted ring lattice.
    pub anomaly_k: usize,
    pub anomaly_beta: f64,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig { nodes: 50, modules: 8, p_intra: 0.8, p_inter: 0.05, anomaly_nodes: 10, anomaly_k: 4, anomaly_beta: 0.2 }
    }
}

/// Generation of the graph signals of the second experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SignalConfig {
    pub lambda: f64,
    pub n_atoms: usize,
    pub sparsity: usize,
    pub snr_db: f64,
    /// Both classes start from the same random `D₀`.
    pub shared_d0: bool,
    /// Draw edge weights for the class graphs; otherwise every edge
    /// weighs 1.
    pub weighted: bool,
}

impl Default for SignalConfig {
    fn default() -> Self {
        SignalConfig { lambda: 5.0, n_atoms: 100, sparsity: 4, snr_db: 20.0, shared_d0: false, weighted: false }
    }
}

/// Grid of SBO settings evaluated by the second experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub enabled: bool,
    pub l_targets: Vec<usize>,
    pub nus: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { enabled: true, l_targets: vec![12, 24, 48], nus: vec![0.1, 0.3, 0.5] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    /// Fraction of the full-size class counts actually generated.
    pub scale: f64,
    pub methods: Vec<Method>,
    /// Training fraction of the stratified split.
    pub split: f64,
    /// Class sizes at scale 1.
    pub n_normal: usize,
    pub n_anomaly: usize,
    pub graph: GraphConfig,
    pub signals: SignalConfig,
    pub lapdl: LapDLConfig,
    pub sepdl: SepDLConfig,
    pub src: DlConfig,
    pub sbo: SboConfig,
    pub sweep: SweepConfig,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let (methods, n_normal, n_anomaly, src_sparsity) = match experiment {
            Experiment::Exp1 => (vec![Method::Lapdl, Method::Sepdl, Method::Src], 5000, 500, 30),
            Experiment::Exp2 => (vec![Method::Sbo, Method::Src], 6000, 600, 4),
        };
        ExperimentConfig {
            experiment,
            seed: 1,
            scale: 1.0,
            methods,
            split: 0.8,
            n_normal,
            n_anomaly,
            graph: GraphConfig::default(),
            signals: SignalConfig::default(),
            lapdl: LapDLConfig::default(),
            sepdl: SepDLConfig::default(),
            src: DlConfig { sparsity: src_sparsity, ..DlConfig::default() },
            sbo: SboConfig::default(),
            sweep: SweepConfig::default(),
            out: PathBuf::from(match experiment {
                Experiment::Exp1 => "out/exp1",
                Experiment::Exp2 => "out/exp2",
            }),
        }
    }

    /// Parse a JSON config over the defaults of its experiment and validate.
    pub fn from_json(text: &str) -> Result<Self> {
        let user: Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("config: {e}")))?;
        let Value::Object(_) = user else {
            return Err(Error::invalid("config must be a JSON object"));
        };
        let experiment = match user.get("experiment") {
            Some(v) => Experiment::deserialize(v).map_err(|e| Error::invalid(format!("config: experiment: {e}")))?,
            None => Experiment::Exp1,
        };
        let mut merged = serde_json::to_value(Self::defaults(experiment))?;
        merge(&mut merged, user);
        let config: Self = serde_json::from_value(merged).map_err(|e| Error::invalid(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Generated class sizes after scaling.
    pub fn class_sizes(&self) -> (usize, usize) {
        let scaled = |n: usize| (n as f64 * self.scale).round() as usize;
        (scaled(self.n_normal), scaled(self.n_anomaly))
    }

    /// Sparsity used to train and classify with `method`.
    pub fn sparsity(&self, method: Method) -> usize {
        match method {
            Method::Lapdl => self.lapdl.sparsity,
            Method::Sepdl => self.sepdl.sparsity,
            Method::Sbo => self.sbo.sparsity,
            Method::Src => self.src.sparsity,
        }
    }

    /// Settings of one method, echoed in its report.
    pub fn method_config(&self, method: Method) -> Value {
        let v = match method {
            Method::Lapdl => serde_json::to_value(&self.lapdl),
            Method::Sepdl => serde_json::to_value(&self.sepdl),
            Method::Sbo => serde_json::to_value(&self.sbo),
            Method::Src => serde_json::to_value(&self.src),
        };
        v.expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(Error::invalid(format!("scale = {} outside (0, 1]", self.scale)));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::invalid(format!("split = {} outside (0, 1)", self.split)));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods selected"));
        }
        if let Some(m) = self.methods.iter().find(|m| !m.supports(self.experiment)) {
            return Err(Error::invalid(format!("method {m} does not apply to {:?}", self.experiment)));
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::invalid(format!("method {m} listed twice")));
            }
        }
        let (a, b) = self.class_sizes();
        for (name, n) in [("normal", a), ("anomaly", b)] {
            let train = (self.split * n as f64).round() as usize;
            if n < 4 || train < 2 || n - train < 1 {
                return Err(Error::invalid(format!("{n} {name} signals after scaling are too few to split and train")));
            }
        }
        let g = &self.graph;
        if g.anomaly_nodes > g.nodes {
            return Err(Error::invalid("anomaly larger than the host graph"));
        }
        for &m in &self.methods {
            if self.sparsity(m) == 0 {
                return Err(Error::invalid(format!("{m}: sparsity must be positive")));
            }
        }
        if self.methods.contains(&Method::Lapdl) {
            self.lapdl.validate()?;
        }
        if self.methods.contains(&Method::Sbo) {
            self.sbo.validate()?;
            if self.sbo.l_target == 0 {
                return Err(Error::invalid("sbo: l_target must be at least 1"));
            }
        }
        if self.experiment == Experiment::Exp2 && self.sweep.enabled {
            if self.sweep.l_targets.contains(&0) {
                return Err(Error::invalid("sweep: block counts must be positive"));
            }
            if let Some(nu) = self.sweep.nus.iter().find(|&&nu| !(nu > 0.0 && nu <= 1.0)) {
                return Err(Error::invalid(format!("sweep: nu = {nu} outside (0, 1]")));
            }
        }
        Ok(())
    }
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
