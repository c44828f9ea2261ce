//! Model directories: one `model.json` manifest next to `LDM1` blobs.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::config::Method;
use super::methods::TrainedModels;
use crate::classify::ClassModelSet;
use crate::error::{Error, Result};
use crate::io::{load_matrix, save_matrix};
use crate::lapdl::LapAtomDictionary;
use crate::sbo::BlockUnion;
use crate::sepdl::SeparableDictPair;

pub const MANIFEST: &str = "model.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelManifest {
    pub method: Method,
    /// Sparsity the models were trained with and classify at.
    pub s: usize,
    pub seed: u64,
    pub classes: Vec<ClassEntry>,
}

/// Shape fields present depend on the method: `m, n` for Laplacian atoms
/// and plain dictionaries, `m1, n1, m2, n2` for pairs, `m, L,
/// class_of_block` for block unions.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassEntry {
    pub class: u32,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_of_block: Option<Vec<u32>>,
}

fn write_blobs(dir: &Path, files: &[(String, &DMatrix<f64>)]) -> Result<Vec<String>> {
    for (name, m) in files {
        save_matrix(&dir.join(name), m)?;
    }
    Ok(files.iter().map(|(n, _)| n.clone()).collect())
}

/// Write `models` into `dir` (created if needed).
pub fn save_models(dir: &Path, models: &TrainedModels, s: usize, seed: u64) -> Result<ModelManifest> {
    fs::create_dir_all(dir)?;
    let mut classes = Vec::new();
    match models {
        TrainedModels::Lapdl(set) => {
            for (c, d) in set.iter() {
                let files = write_blobs(dir, &[(format!("class{c}.ldm"), d.atoms())])?;
                classes.push(ClassEntry { class: c, files, m: Some(d.m()), n: Some(d.n()), ..Default::default() });
            }
        }
        TrainedModels::Src(set) => {
            for (c, d) in set.iter() {
                let files = write_blobs(dir, &[(format!("class{c}.ldm"), d)])?;
                classes.push(ClassEntry { class: c, files, m: Some(d.nrows()), n: Some(d.ncols()), ..Default::default() });
            }
        }
        TrainedModels::Sepdl(set) => {
            for (c, p) in set.iter() {
                let files = write_blobs(dir, &[(format!("class{c}_d1.ldm"), p.d1()), (format!("class{c}_d2.ldm"), p.d2())])?;
                let (m1, n1, m2, n2) = p.shape();
                classes.push(ClassEntry {
                    class: c,
                    files,
                    m1: Some(m1),
                    n1: Some(n1),
                    m2: Some(m2),
                    n2: Some(n2),
                    ..Default::default()
                });
            }
        }
        TrainedModels::Sbo(set) => {
            for (c, u) in set.iter() {
                let named: Vec<_> = u.blocks().iter().enumerate().map(|(j, q)| (format!("class{c}_block{j:03}.ldm"), q)).collect();
                let files = write_blobs(dir, &named)?;
                classes.push(ClassEntry {
                    class: c,
                    files,
                    m: Some(u.m()),
                    l: Some(u.len()),
                    class_of_block: Some(u.class_of_block().to_vec()),
                    ..Default::default()
                });
            }
        }
    }
    let manifest = ModelManifest { method: models.method(), s, seed, classes };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(dir.join(MANIFEST), text)?;
    Ok(manifest)
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn need(v: Option<usize>, what: &str, class: u32) -> Result<usize> {
    v.ok_or_else(|| bad(format!("class {class}: manifest lacks {what}")))
}

fn load_checked(dir: &Path, name: &str, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if name.contains('/') || name.contains('\\') || name == ".." {
        return Err(bad(format!("model file name {name:?} leaves the model directory")));
    }
    let m = load_matrix(&dir.join(name))?;
    if m.shape() != (rows, cols) {
        return Err(bad(format!("{name} is {}x{}, manifest says {rows}x{cols}", m.nrows(), m.ncols())));
    }
    Ok(m)
}

fn one_file(e: &ClassEntry, count: usize) -> Result<()> {
    if e.files.len() != count {
        return Err(bad(format!("class {} lists {} files, expected {count}", e.class, e.files.len())));
    }
    Ok(())
}

/// Read a directory written by [`save_models`].
pub fn load_models(dir: &Path) -> Result<(TrainedModels, ModelManifest)> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    let manifest: ModelManifest = serde_json::from_str(&text).map_err(|e| bad(format!("{MANIFEST}: {e}")))?;
    let fmt = |e: Error| match e {
        Error::InvalidParameter(msg) | Error::DimensionMismatch(msg) => bad(msg),
        other => other,
    };
    let entries = &manifest.classes;
    let models = match manifest.method {
        Method::Lapdl => {
            let mut v = Vec::new();
            for e in entries {
                one_file(e, 1)?;
                let (m, n) = (need(e.m, "m", e.class)?, need(e.n, "n", e.class)?);
                let atoms = load_checked(dir, &e.files[0], m * m, n)?;
                v.push((e.class, LapAtomDictionary::new(m, atoms).map_err(fmt)?));
            }
            TrainedModels::Lapdl(ClassModelSet::new(v).map_err(fmt)?)
        }
        Method::Src => {
            let mut v = Vec::new();
            for e in entries {
                one_file(e, 1)?;
                let (m, n) = (need(e.m, "m", e.class)?, need(e.n, "n", e.class)?);
                v.push((e.class, load_checked(dir, &e.files[0], m, n)?));
            }
            TrainedModels::Src(ClassModelSet::new(v).map_err(fmt)?)
        }
        Method::Sepdl => {
            let mut v = Vec::new();
            for e in entries {
                one_file(e, 2)?;
                let d1 = load_checked(dir, &e.files[0], need(e.m1, "m1", e.class)?, need(e.n1, "n1", e.class)?)?;
                let d2 = load_checked(dir, &e.files[1], need(e.m2, "m2", e.class)?, need(e.n2, "n2", e.class)?)?;
                v.push((e.class, SeparableDictPair::new(d1, d2).map_err(fmt)?));
            }
            TrainedModels::Sepdl(ClassModelSet::new(v).map_err(fmt)?)
        }
        Method::Sbo => {
            let mut v = Vec::new();
            for e in entries {
                let (m, l) = (need(e.m, "m", e.class)?, need(e.l, "l", e.class)?);
                one_file(e, l)?;
                let blocks = e.files.iter().map(|f| load_checked(dir, f, m, m)).collect::<Result<Vec<_>>>()?;
                let owners = e.class_of_block.clone().unwrap_or_else(|| vec![e.class; l]);
                v.push((e.class, BlockUnion::new(blocks, owners).map_err(fmt)?));
            }
            TrainedModels::Sbo(ClassModelSet::new(v).map_err(fmt)?)
        }
    };
    Ok((models, manifest))
}
