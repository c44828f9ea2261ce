//! Per-class training and classification for every method.

use std::thread;

use nalgebra::DMatrix;

use super::config::{ExperimentConfig, Method};
use crate::classify::{baseline_dl_train, src_classify, ClassModelSet};
use crate::error::{Error, Result};
use crate::graphgen::{LabeledDataset, LaplacianMatrix};
use crate::lapdl::{am_train, lapdl_classify, LapAtomDictionary};
use crate::rng::substream;
use crate::sbo::{orthogonalize_laplacian, sbo_classify, sbo_train, BlockUnion, SboConfig};
use crate::sepdl::{as_matrices, pairwise_aksvd_train, sep_classify, SeparableDictPair};

/// Trained per-class models of one method.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModels {
    Lapdl(ClassModelSet<LapAtomDictionary>),
    Sepdl(ClassModelSet<SeparableDictPair>),
    Sbo(ClassModelSet<BlockUnion>),
    Src(ClassModelSet<DMatrix<f64>>),
}

impl TrainedModels {
    pub fn method(&self) -> Method {
        match self {
            TrainedModels::Lapdl(_) => Method::Lapdl,
            TrainedModels::Sepdl(_) => Method::Sepdl,
            TrainedModels::Sbo(_) => Method::Sbo,
            TrainedModels::Src(_) => Method::Src,
        }
    }

    pub fn classes(&self) -> Vec<u32> {
        match self {
            TrainedModels::Lapdl(m) => m.classes(),
            TrainedModels::Sepdl(m) => m.classes(),
            TrainedModels::Sbo(m) => m.classes(),
            TrainedModels::Src(m) => m.classes(),
        }
    }

    /// Label every signal of `test` with sparsity `s`.
    pub fn classify(&self, test: &LabeledDataset, s: usize) -> Result<Vec<u32>> {
        match self {
            TrainedModels::Lapdl(m) => lapdl_classify(m, &test.signals, s),
            TrainedModels::Sepdl(m) => sep_classify(m, &as_matrices(test)?, s),
            TrainedModels::Sbo(m) => sbo_classify(m, &test.signals, s),
            TrainedModels::Src(m) => src_classify(m, &test.signals, s),
        }
    }
}

/// Train one model per class, classes in parallel. Each class draws from
/// its own stream so the result does not depend on scheduling.
fn per_class<M, F>(train: &LabeledDataset, f: F) -> Result<ClassModelSet<M>>
where
    M: Send,
    F: Fn(u32, &LabeledDataset) -> Result<M> + Sync,
{
    let classes = train.classes();
    let subsets: Vec<LabeledDataset> = classes.iter().map(|&c| train.subset(&train.indices_of(c))).collect();
    let f = &f;
    let results: Vec<Result<M>> = thread::scope(|scope| {
        let handles: Vec<_> = classes.iter().zip(&subsets).map(|(&c, ds)| scope.spawn(move || f(c, ds))).collect();
        handles.into_iter().map(|h| h.join().expect("training thread panicked")).collect()
    });
    let models = classes.into_iter().zip(results).map(|(c, r)| r.map(|m| (c, m))).collect::<Result<Vec<_>>>()?;
    ClassModelSet::new(models)
}

fn stream_name(method: Method, class: u32) -> String {
    format!("train/{method}/{class}")
}

/// SBO models grown from the class Laplacians with the given settings.
pub fn train_sbo(
    config: &ExperimentConfig,
    sbo: &SboConfig,
    train: &LabeledDataset,
    laplacians: &[LaplacianMatrix],
) -> Result<ClassModelSet<BlockUnion>> {
    per_class(train, |c, ds| {
        let l = laplacians
            .get(c as usize)
            .ok_or_else(|| Error::invalid(format!("no generating Laplacian for class {c}")))?;
        let init = vec![orthogonalize_laplacian(l)];
        let mut rng = substream(config.seed, &stream_name(Method::Sbo, c));
        Ok(sbo_train(&ds.signals, sbo, init, c, &mut rng)?.union)
    })
}

/// Train `method` on `train`. SBO also needs the class Laplacians.
pub fn train_method(
    config: &ExperimentConfig,
    method: Method,
    train: &LabeledDataset,
    laplacians: &[LaplacianMatrix],
) -> Result<TrainedModels> {
    let rng_for = |c: u32| substream(config.seed, &stream_name(method, c));
    Ok(match method {
        Method::Lapdl => TrainedModels::Lapdl(per_class(train, |c, ds| {
            Ok(am_train(&ds.signals, &config.lapdl, None, &mut rng_for(c))?.dictionary)
        })?),
        Method::Sepdl => TrainedModels::Sepdl(per_class(train, |c, ds| {
            Ok(pairwise_aksvd_train(&as_matrices(ds)?, &config.sepdl, None, &mut rng_for(c))?.pair)
        })?),
        Method::Sbo => TrainedModels::Sbo(train_sbo(config, &config.sbo, train, laplacians)?),
        Method::Src => TrainedModels::Src(per_class(train, |c, ds| {
            Ok(baseline_dl_train(&ds.signals, &config.src, &mut rng_for(c))?.dictionary)
        })?),
    })
}
