use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::laplacian::{square_side, unvec_rows};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Row-vectorized m×m Laplacians (length m²).
    VectorizedLaplacian,
    /// The same data viewed as m×m matrices.
    Matrix2d,
    /// Length-m signals supported on an m-node graph.
    GraphSignal,
}

/// Signals stored column-wise with one class label per column.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub signals: DMatrix<f64>,
    pub labels: Vec<u32>,
    pub layout: Layout,
}

impl LabeledDataset {
    pub fn new(signals: DMatrix<f64>, labels: Vec<u32>, layout: Layout) -> Result<Self> {
        if signals.ncols() != labels.len() {
            return Err(Error::dims(format!(
                "{} signals but {} labels",
                signals.ncols(),
                labels.len()
            )));
        }
        if matches!(layout, Layout::VectorizedLaplacian | Layout::Matrix2d) {
            square_side(signals.nrows())?;
        }
        Ok(LabeledDataset { signals, labels, layout })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.signals.nrows()
    }

    /// One past the largest label (the class count when labels are 0..C).
    pub fn class_count(&self) -> usize {
        self.labels.iter().max().map_or(0, |&c| c as usize + 1)
    }

    /// Distinct labels in increasing order.
    pub fn classes(&self) -> Vec<u32> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            signals: self.signals.select_columns(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            layout: self.layout,
        }
    }

    pub fn indices_of(&self, class: u32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    /// Columns belonging to `class`.
    pub fn class_signals(&self, class: u32) -> DMatrix<f64> {
        self.signals.select_columns(&self.indices_of(class))
    }

    /// Signal `i` viewed as a square matrix (row-vectorized storage).
    pub fn signal_matrix(&self, i: usize) -> Result<DMatrix<f64>> {
        unvec_rows(self.signals.column(i).as_slice())
    }

    pub fn concat(parts: &[LabeledDataset]) -> Result<LabeledDataset> {
        let first = parts.first().ok_or_else(|| Error::invalid("no datasets to concatenate"))?;
        let dim = first.dim();
        if parts.iter().any(|p| p.dim() != dim) {
            return Err(Error::dims("datasets have different signal lengths"));
        }
        let n: usize = parts.iter().map(|p| p.len()).sum();
        let mut signals = DMatrix::zeros(dim, n);
        let mut labels = Vec::with_capacity(n);
        let mut at = 0;
        for p in parts {
            signals.columns_mut(at, p.len()).copy_from(&p.signals);
            labels.extend_from_slice(&p.labels);
            at += p.len();
        }
        LabeledDataset::new(signals, labels, first.layout)
    }
}

/// Stratified split: each class keeps `round(train_fraction · count)`
/// members for training (at least one on each side). Both parts keep the
/// original column order.
pub fn split_dataset<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    train_fraction: f64,
    rng: &mut R,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &c) in ds.labels.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut idx) in by_class {
        if idx.len() < 2 {
            return Err(Error::invalid(format!("class {class} has fewer than 2 members")));
        }
        idx.shuffle(rng);
        let n = idx.len();
        let k = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(&train), ds.subset(&test)))
}
