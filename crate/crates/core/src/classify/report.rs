use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification metrics for one method on one test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub method: String,
    pub accuracy: f64,
    pub n_test: usize,
    /// Class ids indexing the confusion matrix, increasing.
    pub classes: Vec<u32>,
    /// `confusion[t][p]`: test signals of class `classes[t]` labeled `classes[p]`.
    pub confusion: Vec<Vec<u64>>,
    /// `None` when no signal was assigned to the class.
    pub precision: Vec<Option<f64>>,
    pub recall: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
    #[serde(default)]
    pub config: serde_json::Value,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn evaluate(labels_true: &[u32], labels_pred: &[u32]) -> Result<ClassifierReport> {
    if labels_true.len() != labels_pred.len() {
        return Err(Error::invalid(format!(
            "{} true labels but {} predictions",
            labels_true.len(),
            labels_pred.len()
        )));
    }
    let mut classes: Vec<u32> = labels_true.iter().chain(labels_pred).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let pos = |c: u32| classes.binary_search(&c).expect("known class");
    let k = classes.len();
    let mut confusion = vec![vec![0u64; k]; k];
    for (&t, &p) in labels_true.iter().zip(labels_pred) {
        confusion[pos(t)][pos(p)] += 1;
    }
    let correct: u64 = (0..k).map(|i| confusion[i][i]).sum();
    let n = labels_true.len();
    let precision = (0..k).map(|j| ratio(confusion[j][j], (0..k).map(|i| confusion[i][j]).sum())).collect();
    let recall = (0..k).map(|i| ratio(confusion[i][i], confusion[i].iter().sum())).collect();
    Ok(ClassifierReport {
        method: String::new(),
        accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
        n_test: n,
        classes,
        confusion,
        precision,
        recall,
        runtime_seconds: None,
        config: serde_json::Value::Null,
    })
}
