//! Per-class dictionary classification shared by every method, the
//! unstructured baseline and the metrics.

mod baseline;
mod models;
mod report;

pub use baseline::{baseline_dl_train, class_errors, src_classify, DlConfig, DlTrainResult};
pub use models::{argmin_labels, ClassModelSet};
pub use report::{evaluate, ClassifierReport};
