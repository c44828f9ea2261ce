//! C interface to `lapdict`.
//!
//! Datasets and trained models live behind opaque handles that the caller
//! releases with the matching `_free` function. Every fallible call returns
//! an [`LdStatus`]; on failure [`ld_last_error`] describes what went wrong
//! on the calling thread. Matrices cross the boundary column-major.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use libc::c_char;
use nalgebra::{DMatrix, DVector};

use lapdict::classify::evaluate;
use lapdict::experiments::{
    class_laplacians, generate, load_models, save_models, train_method, ExperimentConfig, Method, TrainedModels,
};
use lapdict::graphgen::{LabeledDataset, Layout};
use lapdict::io::{load_dataset, save_dataset};
use lapdict::sparse::{omp, project_simplex_type, DEFAULT_TOL};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdStatus {
    Ok = 0,
    InvalidArgument = 1,
    DimensionMismatch = 2,
    NumericalFailure = 3,
    Format = 4,
    Io = 5,
    NullPointer = 6,
    Panic = 7,
}

/// How the rows of a dataset are to be read.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdLayout {
    /// Row-vectorized m×m Laplacians.
    VectorizedLaplacian = 0,
    /// The same data viewed as m×m matrices.
    Matrix2d = 1,
    /// Length-m signals on an m-node graph.
    GraphSignal = 2,
}

impl From<LdLayout> for Layout {
    fn from(l: LdLayout) -> Layout {
        match l {
            LdLayout::VectorizedLaplacian => Layout::VectorizedLaplacian,
            LdLayout::Matrix2d => Layout::Matrix2d,
            LdLayout::GraphSignal => Layout::GraphSignal,
        }
    }
}

/// A labeled set of signals, one per column.
pub struct LdDataset(LabeledDataset);

/// Trained per-class models of one method with their coding sparsity.
pub struct LdModel {
    models: TrainedModels,
    s: usize,
    seed: u64,
}

struct Failure {
    status: LdStatus,
    message: String,
}

impl Failure {
    fn new(status: LdStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }

    fn null(what: &str) -> Self {
        Failure::new(LdStatus::NullPointer, format!("{what} is NULL"))
    }
}

impl From<lapdict::Error> for Failure {
    fn from(e: lapdict::Error) -> Self {
        use lapdict::Error as E;
        let status = match &e {
            E::InvalidParameter(_) => LdStatus::InvalidArgument,
            E::DimensionMismatch(_) => LdStatus::DimensionMismatch,
            E::NumericalFailure(_) => LdStatus::NumericalFailure,
            E::Format(_) => LdStatus::Format,
            E::Io(_) => LdStatus::Io,
            E::Json(j) if j.is_io() => LdStatus::Io,
            E::Json(_) => LdStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> LdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            LdStatus::Ok
        }
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(&format!("internal error: {msg}"));
            LdStatus::Panic
        }
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(LdStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, cap: usize, need: usize, what: &str) -> FfiResult<&'a mut [T]> {
    if cap < need {
        return Err(Failure::new(
            LdStatus::DimensionMismatch,
            format!("{what} holds {cap} values, {need} needed"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

unsafe fn store<T>(out: *mut *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ld_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a
/// successful one. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn ld_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build a dataset from `len` signals of length `dim` (column-major) and
/// their class labels.
///
/// # Safety
/// `signals` must point to `dim * len` doubles and `labels` to `len`
/// integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_new(
    signals: *const f64,
    dim: usize,
    len: usize,
    labels: *const u32,
    layout: LdLayout,
    out: *mut *mut LdDataset,
) -> LdStatus {
    guard(|| {
        let size = dim
            .checked_mul(len)
            .ok_or_else(|| Failure::new(LdStatus::InvalidArgument, "dataset size overflows"))?;
        let values = input(signals, size, "signals")?;
        let labels = input(labels, len, "labels")?.to_vec();
        let ds = LabeledDataset::new(DMatrix::from_column_slice(dim, len, values), labels, layout.into())?;
        store(out, LdDataset(ds), "out")
    })
}

/// Read an `LDS1` dataset file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_load(path: *const c_char, out: *mut *mut LdDataset) -> LdStatus {
    guard(|| {
        let ds = load_dataset(Path::new(text(path, "path")?), None)?;
        store(out, LdDataset(ds), "out")
    })
}

/// Write `ds` as an `LDS1` dataset file.
///
/// # Safety
/// `ds` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_save(ds: *const LdDataset, path: *const c_char) -> LdStatus {
    guard(|| Ok(save_dataset(Path::new(text(path, "path")?), &handle(ds, "dataset")?.0)?))
}

/// Number of signals, 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_len(ds: *const LdDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// Signal length, 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_dim(ds: *const LdDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.dim())
}

/// Copy the signals, column-major, into `out` of capacity `cap`.
///
/// # Safety
/// `ds` must be a live handle and `out` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_signals(ds: *const LdDataset, out: *mut f64, cap: usize) -> LdStatus {
    guard(|| {
        let values = handle(ds, "dataset")?.0.signals.as_slice();
        output(out, cap, values.len(), "out")?.copy_from_slice(values);
        Ok(())
    })
}

/// Copy the labels into `out` of capacity `cap`.
///
/// # Safety
/// `ds` must be a live handle and `out` must have room for `cap` integers.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_labels(ds: *const LdDataset, out: *mut u32, cap: usize) -> LdStatus {
    guard(|| {
        let labels = &handle(ds, "dataset")?.0.labels;
        output(out, cap, labels.len(), "out")?.copy_from_slice(labels);
        Ok(())
    })
}

/// Release a dataset. NULL is ignored.
///
/// # Safety
/// `ds` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ld_dataset_free(ds: *mut LdDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Generate the train and test sets described by a JSON experiment config.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; both out pointers must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ld_generate(
    config_json: *const c_char,
    out_train: *mut *mut LdDataset,
    out_test: *mut *mut LdDataset,
) -> LdStatus {
    guard(|| {
        if out_train.is_null() || out_test.is_null() {
            return Err(Failure::null("output"));
        }
        let config = ExperimentConfig::from_json(text(config_json, "config")?)?;
        let data = generate(&config)?;
        store(out_train, LdDataset(data.train), "out_train")?;
        store(out_test, LdDataset(data.test), "out_test")
    })
}

/// Train `method` ("lapdl", "sepdl", "sbo" or "src") on `train` with the
/// settings and seed of a JSON experiment config. SBO starts from the class
/// Laplacians the config generates.
///
/// # Safety
/// `config_json` and `method` must be NUL-terminated strings, `train` a
/// live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_model_train(
    config_json: *const c_char,
    method: *const c_char,
    train: *const LdDataset,
    out: *mut *mut LdModel,
) -> LdStatus {
    guard(|| {
        let config = ExperimentConfig::from_json(text(config_json, "config")?)?;
        let method: Method = text(method, "method")?.parse()?;
        let train = &handle(train, "train")?.0;
        let laplacians = if method == Method::Sbo { class_laplacians(&config)? } else { Vec::new() };
        let models = train_method(&config, method, train, &laplacians)?;
        store(out, LdModel { models, s: config.sparsity(method), seed: config.seed }, "out")
    })
}

/// Label every signal of `ds`, writing `ld_dataset_len(ds)` labels to `out`.
///
/// # Safety
/// `model` and `ds` must be live handles and `out` must have room for `cap`
/// integers.
#[no_mangle]
pub unsafe extern "C" fn ld_model_classify(
    model: *const LdModel,
    ds: *const LdDataset,
    out: *mut u32,
    cap: usize,
) -> LdStatus {
    guard(|| {
        let model = handle(model, "model")?;
        let ds = &handle(ds, "dataset")?.0;
        let dst = output(out, cap, ds.len(), "out")?;
        dst.copy_from_slice(&model.models.classify(ds, model.s)?);
        Ok(())
    })
}

/// Write the model to directory `dir` (created if missing).
///
/// # Safety
/// `model` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ld_model_save(model: *const LdModel, dir: *const c_char) -> LdStatus {
    guard(|| {
        let model = handle(model, "model")?;
        save_models(Path::new(text(dir, "dir")?), &model.models, model.s, model.seed)?;
        Ok(())
    })
}

/// Read a model directory written by [`ld_model_save`] or the command line
/// tool.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ld_model_load(dir: *const c_char, out: *mut *mut LdModel) -> LdStatus {
    guard(|| {
        let (models, manifest) = load_models(Path::new(text(dir, "dir")?))?;
        store(out, LdModel { models, s: manifest.s, seed: manifest.seed }, "out")
    })
}

/// Number of classes the model separates, 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ld_model_class_count(model: *const LdModel) -> usize {
    model.as_ref().map_or(0, |m| m.models.classes().len())
}

/// Release a model. NULL is ignored.
///
/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ld_model_free(model: *mut LdModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Fraction of the `n` predictions that match the true labels.
///
/// # Safety
/// `truth` and `pred` must point to `n` integers; `accuracy` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ld_evaluate(
    truth: *const u32,
    pred: *const u32,
    n: usize,
    accuracy: *mut f64,
) -> LdStatus {
    guard(|| {
        let report = evaluate(input(truth, n, "truth")?, input(pred, n, "pred")?)?;
        *output(accuracy, 1, 1, "accuracy")?.first_mut().unwrap() = report.accuracy;
        Ok(())
    })
}

/// Orthogonal matching pursuit of `y` (length `m`) over the unit-norm
/// columns of the m×n dictionary `d` (column-major) with at most
/// `sparsity` atoms. Writes the dense length-`n` code to `x`.
///
/// # Safety
/// `d` must point to `m * n` doubles, `y` to `m` and `x` to `n`.
#[no_mangle]
pub unsafe extern "C" fn ld_omp(
    d: *const f64,
    m: usize,
    n: usize,
    y: *const f64,
    sparsity: usize,
    x: *mut f64,
) -> LdStatus {
    guard(|| {
        let size = m
            .checked_mul(n)
            .ok_or_else(|| Failure::new(LdStatus::InvalidArgument, "dictionary size overflows"))?;
        let dict = DMatrix::from_column_slice(m, n, input(d, size, "d")?);
        let y = DVector::from_column_slice(input(y, m, "y")?);
        let code = omp(&dict, &y, sparsity, DEFAULT_TOL)?;
        output(x, n, n, "x")?.copy_from_slice(code.to_dense().as_slice());
        Ok(())
    })
}

/// Euclidean projection of `v` (length `m`) onto the Laplacian row set
/// with distinguished index `ell`: entries sum to zero, entry `ell` is
/// non-negative, all others non-positive. Writes `m` values to `out`.
///
/// # Safety
/// `v` and `out` must point to `m` doubles.
#[no_mangle]
pub unsafe extern "C" fn ld_project_simplex_type(v: *const f64, m: usize, ell: usize, out: *mut f64) -> LdStatus {
    guard(|| {
        if ell >= m {
            return Err(Failure::new(LdStatus::InvalidArgument, format!("index {ell} out of range for length {m}")));
        }
        let p = project_simplex_type(input(v, m, "v")?, ell);
        output(out, m, m, "out")?.copy_from_slice(&p);
        Ok(())
    })
}
