#ifndef LAPDICT_H
#define LAPDICT_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum LdStatus {
  LD_STATUS_OK = 0,
  LD_STATUS_INVALID_ARGUMENT = 1,
  LD_STATUS_DIMENSION_MISMATCH = 2,
  LD_STATUS_NUMERICAL_FAILURE = 3,
  LD_STATUS_FORMAT = 4,
  LD_STATUS_IO = 5,
  LD_STATUS_NULL_POINTER = 6,
  LD_STATUS_PANIC = 7,
} LdStatus;

// How the rows of a dataset are to be read.
typedef enum LdLayout {
  // Row-vectorized m×m Laplacians.
  LD_LAYOUT_VECTORIZED_LAPLACIAN = 0,
  // The same data viewed as m×m matrices.
  LD_LAYOUT_MATRIX2D = 1,
  // Length-m signals on an m-node graph.
  LD_LAYOUT_GRAPH_SIGNAL = 2,
} LdLayout;

// A labeled set of signals, one per column.
typedef struct LdDataset LdDataset;

// Trained per-class models of one method with their coding sparsity.
typedef struct LdModel LdModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *ld_version(void);

// Message of the last failed call on this thread, or NULL after a
// successful one. Valid until the next call into the library.
const char *ld_last_error(void);

// Build a dataset from `len` signals of length `dim` (column-major) and
// their class labels.
//
// # Safety
// `signals` must point to `dim * len` doubles and `labels` to `len`
// integers; `out` must be writable.
enum LdStatus ld_dataset_new(const double *signals,
                             size_t dim,
                             size_t len,
                             const uint32_t *labels,
                             enum LdLayout layout,
                             struct LdDataset **out);

// Read an `LDS1` dataset file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum LdStatus ld_dataset_load(const char *path, struct LdDataset **out);

// Write `ds` as an `LDS1` dataset file.
//
// # Safety
// `ds` must be a live handle and `path` a NUL-terminated string.
enum LdStatus ld_dataset_save(const struct LdDataset *ds, const char *path);

// Number of signals, 0 for NULL.
//
// # Safety
// `ds` must be NULL or a live handle.
size_t ld_dataset_len(const struct LdDataset *ds);

// Signal length, 0 for NULL.
//
// # Safety
// `ds` must be NULL or a live handle.
size_t ld_dataset_dim(const struct LdDataset *ds);

// Copy the signals, column-major, into `out` of capacity `cap`.
//
// # Safety
// `ds` must be a live handle and `out` must have room for `cap` doubles.
enum LdStatus ld_dataset_signals(const struct LdDataset *ds, double *out, size_t cap);

// Copy the labels into `out` of capacity `cap`.
//
// # Safety
// `ds` must be a live handle and `out` must have room for `cap` integers.
enum LdStatus ld_dataset_labels(const struct LdDataset *ds, uint32_t *out, size_t cap);

// Release a dataset. NULL is ignored.
//
// # Safety
// `ds` must be NULL or a handle not yet freed.
void ld_dataset_free(struct LdDataset *ds);

// Generate the train and test sets described by a JSON experiment config.
//
// # Safety
// `config_json` must be a NUL-terminated string; both out pointers must be
// writable.
enum LdStatus ld_generate(const char *config_json,
                          struct LdDataset **out_train,
                          struct LdDataset **out_test);

// Train `method` ("lapdl", "sepdl", "sbo" or "src") on `train` with the
// settings and seed of a JSON experiment config. SBO starts from the class
// Laplacians the config generates.
//
// # Safety
// `config_json` and `method` must be NUL-terminated strings, `train` a
// live handle and `out` writable.
enum LdStatus ld_model_train(const char *config_json,
                             const char *method,
                             const struct LdDataset *train,
                             struct LdModel **out);

// Label every signal of `ds`, writing `ld_dataset_len(ds)` labels to `out`.
//
// # Safety
// `model` and `ds` must be live handles and `out` must have room for `cap`
// integers.
enum LdStatus ld_model_classify(const struct LdModel *model,
                                const struct LdDataset *ds,
                                uint32_t *out,
                                size_t cap);

// Write the model to directory `dir` (created if missing).
//
// # Safety
// `model` must be a live handle and `dir` a NUL-terminated string.
enum LdStatus ld_model_save(const struct LdModel *model, const char *dir);

// Read a model directory written by [`ld_model_save`] or the command line
// tool.
//
// # Safety
// `dir` must be a NUL-terminated string and `out` writable.
enum LdStatus ld_model_load(const char *dir, struct LdModel **out);

// Number of classes the model separates, 0 for NULL.
//
// # Safety
// `model` must be NULL or a live handle.
size_t ld_model_class_count(const struct LdModel *model);

// Release a model. NULL is ignored.
//
// # Safety
// `model` must be NULL or a handle not yet freed.
void ld_model_free(struct LdModel *model);

// Fraction of the `n` predictions that match the true labels.
//
// # Safety
// `truth` and `pred` must point to `n` integers; `accuracy` must be
// writable.
enum LdStatus ld_evaluate(const uint32_t *truth, const uint32_t *pred, size_t n, double *accuracy);

// Orthogonal matching pursuit of `y` (length `m`) over the unit-norm
// columns of the m×n dictionary `d` (column-major) with at most
// `sparsity` atoms. Writes the dense length-`n` code to `x`.
//
// # Safety
// `d` must point to `m * n` doubles, `y` to `m` and `x` to `n`.
enum LdStatus ld_omp(const double *d,
                     size_t m,
                     size_t n,
                     const double *y,
                     size_t sparsity,
                     double *x);

// Euclidean projection of `v` (length `m`) onto the Laplacian row set
// with distinguished index `ell`: entries sum to zero, entry `ell` is
// non-negative, all others non-positive. Writes `m` values to `out`.
//
// # Safety
// `v` and `out` must point to `m` doubles.
enum LdStatus ld_project_simplex_type(const double *v, size_t m, size_t ell, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAPDICT_H */
