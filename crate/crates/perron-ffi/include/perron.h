/* C API for the perron tensor eigenvalue solvers.
 *
 * Handles returned through out-pointers are owned by the caller and must be
 * released with the matching *_free. Getters never transfer ownership.
 * perron_last_error_message() describes the most recent failure on the
 * calling thread. */

#ifndef PERRON_H
#define PERRON_H

/* Generated by cbindgen from perron-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum PerronStatus {
  PERRON_STATUS_OK = 0,
  PERRON_STATUS_NULL_ARGUMENT = 1,
  PERRON_STATUS_INVALID_ARGUMENT = 2,
  PERRON_STATUS_NEGATIVE_ENTRY = 3,
  PERRON_STATUS_ZERO_TENSOR = 4,
  PERRON_STATUS_DIMENSION_MISMATCH = 5,
  PERRON_STATUS_SINGULAR_MATRIX = 6,
  PERRON_STATUS_IO = 7,
  PERRON_STATUS_PARSE = 8,
  PERRON_STATUS_INVALID_UTF8 = 9,
  PERRON_STATUS_BUFFER_TOO_SMALL = 10,
} PerronStatus;

/**
 * How a solve ended; see `perron_report_termination`.
 */
typedef enum PerronTermination {
  PERRON_TERMINATION_CONVERGED = 0,
  PERRON_TERMINATION_ITERATION_LIMIT = 1,
  PERRON_TERMINATION_PATH_FAILURE = 2,
  PERRON_TERMINATION_DEGENERATE_ITERATE = 3,
} PerronTermination;

/**
 * Opaque solve-report handle (homotopy or NQZ).
 */
typedef struct PerronReport PerronReport;

/**
 * Opaque tensor handle.
 */
typedef struct PerronTensor PerronTensor;

/**
 * Homotopy solver options; zero-initialize and overwrite, or start from
 * `perron_homotopy_options_default`.
 */
typedef struct PerronHomotopyOptions {
  double dt0;
  double eps1;
  double eps2;
  double dt_min;
  double dt_max;
  size_t newton_budget_per_step;
  size_t max_steps;
} PerronHomotopyOptions;

/**
 * NQZ options; `shift` is applied to the preprocessed tensor (0 = plain
 * method, 1 = identity-shift strategy).
 */
typedef struct PerronNqzOptions {
  double tol;
  size_t max_iters;
  double shift;
} PerronNqzOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Pointer to a NUL-terminated description of the last failure on this
 * thread, or NULL if none. Valid until the next failing call on the thread.
 */
const char *perron_last_error_message(void);

/**
 * Builds a dense tensor from `len = dim^order` row-major entries.
 *
 * # Safety
 * `entries` must point to `len` readable doubles; `out` must be a valid
 * out-pointer.
 */
enum PerronStatus perron_tensor_create(size_t order,
                                       size_t dim,
                                       const double *entries,
                                       size_t len,
                                       struct PerronTensor **out);

/**
 * Parses a tensor file (see the text format in the crate README).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid out-pointer.
 */
enum PerronStatus perron_tensor_from_file(const char *path, struct PerronTensor **out);

/**
 * # Safety
 * `tensor` must be a live handle from this library (or NULL).
 */
size_t perron_tensor_order(const struct PerronTensor *tensor);

/**
 * # Safety
 * `tensor` must be a live handle from this library (or NULL).
 */
size_t perron_tensor_dim(const struct PerronTensor *tensor);

/**
 * Releases a tensor handle; NULL is a no-op.
 *
 * # Safety
 * `tensor` must be NULL or an owned handle not used afterwards.
 */
void perron_tensor_free(struct PerronTensor *tensor);

struct PerronHomotopyOptions perron_homotopy_options_default(void);

struct PerronNqzOptions perron_nqz_options_default(void);

/**
 * Runs the homotopy solver; `options` may be NULL for defaults. On success
 * the caller owns `*out`. A non-converged run still returns a report; check
 * `perron_report_termination`.
 *
 * # Safety
 * `tensor` must be a live handle; `out` must be a valid out-pointer.
 */
enum PerronStatus perron_solve_homotopy(const struct PerronTensor *tensor,
                                        const struct PerronHomotopyOptions *options,
                                        struct PerronReport **out);

/**
 * Runs the NQZ baseline; `options` may be NULL for defaults.
 *
 * # Safety
 * `tensor` must be a live handle; `out` must be a valid out-pointer.
 */
enum PerronStatus perron_solve_nqz(const struct PerronTensor *tensor,
                                   const struct PerronNqzOptions *options,
                                   struct PerronReport **out);

/**
 * # Safety
 * `report` must be a live handle (or NULL, yielding NaN/zero).
 */
double perron_report_lambda(const struct PerronReport *report);

/**
 * # Safety
 * `report` must be a live handle (or NULL, yielding NaN/zero).
 */
double perron_report_residual(const struct PerronReport *report);

/**
 * Prediction-correction steps (homotopy) or iterations (NQZ).
 *
 * # Safety
 * `report` must be a live handle (or NULL, yielding NaN/zero).
 */
size_t perron_report_iterations(const struct PerronReport *report);

/**
 * Total Newton updates (0 for NQZ reports).
 *
 * # Safety
 * `report` must be a live handle (or NULL, yielding NaN/zero).
 */
size_t perron_report_newton_total(const struct PerronReport *report);

/**
 * Preprocessing factor tau (1 for NQZ reports, which rescale internally).
 *
 * # Safety
 * `report` must be a live handle (or NULL, yielding NaN/zero).
 */
double perron_report_scale(const struct PerronReport *report);

/**
 * # Safety
 * `report` must be a live handle (or NULL, treated as a path failure).
 */
enum PerronTermination perron_report_termination(const struct PerronReport *report);

/**
 * 1 when the weak-irreducibility diagnostic failed for the solved tensor.
 *
 * # Safety
 * `report` must be a live handle (or NULL, yielding 0).
 */
int32_t perron_report_reducibility_warning(const struct PerronReport *report);

/**
 * Eigenvector length.
 *
 * # Safety
 * `report` must be a live handle (or NULL, yielding 0).
 */
size_t perron_report_dim(const struct PerronReport *report);

/**
 * Copies the eigenvector into `out`; `len` must be at least
 * `perron_report_dim(report)`.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum PerronStatus perron_report_eigenvector(const struct PerronReport *report,
                                            double *out,
                                            size_t len);

/**
 * Releases a report handle; NULL is a no-op.
 *
 * # Safety
 * `report` must be NULL or an owned handle not used afterwards.
 */
void perron_report_free(struct PerronReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERRON_H */
