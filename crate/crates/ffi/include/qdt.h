#ifndef QDT_H
#define QDT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QdtStatus {
  QDT_STATUS_OK = 0,
  QDT_STATUS_NULL_POINTER = 1,
  QDT_STATUS_SHAPE = 2,
  QDT_STATUS_INDEX = 3,
  QDT_STATUS_DEGENERATE = 4,
  QDT_STATUS_NON_FINITE = 5,
  QDT_STATUS_INVALID_RING = 6,
  QDT_STATUS_INVALID_OPTIONS = 7,
  QDT_STATUS_NUMERIC_FAILURE = 8,
  QDT_STATUS_CAPACITY = 9,
  QDT_STATUS_PARSE = 10,
  QDT_STATUS_VALIDATION = 11,
  QDT_STATUS_PANIC = 12,
} QdtStatus;

/**
 * Opaque prospect state.
 */
typedef struct QdtState QdtState;

/**
 * Optimizer settings; see [`qdt_default_options`].
 */
typedef struct QdtOptions {
  size_t restarts;
  size_t max_iterations;
  double tolerance;
  uint64_t seed;
} QdtOptions;

/**
 * Result of [`qdt_entanglement_production`] with both methods.
 */
typedef struct QdtMeasurement {
  double epsilon_formula;
  double epsilon_variational;
  double subnorm_full_formula;
  double subnorm_full_variational;
  double subnorm_nonentangling;
  double trace;
  double log_base;
  size_t iterations;
  bool converged;
  /**
   * Single action; both epsilons are 0 by definition.
   */
  bool degenerate;
  bool negative_formula;
} QdtMeasurement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *qdt_last_error(void);

struct QdtOptions qdt_default_options(void);

/**
 * Dense state over `n_actions` actions with mode counts `dims`. `re` and
 * `im` hold `len = ∏ dims` row-major coefficients; `im` may be NULL for a
 * real state.
 *
 * # Safety
 * `dims` must point to `n_actions` values, `re` (and `im` when non-NULL) to
 * `len` values, and `out` must be writable.
 */
enum QdtStatus qdt_state_new(const size_t *dims,
                             size_t n_actions,
                             const double *re,
                             const double *im,
                             size_t len,
                             struct QdtState **out);

/**
 * Multimode state Σ_μ b_μ |μ…μ⟩ on `n_actions` actions with `modes` modes.
 *
 * # Safety
 * `re` (and `im` when non-NULL) must point to `modes` values; `out` must be writable.
 */
enum QdtStatus qdt_state_multimode(size_t n_actions,
                                   size_t modes,
                                   const double *re,
                                   const double *im,
                                   struct QdtState **out);

/**
 * Parses a prospect document (`len` bytes of JSON text).
 *
 * # Safety
 * `text` must point to `len` readable bytes; `out` must be writable.
 */
enum QdtStatus qdt_state_from_document(const char *text, size_t len, struct QdtState **out);

/**
 * Releases a state. NULL is ignored.
 *
 * # Safety
 * `state` must come from a `qdt_state_*` constructor and not be freed twice.
 */
void qdt_state_free(struct QdtState *state);

/**
 * Number of actions, or 0 for NULL.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t qdt_state_action_count(const struct QdtState *state);

/**
 * Copies up to `cap` mode counts into `out`; returns the number of actions.
 *
 * # Safety
 * `state` must be NULL or a live handle; `out` must have room for `cap` values.
 */
size_t qdt_state_mode_counts(const struct QdtState *state, size_t *out, size_t cap);

/**
 * Variational restricted norm. `opts` may be NULL for defaults.
 *
 * # Safety
 * `state` must be a live handle, `opts` NULL or readable, `value` writable.
 */
enum QdtStatus qdt_subnorm_variational(const struct QdtState *state,
                                       const struct QdtOptions *opts,
                                       double *value);

/**
 * Entanglement production by both methods. `opts` may be NULL for defaults.
 *
 * # Safety
 * `state` must be a live handle, `opts` NULL or readable, `out` writable.
 */
enum QdtStatus qdt_entanglement_production(const struct QdtState *state,
                                           const struct QdtOptions *opts,
                                           double log_base,
                                           struct QdtMeasurement *out);

/**
 * Full report as a JSON string; release it with [`qdt_string_free`].
 *
 * # Safety
 * `state` must be a live handle, `opts` NULL or readable, `out` writable.
 */
enum QdtStatus qdt_entanglement_report_json(const struct QdtState *state,
                                            const struct QdtOptions *opts,
                                            double log_base,
                                            char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed once.
 */
void qdt_string_free(char *s);

/**
 * (N−1)·log_base(M).
 *
 * # Safety
 * `out` must be writable.
 */
enum QdtStatus qdt_maximal_entanglement(size_t n_actions,
                                        size_t modes,
                                        double log_base,
                                        double *out);

/**
 * (N−1)·log_base(Σ|b_μ|² / max|b_μ|²) for `modes` branch amplitudes.
 *
 * # Safety
 * `re` (and `im` when non-NULL) must point to `modes` values; `out` must be writable.
 */
enum QdtStatus qdt_multimode_entanglement(const double *re,
                                          const double *im,
                                          size_t modes,
                                          size_t n_actions,
                                          double log_base,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QDT_H */
