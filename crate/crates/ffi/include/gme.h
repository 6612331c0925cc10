#ifndef GME_FFI_H
#define GME_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GmeStatus {
  GME_STATUS_OK = 0,
  GME_STATUS_NULL_POINTER = 1,
  GME_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input is not a valid density matrix, or not of the required kind.
   */
  GME_STATUS_INVALID_STATE = 3,
  GME_STATUS_NUMERICAL = 4,
  GME_STATUS_BUFFER_TOO_SMALL = 5,
  GME_STATUS_PANIC = 6,
} GmeStatus;

typedef enum GmeCriterion {
  GME_CRITERION_FROBENIUS = 1,
  GME_CRITERION_KY_FAN = 2,
  GME_CRITERION_CONCURRENCE = 3,
} GmeCriterion;

typedef struct GmeState GmeState;

typedef struct GmeTensor GmeTensor;

/**
 * `k` is 0 and `concurrence_lower_bound` is NaN where not applicable.
 */
typedef struct GmeCriterionReport {
  enum GmeCriterion criterion;
  uint32_t d;
  uint32_t k;
  double value;
  double bound;
  double margin;
  bool detected;
  double concurrence_lower_bound;
} GmeCriterionReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread. Valid until the next
 * call into this library from the same thread.
 */
const char *gme_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gme_version(void);

/**
 * Two-qudit Werner state `ρ_w(p, d)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GmeStatus gme_state_werner(double p, uint32_t d, struct GmeState **out);

/**
 * Noisy product of two two-qubit Werner states regrouped on `[2, 2, 4]`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GmeStatus gme_state_thm5(double p1, double p2, double x, struct GmeState **out);

/**
 * GHZ/W mixture with white noise on three qubits.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GmeStatus gme_state_ex2(double x, double y, struct GmeState **out);

/**
 * Three-qutrit state mixed with white noise.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum GmeStatus gme_state_ex3(double x, struct GmeState **out);

/**
 * Any named family with `key=value,...` parameters (`params` may be null).
 *
 * # Safety
 * `family` and non-null `params` must be NUL-terminated strings; `out`
 * must be valid for one handle.
 */
enum GmeStatus gme_state_family(const char *family, const char *params, struct GmeState **out);

/**
 * Density matrix from row-major real and imaginary parts of length
 * `n * n`, where `n` is the product of the `ndims` entries of `dims`.
 * The matrix is validated (Hermitian, unit trace, positive).
 *
 * # Safety
 * `re` and `im` must point to `len` doubles, `dims` to `ndims` values.
 */
enum GmeStatus gme_state_from_parts(const double *re,
                                    const double *im,
                                    size_t len,
                                    const uint32_t *dims,
                                    size_t ndims,
                                    struct GmeState **out);

/**
 * Total Hilbert-space dimension of a state.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum GmeStatus gme_state_dim(const struct GmeState *state, size_t *out);

/**
 * PPT test with subsystem `side` transposed. Either output may be null.
 *
 * # Safety
 * `state` must be a live handle; non-null outputs must be writable.
 */
enum GmeStatus gme_state_is_ppt(const struct GmeState *state,
                                uint32_t side,
                                bool *ppt,
                                double *min_eigenvalue);

/**
 * # Safety
 * `state` must be null or a handle not yet freed.
 */
void gme_state_free(struct GmeState *state);

/**
 * Correlation tensor of a tripartite state. Unequal local dimensions are
 * zero-padded up to the largest one first.
 *
 * # Safety
 * `state` must be a live handle and `out` writable.
 */
enum GmeStatus gme_tensor_compute(const struct GmeState *state, struct GmeTensor **out);

/**
 * Local dimension `d` of the tensor.
 *
 * # Safety
 * `tensor` must be a live handle and `out` writable.
 */
enum GmeStatus gme_tensor_d(const struct GmeTensor *tensor, uint32_t *out);

/**
 * Copies the three-body components, flat with index `(i n + j) n + k`
 * and `n = d² - 1`. With a null `buf` only `needed` is written.
 *
 * # Safety
 * `tensor` must be a live handle; `buf` must hold `len` doubles if non-null.
 */
enum GmeStatus gme_tensor_t123(const struct GmeTensor *tensor,
                               double *buf,
                               size_t len,
                               size_t *needed);

/**
 * # Safety
 * `tensor` must be null or a handle not yet freed.
 */
void gme_tensor_free(struct GmeTensor *tensor);

/**
 * Frobenius-norm test on the three-body tensor.
 *
 * # Safety
 * `tensor` must be a live handle and `out` writable.
 */
enum GmeStatus gme_frobenius_criterion(const struct GmeTensor *tensor,
                                       struct GmeCriterionReport *out);

/**
 * Average Ky Fan `k`-norm test, `1 <= k <= d² - 1`.
 *
 * # Safety
 * `tensor` must be a live handle and `out` writable.
 */
enum GmeStatus gme_kyfan_criterion(const struct GmeTensor *tensor,
                                   uint32_t k,
                                   struct GmeCriterionReport *out);

/**
 * Lower bound on the GME concurrence.
 *
 * # Safety
 * `tensor` must be a live handle and `out` writable.
 */
enum GmeStatus gme_concurrence_bound(const struct GmeTensor *tensor,
                                     struct GmeCriterionReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GME_FFI_H */
