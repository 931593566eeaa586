#ifndef JUMPDET_H
#define JUMPDET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every call.
 */
typedef enum JdStatus {
  JD_STATUS_OK = 0,
  JD_STATUS_INVALID_ARGUMENT = 1,
  JD_STATUS_DOMAIN = 2,
  JD_STATUS_SINGULAR = 3,
  JD_STATUS_DIMENSION = 4,
  JD_STATUS_NULL_POINTER = 5,
  JD_STATUS_PANIC = 6,
} JdStatus;

/**
 * Opaque set of scaled Laguerre counts on `(0, R)`.
 */
typedef struct JdCounting JdCounting;

/**
 * Opaque jump parameter `α`.
 */
typedef struct JdParams JdParams;

/**
 * A determinant `exp(log_magnitude + i·phase)`; `log_magnitude = -inf`
 * for a singular matrix.
 */
typedef struct JdLogDet {
  double log_magnitude;
  double phase;
} JdLogDet;

typedef struct JdComplex {
  double re;
  double im;
} JdComplex;

typedef struct JdNystrom {
  struct JdLogDet logdet;
  size_t node_count;
  double refinement_gap;
  bool converged;
} JdNystrom;

typedef struct JdQuotient {
  struct JdComplex value;
  size_t node_count;
  double refinement_gap;
  double smallest_pivot;
  bool converged;
} JdQuotient;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated name of a status.
 */
const char *jd_status_name(enum JdStatus status);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len - 1` bytes) and returns the full message length.
 *
 * # Safety
 * `buf` must be null or valid for writes of `len` bytes.
 */
size_t jd_last_error_message(char *buf, size_t len);

/**
 * Creates parameters for `α = re + i·im`; requires `|Re α| < 1/2`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum JdStatus jd_params_new(double re, double im, struct JdParams **out);

/**
 * # Safety
 * `p` must be null or a handle from `jd_params_new` not yet freed.
 */
void jd_params_free(struct JdParams *p);

/**
 * `det(T_n + H_n)` for the two-jump symbol.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum JdStatus jd_det_th(const struct JdParams *p, size_t n, struct JdLogDet *out);

/**
 * `n^{-3α²}·2^{4α²}G(1-2α)G(1+2α)`; `degenerate` is set when a Barnes
 * factor vanishes.
 *
 * # Safety
 * `p` must be a live handle and both out-pointers valid for writes.
 */
enum JdStatus jd_th_asymptotic(const struct JdParams *p,
                               size_t n,
                               struct JdComplex *out,
                               bool *degenerate);

/**
 * `2^{4α²}G(1-2α)G(1+2α)`.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum JdStatus jd_theorem_constant(const struct JdParams *p, struct JdComplex *out);

/**
 * Barnes `G(z)`; a domain error at the zeros `z = 0, -1, -2, …`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum JdStatus jd_barnes_g(struct JdComplex z, struct JdComplex *out);

/**
 * Nyström `det(I + K)` for the even-sine kernel on `(0, R)`, refined until
 * the relative change is below `tol`.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum JdStatus jd_nystrom_even_sine(const struct JdParams *p,
                                   double big_r,
                                   double tol,
                                   struct JdNystrom *out);

/**
 * `e^{-2iαR}·det((I + K_R^0)(I + H_n^0)^{-1})` on shared tanh-sinh nodes.
 *
 * # Safety
 * `p` must be a live handle and `out` valid for writes.
 */
enum JdStatus jd_quotient(const struct JdParams *p,
                          double big_r,
                          uint32_t n,
                          double tol,
                          struct JdQuotient *out);

/**
 * Samples `samples` Laguerre matrices of size `n` with parameter `a` and
 * records the count of hard-edge scaled eigenvalues in `(0, R)`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum JdStatus jd_counting_new(double a,
                              size_t n,
                              size_t samples,
                              uint64_t seed,
                              double big_r,
                              struct JdCounting **out);

/**
 * # Safety
 * `c` must be null or a handle from `jd_counting_new` not yet freed.
 */
void jd_counting_free(struct JdCounting *c);

/**
 * Mean count and its standard error.
 *
 * # Safety
 * `c` must be a live handle and both out-pointers valid for writes.
 */
enum JdStatus jd_counting_mean(const struct JdCounting *c, double *mean, double *std_error);

/**
 * Empirical `E[e^{-2πiα·count}]` and its standard error.
 *
 * # Safety
 * `c` must be a live handle and both out-pointers valid for writes.
 */
enum JdStatus jd_counting_gf(const struct JdCounting *c,
                             double alpha,
                             struct JdComplex *out,
                             double *std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JUMPDET_H */
