#ifndef BELLMART_H
#define BELLMART_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BellmartStatus {
  BELLMART_STATUS_OK = 0,
  BELLMART_STATUS_DOMAIN = 1,
  BELLMART_STATUS_NO_CONVERGENCE = 2,
  BELLMART_STATUS_NO_ROOT = 3,
  BELLMART_STATUS_NO_BRACKET = 4,
  BELLMART_STATUS_BRANCH_DEGENERATE = 5,
  BELLMART_STATUS_PRECONDITION = 6,
  BELLMART_STATUS_CONSTRUCTION = 7,
  BELLMART_STATUS_CONFIG = 8,
  BELLMART_STATUS_USAGE = 9,
  BELLMART_STATUS_IO = 10,
  BELLMART_STATUS_NULL_POINTER = 11,
  BELLMART_STATUS_PANIC = 12,
} BellmartStatus;

/**
 * Opaque simulated path ensemble.
 */
typedef struct BellmartEnsemble BellmartEnsemble;

/**
 * Opaque conjugate exponent pair.
 */
typedef struct BellmartPair BellmartPair;

typedef struct BellmartLaguerreRoot {
  double z;
  double c_left;
  double c_right;
} BellmartLaguerreRoot;

typedef struct BellmartPoint {
  double u;
  double v;
  double t;
  double value;
  double b_u;
  double b_v;
  double b_uu;
  double b_uv_plus1;
  double b_vv;
  double tau;
} BellmartPoint;

typedef struct BellmartPogorelov {
  /**
   * 0 for the plus branch, 1 for the minus branch.
   */
  int32_t branch;
  double c1;
  double c2;
  double gamma;
  double delta;
  double a;
  double b;
  /**
   * NaN on the plus branch.
   */
  double improvement_c;
  double max_residual;
} BellmartPogorelov;

typedef struct BellmartNormEstimate {
  double estimate;
  double std_error;
} BellmartNormEstimate;

typedef struct BellmartExperiment {
  double ratio;
  double bound;
  double margin;
  double std_error;
  /**
   * 1 if the bound holds within three standard errors.
   */
  int32_t passes;
} BellmartExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *bellmart_last_error_message(void);

/**
 * Creates a pair from `p >= 2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BellmartStatus bellmart_pair_from_p(double p, struct BellmartPair **out);

/**
 * Creates a pair from `1 < q <= 2`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BellmartStatus bellmart_pair_from_q(double q, struct BellmartPair **out);

/**
 * # Safety
 * `pair` must be a live handle; NULL yields NaN.
 */
double bellmart_pair_p(const struct BellmartPair *pair);

/**
 * # Safety
 * `pair` must be a live handle; NULL yields NaN.
 */
double bellmart_pair_q(const struct BellmartPair *pair);

/**
 * # Safety
 * `pair` must come from `bellmart_pair_from_*` and not be used afterwards.
 */
void bellmart_pair_free(struct BellmartPair *pair);

/**
 * Least root of `L_p` in `(0, 1)` and the two constants built from it.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BellmartStatus bellmart_least_positive_root(double p, struct BellmartLaguerreRoot *out);

/**
 * Plus-branch Bellman function with derivatives at `(|u|, |v|)`.
 *
 * # Safety
 * `pair` must be a live handle and `out` valid for writes.
 */
enum BellmartStatus bellmart_eval_bellman(const struct BellmartPair *pair,
                                          double u,
                                          double v,
                                          struct BellmartPoint *out);

/**
 * `(2/9)((u² + 3|v|)^(3/2) + |u|³)`.
 */
double bellmart_closed_p3_plus(double u, double v);

/**
 * Solves the boundary system on the plus (`minus == 0`) or minus branch.
 *
 * # Safety
 * `pair` must be a live handle and `out` valid for writes.
 */
enum BellmartStatus bellmart_solve_pogorelov(const struct BellmartPair *pair,
                                             int32_t minus,
                                             struct BellmartPogorelov *out);

/**
 * Simulates `paths` paths of the named construction (`identity`,
 * `rotation`, `sign-switch`, `az-derived`).
 *
 * # Safety
 * `name` must be a valid C string and `out` valid for writes.
 */
enum BellmartStatus bellmart_simulate(const char *name,
                                      size_t steps,
                                      double dt,
                                      uint64_t seed,
                                      size_t paths,
                                      struct BellmartEnsemble **out);

/**
 * Number of paths, 0 for NULL.
 *
 * # Safety
 * `ensemble` must be NULL or a live handle.
 */
size_t bellmart_ensemble_len(const struct BellmartEnsemble *ensemble);

/**
 * Terminal value of path `index`: `which == 0` selects `Z`, otherwise `W`.
 *
 * # Safety
 * `ensemble` must be a live handle and `out` valid for two doubles.
 */
enum BellmartStatus bellmart_ensemble_terminal(const struct BellmartEnsemble *ensemble,
                                               size_t index,
                                               int32_t which,
                                               double *out);

/**
 * `(E|X_T|^p)^(1/p)` for `X = Z` (`which == 0`) or `W`.
 *
 * # Safety
 * `ensemble` must be a live handle and `out` valid for writes.
 */
enum BellmartStatus bellmart_ensemble_norm(const struct BellmartEnsemble *ensemble,
                                           int32_t which,
                                           double p,
                                           struct BellmartNormEstimate *out);

/**
 * # Safety
 * `ensemble` must come from `bellmart_simulate` and not be used afterwards.
 */
void bellmart_ensemble_free(struct BellmartEnsemble *ensemble);

/**
 * `‖Z‖_q / ‖W‖_q` for the named construction with per-step hypothesis checks.
 *
 * # Safety
 * `name` must be a valid C string and `out` valid for writes.
 */
enum BellmartStatus bellmart_inequality_experiment(double q,
                                                   const char *name,
                                                   size_t steps,
                                                   double dt,
                                                   uint64_t seed,
                                                   size_t paths,
                                                   struct BellmartExperiment *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLMART_H */
