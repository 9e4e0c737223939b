#ifndef STOCHORD_H
#define STOCHORD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StochordGridPolicy {
  STOCHORD_GRID_POLICY_LOG_SPACED = 0,
  STOCHORD_GRID_POLICY_LINEAR = 1,
} StochordGridPolicy;

typedef enum StochordMajorization {
  STOCHORD_MAJORIZATION_PLAIN = 0,
  STOCHORD_MAJORIZATION_WEAK_SUB = 1,
  STOCHORD_MAJORIZATION_WEAK_SUPER = 2,
} StochordMajorization;

typedef enum StochordOrder {
  STOCHORD_ORDER_ST = 0,
  STOCHORD_ORDER_HR = 1,
  STOCHORD_ORDER_RH = 2,
  STOCHORD_ORDER_LR = 3,
} StochordOrder;

typedef enum StochordQuantity {
  STOCHORD_QUANTITY_CDF = 0,
  STOCHORD_QUANTITY_SF = 1,
  STOCHORD_QUANTITY_PDF = 2,
  STOCHORD_QUANTITY_HAZARD = 3,
  STOCHORD_QUANTITY_REVERSED_HAZARD = 4,
  STOCHORD_QUANTITY_LOG_SF = 5,
} StochordQuantity;

typedef enum StochordStatus {
  STOCHORD_STATUS_OK = 0,
  STOCHORD_STATUS_NULL_POINTER = 1,
  STOCHORD_STATUS_INVALID_PARAMETER = 2,
  STOCHORD_STATUS_DOMAIN = 3,
  STOCHORD_STATUS_CONVERGENCE = 4,
  STOCHORD_STATUS_NOT_FOUND = 5,
  STOCHORD_STATUS_PANIC = 6,
  STOCHORD_STATUS_INTERNAL = 7,
} StochordStatus;

typedef enum StochordStructure {
  STOCHORD_STRUCTURE_SERIES = 0,
  STOCHORD_STRUCTURE_PARALLEL = 1,
} StochordStructure;

/**
 * Opaque component lifetime model.
 */
typedef struct StochordModel StochordModel;

/**
 * Opaque series or parallel system.
 */
typedef struct StochordSystem StochordSystem;

/**
 * Grid and tolerance for a certification. `x_max <= 0` picks the point
 * where both survival functions drop below 1e-6.
 */
typedef struct StochordCertifyOptions {
  size_t grid_count;
  enum StochordGridPolicy policy;
  double x_max;
  double tol_abs;
  double tol_rel;
} StochordCertifyOptions;

/**
 * `witness_x` is NaN when the order holds.
 */
typedef struct StochordVerdict {
  bool holds;
  double margin;
  double tolerance;
  double witness_x;
  size_t points_checked;
  double x_min;
  double x_max;
  bool truncated;
} StochordVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *stochord_last_error_message(void);

/**
 * Weibull-G model with an exponential baseline.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum StochordStatus stochord_wg_exponential_new(double alpha,
                                                double beta,
                                                double gamma,
                                                struct StochordModel **out_model);

/**
 * Gompertz-Makeham model with hazard `lambda + alpha * exp(beta * x)`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum StochordStatus stochord_gm_new(double alpha,
                                    double beta,
                                    double lambda,
                                    struct StochordModel **out_model);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void stochord_model_free(struct StochordModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum StochordStatus stochord_model_eval(const struct StochordModel *model,
                                        enum StochordQuantity quantity,
                                        double x,
                                        double *out_value);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum StochordStatus stochord_model_quantile(const struct StochordModel *model,
                                            double u,
                                            double *out_value);

/**
 * Builds a system from copies of `n` component handles; the inputs stay
 * owned by the caller.
 *
 * # Safety
 * `models` must point to `n` live handles and `out` must be writable.
 */
enum StochordStatus stochord_system_new(const struct StochordModel *const *models,
                                        size_t n,
                                        enum StochordStructure structure,
                                        struct StochordSystem **out_system);

/**
 * # Safety
 * `system` must be null or a handle from this library not yet freed.
 */
void stochord_system_free(struct StochordSystem *system);

/**
 * # Safety
 * `system` must be a live handle and `out` writable.
 */
enum StochordStatus stochord_system_eval(const struct StochordSystem *system,
                                         enum StochordQuantity quantity,
                                         double x,
                                         double *out_value);

/**
 * Defaults: 2048 log-spaced points, automatic `x_max`, abs 1e-9, rel 1e-7.
 */
struct StochordCertifyOptions stochord_certify_options_default(void);

/**
 * Certifies `lhs <=_order rhs` on a grid.
 *
 * # Safety
 * `lhs` and `rhs` must be live handles, `options` null or readable, and
 * `out` writable.
 */
enum StochordStatus stochord_certify(enum StochordOrder order,
                                     const struct StochordSystem *lhs,
                                     const struct StochordSystem *rhs,
                                     const struct StochordCertifyOptions *options,
                                     struct StochordVerdict *out_verdict);

/**
 * Decides `a ≺ b` (or a weak form) for vectors of length `n`.
 *
 * # Safety
 * `a` and `b` must point to `n` readable doubles and `out` be writable.
 */
enum StochordStatus stochord_majorize_check(const double *a,
                                            const double *b,
                                            size_t n,
                                            enum StochordMajorization kind,
                                            bool *out_result);

/**
 * Whether every pair of columns of the 2×n matrix is similarly ordered.
 *
 * # Safety
 * `top` and `bottom` must point to `n` readable doubles and `out` be writable.
 */
enum StochordStatus stochord_pn_membership(const double *top,
                                           const double *bottom,
                                           size_t n,
                                           bool *out_result);

/**
 * Right-multiplies the 2×n matrix by the T-transform mixing columns `i`
 * and `j` with weight `lambda`. Outputs may alias the inputs.
 *
 * # Safety
 * All four arrays must hold `n` doubles; the outputs must be writable.
 */
enum StochordStatus stochord_apply_t_transform(const double *top,
                                               const double *bottom,
                                               size_t n,
                                               double lambda,
                                               size_t i,
                                               size_t j,
                                               double *out_top,
                                               double *out_bottom);

/**
 * Finds `lambda` with `b = a·T_lambda` for 2×2 matrices given row-major.
 * Returns `NotFound` when no such weight exists.
 *
 * # Safety
 * `a` and `b` must point to 4 readable doubles and `out` be writable.
 */
enum StochordStatus stochord_chain_solve_2x2(const double *a, const double *b, double *out_lambda);

/**
 * Auxiliary function that is non-positive on `x > 0`.
 */
double stochord_h1(double x);

/**
 * Auxiliary function that is non-negative on `x > 0`.
 */
double stochord_h2(double x);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STOCHORD_H */
