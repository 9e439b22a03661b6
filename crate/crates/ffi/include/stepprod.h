#ifndef STEPPROD_H
#define STEPPROD_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Product family.
 */
typedef enum {
  STEPPROD_FORM_GAMMA = 0,
  STEPPROD_FORM_DELTA = 1,
  STEPPROD_FORM_THETA = 2,
} StepprodForm;

/*
 Route for the half-index value k.
 */
typedef enum {
  STEPPROD_HALF_INDEX_ROUTE_QUADRATURE_RATIO = 0,
  STEPPROD_HALF_INDEX_ROUTE_GAMMA_ORACLE = 1,
} StepprodHalfIndexRoute;

/*
 Quadrature route.
 */
typedef enum {
  STEPPROD_ROUTE_TRANSFORMED = 0,
  STEPPROD_ROUTE_CLOSED_FORM = 1,
} StepprodRoute;

/*
 Result code of every fallible call.
 */
typedef enum {
  STEPPROD_STATUS_OK = 0,
  STEPPROD_STATUS_NULL_POINTER = 1,
  STEPPROD_STATUS_VALIDATION = 2,
  STEPPROD_STATUS_DOMAIN = 3,
  STEPPROD_STATUS_RANGE = 4,
  STEPPROD_STATUS_CONVERGENCE = 5,
  STEPPROD_STATUS_INTEGRITY = 6,
  STEPPROD_STATUS_PANIC = 7,
} StepprodStatus;

/*
 Opaque table of exact Bernoulli numbers.
 */
typedef struct StepprodBernoulliTable StepprodBernoulliTable;

/*
 Opaque convergence report.
 */
typedef struct StepprodConvergenceReport StepprodConvergenceReport;

/*
 Opaque pair (a, b).
 */
typedef struct StepprodParams StepprodParams;

typedef struct {
  double value;
  double error_estimate;
  uint64_t evaluations;
  /*
   0 = transformed, 1 = closed form.
   */
  uint32_t route;
} StepprodQuadrature;

typedef struct {
  double k;
  double theta_half;
  double gamma_half;
} StepprodHalfIndex;

typedef struct {
  uint64_t terms;
  double partial;
  double abs_error;
} StepprodConvergencePoint;

/*
 Fitted constants with their closed-form counterparts and relation residuals.
 */
typedef struct {
  double a;
  double b;
  double c;
  double k;
  double closed_a;
  double closed_b;
  double closed_c;
  double provenance_gap;
  /*
   A e^(1/2) = B C
   */
  double residual_a_sqrt_e_eq_bc;
  /*
   B = C k e^(1/2)
   */
  double residual_b_eq_ck_sqrt_e;
  /*
   C = sqrt(A/k)
   */
  double residual_c_eq_sqrt_a_over_k;
  /*
   B = sqrt(k A e)
   */
  double residual_b_eq_sqrt_kae;
} StepprodConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread. Owned by the
 library; valid until the next failing call on the same thread.
 */
const char *stepprod_last_error_message(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void stepprod_string_free(char *s);

/*
 Creates a parameter handle; both values must be finite and positive.

 # Safety
 `out` must be valid for writes.
 */
StepprodStatus stepprod_params_new(double a, double b, StepprodParams **out);

/*
 # Safety
 `params` must be NULL or a handle from [`stepprod_params_new`] not yet freed.
 */
void stepprod_params_free(StepprodParams *params);

/*
 Direct product of `n` factors. Fails with `RANGE` on overflow.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_product(const StepprodParams *params,
                                StepprodForm form,
                                uint64_t n,
                                double *out);

/*
 Natural log of the product of `n` factors.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_log_product(const StepprodParams *params,
                                    StepprodForm form,
                                    uint64_t n,
                                    double *out);

/*
 `log Γ:2n − log Δ:n − log Θ:n`.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_splitting_residual(const StepprodParams *params, uint64_t n, double *out);

/*
 Natural log of the gamma function for `z > 0`.

 # Safety
 `out` must be valid for writes.
 */
StepprodStatus stepprod_lgamma(double z, double *out);

/*
 `∫_0^1 x^(p-1) (1-x^n)^(m/n-1) dx`.

 # Safety
 `out` must be valid for writes.
 */
StepprodStatus stepprod_beta_integral(double p,
                                      double m,
                                      double n,
                                      StepprodRoute route,
                                      StepprodQuadrature *out);

/*
 `k = Δ:½`, `Θ:½` and `Γ:½`.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_half_index(const StepprodParams *params,
                                   StepprodHalfIndexRoute route,
                                   StepprodHalfIndex *out);

/*
 Partial Wallis-type product with `terms` members.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_wallis_partial(const StepprodParams *params, uint64_t terms, double *out);

/*
 Truncated product for `k² = aP/Q`.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_kk_partial(const StepprodParams *params, uint64_t terms, double *out);

/*
 Partial four-parameter product.

 # Safety
 `out` must be valid for writes.
 */
StepprodStatus stepprod_general_ratio_partial(double p,
                                              double q,
                                              double m,
                                              double n,
                                              uint64_t terms,
                                              double *out);

/*
 Evaluates the Wallis-type product on a strictly increasing schedule.

 # Safety
 `params` must be a live handle, `schedule` must point to `len` readable
 values and `out` must be valid for writes.
 */
StepprodStatus stepprod_converge(const StepprodParams *params,
                                 const uint64_t *schedule,
                                 uintptr_t len,
                                 StepprodConvergenceReport **out);

/*
 Number of recorded points; 0 for NULL.

 # Safety
 `report` must be NULL or a live handle.
 */
uintptr_t stepprod_report_len(const StepprodConvergenceReport *report);

/*
 # Safety
 `report` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_report_point(const StepprodConvergenceReport *report,
                                     uintptr_t index,
                                     StepprodConvergencePoint *out);

/*
 Writes the quadrature limit, the fitted decay rate (NaN when fewer than
 two tail points were usable) and the envelope constant.

 # Safety
 `report` must be a live handle; each out-pointer must be valid for writes.
 */
StepprodStatus stepprod_report_summary(const StepprodConvergenceReport *report,
                                       double *reference,
                                       double *fitted_rate,
                                       double *envelope_constant);

/*
 # Safety
 `report` must be NULL or a live handle not yet freed.
 */
void stepprod_report_free(StepprodConvergenceReport *report);

/*
 Fits A, B, C, checks them against the closed form and checks their four
 relations. Fails with `INTEGRITY` when a check is violated.

 # Safety
 `params` must be a live handle; `out` must be valid for writes.
 */
StepprodStatus stepprod_constants(const StepprodParams *params, StepprodConstants *out);

/*
 `(1 + 1/(2i))^i`.

 # Safety
 `out` must be valid for writes.
 */
StepprodStatus stepprod_exp_half_limit(uint64_t i, double *out);

/*
 Table of `B_0 ..= B_{2K}`, `1 <= K <= 60`.

 # Safety
 `out` must be valid for writes.
 */
StepprodStatus stepprod_bernoulli_table_new(uintptr_t half_index, StepprodBernoulliTable **out);

/*
 # Safety
 `table` must be NULL or a live handle not yet freed.
 */
void stepprod_bernoulli_table_free(StepprodBernoulliTable *table);

/*
 Largest index held by the table; 0 for NULL.

 # Safety
 `table` must be NULL or a live handle.
 */
uintptr_t stepprod_bernoulli_max_index(const StepprodBernoulliTable *table);

/*
 `B_n` as decimal numerator and denominator strings, each released with
 [`stepprod_string_free`].

 # Safety
 `table` must be a live handle; the out-pointers must be valid for writes.
 */
StepprodStatus stepprod_bernoulli_get(const StepprodBernoulliTable *table,
                                      uintptr_t n,
                                      char **numerator,
                                      char **denominator);

/*
 `(2k+1)|B_{2k}|` as decimal numerator and denominator strings.

 # Safety
 `table` must be a live handle; the out-pointers must be valid for writes.
 */
StepprodStatus stepprod_euler_coefficient(const StepprodBernoulliTable *table,
                                          uintptr_t k,
                                          char **numerator,
                                          char **denominator);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STEPPROD_H */
