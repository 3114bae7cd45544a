#ifndef TELESCOPING_H
#define TELESCOPING_H

/* Generated by cbindgen from telescoping-ffi; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Estimation route used for a fit.
 */
typedef enum {
  TL_METHOD_MOM = 0,
  TL_METHOD_MLE_CLOSED = 1,
  TL_METHOD_MLE_NUMERIC = 2,
} TlMethod;

/**
 * Status code returned by every entry point.
 */
typedef enum {
  TL_STATUS_OK = 0,
  /**
   * Null pointer, undersized buffer, or an out-parameter is missing.
   */
  TL_STATUS_INVALID_ARGUMENT = 1,
  /**
   * A parameter violates its mathematical domain (theta, quantile level,
   * mgf argument, hypothesis ordering, significance level).
   */
  TL_STATUS_DOMAIN_ERROR = 2,
  /**
   * The sample is unusable: empty, outside the support, or degenerate
   * for the requested estimator.
   */
  TL_STATUS_DEGENERATE_SAMPLE = 3,
  /**
   * An enumeration or series cap was exceeded.
   */
  TL_STATUS_CAP_EXCEEDED = 4,
  /**
   * Unexpected internal failure (a bug on this side of the boundary).
   */
  TL_STATUS_INTERNAL_ERROR = 5,
} TlStatus;

/**
 * Opaque handle to a telescoping law.
 */
typedef struct TlLaw TlLaw;

/**
 * A possibly divergent moment. `value` is meaningful only when `finite`.
 */
typedef struct {
  bool finite;
  double value;
} TlMoment;

/**
 * Result of a parameter fit.
 */
typedef struct {
  double theta_hat;
  double sample_mean;
  bool clamped;
  TlMethod method;
} TlEstimate;

/**
 * Outcome of the most-powerful threshold test.
 */
typedef struct {
  bool reject;
  double statistic;
  double critical_value;
} TlNpResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates the zeta2 law (support 1, 2, ...; divergent mean).
 */
TlStatus tl_law_zeta2(TlLaw **out);

/**
 * Creates a tpoisson law; requires 0 < theta <= 1.
 */
TlStatus tl_law_tpoisson(double theta, TlLaw **out);

/**
 * Creates a tgeometric law; requires theta > 1.
 */
TlStatus tl_law_tgeometric(double theta, TlLaw **out);

/**
 * Releases a law handle. Passing NULL is a no-op.
 */
void tl_law_free(TlLaw *law);

/**
 * First support point of the law.
 */
TlStatus tl_law_start(const TlLaw *law, uint64_t *out);

/**
 * P(X = x).
 */
TlStatus tl_law_pmf(const TlLaw *law, uint64_t x, double *out);

/**
 * P(X <= x).
 */
TlStatus tl_law_cdf(const TlLaw *law, uint64_t x, double *out);

/**
 * P(X >= x).
 */
TlStatus tl_law_tail(const TlLaw *law, uint64_t x, double *out);

/**
 * Moment generating function at t, where it exists.
 */
TlStatus tl_law_mgf(const TlLaw *law, double t, double *out);

/**
 * Smallest x with P(X <= x) >= u, for u in [0, 1).
 */
TlStatus tl_law_quantile(const TlLaw *law, double u, uint64_t *out);

/**
 * E X; `finite` is false for the divergent zeta2 mean.
 */
TlStatus tl_law_mean(const TlLaw *law, TlMoment *out);

/**
 * Var X; `finite` is false when it diverges.
 */
TlStatus tl_law_variance(const TlLaw *law, TlMoment *out);

/**
 * Draws `count` values into the caller's buffer of capacity `capacity`
 * using the library's seeded generator; identical (law, seed, count)
 * triples produce identical draws.
 */
TlStatus tl_law_sample(const TlLaw *law,
                       uint64_t seed,
                       uintptr_t count,
                       uint64_t *buffer,
                       uintptr_t capacity);

/**
 * Moment estimate of the tpoisson parameter; clamps at theta = 1.
 */
TlStatus tl_estimate_tpoisson_mom(const uint64_t *values, uintptr_t len, TlEstimate *out);

/**
 * Numeric maximum-likelihood estimate of the tpoisson parameter.
 */
TlStatus tl_estimate_tpoisson_mle(const uint64_t *values,
                                  uintptr_t len,
                                  double tol,
                                  TlEstimate *out);

/**
 * Estimate of the tgeometric parameter; the maximum-likelihood and moment
 * routes coincide, so `mle` only selects the reported method.
 */
TlStatus tl_estimate_tgeometric(const uint64_t *values, uintptr_t len, bool mle, TlEstimate *out);

/**
 * Most-powerful test of theta = theta0 against theta = theta1 > theta0
 * for the tgeometric family, rejecting for small sample means. The
 * threshold is calibrated by simulated null batches when `monte_carlo`,
 * and by the CLT plug-in otherwise; `seed` only matters for the former.
 */
TlStatus tl_np_test_tgeometric(const uint64_t *values,
                               uintptr_t len,
                               double theta0,
                               double theta1,
                               double alpha,
                               bool monte_carlo,
                               uint64_t seed,
                               TlNpResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TELESCOPING_H */
