#ifndef EPILAB_H
#define EPILAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum EpilabEntropyMethod {
  EPILAB_ENTROPY_METHOD_CLOSED_FORM = 0,
  EPILAB_ENTROPY_METHOD_QUADRATURE = 1,
  EPILAB_ENTROPY_METHOD_MONTE_CARLO = 2,
} EpilabEntropyMethod;

typedef enum EpilabFormat {
  EPILAB_FORMAT_CSV = 0,
  EPILAB_FORMAT_JSON = 1,
} EpilabFormat;

typedef enum EpilabSign {
  EPILAB_SIGN_PLUS = 0,
  EPILAB_SIGN_MINUS = 1,
} EpilabSign;

typedef enum EpilabStatus {
  EPILAB_STATUS_OK = 0,
  EPILAB_STATUS_NULL_POINTER = 1,
  EPILAB_STATUS_DOMAIN = 2,
  EPILAB_STATUS_INFINITE_MOMENT = 3,
  EPILAB_STATUS_NON_FINITE = 4,
  EPILAB_STATUS_ZERO_DENSITY = 5,
  EPILAB_STATUS_INCONCLUSIVE = 6,
  EPILAB_STATUS_CONSISTENCY = 7,
  EPILAB_STATUS_USAGE = 8,
  EPILAB_STATUS_IO = 9,
  EPILAB_STATUS_PANIC = 10,
} EpilabStatus;

typedef enum EpilabVerdictStatus {
  EPILAB_VERDICT_STATUS_HOLDS = 0,
  EPILAB_VERDICT_STATUS_VIOLATED = 1,
  EPILAB_VERDICT_STATUS_INCONCLUSIVE = 2,
} EpilabVerdictStatus;

// Opaque density handle.
typedef struct EpilabDensity EpilabDensity;

typedef struct EpilabMoments {
  double mean;
  double second_moment;
  double variance;
} EpilabMoments;

typedef struct EpilabEntropy {
  double h;
  double log_entropy_power;
  double abs_error;
  enum EpilabEntropyMethod method;
  bool converged;
} EpilabEntropy;

// Numeric part of a verdict; `lhs <= rhs` is the inequality checked.
typedef struct EpilabVerdict {
  double lhs;
  double rhs;
  double margin;
  double slack;
  enum EpilabVerdictStatus status;
} EpilabVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Truncated Pareto density `1/(x ln b)` on `(1, b)`, parametrized by `log_b = ln b > 0`.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_truncated_pareto(double log_b, struct EpilabDensity **out);

// Pareto density `(beta - 1) x^{-beta}` on `(1, ∞)`, `beta > 1`.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_pareto(double beta, struct EpilabDensity **out);

// Normal density with mean `mu` and variance `sigma2 > 0`.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_gaussian(double mu, double sigma2, struct EpilabDensity **out);

// Uniform density on `(a, b)`.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_uniform(double a, double b, struct EpilabDensity **out);

// Exponential density with rate `lambda > 0`.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_exponential(double lambda, struct EpilabDensity **out);

// Density of `a X + c`.
//
// # Safety
// `d` must be a live handle and `out` valid writable storage.
enum EpilabStatus epilab_affine(const struct EpilabDensity *d,
                                double a,
                                double c,
                                struct EpilabDensity **out);

// Closed-form density of `X_b + Y_b` for independent truncated Pareto copies.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_truncated_pareto_sum(double log_b, struct EpilabDensity **out);

// Closed-form density of `X_b - Y_b` for independent truncated Pareto copies.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum EpilabStatus epilab_truncated_pareto_difference(double log_b, struct EpilabDensity **out);

// Density of `X ± Y` for independent `X ~ d1`, `Y ~ d2`, closed form when known.
//
// # Safety
// `d1`, `d2` must be live handles and `out` valid writable storage.
enum EpilabStatus epilab_convolve(const struct EpilabDensity *d1,
                                  const struct EpilabDensity *d2,
                                  enum EpilabSign sign,
                                  struct EpilabDensity **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `d` must be null or a handle from this library that has not been freed.
void epilab_density_free(struct EpilabDensity *d);

// Density at `x`; NaN for a null handle.
//
// # Safety
// `d` must be null or a live handle.
double epilab_pdf(const struct EpilabDensity *d, double x);

// Distribution function at `x`; NaN for a null handle.
//
// # Safety
// `d` must be null or a live handle.
double epilab_cdf(const struct EpilabDensity *d, double x);

// Essential supremum of the density; NaN for a null handle.
//
// # Safety
// `d` must be null or a live handle.
double epilab_sup_density(const struct EpilabDensity *d);

// Quantile at `u` in `[0, 1]`.
//
// # Safety
// `d` must be a live handle and `out` valid writable storage.
enum EpilabStatus epilab_inverse_cdf(const struct EpilabDensity *d, double u, double *out);

// # Safety
// `d` must be a live handle and `out` valid writable storage.
enum EpilabStatus epilab_moments(const struct EpilabDensity *d, struct EpilabMoments *out);

// Differential entropy in nats; closed form when available, quadrature to
// absolute tolerance `tol` otherwise.
//
// # Safety
// `d` must be a live handle and `out` valid writable storage.
enum EpilabStatus epilab_entropy(const struct EpilabDensity *d,
                                 double tol,
                                 struct EpilabEntropy *out);

// Distance to normality `D(X)`.
//
// # Safety
// `d` must be a live handle and `out` valid writable storage.
enum EpilabStatus epilab_d_to_normality(const struct EpilabDensity *d, double tol, double *out);

// `H(X) + H(Y) <= H(X + Y)`, compared in log-entropy-power units.
//
// # Safety
// `x`, `y` must be live handles and `out` valid writable storage.
enum EpilabStatus epilab_check_epi(const struct EpilabDensity *x,
                                   const struct EpilabDensity *y,
                                   double tol,
                                   struct EpilabVerdict *out);

// `h(X - Y) <= h(X) + 1` and `h(X + Y) <= h(X) + 2` for a log-concave `X`.
//
// # Safety
// `x` must be a live handle; `diff` and `sum` valid writable storage.
enum EpilabStatus epilab_check_corollary1(const struct EpilabDensity *x,
                                          double tol,
                                          struct EpilabVerdict *diff,
                                          struct EpilabVerdict *sum);

// Lower bounds on `h(X_b ± Y_b)` at `log_b >= 2`, as a JSON array of verdicts.
//
// # Safety
// `out` must be valid writable storage; free the result with [`epilab_string_free`].
enum EpilabStatus epilab_theorem3_bounds_json(double log_b, double tol, char **out);

// The divergence experiment over `t_grid[0..len]`, rendered as CSV or JSON.
//
// # Safety
// `t_grid` must point to `len` doubles and `out` be valid writable storage;
// free the result with [`epilab_string_free`].
enum EpilabStatus epilab_divergence(const double *t_grid,
                                    size_t len,
                                    double tol,
                                    enum EpilabFormat format,
                                    char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library that has not been freed.
void epilab_string_free(char *s);

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library on the same thread.
const char *epilab_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EPILAB_H */
