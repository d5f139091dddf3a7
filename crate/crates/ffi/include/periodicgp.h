#ifndef PERIODICGP_H
#define PERIODICGP_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status codes; the nonzero values match the command-line exit codes where they overlap.
typedef enum PgpStatus {
  PGP_STATUS_OK = 0,
  PGP_STATUS_INVALID_ARGUMENT = 2,
  PGP_STATUS_ALIASING = 3,
  PGP_STATUS_INVALID_COVARIANCE = 4,
  PGP_STATUS_DEGENERATE = 5,
  PGP_STATUS_NULL_POINTER = 6,
  PGP_STATUS_INTERNAL = 7,
} PgpStatus;

// Spectral coefficients `c0, c1, …` with an optional power-law tail.
typedef struct PgpCoefficients PgpCoefficients;

// Values of one path on the grid `j/n`.
typedef struct PgpPath PgpPath;

typedef struct PgpFitResult {
  double a_hat;
  double p_hat;
  double neg_log_likelihood;
  size_t k_used;
  // Path mean, removed before fitting.
  double mean;
  size_t iterations;
  // Set when `p_hat` sits on a search bound.
  bool boundary;
} PgpFitResult;

typedef struct PgpRegularity {
  double q;
  uint32_t m;
  double alpha;
  double holder_bound;
} PgpRegularity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the next failing call.
const char *pgp_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *pgp_version(void);

// Coefficients `c0` and `c[0..len]` = `c_1..c_len`, all finite and nonnegative.
//
// # Safety
// `c` must point to `len` doubles (or be null when `len == 0`); `out` must be writable.
enum PgpStatus pgp_coefficients_new(double c0,
                                    const double *c,
                                    size_t len,
                                    struct PgpCoefficients **out);

// Declares `c_k² = constant·k^{-q}` beyond the explicit entries (`q > 1`).
//
// # Safety
// `coeffs` must be a live handle.
enum PgpStatus pgp_coefficients_set_tail(struct PgpCoefficients *coeffs, double q, double constant);

// `c0 = 0`, `c_k = a/k^p` for `k ≤ k_max`, with the matching tail.
//
// # Safety
// `out` must be writable.
enum PgpStatus pgp_coefficients_model(double a,
                                      double p,
                                      size_t k_max,
                                      struct PgpCoefficients **out);

// Coefficients of the centered Brownian bridge: `c0² = 1/12`, `c_k = 1/(2πk)`.
//
// # Safety
// `out` must be writable.
enum PgpStatus pgp_coefficients_centered_bridge(struct PgpCoefficients **out);

// # Safety
// `coeffs` must be null or a handle not yet freed.
void pgp_coefficients_free(struct PgpCoefficients *coeffs);

// Number of explicit harmonics (excluding `c0` and the tail).
//
// # Safety
// `coeffs` must be a live handle.
size_t pgp_coefficients_len(const struct PgpCoefficients *coeffs);

// `c_k` for any `k ≥ 0`, reading the tail past the explicit entries.
//
// # Safety
// `coeffs` must be a live handle and `out` writable.
enum PgpStatus pgp_coefficients_get(const struct PgpCoefficients *coeffs, size_t k, double *out);

// `√(c0² + 2Σ c_k²)`.
//
// # Safety
// `coeffs` must be a live handle and `out` writable.
enum PgpStatus pgp_coefficients_h_norm(const struct PgpCoefficients *coeffs, double *out);

// Smallest `K` omitting at most a fraction `eps` of the variance.
//
// # Safety
// `coeffs` must be a live handle and `out` writable.
enum PgpStatus pgp_truncation_index(const struct PgpCoefficients *coeffs, double eps, size_t *out);

// Writes `C̃(j/n)`, `j < n`, from the explicit coefficients into `values`.
//
// # Safety
// `coeffs` must be a live handle and `values` must have room for `n` doubles.
enum PgpStatus pgp_coefficients_to_covariogram(const struct PgpCoefficients *coeffs,
                                               size_t n,
                                               double *values);

// Extracts `c_0..c_{k_max}` from a covariogram table `C̃(j/n)`.
//
// # Safety
// `values` must point to `n` doubles and `out` be writable.
enum PgpStatus pgp_covariogram_to_coefficients(const double *values,
                                               size_t n,
                                               size_t k_max,
                                               struct PgpCoefficients **out);

// One path of the series truncated at `k_max` on `n` points, from stream `stream` of `seed`.
//
// # Safety
// `coeffs` must be a live handle and `out` writable.
enum PgpStatus pgp_sample_path(const struct PgpCoefficients *coeffs,
                               size_t k_max,
                               size_t n,
                               uint64_t seed,
                               uint64_t stream,
                               struct PgpPath **out);

// Wraps `n` observed values (power of two) as a path.
//
// # Safety
// `values` must point to `n` doubles and `out` be writable.
enum PgpStatus pgp_path_new(const double *values, size_t n, struct PgpPath **out);

// # Safety
// `path` must be a live handle.
size_t pgp_path_len(const struct PgpPath *path);

// Borrowed pointer to the path values, valid until the path is freed.
//
// # Safety
// `path` must be a live handle.
const double *pgp_path_values(const struct PgpPath *path);

// # Safety
// `path` must be null or a handle not yet freed.
void pgp_path_free(struct PgpPath *path);

// Maximum-likelihood fit of `c_k = a/k^p` using `k_max` harmonics and `p ∈ [p_min, p_max]`.
//
// # Safety
// `path` must be a live handle and `out` writable.
enum PgpStatus pgp_fit_mle(const struct PgpPath *path,
                           size_t k_max,
                           double p_min,
                           double p_max,
                           struct PgpFitResult *out);

// Guaranteed smoothness for `c_k² = O(k^{-q})`, `q > 1`.
//
// # Safety
// `out` must be writable.
enum PgpStatus pgp_predict_regularity(double q, struct PgpRegularity *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERIODICGP_H */
