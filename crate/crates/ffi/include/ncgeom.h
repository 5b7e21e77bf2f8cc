#ifndef NCGEOM_H
#define NCGEOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum NcgStatus {
  NCG_STATUS_OK = 0,
  // A required pointer argument was null.
  NCG_STATUS_NULL_POINTER = 1,
  // Arguments outside the mathematical domain (θη ≥ 1, R ≥ 1, κ ≤ 0, ...).
  NCG_STATUS_DOMAIN = 2,
  NCG_STATUS_DIMENSION = 3,
  // Degenerate or non-finite numerics.
  NCG_STATUS_NUMERICAL = 4,
  NCG_STATUS_IO = 5,
  // Output buffer too small.
  NCG_STATUS_BUFFER = 6,
  // An unexpected internal failure.
  NCG_STATUS_PANIC = 7,
} NcgStatus;

typedef enum NcgStateClass {
  NCG_STATE_CLASS_UNPHYSICAL = 0,
  NCG_STATE_CLASS_SEPARABLE = 1,
  NCG_STATE_CLASS_ENTANGLED = 2,
} NcgStateClass;

typedef enum NcgRegion {
  NCG_REGION_POSITIVE_DISK = 0,
  NCG_REGION_QUANTUM = 1,
  NCG_REGION_SEPARABLE = 2,
  NCG_REGION_ENTANGLED = 3,
} NcgRegion;

typedef enum NcgBackend {
  NCG_BACKEND_PAPER_CLOSED_FORM = 0,
  NCG_BACKEND_NUMERIC_FISHER = 1,
} NcgBackend;

typedef enum NcgDensity {
  NCG_DENSITY_DET = 0,
  NCG_DENSITY_SQRT_DET = 1,
} NcgDensity;

typedef enum NcgMethod {
  NCG_METHOD_MONTE_CARLO_POLAR = 0,
  NCG_METHOD_MONTE_CARLO_CARTESIAN = 1,
  NCG_METHOD_GAUSS_LEGENDRE_POLAR = 2,
} NcgMethod;

typedef enum NcgParam {
  NCG_PARAM_KAPPA = 0,
  NCG_PARAM_THETA = 1,
  NCG_PARAM_ETA = 2,
} NcgParam;

typedef enum NcgFormat {
  NCG_FORMAT_CSV = 0,
  NCG_FORMAT_JSON = 1,
} NcgFormat;

// Opaque covariance matrix handle.
typedef struct NcgCovariance NcgCovariance;

// Opaque sweep table handle.
typedef struct NcgSweepTable NcgSweepTable;

// Integration settings; enum fields take `NcgBackend`, `NcgDensity` and
// `NcgMethod` values.
typedef struct NcgIntegrationOptions {
  int32_t backend;
  int32_t density;
  int32_t method;
  size_t budget;
  uint64_t seed;
  double tol;
} NcgIntegrationOptions;

typedef struct NcgEstimate {
  double value;
  double std_error;
  size_t evals;
  size_t accepted;
} NcgEstimate;

typedef struct NcgSweepRow {
  double param;
  struct NcgEstimate quantum;
  struct NcgEstimate separable;
  struct NcgEstimate entangled;
  // NaN when the separable volume is zero.
  double ratio;
  double ratio_std_error;
} NcgSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message, NUL-terminated, into
// `buf` (truncated to `len` bytes) and returns the full message length
// including the terminator; 0 when there is no error.
//
// # Safety
// `buf` must be null or valid for `len` bytes of writes.
size_t ncg_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *ncg_version(void);

// Default integration settings (numeric metric, `Δ_g` density, stratified
// Monte Carlo, 40000 evaluations, seed 0).
struct NcgIntegrationOptions ncg_integration_options_default(void);

// Toy covariance `Σ(m, n)` (8×8) for the given deformation.
//
// # Safety
// `out` must be valid for writes.
enum NcgStatus ncg_covariance_toy(double m,
                                  double n,
                                  double theta,
                                  double eta,
                                  struct NcgCovariance **out);

// Covariance matrix from `dim × dim` row-major entries; must be symmetric
// positive definite.
//
// # Safety
// `entries` must be valid for `dim * dim` reads and `out` for writes.
enum NcgStatus ncg_covariance_from_row_major(const double *entries,
                                             size_t dim,
                                             struct NcgCovariance **out);

// Matrix dimension, 0 for a null handle.
//
// # Safety
// `cov` must be null or a live handle.
size_t ncg_covariance_dim(const struct NcgCovariance *cov);

// Copies the row-major entries into `buf` (needs `dim * dim` slots).
//
// # Safety
// `cov` must be a live handle and `buf` valid for `len` writes.
enum NcgStatus ncg_covariance_entries(const struct NcgCovariance *cov, double *buf, size_t len);

// Releases a covariance handle; null is ignored.
//
// # Safety
// `cov` must be null or a handle not yet freed.
void ncg_covariance_free(struct NcgCovariance *cov);

// Symplectic spectrum (ascending, 4 values) of an 8×8 covariance relative
// to `Ω(θ, η)`, or to its partial transpose when `partial_transpose` is
// nonzero.
//
// # Safety
// `cov` must be a live handle, `buf` valid for `len` writes, `count` for
// one write.
enum NcgStatus ncg_symplectic_spectrum(const struct NcgCovariance *cov,
                                       double theta,
                                       double eta,
                                       int32_t partial_transpose,
                                       double *buf,
                                       size_t len,
                                       size_t *count);

// Numeric smallest symplectic eigenvalues `(ν₋, ν′₋)` of the toy state.
//
// # Safety
// `nu` and `nu_prime` must be valid for writes.
enum NcgStatus ncg_numeric_nu_pair(double m,
                                   double n,
                                   double theta,
                                   double eta,
                                   double *nu,
                                   double *nu_prime);

// Closed-form `ν₋` (`ω₋` branch).
//
// # Safety
// `out` must be valid for writes.
enum NcgStatus ncg_nu_minus(double m, double n, double theta, double eta, double *out);

// Closed-form `ν′₋` (`ω₊` branch).
//
// # Safety
// `out` must be valid for writes.
enum NcgStatus ncg_nu_prime_minus(double m, double n, double theta, double eta, double *out);

// Classifies the toy state at `(m, n)`; writes an `NcgStateClass`.
//
// # Safety
// `out` must be valid for writes.
enum NcgStatus ncg_classify(double m,
                            double n,
                            double theta,
                            double eta,
                            double tol,
                            enum NcgStateClass *out);

// `exp(-Tr[adj Σ]/κ) · ln(1 + (det Σ)^exponent)`.
//
// # Safety
// `cov` must be a live handle and `out` valid for writes.
enum NcgStatus ncg_regularizer(const struct NcgCovariance *cov,
                               double kappa,
                               uint32_t exponent,
                               double *out);

// Regularized volume of one region (`NcgRegion`).
//
// # Safety
// `opts` must be valid for reads and `out` for writes.
enum NcgStatus ncg_integrate_region(int32_t region,
                                    double theta,
                                    double eta,
                                    double kappa,
                                    const struct NcgIntegrationOptions *opts,
                                    struct NcgEstimate *out);

// Sweeps `param` (`NcgParam`) over `steps` evenly spaced values from
// `from` to `to`, holding the other two of `(theta, eta, kappa)` fixed.
//
// # Safety
// `opts` must be valid for reads and `out` for writes.
enum NcgStatus ncg_sweep_run(int32_t param,
                             double from,
                             double to,
                             size_t steps,
                             double theta,
                             double eta,
                             double kappa,
                             const struct NcgIntegrationOptions *opts,
                             struct NcgSweepTable **out);

// Number of rows, 0 for a null handle.
//
// # Safety
// `table` must be null or a live handle.
size_t ncg_sweep_row_count(const struct NcgSweepTable *table);

// Copies row `index`.
//
// # Safety
// `table` must be a live handle and `out` valid for writes.
enum NcgStatus ncg_sweep_row(const struct NcgSweepTable *table,
                             size_t index,
                             struct NcgSweepRow *out);

// Writes the table to `path` as CSV or JSON (`NcgFormat`).
//
// # Safety
// `table` must be a live handle and `path` a NUL-terminated UTF-8 string.
enum NcgStatus ncg_sweep_write(const struct NcgSweepTable *table, const char *path, int32_t format);

// Releases a sweep table; null is ignored.
//
// # Safety
// `table` must be null or a handle not yet freed.
void ncg_sweep_free(struct NcgSweepTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCGEOM_H */
