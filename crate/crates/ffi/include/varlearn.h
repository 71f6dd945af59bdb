#ifndef VARLEARN_H
#define VARLEARN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VlStatus {
  VL_STATUS_OK = 0,
  VL_STATUS_NULL_POINTER = 1,
  VL_STATUS_INVALID_ARGUMENT = 2,
  VL_STATUS_DIMENSION_MISMATCH = 3,
  VL_STATUS_IMPROPER_MATRIX = 4,
  VL_STATUS_INVALID_MATRIX = 5,
  VL_STATUS_BUFFER_TOO_SMALL = 6,
  VL_STATUS_INDEX_OUT_OF_RANGE = 7,
  VL_STATUS_PANIC = 8,
} VlStatus;

typedef enum VlStateKind {
  VL_STATE_KIND_VERTEX = 0,
  VL_STATE_KIND_BOUNDARY = 1,
  VL_STATE_KIND_INTERIOR = 2,
} VlStateKind;

typedef enum VlClassification {
  VL_CLASSIFICATION_ASYMPTOTICALLY_STABLE = 0,
  VL_CLASSIFICATION_UNSTABLE = 1,
  VL_CLASSIFICATION_INCONCLUSIVE = 2,
} VlClassification;

/**
 * Opaque advantage matrix.
 */
typedef struct VlMatrix VlMatrix;

/**
 * Opaque list of rest points.
 */
typedef struct VlRestPoints VlRestPoints;

/**
 * Scalar summary of one rest point.
 */
typedef struct VlRestPointInfo {
  enum VlStateKind kind;
  enum VlClassification classification;
  double residual;
  double largest_modulus;
} VlRestPointInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next `vl_*` call on the same thread.
 */
const char *vl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *vl_version(void);

/**
 * Builds a validated matrix from `n * n` row-major entries.
 *
 * # Safety
 * `entries` must point to `n * n` doubles; `out` must be writable.
 */
enum VlStatus vl_matrix_new(const double *entries, size_t n, struct VlMatrix **out);

/**
 * Two grammars: `a1` is G1's advantage over G2, `a2` the converse.
 *
 * # Safety
 * `out` must be writable.
 */
enum VlStatus vl_matrix_two_grammar(double a1, double a2, struct VlMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VlStatus vl_matrix_babelian(size_t n, double a, struct VlMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VlStatus vl_matrix_symmetric(double a, double b, double c, struct VlMatrix **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum VlStatus vl_matrix_quasi_babelian(double a, double b, struct VlMatrix **out);

/**
 * Parses the JSON matrix format (`entries` or `regions`).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum VlStatus vl_matrix_from_json(const char *json, struct VlMatrix **out);

/**
 * # Safety
 * `m` must be NULL or a handle from a `vl_matrix_*` constructor, freed once.
 */
void vl_matrix_free(struct VlMatrix *m);

/**
 * Number of grammars, or 0 for NULL.
 *
 * # Safety
 * `m` must be NULL or a live handle.
 */
size_t vl_matrix_dim(const struct VlMatrix *m);

/**
 * Copies the `n * n` row-major entries into `out`.
 *
 * # Safety
 * `m` must be a live handle; `out` must hold `out_len` doubles.
 */
enum VlStatus vl_matrix_entries(const struct VlMatrix *m, double *out, size_t out_len);

/**
 * Whether every off-diagonal entry is positive.
 *
 * # Safety
 * `m` must be a live handle; `proper` must be writable.
 */
enum VlStatus vl_matrix_is_proper(const struct VlMatrix *m, bool *proper);

/**
 * Penalty probabilities `c` at population `p` (both length `n`).
 *
 * # Safety
 * `m` must be a live handle; `p` and `out` must hold `n` doubles.
 */
enum VlStatus vl_penalties(const struct VlMatrix *m, const double *p, size_t n, double *out);

/**
 * One step of the reliable-learner map.
 *
 * # Safety
 * `m` must be a live handle; `p` and `out` must hold `n` doubles.
 */
enum VlStatus vl_reliable_map(const struct VlMatrix *m, const double *p, size_t n, double *out);

/**
 * Deterministic trajectory; writes `(generations + 1) * n` values, generation-major.
 *
 * # Safety
 * `m` must be a live handle; `p0` must hold `n` doubles and `out` `out_len`.
 */
enum VlStatus vl_trajectory(const struct VlMatrix *m,
                            const double *p0,
                            size_t n,
                            size_t generations,
                            double *out,
                            size_t out_len);

/**
 * Stochastic generations of LRP learner ensembles; output layout as [`vl_trajectory`].
 *
 * # Safety
 * `m` must be a live handle; `p0` must hold `n` doubles and `out` `out_len`.
 */
enum VlStatus vl_generational_simulation(const struct VlMatrix *m,
                                         const double *p0,
                                         size_t n,
                                         size_t generations,
                                         double gamma,
                                         uint64_t tokens,
                                         size_t learners,
                                         uint64_t seed,
                                         double *out,
                                         size_t out_len);

/**
 * Final grammar probabilities of one LRP learner exposed to `tokens` inputs from `p`.
 *
 * # Safety
 * `m` must be a live handle; `p` and `out` must hold `n` doubles.
 */
enum VlStatus vl_lrp_learner(const struct VlMatrix *m,
                             const double *p,
                             size_t n,
                             double gamma,
                             uint64_t tokens,
                             uint64_t seed,
                             double *out);

/**
 * Chart-Jacobian eigenvalue moduli at `p`, descending; writes `n - 1` values.
 *
 * # Safety
 * `m` must be a live handle; `p` must hold `n` doubles and `out` `n - 1`.
 */
enum VlStatus vl_eigen_moduli(const struct VlMatrix *m, const double *p, size_t n, double *out);

/**
 * Locates and classifies all rest points; vertices come first.
 *
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
enum VlStatus vl_rest_points_find(const struct VlMatrix *m, double tol, struct VlRestPoints **out);

/**
 * # Safety
 * `r` must be NULL or a live handle.
 */
size_t vl_rest_points_count(const struct VlRestPoints *r);

/**
 * Copies the location of rest point `index` (length = number of grammars).
 *
 * # Safety
 * `r` must be a live handle; `out` must hold `out_len` doubles.
 */
enum VlStatus vl_rest_points_location(const struct VlRestPoints *r,
                                      size_t index,
                                      double *out,
                                      size_t out_len);

/**
 * # Safety
 * `r` must be a live handle; `info` must be writable.
 */
enum VlStatus vl_rest_points_info(const struct VlRestPoints *r,
                                  size_t index,
                                  struct VlRestPointInfo *info);

/**
 * # Safety
 * `r` must be NULL or a handle from [`vl_rest_points_find`], freed once.
 */
void vl_rest_points_free(struct VlRestPoints *r);

/**
 * Quasi-Babelian orbit sweep. Writes `3 * count` limit coordinates and the
 * bifurcation estimate (NaN when no grid point reaches the first vertex).
 *
 * # Safety
 * `rho` must hold `count` doubles, `start` 3, `limits` `limits_len`;
 * `estimate` must be writable.
 */
enum VlStatus vl_bifurcation_sweep(double a,
                                   const double *rho,
                                   size_t count,
                                   size_t burn_in,
                                   const double *start,
                                   double *limits,
                                   size_t limits_len,
                                   double *estimate);

/**
 * Penalties `(G11, G10, G01, G00)` of the built-in two-parameter grammar space.
 *
 * # Safety
 * `out` must hold 4 doubles.
 */
enum VlStatus vl_npl_penalties(double x1, double x2, double *out);

/**
 * Population parameter probabilities over NPL generations on the built-in
 * grammar space; writes `2 * (generations + 1)` values, generation-major.
 *
 * # Safety
 * `x0` must hold 2 doubles and `out` `out_len`.
 */
enum VlStatus vl_npl_generations(const double *x0,
                                 size_t generations,
                                 double gamma,
                                 uint64_t tokens,
                                 size_t learners,
                                 uint64_t seed,
                                 double *out,
                                 size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VARLEARN_H */
