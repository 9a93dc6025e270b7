/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef ARCHETYPE_H
#define ARCHETYPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ArchetypeStatus {
  ARCHETYPE_STATUS_OK = 0,
  ARCHETYPE_STATUS_NULL_POINTER = 1,
  ARCHETYPE_STATUS_INVALID_ARGUMENT = 2,
  ARCHETYPE_STATUS_DIMENSION = 3,
  ARCHETYPE_STATUS_NON_FINITE = 4,
  ARCHETYPE_STATUS_SOLVER_ABORT = 5,
  ARCHETYPE_STATUS_NO_CONVERGENCE = 6,
  ARCHETYPE_STATUS_BUFFER_TOO_SMALL = 7,
  ARCHETYPE_STATUS_PANIC = 8,
} ArchetypeStatus;

// Result of a fit. Opaque; release with [`archetype_fit_free`].
typedef struct ArchetypeFit ArchetypeFit;

// Solver settings. Obtain defaults from [`archetype_options_default`].
typedef struct ArchetypeOptions {
  double alpha;
  // Outer stopping threshold on the squared change of the archetypes.
  double tol;
  // Flow time of the inner solver.
  double tau;
  uint64_t max_iters;
  uint64_t seed;
  // Extreme-point preprocessing: 0 automatic, 1 on, 2 off.
  int32_t caratheodory;
} ArchetypeOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

struct ArchetypeOptions archetype_options_default(void);

// Fits `k` archetypes to `n` points of dimension `dim`.
//
// `init` is null for random data-point initialization, or `k × dim`
// starting archetypes. `options` may be null for defaults. On success
// `*out` receives a new handle.
//
// # Safety
// `points` must hold `n * dim` doubles, `init` (when non-null) `k * dim`
// doubles, `options` must be null or valid, and `out` must be writable.
enum ArchetypeStatus archetype_fit(const double *points,
                                   size_t n,
                                   size_t dim,
                                   size_t k,
                                   const double *init,
                                   const struct ArchetypeOptions *options,
                                   struct ArchetypeFit **out);

// # Safety
// `fit` must be null or a handle from [`archetype_fit`] not yet freed.
void archetype_fit_free(struct ArchetypeFit *fit);

// Writes `k`, the dimension, the iteration count, the trace length and
// the convergence flag; any pointer may be null.
//
// # Safety
// `fit` must be a live handle; non-null outputs must be writable.
enum ArchetypeStatus archetype_fit_info(const struct ArchetypeFit *fit,
                                        size_t *k,
                                        size_t *dim,
                                        size_t *iterations,
                                        size_t *trace_len,
                                        bool *converged);

// Final objective value.
//
// # Safety
// `fit` must be a live handle and `out` writable.
enum ArchetypeStatus archetype_fit_objective(const struct ArchetypeFit *fit, double *out);

// Copies the archetypes, one per row (`k × dim`).
//
// # Safety
// `fit` must be a live handle and `out` must hold `len` doubles.
enum ArchetypeStatus archetype_fit_archetypes(const struct ArchetypeFit *fit,
                                              double *out,
                                              size_t len);

// Copies the objective after initialization and after each iteration.
//
// # Safety
// `fit` must be a live handle and `out` must hold `len` doubles.
enum ArchetypeStatus archetype_fit_trace(const struct ArchetypeFit *fit, double *out, size_t len);

// Euclidean projection of `v` onto the probability simplex.
//
// # Safety
// `v` and `out` must each hold `len` doubles.
enum ArchetypeStatus archetype_project_simplex(const double *v, size_t len, double *out);

// Bottleneck matching distance between two sets of `k` points.
//
// # Safety
// `a` and `b` must each hold `k * dim` doubles; `out` must be writable.
enum ArchetypeStatus archetype_d2_infty(const double *a,
                                        const double *b,
                                        size_t k,
                                        size_t dim,
                                        double *out);

// Hausdorff distance between `na` and `nb` points.
//
// # Safety
// `a` must hold `na * dim` doubles, `b` `nb * dim`; `out` must be writable.
enum ArchetypeStatus archetype_hausdorff(const double *a,
                                         size_t na,
                                         const double *b,
                                         size_t nb,
                                         size_t dim,
                                         double *out);

// Disk-sector integral `I(alpha)` for `alpha` in `[0, pi]`.
//
// # Safety
// `out` must be writable.
enum ArchetypeStatus archetype_sector_integral(double alpha, double *out);

// Message for the last failed call on this thread; empty after a
// success. Valid until the next call on the same thread.
const char *archetype_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *archetype_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ARCHETYPE_H */
