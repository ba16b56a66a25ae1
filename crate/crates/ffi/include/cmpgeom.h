#ifndef CMPGEOM_H
#define CMPGEOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every `cg_*` call.
 */
typedef enum CgStatus {
  CG_STATUS_OK = 0,
  CG_STATUS_NULL_POINTER = 1,
  CG_STATUS_INVALID_INPUT = 2,
  CG_STATUS_AMBIGUOUS_GEODESIC = 3,
  CG_STATUS_NUMERICAL_INFEASIBILITY = 4,
  CG_STATUS_SEARCH_FAILURE = 5,
  CG_STATUS_HYPOTHESIS_VIOLATION = 6,
  CG_STATUS_REFINEMENT_STALL = 7,
  /**
   * The search finished without finding what was asked for.
   */
  CG_STATUS_NOT_FOUND = 8,
  CG_STATUS_PANIC = 9,
} CgStatus;

/**
 * Why a refinement trace ended.
 */
typedef enum CgTraceStatus {
  CG_TRACE_STATUS_LOCAL_CONTRADICTION_REACHED = 0,
  CG_TRACE_STATUS_MAX_ITERS = 1,
  CG_TRACE_STATUS_STALLED = 2,
} CgTraceStatus;

/**
 * Opaque polyhedral space.
 */
typedef struct CgSpace CgSpace;

/**
 * Opaque refinement trace.
 */
typedef struct CgTrace CgTrace;

/**
 * A point of a space. On a cone `a` is the apex distance and `b` the angle
 * in `[0, θ)`; on a doubled polygon `(a, b)` are planar coordinates and
 * `sheet` is 0 (top) or 1 (bottom).
 */
typedef struct CgPoint {
  double a;
  double b;
  int32_t sheet;
} CgPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next `cg_*` call on the same thread.
 */
const char *cg_last_error_message(void);

/**
 * Side opposite `gamma` in the model hinge with legs `a`, `b`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum CgStatus cg_side_from_sas(double k, double a, double b, double gamma, double *out);

/**
 * Model angle opposite side `c`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum CgStatus cg_angle_from_sss(double k, double a, double b, double c, double *out);

/**
 * The modified distance function `ρₖ(x)`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum CgStatus cg_rho_k(double k, double x, double *out);

/**
 * Euclidean cone of total angle `theta`.
 *
 * # Safety
 * `out` must be null or valid for writes. The handle must be released with
 * [`cg_space_free`].
 */
enum CgStatus cg_space_new_cone(double theta, struct CgSpace **out);

/**
 * Doubled convex polygon with `n` vertices given as `xy[2i], xy[2i+1]`.
 *
 * # Safety
 * `xy` must point to `2n` readable doubles and `out` must be null or valid
 * for writes. The handle must be released with [`cg_space_free`].
 */
enum CgStatus cg_space_new_dpoly(const double *xy, size_t n, struct CgSpace **out);

/**
 * Releases a space. Null is ignored.
 *
 * # Safety
 * `space` must be null or a handle from `cg_space_new_*` not yet freed.
 */
void cg_space_free(struct CgSpace *space);

/**
 * Intrinsic distance between two points of `space`.
 *
 * # Safety
 * `space` must be a live handle; `x`, `y` and `out` must each be null or
 * valid.
 */
enum CgStatus cg_space_distance(const struct CgSpace *space,
                                const struct CgPoint *x,
                                const struct CgPoint *y,
                                double *out);

/**
 * Searches for a triangle with a comparison-angle violation and refines it.
 *
 * On a cone the symmetric triangle at unit apex distance is tried first,
 * followed by `tries` random triangles drawn from `seed`. The loop stops
 * after `max_iters` steps or once the perimeter falls below
 * `peri_ratio × seed perimeter`. Returns [`CgStatus::NotFound`] and writes
 * null when no triangle violates the comparison.
 *
 * # Safety
 * `space` must be a live handle and `out` null or valid for writes. A
 * returned trace must be released with [`cg_trace_free`].
 */
enum CgStatus cg_refine_run(const struct CgSpace *space,
                            double k,
                            size_t max_iters,
                            double peri_ratio,
                            uint64_t seed,
                            size_t tries,
                            struct CgTrace **out);

/**
 * Number of triangles in the trace, the seed included; 0 for null.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t cg_trace_len(const struct CgTrace *trace);

/**
 * Why the trace ended.
 *
 * # Safety
 * `trace` must be a live handle and `out` null or valid for writes.
 */
enum CgStatus cg_trace_status(const struct CgTrace *trace, enum CgTraceStatus *out);

/**
 * Perimeter of triangle `i`.
 *
 * # Safety
 * `trace` must be a live handle and `out` null or valid for writes.
 */
enum CgStatus cg_trace_peri(const struct CgTrace *trace, size_t i, double *out);

/**
 * Shortest side of triangle `i`.
 *
 * # Safety
 * `trace` must be a live handle and `out` null or valid for writes.
 */
enum CgStatus cg_trace_min_side(const struct CgTrace *trace, size_t i, double *out);

/**
 * Cosine angle defect of triangle `i`.
 *
 * # Safety
 * `trace` must be a live handle and `out` null or valid for writes.
 */
enum CgStatus cg_trace_cos_defect(const struct CgTrace *trace, size_t i, double *out);

/**
 * Distance of triangle `i`'s vertices from the seed's vertex set.
 *
 * # Safety
 * `trace` must be a live handle and `out` null or valid for writes.
 */
enum CgStatus cg_trace_d1j(const struct CgTrace *trace, size_t i, double *out);

/**
 * The full trace as JSON, owned by the trace; null for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle. The string dies with the trace.
 */
const char *cg_trace_json(const struct CgTrace *trace);

/**
 * Releases a trace. Null is ignored.
 *
 * # Safety
 * `trace` must be null or a handle from [`cg_refine_run`] not yet freed.
 */
void cg_trace_free(struct CgTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMPGEOM_H */
