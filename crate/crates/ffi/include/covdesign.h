#ifndef COVDESIGN_H
#define COVDESIGN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define COV_FAMILY_PDS 0

#define COV_FAMILY_SFSD 1

#define COV_FAMILY_PROPOSED 2

#define COV_METHOD_RANDOM 0

#define COV_METHOD_LHS 1

#define COV_METHOD_SOBOL 2

#define COV_METHOD_PDS_DART 3

#define COV_METHOD_SFSD 4

#define COV_METHOD_PROPOSED 5

#define COV_SCHEDULE_ALR 0

#define COV_SCHEDULE_CLR 1

#define COV_FUNCTION_ALPINE1 0

#define COV_FUNCTION_ACKLEY 1

typedef enum CovStatus {
  COV_STATUS_OK = 0,
  COV_STATUS_INVALID_ARGUMENT = 1,
  COV_STATUS_INFEASIBLE = 2,
  COV_STATUS_PARTIAL_DESIGN = 3,
  COV_STATUS_NUMERICAL = 4,
  COV_STATUS_IO = 5,
  COV_STATUS_PANIC = 6,
} CovStatus;

/**
 * `n` points in `[0, 1]^d`, row-major.
 */
typedef struct CovPointSet CovPointSet;

/**
 * Result of a coverage search.
 */
typedef struct CovReport CovReport;

/**
 * PCF parameters; `family` is one of the `COV_FAMILY_*` constants.
 */
typedef struct CovPcfParams {
  uint32_t family;
  double r_min;
  double r_1;
  double p0;
  double a;
  double b;
  double c;
  double phase;
} CovPcfParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *cov_version(void);

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * failing call on the same thread.
 */
const char *cov_last_error(void);

/**
 * Largest realizable coverage radius for `family` at `(n, d)`. `p0` may be
 * NULL with `p0_len == 0` to search the default peak grid.
 *
 * # Safety
 * `p0` must point to `p0_len` doubles; `out` must be a valid pointer.
 */
enum CovStatus cov_design_search(size_t n,
                                 size_t d,
                                 uint32_t family_code,
                                 const double *p0,
                                 size_t p0_len,
                                 struct CovReport **out);

/**
 * Relative radius of `report`, NaN for a NULL handle.
 *
 * # Safety
 * `report` must be NULL or a live handle.
 */
double cov_report_rho(const struct CovReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum CovStatus cov_report_params(const struct CovReport *report, struct CovPcfParams *out);

/**
 * # Safety
 * `report` must be NULL or a handle not yet freed.
 */
void cov_report_free(struct CovReport *report);

/**
 * Writes `P(k)` at `m_k` evenly spaced angular wavenumbers in
 * `[k_min, k_max]` to `out`.
 *
 * # Safety
 * `params` must be valid and `out` must hold `m_k` doubles.
 */
enum CovStatus cov_pcf_to_psd(const struct CovPcfParams *params,
                              size_t n,
                              size_t d,
                              double k_min,
                              double k_max,
                              size_t m_k,
                              double *out);

/**
 * Generates a design with one of the `COV_METHOD_*` methods. Synthesized
 * methods run the coverage search first.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CovStatus cov_generate(uint32_t method_code,
                            size_t n,
                            size_t d,
                            uint64_t seed,
                            struct CovPointSet **out);

/**
 * Synthesizes points matching the PCF of `report` with `t_max` iterations.
 * `final_objective` may be NULL.
 *
 * # Safety
 * `report` must be a live handle, `out` a valid pointer.
 */
enum CovStatus cov_synthesize(const struct CovReport *report,
                              uint64_t seed,
                              size_t t_max,
                              uint32_t schedule_code,
                              struct CovPointSet **out,
                              double *final_objective);

/**
 * Copies `n * d` row-major coordinates into a new point set.
 *
 * # Safety
 * `coords` must point to `n * d` doubles; `out` must be a valid pointer.
 */
enum CovStatus cov_pointset_new(const double *coords, size_t n, size_t d, struct CovPointSet **out);

/**
 * Number of points, 0 for a NULL handle.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
size_t cov_pointset_n(const struct CovPointSet *points);

/**
 * Dimension, 0 for a NULL handle.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
size_t cov_pointset_d(const struct CovPointSet *points);

/**
 * Row-major coordinates, owned by the handle and valid until it is freed.
 *
 * # Safety
 * `points` must be NULL or a live handle.
 */
const double *cov_pointset_coords(const struct CovPointSet *points);

/**
 * # Safety
 * `points` must be a live handle and `out` a valid pointer.
 */
enum CovStatus cov_min_distance(const struct CovPointSet *points, double *out);

/**
 * # Safety
 * `points` must be NULL or a handle not yet freed.
 */
void cov_pointset_free(struct CovPointSet *points);

/**
 * Blind-exploration recovery MSE with the default KNN oracle over `trials`
 * designs seeded `seed, seed + 1, ...`.
 *
 * # Safety
 * `mse_mean` and `mse_std` must be valid pointers.
 */
enum CovStatus cov_blind_eval(uint32_t method_code,
                              uint32_t function_code,
                              size_t n,
                              size_t d,
                              size_t trials,
                              uint64_t seed,
                              double *mse_mean,
                              double *mse_std);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COVDESIGN_H */
