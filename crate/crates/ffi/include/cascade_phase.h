#ifndef CASCADE_PHASE_H
#define CASCADE_PHASE_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpColumn {
  CP_COLUMN_TAU = 0,
  CP_COLUMN_X = 1,
  CP_COLUMN_Y = 2,
  CP_COLUMN_PHI_PANCHARATNAM = 3,
  CP_COLUMN_PHI_DYNAMICAL = 4,
  CP_COLUMN_PHI_GEOMETRIC = 5,
  CP_COLUMN_PHI_EQ5 = 6,
  CP_COLUMN_RHO11 = 7,
  CP_COLUMN_RHO22 = 8,
  CP_COLUMN_RHO33 = 9,
  CP_COLUMN_NORM_ERROR = 10,
} CpColumn;

typedef enum CpEngine {
  CP_ENGINE_ANALYTIC = 0,
  CP_ENGINE_NUMERIC = 1,
} CpEngine;

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_ARGUMENT = 2,
  CP_STATUS_CONFIG = 3,
  CP_STATUS_NUMERICAL = 4,
  CP_STATUS_IO = 5,
  CP_STATUS_PANIC = 6,
} CpStatus;

/**
 * Opaque scenario configuration.
 */
typedef struct CpConfig CpConfig;

/**
 * Opaque phase time series.
 */
typedef struct CpSeries CpSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cp_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call into the library from the same thread.
 */
const char *cp_last_error_message(void);

/**
 * New configuration: `alpha = 5, r = 0, theta = 0, delta = 0`, moving atom
 * with `p = 1`, `tau` in `[0, 8 pi]` at 2000 points.
 */
struct CpConfig *cp_config_new(void);

void cp_config_free(struct CpConfig *cfg);

enum CpStatus cp_config_set_alpha(struct CpConfig *cfg, double alpha);

enum CpStatus cp_config_set_r(struct CpConfig *cfg, double r);

/**
 * Atomic superposition angle in radians.
 */
enum CpStatus cp_config_set_theta(struct CpConfig *cfg, double theta);

enum CpStatus cp_config_set_delta(struct CpConfig *cfg, double delta);

enum CpStatus cp_config_set_epsilon_tail(struct CpConfig *cfg, double epsilon_tail);

/**
 * Internal integration step; zero or negative restores the default.
 */
enum CpStatus cp_config_set_dt(struct CpConfig *cfg, double dt);

/**
 * Moving atom with mode-shape parameter `p`.
 */
enum CpStatus cp_config_set_moving(struct CpConfig *cfg, uint32_t p);

/**
 * Atom at rest (unit mode shape).
 */
enum CpStatus cp_config_set_neglected(struct CpConfig *cfg);

/**
 * Output grid of `steps` points over `[0, tau_max]`.
 */
enum CpStatus cp_config_set_grid(struct CpConfig *cfg, double tau_max, size_t steps);

/**
 * Fix the photon cutoff; zero restores the automatic choice.
 */
enum CpStatus cp_config_set_n_max(struct CpConfig *cfg, size_t n_max);

/**
 * Check the configuration without running anything.
 */
enum CpStatus cp_config_validate(const struct CpConfig *cfg);

/**
 * Run one engine and store the resulting series in `*out`.
 */
enum CpStatus cp_run(const struct CpConfig *cfg, enum CpEngine engine, struct CpSeries **out);

/**
 * Largest `|z_numeric - z_analytic|` over the grid, written to
 * `*max_abs`. Returns `CP_STATUS_NUMERICAL` (with `*max_abs` still set)
 * if it exceeds `tolerance`.
 */
enum CpStatus cp_compare(const struct CpConfig *cfg, double tolerance, double *max_abs);

void cp_series_free(struct CpSeries *series);

/**
 * Number of grid points; zero for a null handle.
 */
size_t cp_series_len(const struct CpSeries *series);

/**
 * Copy one column into `buf` of length `len`, which must equal
 * `cp_series_len`. Undefined entries (phase gaps, populations of the
 * closed-form engine) are NaN.
 */
enum CpStatus cp_series_column(const struct CpSeries *series,
                               enum CpColumn column,
                               double *buf,
                               size_t len);

/**
 * Write the series as CSV to the UTF-8 path `path`.
 */
enum CpStatus cp_series_write_csv(const struct CpSeries *series,
                                  const char *path,
                                  bool emit_unwrapped);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CASCADE_PHASE_H */
