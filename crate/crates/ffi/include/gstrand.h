#ifndef GSTRAND_H
#define GSTRAND_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>

/**
 * Result codes shared by all functions.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_ARGUMENT = 2,
  GS_STATUS_UNKNOWN_ALGEBRA = 3,
  GS_STATUS_DIMENSION_MISMATCH = 4,
  GS_STATUS_CONFIG = 5,
  GS_STATUS_BLOW_UP = 6,
  GS_STATUS_UNSUPPORTED = 7,
  GS_STATUS_IO = 8,
  GS_STATUS_PANIC = 9,
} GsStatus;

/**
 * Opaque Lie algebra table.
 */
typedef struct GsAlgebra GsAlgebra;

/**
 * Opaque simulation handle.
 */
typedef struct GsSimulation GsSimulation;

/**
 * Roots and classification of a dispersion relation at one wavenumber.
 */
typedef struct GsDispersion {
  double k;
  double roots_re[6];
  double roots_im[6];
  double max_growth;
  bool stable;
} GsDispersion;

/**
 * Diagnostics of the current simulation state. Quantities that do not
 * apply to the model are NaN.
 */
typedef struct GsDiagnostics {
  double t;
  double c1;
  double c2;
  double c3;
  double energy;
  double mu_par_err;
} GsDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *gs_last_error_message(void);

/**
 * Build the catalog algebra named by `tag` (so3, sl2r, so4, se3, g2r).
 *
 * # Safety
 * `tag` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_algebra_new(const char *tag, struct GsAlgebra **out);

/**
 * # Safety
 * `alg` must come from [`gs_algebra_new`] and not be used afterwards.
 */
void gs_algebra_free(struct GsAlgebra *alg);

/**
 * Dimension of the algebra, 0 for a null handle.
 *
 * # Safety
 * `alg` must be null or a live handle.
 */
size_t gs_algebra_dim(const struct GsAlgebra *alg);

/**
 * Run the exact structural checks; `passed` receives the verdict.
 *
 * # Safety
 * `alg` must be a live handle and `passed` a valid pointer.
 */
enum GsStatus gs_algebra_validate(const struct GsAlgebra *alg, bool *passed);

/**
 * `out = [x, y]`; all three arrays hold `len` = dim coefficients.
 *
 * # Safety
 * Pointers must be valid for `len` doubles; `out` may not alias `x` or `y`.
 */
enum GsStatus gs_algebra_bracket(const struct GsAlgebra *alg,
                                 const double *x,
                                 const double *y,
                                 double *out,
                                 size_t len);

/**
 * Invariant pairing `<x, y>`.
 *
 * # Safety
 * `x` and `y` must be valid for `len` doubles and `out` a valid pointer.
 */
enum GsStatus gs_algebra_pairing(const struct GsAlgebra *alg,
                                 const double *x,
                                 const double *y,
                                 size_t len,
                                 double *out);

/**
 * Dispersion roots of the so(3) equilibrium `(m A, n A)` at wavenumber `k`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GsStatus gs_dispersion_so3(double m,
                                double n,
                                double a,
                                double r,
                                double k,
                                struct GsDispersion *out);

/**
 * Dispersion roots of the sl(2,R) equilibrium at the origin.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum GsStatus gs_dispersion_sl2r(double a, double r, double k, struct GsDispersion *out);

/**
 * Create a simulation from configuration text (the CLI config format).
 *
 * # Safety
 * `config` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GsStatus gs_simulation_new(const char *config, struct GsSimulation **out);

/**
 * # Safety
 * `sim` must come from [`gs_simulation_new`] and not be used afterwards.
 */
void gs_simulation_free(struct GsSimulation *sim);

/**
 * Grid points, algebra dimension, total steps and step size.
 *
 * # Safety
 * `sim` must be a live handle; output pointers may be null to skip them.
 */
enum GsStatus gs_simulation_shape(const struct GsSimulation *sim,
                                  size_t *points,
                                  size_t *dim,
                                  size_t *total_steps,
                                  double *dt);

/**
 * Advance up to `count` RK4 steps; `taken` receives the number done
 * (fewer at the end of the run). On blow-up the state stays at the last
 * finite step.
 *
 * # Safety
 * `sim` must be a live handle; `taken` may be null.
 */
enum GsStatus gs_simulation_step(struct GsSimulation *sim, size_t count, size_t *taken);

/**
 * Copy the current fields, point-major (`points * dim` doubles each).
 * Either destination may be null.
 *
 * # Safety
 * Non-null destinations must be valid for `len` doubles.
 */
enum GsStatus gs_simulation_copy_fields(const struct GsSimulation *sim,
                                        double *mu,
                                        double *gamma,
                                        size_t len);

/**
 * Diagnostics of the current state.
 *
 * # Safety
 * `sim` must be a live handle and `out` a valid pointer.
 */
enum GsStatus gs_simulation_diagnostics(const struct GsSimulation *sim, struct GsDiagnostics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSTRAND_H */
