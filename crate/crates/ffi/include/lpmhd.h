#ifndef LPMHD_H
#define LPMHD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LpmhdStatus {
  LPMHD_STATUS_OK = 0,
  LPMHD_STATUS_NULL_POINTER = 1,
  LPMHD_STATUS_INVALID_ARGUMENT = 2,
  LPMHD_STATUS_CONFIG = 3,
  LPMHD_STATUS_NUMERICAL = 4,
  LPMHD_STATUS_OUT_OF_RANGE = 5,
  LPMHD_STATUS_NOT_RUN = 6,
  LPMHD_STATUS_PANIC = 7,
} LpmhdStatus;

typedef struct LpmhdField LpmhdField;

typedef struct LpmhdGrid LpmhdGrid;

typedef struct LpmhdSimulation LpmhdSimulation;

// One diagnostics row; reference columns are NaN without a reference run.
typedef struct LpmhdRecord {
  double t;
  double energy;
  double grad_u_sup;
  double hess_u_sup;
  double b_sup;
  double grad_b_sup;
  double omega_plus_j_b0;
  double omega_minus_j_b0;
  double j_b1;
  double int_hess_u;
  double int_lipschitz;
  double int_omega_plus_j;
  double int_omega_minus_j;
  double int_j_b1_sq;
  double u_l2_b2;
  double delta_b1;
  double e_sup;
  double v_l2_b2;
  double phi;
  double tail_fraction;
} LpmhdRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or NULL. Valid until the
// next call into this library on the same thread.
const char *lpmhd_last_error(void);

// Square periodic grid with `n` points per side and side `length`.
//
// # Safety
// `out` must be valid for writes.
enum LpmhdStatus lpmhd_grid_new(size_t n, double length, struct LpmhdGrid **out);

// # Safety
// `grid` must come from [`lpmhd_grid_new`] and not be freed twice.
void lpmhd_grid_free(struct LpmhdGrid *grid);

// Scalar field from `len = n*n` values in row-major order (index i1*n + i2).
//
// # Safety
// `values` must point to `len` readable doubles; `out` must be writable.
enum LpmhdStatus lpmhd_field_from_values(const struct LpmhdGrid *grid,
                                         const double *values,
                                         size_t len,
                                         struct LpmhdField **out);

// Copies the grid values of `field` into `buf`, which must hold n*n doubles.
//
// # Safety
// `buf` must point to `len` writable doubles.
enum LpmhdStatus lpmhd_field_values(const struct LpmhdField *field, double *buf, size_t len);

// # Safety
// `field` must come from [`lpmhd_field_from_values`] and not be freed twice.
void lpmhd_field_free(struct LpmhdField *field);

// B^s_{p,r} norm; `p` must be 2 or INFINITY and `r` 1 or INFINITY.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LpmhdStatus lpmhd_besov_norm(const struct LpmhdField *field,
                                  double s,
                                  double p,
                                  double r,
                                  double *out);

// Lifespan lower bound in terms of ‖u₀‖ (prefactor and ratio) and ‖b₀‖.
//
// # Safety
// `out` must be writable.
enum LpmhdStatus lpmhd_lifespan_bound_new(double u0_norm, double b0_norm, double c, double *out);

// Lifespan lower bound in terms of the (u₀, b₀) pair norms.
//
// # Safety
// `out` must be writable.
enum LpmhdStatus lpmhd_lifespan_bound_old(double pair_b2,
                                          double pair_b1,
                                          double b0_norm,
                                          double c,
                                          double *out);

// C V₀ exp(C t V₀ exp(C t V₀)); INFINITY on overflow.
//
// # Safety
// `out` must be writable.
enum LpmhdStatus lpmhd_euler_growth_bound(double v0, double t, double c, double *out);

// First time with ∫₀ᵗ E² ≥ e0 on the sampled series; `censored` is set to
// 1 when the threshold is never reached and the last time is returned.
//
// # Safety
// `times` and `e` must point to `len` doubles; outputs must be writable.
enum LpmhdStatus lpmhd_t_star(const double *times,
                              const double *e,
                              size_t len,
                              double e0,
                              double *t_star,
                              int32_t *censored);

// Simulation from a TOML configuration string; nothing runs until
// [`lpmhd_simulation_run`].
//
// # Safety
// `config` must be a NUL-terminated string; `out` must be writable.
enum LpmhdStatus lpmhd_simulation_new(const char *config, struct LpmhdSimulation **out);

// Integrates to `t_end` or an earlier stop. Returns `Numerical` when the
// run ended in a numerical failure; records up to that point stay readable.
//
// # Safety
// `sim` must be a live handle not used concurrently from another thread.
enum LpmhdStatus lpmhd_simulation_run(struct LpmhdSimulation *sim);

// # Safety
// `sim` must be a live handle; `out` writable.
enum LpmhdStatus lpmhd_simulation_record_count(const struct LpmhdSimulation *sim, size_t *out);

// # Safety
// `sim` must be a live handle; `out` writable.
enum LpmhdStatus lpmhd_simulation_record(const struct LpmhdSimulation *sim,
                                         size_t index,
                                         struct LpmhdRecord *out);

// # Safety
// `sim` must come from [`lpmhd_simulation_new`] and not be freed twice.
void lpmhd_simulation_free(struct LpmhdSimulation *sim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPMHD_H */
