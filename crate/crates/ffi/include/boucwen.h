#ifndef BOUCWEN_H
#define BOUCWEN_H

/* Generated by cbindgen from the boucwen-ffi sources; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BwStatus {
  BW_STATUS_OK = 0,
  BW_STATUS_NULL_POINTER = 1,
  /**
   * Parameters out of range, infeasible perturbation or bad length.
   */
  BW_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Integration blow-up or other numerical failure.
   */
  BW_STATUS_NUMERICAL = 3,
  /**
   * Output buffer too small.
   */
  BW_STATUS_BUFFER_TOO_SMALL = 4,
  BW_STATUS_PANIC = 5,
} BwStatus;

typedef enum BwChannel {
  BW_CHANNEL_TIME = 0,
  BW_CHANNEL_DISPLACEMENT = 1,
  BW_CHANNEL_VELOCITY = 2,
  BW_CHANNEL_ABS_ACCELERATION = 3,
  BW_CHANNEL_HYSTERETIC_VARIABLE = 4,
  BW_CHANNEL_HYSTERETIC_FORCE = 5,
  BW_CHANNEL_HYSTERETIC_ENERGY = 6,
} BwChannel;

/**
 * Synthetic accelerogram (opaque).
 */
typedef struct BwMotion BwMotion;

/**
 * Simulated response (opaque).
 */
typedef struct BwResponse BwResponse;

/**
 * Relative perturbation `Δ = {Δₙ, Δ₁, Δ₂}`.
 */
typedef struct BwPerturbation {
  double delta_n;
  double delta_1;
  double delta_2;
} BwPerturbation;

/**
 * Deviation metrics; `eps_star_*` is NaN when there is no interior
 * stationary point.
 */
typedef struct BwMetrics {
  double eps_1;
  double eps_star_1;
  double area_eps_1;
  double eps_2;
  double eps_star_2;
  double area_eps_2;
  double kappa;
} BwMetrics;

/**
 * Single-degree-of-freedom oscillator.
 */
typedef struct BwOscillator {
  double m;
  double c;
  double k;
  double alpha;
  double beta;
  double gamma;
  double n;
  double d_y;
} BwOscillator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into this library from the same thread.
 */
const char *bw_last_error(void);

/**
 * `r_max = (β + γ)^(−1/n)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BwStatus bw_r_max(double beta, double gamma, double n, double *out);

/**
 * Evolution rate `ṙ` for the given shape and yield displacement.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum BwStatus bw_r_dot(double beta,
                       double gamma,
                       double n,
                       double d_y,
                       double y_dot,
                       double r,
                       double *out);

/**
 * # Safety
 * `p` must be readable and `out` writable.
 */
enum BwStatus bw_metrics(double beta,
                         double gamma,
                         double n,
                         const struct BwPerturbation *p,
                         struct BwMetrics *out);

/**
 * Alternate shape `{β̄, γ̄, n̄}` for a perturbation.
 *
 * # Safety
 * `p` must be readable and the three outputs writable.
 */
enum BwStatus bw_alternate_params(double beta,
                                  double gamma,
                                  double n,
                                  const struct BwPerturbation *p,
                                  double *beta_out,
                                  double *gamma_out,
                                  double *n_out);

/**
 * Response to a sampled base acceleration (`accel[i]` at `i·record_dt`,
 * linearly interpolated) integrated with step `dt`.
 *
 * # Safety
 * `osc` readable, `accel` readable for `len` values, `out` writable.
 */
enum BwStatus bw_simulate_sdof(const struct BwOscillator *osc,
                               const double *accel,
                               size_t len,
                               double record_dt,
                               double dt,
                               struct BwResponse **out);

/**
 * Response to `amplitude · sin(omega t)` over `[0, duration]`.
 *
 * # Safety
 * `osc` readable, `out` writable.
 */
enum BwStatus bw_simulate_sdof_sine(const struct BwOscillator *osc,
                                    double amplitude,
                                    double omega,
                                    double duration,
                                    double dt,
                                    struct BwResponse **out);

/**
 * Number of samples; 0 for NULL.
 *
 * # Safety
 * `resp` must be NULL or a live response.
 */
size_t bw_response_len(const struct BwResponse *resp);

/**
 * Copy one channel into `buf`, which must hold `bw_response_len` values.
 *
 * # Safety
 * `resp` live, `buf` writable for `cap` values.
 */
enum BwStatus bw_response_copy(const struct BwResponse *resp,
                               enum BwChannel channel,
                               double *buf,
                               size_t cap);

/**
 * # Safety
 * `resp` must be NULL or returned by this library and not yet freed.
 */
void bw_response_free(struct BwResponse *resp);

/**
 * Park-Ang index of a response.
 *
 * # Safety
 * `resp` live, `out` writable.
 */
enum BwStatus bw_park_ang(const struct BwResponse *resp,
                          double y_ult,
                          double delta_e,
                          double f_y,
                          double *out);

/**
 * Range-normalized RMS error in percent.
 *
 * # Safety
 * `reference` and `test` readable for `len` values, `out` writable.
 */
enum BwStatus bw_nrmse(const double *reference, const double *test, size_t len, double *out);

/**
 * Synthesize one motion with the default medium-soil spectrum and
 * sampling. `pga_cap` in m/s²; pass 0 or a negative value for no cap.
 *
 * # Safety
 * `out` writable.
 */
enum BwStatus bw_motion_synthesize(uint64_t seed, double pga_cap, struct BwMotion **out);

/**
 * # Safety
 * `m` must be NULL or a live motion.
 */
size_t bw_motion_len(const struct BwMotion *m);

/**
 * Sample interval in seconds; NaN for NULL.
 *
 * # Safety
 * `m` must be NULL or a live motion.
 */
double bw_motion_dt(const struct BwMotion *m);

/**
 * Peak absolute acceleration in m/s²; NaN for NULL.
 *
 * # Safety
 * `m` must be NULL or a live motion.
 */
double bw_motion_pga(const struct BwMotion *m);

/**
 * # Safety
 * `m` live, `buf` writable for `cap` values.
 */
enum BwStatus bw_motion_copy(const struct BwMotion *m, double *buf, size_t cap);

/**
 * # Safety
 * `m` must be NULL or returned by this library and not yet freed.
 */
void bw_motion_free(struct BwMotion *m);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOUCWEN_H */
