#ifndef REGRETLAB_H
#define REGRETLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  RL_STATUS_INVALID_UTF8 = 2,
  RL_STATUS_PARSE = 3,
  RL_STATUS_INVALID_ARGUMENT = 4,
  RL_STATUS_DEGENERATE = 5,
  RL_STATUS_QUADRATURE = 6,
  RL_STATUS_TOO_LARGE = 7,
  RL_STATUS_WRONG_POLICY_KIND = 8,
  RL_STATUS_PANIC = 9,
} RlStatus;

/**
 * Opaque noise distribution.
 */
typedef struct RlDist RlDist;

/**
 * Opaque policy: either an offset rule or a binary randomized rule.
 */
typedef struct RlPolicy RlPolicy;

typedef struct RlOffsetProfile {
  double theta;
  double v_plus;
  double v_minus;
  double side_regret_pos;
  double side_regret_neg;
  double balance_gap;
  /**
   * Worst-case regret of the threshold at `theta`.
   */
  double regret;
  bool degenerate_pos;
  bool degenerate_neg;
} RlOffsetProfile;

typedef struct RlBoundReport {
  double bound;
  double quadrature_error;
  double offset_regret;
  double ratio;
  bool ratio_ok;
  uint64_t k;
  bool flipped;
  double theta;
} RlBoundReport;

typedef struct RlRegretEstimate {
  double value;
  /**
   * Zero for exact results.
   */
  double std_error;
  uint64_t samples;
  bool exact;
} RlRegretEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *rl_last_error_message(void);

/**
 * Parses a distribution from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RlStatus rl_dist_from_json(const char *json, struct RlDist **out);

/**
 * Slab approximation of the equal-revenue noise with parameter `c > 1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RlStatus rl_dist_equal_revenue(double c, size_t slabs, struct RlDist **out);

/**
 * Canonical JSON of a distribution; release it with [`rl_string_free`].
 *
 * # Safety
 * `d` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_dist_to_json(const struct RlDist *d, char **out);

/**
 * # Safety
 * `s` must be null or come from this library, and not be freed twice.
 */
void rl_string_free(char *s);

/**
 * # Safety
 * `d` must be null or come from this library, and not be freed twice.
 */
void rl_dist_free(struct RlDist *d);

/**
 * `Pr[a <= x]`.
 *
 * # Safety
 * `d` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_dist_prob_le(const struct RlDist *d, double x, double *out);

/**
 * # Safety
 * `d` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_dist_mean(const struct RlDist *d, double *out);

/**
 * Parses `{"offset": {...}}` or `{"binary": {...}}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RlStatus rl_policy_from_json(const char *json, struct RlPolicy **out);

/**
 * # Safety
 * `p` must be null or come from this library, and not be freed twice.
 */
void rl_policy_free(struct RlPolicy *p);

/**
 * # Safety
 * `d` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_theta(const struct RlDist *d, struct RlOffsetProfile *out);

/**
 * Worst-case regret of "pick iff s >= t" against a noiseless zero.
 *
 * # Safety
 * `d` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_threshold_regret(const struct RlDist *d, double t, double *out);

/**
 * Regret of a binary policy at value `v`.
 *
 * # Safety
 * `d` and `p` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_binary_regret(const struct RlDist *d,
                               const struct RlPolicy *p,
                               double v,
                               double *out);

/**
 * Supremum over `v` of the binary regret, and a value attaining it.
 *
 * # Safety
 * `d` and `p` must come from this library; the outputs must be valid.
 */
enum RlStatus rl_binary_worstcase(const struct RlDist *d,
                                  const struct RlPolicy *p,
                                  double *regret,
                                  double *worst_v);

/**
 * Certified lower bound on the optimal binary worst-case regret.
 *
 * # Safety
 * `d` must come from this library and `out` be a valid pointer.
 */
enum RlStatus rl_opt_lower_bound_binary(const struct RlDist *d, struct RlBoundReport *out);

/**
 * Exact regret of an offset policy at `values`.
 *
 * # Safety
 * `noises` and `values` must point to `n` elements; `p` must come from
 * this library and `out` be a valid pointer.
 */
enum RlStatus rl_regret_exact(const struct RlDist *const *noises,
                              const double *values,
                              size_t n,
                              const struct RlPolicy *p,
                              double *out);

/**
 * Seeded Monte Carlo regret of an offset policy at `values`.
 *
 * # Safety
 * `noises` and `values` must point to `n` elements; `p` must come from
 * this library and `out` be a valid pointer.
 */
enum RlStatus rl_mc_regret(const struct RlDist *const *noises,
                           const double *values,
                           size_t n,
                           const struct RlPolicy *p,
                           uint64_t samples,
                           uint64_t seed,
                           struct RlRegretEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGRETLAB_H */
