#ifndef CUCB_H
#define CUCB_H

/* Generated by cbindgen from crates/cucb-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum cucb_status {
  CUCB_STATUS_OK = 0,
  // A required pointer argument was null.
  CUCB_STATUS_NULL_ARGUMENT = 1,
  // An argument was out of range (bad arm index, bad policy kind, ...).
  CUCB_STATUS_INVALID_ARGUMENT = 2,
  // The model could not be built or loaded.
  CUCB_STATUS_MODEL_ERROR = 3,
  // A reward value matched no entry of the pseudo-reward table.
  CUCB_STATUS_UNKNOWN_REWARD = 4,
  // The model has no unique optimal arm.
  CUCB_STATUS_NO_UNIQUE_OPTIMUM = 5,
  // A bound or lower-bound construction failed.
  CUCB_STATUS_ANALYSIS_ERROR = 6,
  // A string argument was not valid UTF-8.
  CUCB_STATUS_UTF8_ERROR = 7,
} cucb_status;

// Policy identifiers accepted by `cucb_policy_new` and
// `cucb_run_episode`.
typedef enum cucb_policy_kind {
  CUCB_POLICY_KIND_UCB1 = 0,
  CUCB_POLICY_KIND_CUCB = 1,
} cucb_policy_kind;

// Opaque: a latent model together with its precomputed pseudo-reward
// table.
typedef struct cucb_model cucb_model;

// Opaque: one policy instance (UCB1 or C-UCB) with its empirical state.
typedef struct cucb_policy cucb_policy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread. The pointer
// stays valid until the next failing call on the same thread; never free
// it.
const char *cucb_last_error(void);

// Crate version as a static NUL-terminated string.
const char *cucb_version(void);

// Build a model (and its pseudo-reward table) from a JSON model
// document. `quantum <= 0` selects the default reward-equality
// tolerance. On success `*out` owns the handle.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum cucb_status cucb_model_from_json(const char *json, double quantum, struct cucb_model **out);

// Build a built-in scenario by name (see the CLI `scenarios` listing).
// `grid = 0` keeps the scenario's default resolution.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum cucb_status cucb_model_from_scenario(const char *name,
                                          size_t grid,
                                          double quantum,
                                          struct cucb_model **out);

// Release a model handle. Null is a no-op.
//
// # Safety
// `model` must be a handle from a `cucb_model_*` constructor, not yet
// freed.
void cucb_model_free(struct cucb_model *model);

// # Safety
// `model` must be a live handle.
size_t cucb_model_num_arms(const struct cucb_model *model);

// # Safety
// `model` must be a live handle.
size_t cucb_model_num_outcomes(const struct cucb_model *model);

// # Safety
// `model` must be a live handle.
double cucb_model_reward_span(const struct cucb_model *model);

// Mean reward of one arm.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum cucb_status cucb_model_mean(const struct cucb_model *model, size_t arm, double *out);

// Classify every arm against the optimal arm.
//
// Writes the optimal arm to `*k_star`; when non-null, `pseudo_gaps` (K*K
// doubles, row-major, entry `l*K + k` holding `mu_k - phi_{l,k}`) and
// `kinds` (K ints: 0 optimal, 1 competitive, 2 non-competitive) are
// filled.
//
// # Safety
// `model` must be a live handle; `k_star` must be valid; `pseudo_gaps`
// and `kinds`, when non-null, must point to buffers of K*K doubles and K
// ints respectively.
enum cucb_status cucb_model_classify(const struct cucb_model *model,
                                     size_t *k_star,
                                     double *pseudo_gaps,
                                     int *kinds);

// Instance-dependent lower-bound rate (per log horizon): zero when no
// arm is competitive.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer.
enum cucb_status cucb_model_lower_bound(const struct cucb_model *model, double *out);

// Create a fresh policy for a model. `kind` is a `cucb_policy_kind`
// value.
//
// # Safety
// `model` must be a live handle and `out` a valid pointer. The policy
// does not borrow the model; it may outlive it.
enum cucb_status cucb_policy_new(const struct cucb_model *model,
                                 int kind,
                                 struct cucb_policy **out);

// Release a policy handle. Null is a no-op.
//
// # Safety
// `policy` must be a handle from `cucb_policy_new`, not yet freed.
void cucb_policy_free(struct cucb_policy *policy);

// Arm the policy would pull this round. Selection is deterministic and
// does not advance the state.
//
// # Safety
// `policy` must be a live handle and `arm` a valid pointer.
enum cucb_status cucb_policy_select(const struct cucb_policy *policy, size_t *arm);

// Fold an observed reward for `arm` into the policy state.
//
// # Safety
// `policy` must be a live handle.
enum cucb_status cucb_policy_update(struct cucb_policy *policy, size_t arm, double reward);

// Completed rounds (total pulls) of the policy.
//
// # Safety
// `policy` must be a live handle.
uint64_t cucb_policy_round(const struct cucb_policy *policy);

// Pull count of one arm.
//
// # Safety
// `policy` must be a live handle and `out` a valid pointer.
enum cucb_status cucb_policy_pulls(const struct cucb_policy *policy, size_t arm, uint64_t *out);

// Run one seeded episode of `horizon` rounds and report the final
// cumulative regret; when `pulls` is non-null it receives the per-arm
// pull counts (K entries). Same seed, same result.
//
// # Safety
// `model` must be a live handle, `final_regret` valid, and `pulls`
// either null or a buffer of K `uint64_t`.
enum cucb_status cucb_run_episode(const struct cucb_model *model,
                                  int kind,
                                  uint64_t horizon,
                                  uint64_t seed,
                                  double *final_regret,
                                  uint64_t *pulls);

// Upper bound on the expected pulls of a non-competitive arm with `arms`
// arms, threshold round `t0`, and horizon `horizon`.
//
// # Safety
// `out` must be a valid pointer.
enum cucb_status cucb_bound_noncompetitive(size_t arms, uint64_t horizon, double t0, double *out);

// Upper bound on the expected pulls of a competitive arm with gap
// `delta`, minimum gap `delta_min`, `arms` arms, and horizon `horizon`.
//
// # Safety
// `out` must be a valid pointer.
enum cucb_status cucb_bound_competitive(size_t arms,
                                        uint64_t horizon,
                                        double delta,
                                        double delta_min,
                                        double *out);

// Worst-case expected-regret bound `3K sqrt(K T ln T) + 3K beta
// sqrt(T ln T / K)`.
double cucb_bound_worst_case(size_t arms, double horizon, double beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUCB_H */
