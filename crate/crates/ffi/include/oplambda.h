/* C interface for the oplambda benchmark harness. */

#ifndef OPLAMBDA_H
#define OPLAMBDA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

enum OplAlgorithm
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  OPL_ALGORITHM_STATIC = 0,
  OPL_ALGORITHM_ONE_FIFTH = 1,
  OPL_ALGORITHM_TWO_RATE = 2,
  OPL_ALGORITHM_Q_LEARNING = 3,
  OPL_ALGORITHM_HYBRID_Q_LEARNING = 4,
};
#ifndef __cplusplus
typedef int32_t OplAlgorithm;
#endif // __cplusplus

enum OplProblemKind
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  OPL_PROBLEM_KIND_ONE_MAX = 0,
  /**
   * Classic variant: all-ones target, identity index order.
   */
  OPL_PROBLEM_KIND_LEADING_ONES = 1,
  /**
   * Block-majority transform; `k` must be odd.
   */
  OPL_PROBLEM_KIND_NEUTRALITY = 2,
  /**
   * Plateau transform with plateau size `k`.
   */
  OPL_PROBLEM_KIND_PLATEAU = 3,
  /**
   * Adjacent-level swap transform adding local optima.
   */
  OPL_PROBLEM_KIND_RUGGEDNESS = 4,
};
#ifndef __cplusplus
typedef int32_t OplProblemKind;
#endif // __cplusplus

/**
 * Status codes returned by every fallible entry point.
 */
enum OplStatus
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  OPL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  OPL_STATUS_NULL_POINTER = -1,
  /**
   * An argument failed validation (dimension, probability, bit value...).
   */
  OPL_STATUS_INVALID_ARGUMENT = -2,
  /**
   * Unexpected internal failure.
   */
  OPL_STATUS_INTERNAL = -3,
};
#ifndef __cplusplus
typedef int32_t OplStatus;
#endif // __cplusplus

enum OplUpdateRule
#ifdef __cplusplus
  : int32_t
#endif // __cplusplus
 {
  OPL_UPDATE_RULE_STRICT = 0,
  OPL_UPDATE_RULE_NON_STRICT = 1,
};
#ifndef __cplusplus
typedef int32_t OplUpdateRule;
#endif // __cplusplus

/**
 * Opaque problem instance; create with `opl_problem_new` or
 * `opl_problem_new_leading_ones_instance`, release with `opl_problem_free`.
 */
typedef struct OplProblem OplProblem;

/**
 * Run parameters. Obtain defaults with `opl_run_config_default`, then set
 * at least `p_min` (e.g. `1.0 / n`) and the fields you want to vary.
 */
typedef struct OplRunConfig {
  /**
   * Offspring population size; must be at least 1.
   */
  uint64_t lambda;
  /**
   * Lower mutation-rate bound in (0, 1/2]; the upper bound is 1/2.
   */
  double p_min;
  OplUpdateRule rule;
  /**
   * Multiplicative rate increase factor (> 1).
   */
  double up;
  /**
   * Multiplicative rate decrease factor (in (0, 1)).
   */
  double down;
  /**
   * Q-learning learning rate.
   */
  double alpha;
  /**
   * Q-learning discount factor.
   */
  double gamma;
  uint64_t seed;
  /**
   * Generation cap; 0 selects the scaled default `10^6 * n / lambda`.
   */
  uint64_t budget;
} OplRunConfig;

/**
 * Outcome of one run.
 */
typedef struct OplRunResult {
  /**
   * Generations until an optimum was first evaluated (or the cap).
   */
  uint64_t generations;
  /**
   * Fitness evaluations: `1 + generations * lambda`.
   */
  uint64_t evaluations;
  uint64_t final_fitness;
  /**
   * 1 when an optimal point was evaluated within the budget.
   */
  uint8_t hit_optimum;
} OplRunResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *opl_version(void);

/**
 * Creates a problem instance. `k` is the block/plateau size and is ignored
 * by onemax, leadingones and ruggedness. Returns a handle through `out`.
 *
 * # Safety
 * `out` must be a valid pointer. The returned handle must be released with
 * `opl_problem_free` exactly once.
 */
OplStatus opl_problem_new(OplProblemKind kind, uint64_t n, uint64_t k, struct OplProblem **out);

/**
 * Creates a LeadingOnes instance whose target string and index order are
 * drawn deterministically from `instance_seed`.
 *
 * # Safety
 * Same contract as `opl_problem_new`.
 */
OplStatus opl_problem_new_leading_ones_instance(uint64_t n,
                                                uint64_t instance_seed,
                                                struct OplProblem **out);

/**
 * Releases a problem handle; a null pointer is a no-op.
 *
 * # Safety
 * `problem` must have been returned by a constructor of this library and
 * not freed before.
 */
void opl_problem_free(struct OplProblem *problem);

/**
 * Problem dimension `n`; 0 when the handle is null.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
uint64_t opl_problem_dimension(const struct OplProblem *problem);

/**
 * Largest attainable fitness value; 0 when the handle is null.
 *
 * # Safety
 * `problem` must be a live handle or null.
 */
uint64_t opl_problem_optimum(const struct OplProblem *problem);

/**
 * Evaluates a point given as `len` bytes each 0 or 1; `len` must equal the
 * problem dimension.
 *
 * # Safety
 * `problem` must be a live handle; `bits` must point to `len` readable
 * bytes; `out_fitness` must be a valid pointer.
 */
OplStatus opl_problem_evaluate(const struct OplProblem *problem,
                               const uint8_t *bits,
                               size_t len,
                               uint64_t *out_fitness);

/**
 * Fills `out` with the standard defaults: lambda 1, strict rule, factors
 * 2 and 1/2, learning rate 0.8, discount 0.2, seed 0, default budget.
 * `p_min` is set to 0 and MUST be overwritten by the caller.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
OplStatus opl_run_config_default(struct OplRunConfig *out);

/**
 * Runs the chosen algorithm on `problem` until an optimal point is first
 * evaluated or the generation budget is exhausted, and fills `out`.
 *
 * # Safety
 * `problem`, `cfg` and `out` must be valid pointers.
 */
OplStatus opl_run(const struct OplProblem *problem,
                  OplAlgorithm algorithm,
                  const struct OplRunConfig *cfg,
                  struct OplRunResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OPLAMBDA_H */
