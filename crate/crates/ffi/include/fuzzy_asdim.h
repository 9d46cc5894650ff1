#ifndef FUZZY_ASDIM_H
#define FUZZY_ASDIM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum FzStatus {
  FZ_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  FZ_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  FZ_STATUS_INVALID_UTF8 = 2,
  FZ_STATUS_PARSE = 3,
  FZ_STATUS_DOMAIN = 4,
  FZ_STATUS_UNSUPPORTED = 5,
  FZ_STATUS_PRECONDITION = 6,
  FZ_STATUS_SEARCH_FAILURE = 7,
  FZ_STATUS_CERTIFICATION = 8,
  FZ_STATUS_DERIVATION = 9,
  FZ_STATUS_NON_ARCHIMEDEAN = 10,
  FZ_STATUS_IO = 11,
  FZ_STATUS_PANIC = 12,
} FzStatus;

/**
 * A certification report.
 */
typedef struct FzReport FzReport;

/**
 * A fuzzy metric space with its t-norm.
 */
typedef struct FzSpace FzSpace;

/**
 * A dimension witness: families of sets over a window.
 */
typedef struct FzWitness FzWitness;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * success. The pointer stays valid until the next call on the thread.
 */
const char *fz_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fz_string_free(char *s);

/**
 * Builds a built-in space (`standard`, `standard_reals`, `lattice:N`,
 * `pathological`, `reciprocal_product`, `ratio_minmax`, `ultrametric`).
 * `tnorm` may be null for the space's default, or `product`, `min`,
 * `lukasiewicz`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum FzStatus fz_space_new(const char *kind, const char *tnorm, struct FzSpace **out);

/**
 * # Safety
 * `space` must come from [`fz_space_new`] and not have been freed.
 */
void fz_space_free(struct FzSpace *space);

/**
 * Writes `M(x, y, t)` as a reduced `p/q` string. Points are rationals
 * (`"3"`, `"-1/2"`) or lattice tuples (`"(1,2)"`).
 *
 * # Safety
 * Pointers must be valid; the output string is owned by the caller.
 */
enum FzStatus fz_space_membership(const struct FzSpace *space,
                                  const char *x,
                                  const char *y,
                                  const char *t,
                                  char **out);

/**
 * Checks the fuzzy metric axioms over `window`. `t_grid` is a
 * comma-separated list of positive rationals, or null for `1/2,1,2,7`.
 *
 * # Safety
 * Pointers must be valid; the report is released with [`fz_report_free`].
 */
enum FzStatus fz_space_check_axioms(const struct FzSpace *space,
                                    const char *window,
                                    const char *t_grid,
                                    struct FzReport **out);

/**
 * Constructs a witness for `space` at scale `"r:t"` over `window`.
 *
 * # Safety
 * Pointers must be valid; the witness is released with [`fz_witness_free`].
 */
enum FzStatus fz_witness_construct(const struct FzSpace *space,
                                   const char *window,
                                   const char *scale,
                                   struct FzWitness **out);

/**
 * Reads a witness from its JSON form.
 *
 * # Safety
 * Pointers must be valid.
 */
enum FzStatus fz_witness_from_json(const char *json, struct FzWitness **out);

/**
 * Writes the witness as JSON.
 *
 * # Safety
 * Pointers must be valid; the output string is owned by the caller.
 */
enum FzStatus fz_witness_to_json(const struct FzWitness *witness, char **out);

/**
 * Number of families, `n + 1`. Returns 0 for a null handle.
 *
 * # Safety
 * `witness` must be null or valid.
 */
size_t fz_witness_family_count(const struct FzWitness *witness);

/**
 * Re-certifies a witness against `space`.
 *
 * # Safety
 * Pointers must be valid; the report is released with [`fz_report_free`].
 */
enum FzStatus fz_witness_verify(const struct FzSpace *space,
                                const struct FzWitness *witness,
                                struct FzReport **out);

/**
 * # Safety
 * `witness` must come from this library and not have been freed.
 */
void fz_witness_free(struct FzWitness *witness);

/**
 * Runs the witness-to-refinement chain at `"r:t"` over `window`, taking
 * witnesses from the built-in constructors.
 *
 * # Safety
 * Pointers must be valid; the report is released with [`fz_report_free`].
 */
enum FzStatus fz_pipeline_run(const struct FzSpace *space,
                              const char *window,
                              const char *scale,
                              struct FzReport **out);

/**
 * Least number of disjoint families needed at `"r:t"` on a window of at
 * most ten points, with members bounded at `bound` (null means `scale`).
 *
 * # Safety
 * Pointers must be valid.
 */
enum FzStatus fz_oracle_min_families(const struct FzSpace *space,
                                     const char *window,
                                     const char *scale,
                                     const char *bound,
                                     size_t *out);

/**
 * 1 when no record failed, 0 otherwise (including a null handle).
 *
 * # Safety
 * `report` must be null or valid.
 */
int32_t fz_report_passed(const struct FzReport *report);

/**
 * Number of records in the report.
 *
 * # Safety
 * `report` must be null or valid.
 */
size_t fz_report_len(const struct FzReport *report);

/**
 * Writes the report as JSON lines, one record per line.
 *
 * # Safety
 * Pointers must be valid; the output string is owned by the caller.
 */
enum FzStatus fz_report_to_jsonl(const struct FzReport *report, char **out);

/**
 * # Safety
 * `report` must come from this library and not have been freed.
 */
void fz_report_free(struct FzReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUZZY_ASDIM_H */
