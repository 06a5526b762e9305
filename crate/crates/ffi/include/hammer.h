#ifndef HAMMER_H
#define HAMMER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Prover verdict.
 */
typedef enum HammerAtpStatus {
  HAMMER_ATP_STATUS_THEOREM = 0,
  HAMMER_ATP_STATUS_COUNTER_SATISFIABLE = 1,
  HAMMER_ATP_STATUS_TIMEOUT = 2,
  HAMMER_ATP_STATUS_GAVE_UP = 3,
  HAMMER_ATP_STATUS_ERROR = 4,
} HammerAtpStatus;

/**
 * Result code of every fallible call.
 */
typedef enum HammerStatus {
  HAMMER_STATUS_OK = 0,
  HAMMER_STATUS_NULL_ARGUMENT = 1,
  HAMMER_STATUS_INVALID_UTF8 = 2,
  HAMMER_STATUS_PARSE = 3,
  HAMMER_STATUS_UNKNOWN_NAME = 4,
  HAMMER_STATUS_NOT_A_PROP = 5,
  HAMMER_STATUS_TRANSLATE = 6,
  HAMMER_STATUS_INVALID_JSON = 7,
  HAMMER_STATUS_PROVER = 8,
  HAMMER_STATUS_RECONSTRUCT_FAILED = 9,
  HAMMER_STATUS_PANIC = 10,
} HammerStatus;

/**
 * A parsed development.
 */
typedef struct HammerEnv HammerEnv;

/**
 * A translated first-order problem.
 */
typedef struct HammerProblem HammerProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *hammer_last_error(void);

/**
 * Library version, a static string.
 */
const char *hammer_version(void);

/**
 * Parses a development in the export syntax.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum HammerStatus hammer_env_parse(const char *source, struct HammerEnv **out);

/**
 * Number of declarations; 0 for a null handle.
 *
 * # Safety
 * `env` must be null or a live handle from [`hammer_env_parse`].
 */
size_t hammer_env_len(const struct HammerEnv *env);

/**
 * # Safety
 * `env` must be null or a live handle, not used afterwards.
 */
void hammer_env_free(struct HammerEnv *env);

/**
 * Builds the first-order problem for `conjecture`. `premises_json` is a
 * JSON array of declaration names, or null for every earlier declaration.
 *
 * # Safety
 * `env` must be a live handle, strings NUL-terminated or null where
 * allowed, `out` writable.
 */
enum HammerStatus hammer_translate(const struct HammerEnv *env,
                                   const char *conjecture,
                                   const char *premises_json,
                                   size_t depth,
                                   struct HammerProblem **out);

/**
 * Number of axioms, the conjecture excluded; 0 for a null handle.
 *
 * # Safety
 * `problem` must be null or a live handle.
 */
size_t hammer_problem_axiom_count(const struct HammerProblem *problem);

/**
 * The problem as TPTP text.
 *
 * # Safety
 * `problem` must be a live handle and `out` writable.
 */
enum HammerStatus hammer_problem_tptp(const struct HammerProblem *problem, char **out);

/**
 * # Safety
 * `problem` must be null or a live handle, not used afterwards.
 */
void hammer_problem_free(struct HammerProblem *problem);

/**
 * Runs a prover: null `prover` or `"builtin"` for the built-in one,
 * otherwise a command template with `{file}` and `{t}`. Writes the verdict
 * and a JSON report with `status`, `labels`, `lemmas` and `unfolds`; the
 * report doubles as hints for [`hammer_reconstruct`].
 *
 * # Safety
 * `problem` must be a live handle, `prover` NUL-terminated or null, the
 * out-pointers writable.
 */
enum HammerStatus hammer_prove(const struct HammerProblem *problem,
                               const char *prover,
                               double timeout_seconds,
                               enum HammerAtpStatus *status,
                               char **report_json);

/**
 * Re-proves `conjecture` intuitionistically and writes the replayed proof
 * trace as JSON. `hints_json` has optional `lemmas` and `unfolds` arrays,
 * or is null; `depth` 0 searches without a bound.
 *
 * # Safety
 * `env` must be a live handle, strings NUL-terminated or null where
 * allowed, `trace_json` writable.
 */
enum HammerStatus hammer_reconstruct(const struct HammerEnv *env,
                                     const char *conjecture,
                                     const char *hints_json,
                                     size_t depth,
                                     double timeout_seconds,
                                     char **trace_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not used
 * afterwards.
 */
void hammer_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAMMER_H */
