#ifndef BLINDCOUNTER_H
#define BLINDCOUNTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Oracle outcome.
 */
typedef enum BcaOracleResult {
  BCA_ORACLE_RESULT_ACCEPT = 0,
  /**
   * Conclusive rejection: nothing accepting below an untouched cap.
   */
  BCA_ORACLE_RESULT_REJECT = 1,
  BCA_ORACLE_RESULT_UNKNOWN = 2,
} BcaOracleResult;

/**
 * Result code of every fallible call.
 */
typedef enum BcaStatus {
  BCA_STATUS_OK = 0,
  BCA_STATUS_NULL_POINTER = 1,
  BCA_STATUS_INVALID_UTF8 = 2,
  BCA_STATUS_PARSE_ERROR = 3,
  BCA_STATUS_WORD_ERROR = 4,
  BCA_STATUS_ELIMINATION_ERROR = 5,
  BCA_STATUS_DECISION_ERROR = 6,
  BCA_STATUS_ORACLE_ERROR = 7,
  BCA_STATUS_PANIC = 8,
} BcaStatus;

/**
 * Opaque automaton handle.
 */
typedef struct BcaAutomaton BcaAutomaton;

/**
 * Opaque decision result.
 */
typedef struct BcaVerdict BcaVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bca_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bca_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void bca_string_free(char *s);

/**
 * Parses an automaton from its text form.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum BcaStatus bca_automaton_parse(const char *source, struct BcaAutomaton **out);

/**
 * The built-in liminf automaton, ε-transitions included.
 *
 * # Safety
 * `out` must be a writable pointer.
 */
enum BcaStatus bca_automaton_liminf(struct BcaAutomaton **out);

/**
 * Releases an automaton. NULL is ignored.
 *
 * # Safety
 * `a` must come from this library and must not be used afterwards.
 */
void bca_automaton_free(struct BcaAutomaton *a);

/**
 * Number of well-formedness violations; 0 means the automaton is valid.
 *
 * # Safety
 * `a` must be a live automaton and `out` a writable pointer.
 */
enum BcaStatus bca_automaton_violation_count(const struct BcaAutomaton *a, size_t *out);

/**
 * A new automaton without ε-transitions accepting the same words.
 *
 * # Safety
 * `a` must be a live automaton and `out` a writable pointer.
 */
enum BcaStatus bca_automaton_eliminate_epsilon(const struct BcaAutomaton *a,
                                               struct BcaAutomaton **out);

/**
 * Text form of an automaton; release with `bca_string_free`.
 *
 * # Safety
 * `a` must be a live automaton and `out` a writable pointer.
 */
enum BcaStatus bca_automaton_to_text(const struct BcaAutomaton *a, char **out);

/**
 * Decides acceptance of the lasso `u|v` by a one-counter automaton
 * without ε-transitions. A `cutoff` of 0 selects the default.
 *
 * # Safety
 * `a` must be a live automaton, `word` a NUL-terminated string and `out`
 * a writable pointer.
 */
enum BcaStatus bca_decide(const struct BcaAutomaton *a,
                          const char *word,
                          uint64_t cutoff,
                          struct BcaVerdict **out);

/**
 * Releases a verdict. NULL is ignored.
 *
 * # Safety
 * `v` must come from this library and must not be used afterwards.
 */
void bca_verdict_free(struct BcaVerdict *v);

/**
 * Whether the word was accepted. False for NULL.
 *
 * # Safety
 * `v` must be NULL or a live verdict.
 */
bool bca_verdict_accepted(const struct BcaVerdict *v);

/**
 * Whether a witness run is attached. False for NULL.
 *
 * # Safety
 * `v` must be NULL or a live verdict.
 */
bool bca_verdict_has_witness(const struct BcaVerdict *v);

/**
 * Counter value needed to start the witness cycle, or 0 without witness.
 *
 * # Safety
 * `v` must be NULL or a live verdict.
 */
uint64_t bca_verdict_requirement(const struct BcaVerdict *v);

/**
 * The verdict as `key=value` lines; release with `bca_string_free`.
 *
 * # Safety
 * `v` must be a live verdict and `out` a writable pointer.
 */
enum BcaStatus bca_verdict_to_text(const struct BcaVerdict *v, char **out);

/**
 * Bounded brute-force acceptance check.
 *
 * # Safety
 * `a` must be a live automaton, `word` a NUL-terminated string and `out`
 * a writable pointer.
 */
enum BcaStatus bca_oracle(const struct BcaAutomaton *a,
                          const char *word,
                          uint64_t counter_cap,
                          size_t depth_cap,
                          enum BcaOracleResult *out);

/**
 * Checks, for the integer lasso `m0,m1|p0,p1`, that a finite liminf,
 * acceptance of its code and the block characterization coincide.
 *
 * # Safety
 * `sequence` must be a NUL-terminated string and `holds` a writable pointer.
 */
enum BcaStatus bca_reduction_check(const char *sequence, bool *holds);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLINDCOUNTER_H */
