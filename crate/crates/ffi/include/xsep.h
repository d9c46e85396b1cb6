#ifndef XSEP_H
#define XSEP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XsepStatus {
  XSEP_STATUS_OK = 0,
  XSEP_STATUS_NULL_POINTER = 1,
  XSEP_STATUS_INVALID_INPUT = 2,
  XSEP_STATUS_PRECONDITION = 3,
  XSEP_STATUS_COST_GUARD = 4,
  XSEP_STATUS_NUMERICAL = 5,
  XSEP_STATUS_PANIC = 6,
} XsepStatus;

typedef enum XsepOutcome {
  XSEP_OUTCOME_SEPARABLE = 0,
  XSEP_OUTCOME_ENTANGLED = 1,
  XSEP_OUTCOME_PPT_ENTANGLED = 2,
  XSEP_OUTCOME_UNDECIDED = 3,
} XsepOutcome;

/**
 * Optimization settings.
 */
typedef struct XsepConfig XsepConfig;

/**
 * An X-state or a dense state.
 */
typedef struct XsepState XsepState;

/**
 * Result of a separability decision.
 */
typedef struct XsepVerdict XsepVerdict;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *xsep_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xsep_version(void);

struct XsepConfig *xsep_config_new(uint64_t seed);

/**
 * # Safety
 * `config` must be NULL or a handle from [`xsep_config_new`] not yet freed.
 */
void xsep_config_free(struct XsepConfig *config);

/**
 * # Safety
 * `config` must be a live handle.
 */
enum XsepStatus xsep_config_set_grid(struct XsepConfig *config, size_t grid);

/**
 * Builds `X(a, c)` on `n` qubits. `diag`, `anti_re` and `anti_im` each hold
 * `2^n` entries in index order; the anti-diagonal must satisfy
 * `c_ī = conj(c_i)`.
 *
 * # Safety
 * The arrays must be readable for `2^n` doubles and `out` writable.
 */
enum XsepStatus xsep_state_new_x(size_t n,
                                 const double *diag,
                                 const double *anti_re,
                                 const double *anti_im,
                                 struct XsepState **out);

/**
 * Parses a state file in the JSON format read by the `xsep` command line.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum XsepStatus xsep_state_from_json(const char *json, struct XsepState **out);

/**
 * # Safety
 * `state` must be NULL or a live handle.
 */
void xsep_state_free(struct XsepState *state);

/**
 * Number of qubits, or 0 for NULL.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t xsep_state_qubits(const struct XsepState *state);

/**
 * Decides separability of an X-state, or applies the X-part criterion to a
 * dense state. `config` may be NULL for defaults.
 *
 * # Safety
 * Handles must be live; `out` writable.
 */
enum XsepStatus xsep_decide(const struct XsepState *state,
                            const struct XsepConfig *config,
                            struct XsepVerdict **out);

/**
 * # Safety
 * `verdict` must be NULL or a live handle.
 */
void xsep_verdict_free(struct XsepVerdict *verdict);

/**
 * # Safety
 * `verdict` must be a live handle.
 */
enum XsepOutcome xsep_verdict_outcome(const struct XsepVerdict *verdict);

/**
 * True when a dense state's X-part passed the separability criterion.
 *
 * # Safety
 * `verdict` must be a live handle.
 */
bool xsep_verdict_criterion_passed(const struct XsepVerdict *verdict);

/**
 * The verdict with its certificate as JSON. Free with [`xsep_string_free`].
 *
 * # Safety
 * `verdict` must be a live handle.
 */
char *xsep_verdict_to_json(const struct XsepVerdict *verdict);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void xsep_string_free(char *s);

/**
 * Enclosure `[lower, upper]` of `δ_n(s)` for nonnegative `s` of length `2^n`.
 *
 * # Safety
 * `s` readable for `2^n` doubles; `lower` and `upper` writable.
 */
enum XsepStatus xsep_delta(size_t n,
                           const double *s,
                           const struct XsepConfig *config,
                           double *lower,
                           double *upper);

/**
 * Enclosure of `‖u‖_X_n`; `re` and `im` hold all `2^n` entries of `u`.
 *
 * # Safety
 * Arrays readable for `2^n` doubles; `lower` and `upper` writable.
 */
enum XsepStatus xsep_xnorm(size_t n,
                           const double *re,
                           const double *im,
                           const struct XsepConfig *config,
                           double *lower,
                           double *upper);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XSEP_H */
