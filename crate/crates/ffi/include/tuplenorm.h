#ifndef TUPLENORM_H
#define TUPLENORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Values for the `command` argument of `tn_report_json`.
 */
typedef enum TnCommand {
  TN_COMMAND_NORM = 0,
  TN_COMMAND_DIST = 1,
  TN_COMMAND_BJ = 2,
  TN_COMMAND_RHO = 3,
  TN_COMMAND_SMOOTH = 4,
} TnCommand;

typedef enum TnStatus {
  TN_STATUS_OK = 0,
  TN_STATUS_NULL_POINTER = 1,
  TN_STATUS_INVALID_UTF8 = 2,
  TN_STATUS_PARSE = 3,
  TN_STATUS_INVALID_ARGUMENT = 4,
  TN_STATUS_DEGENERATE = 5,
  TN_STATUS_HYPOTHESIS_NOT_SATISFIED = 6,
  TN_STATUS_NO_CERTIFICATE = 7,
  TN_STATUS_PANIC = 8,
} TnStatus;

/**
 * Opaque instance: a tuple `𝒯` and a direction `𝒮` of the same shape.
 */
typedef struct TnInstance TnInstance;

/**
 * Numerical settings. Zero fields fall back to the defaults.
 */
typedef struct TnOptions {
  uint64_t seed;
  size_t starts;
  /**
   * Orthogonality tolerance.
   */
  double tol;
} TnOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next call on the same thread.
 */
const char *tn_last_error(void);

/**
 * Parse an instance document (UTF-8 JSON).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TnStatus tn_instance_from_json(const char *json, struct TnInstance **out);

/**
 * The two-component ℓ_2 example whose components share no maximizer.
 *
 * # Safety
 * `out` must be writable.
 */
enum TnStatus tn_instance_golden(struct TnInstance **out);

/**
 * # Safety
 * `inst` must come from this library and not be used afterwards. NULL is ignored.
 */
void tn_instance_free(struct TnInstance *inst);

/**
 * Number of components and domain dimension.
 *
 * # Safety
 * `inst` must be a live handle; outputs must be writable.
 */
enum TnStatus tn_instance_shape(const struct TnInstance *inst, size_t *d, size_t *dim);

/**
 * Serialize an instance back to its JSON document.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
enum TnStatus tn_instance_to_json(const struct TnInstance *inst, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void tn_string_free(char *s);

/**
 * Joint norm `‖𝒯‖`.
 *
 * # Safety
 * `inst` must be a live handle; `opts` may be NULL; `value` must be writable.
 */
enum TnStatus tn_norm(const struct TnInstance *inst, const struct TnOptions *opts, double *value);

/**
 * `dist(𝒯, 𝔽^d𝒮)`.
 *
 * # Safety
 * As for `tn_norm`.
 */
enum TnStatus tn_dist(const struct TnInstance *inst, const struct TnOptions *opts, double *value);

/**
 * Birkhoff-James orthogonality `𝒯 ⊥_B 𝔽^d𝒮`. `margin` is `dist − ‖𝒯‖`;
 * `certified` is 1 when an independently verified certificate was found.
 *
 * # Safety
 * As for `tn_norm`; `margin` and `certified` may be NULL.
 */
enum TnStatus tn_bj(const struct TnInstance *inst,
                    const struct TnOptions *opts,
                    int *orthogonal,
                    double *margin,
                    int *certified);

/**
 * One-sided derivatives `ρ−(𝒯, 𝒮) ≤ ρ+(𝒯, 𝒮)` by difference quotients.
 *
 * # Safety
 * As for `tn_norm`.
 */
enum TnStatus tn_rho(const struct TnInstance *inst,
                     const struct TnOptions *opts,
                     double *rho_minus,
                     double *rho_plus);

/**
 * Whether `𝒯` is smooth: one attainment orbit with a smooth image.
 *
 * # Safety
 * As for `tn_norm`.
 */
enum TnStatus tn_smooth(const struct TnInstance *inst, const struct TnOptions *opts, int *smooth);

/**
 * JSON report for one `TnCommand`, as printed by the CLI with `--json`.
 *
 * # Safety
 * As for `tn_norm`; free the result with `tn_string_free`.
 */
enum TnStatus tn_report_json(const struct TnInstance *inst,
                             int command,
                             const struct TnOptions *opts,
                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUPLENORM_H */
