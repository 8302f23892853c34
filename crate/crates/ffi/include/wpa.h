#ifndef WPA_H
#define WPA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WpaStatus {
  WPA_STATUS_OK = 0,
  WPA_STATUS_NULL_POINTER = 1,
  WPA_STATUS_INVALID_UTF8 = 2,
  WPA_STATUS_PARSE = 3,
  WPA_STATUS_BUDGET_EXCEEDED = 4,
  WPA_STATUS_SEARCH_EXHAUSTED = 5,
  WPA_STATUS_BAD_MODULUS = 6,
  WPA_STATUS_JSON = 7,
  WPA_STATUS_DIMENSION_MISMATCH = 8,
  WPA_STATUS_INTERNAL = 9,
} WpaStatus;

/**
 * Opaque solution set.
 */
typedef struct WpaChain WpaChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Decides `formula`. A negative `max_neg` means no negation budget.
 * On success `*out_chain` receives the solution set, `*out_sat` 1 or 0 and
 * `*out_weight` the negation count. `out_weight` may be null.
 *
 * # Safety
 * `formula` must be a NUL-terminated string; the out-pointers must be
 * valid for writes.
 */
enum WpaStatus wpa_decide(const char *formula,
                          int64_t max_neg,
                          struct WpaChain **out_chain,
                          int32_t *out_sat,
                          uint32_t *out_weight);

/**
 * # Safety
 * `chain` must come from this library; `out` must be valid for writes.
 */
enum WpaStatus wpa_chain_is_satisfiable(const struct WpaChain *chain, int32_t *out);

/**
 * Ambient dimension of the set, or 0 for a null handle.
 *
 * # Safety
 * `chain` must be null or come from this library.
 */
size_t wpa_chain_dim(const struct WpaChain *chain);

/**
 * Membership of the point `point[0..len]`; `len` must equal the dimension.
 *
 * # Safety
 * `point` must be valid for `len` reads (it may be null when `len` is 0).
 */
enum WpaStatus wpa_chain_contains(const struct WpaChain *chain,
                                  const int64_t *point,
                                  size_t len,
                                  int32_t *out);

/**
 * A member of the set as a JSON array of decimal strings, or `null` when
 * the set is empty.
 *
 * # Safety
 * `chain` must come from this library; `out` must be valid for writes.
 */
enum WpaStatus wpa_chain_witness_json(const struct WpaChain *chain, char **out);

/**
 * # Safety
 * `chain` must come from this library; `out` must be valid for writes.
 */
enum WpaStatus wpa_chain_to_json(const struct WpaChain *chain, char **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum WpaStatus wpa_chain_from_json(const char *json, struct WpaChain **out);

/**
 * Formula text for the non-congruence system given as `m1:r1,m2:r2,...`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum WpaStatus wpa_gen_noncong(const char *spec, char **out);

/**
 * # Safety
 * `chain` must be null or come from this library, and not be used again.
 */
void wpa_chain_free(struct WpaChain *chain);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void wpa_string_free(char *s);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next library call on this thread.
 */
const char *wpa_last_error_message(void);

/**
 * Stable name of a status code.
 */
const char *wpa_status_name(enum WpaStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WPA_H */
