#ifndef SNAPCX_H
#define SNAPCX_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum ScxStatus {
  SCX_STATUS_OK = 0,
  SCX_STATUS_NULL_POINTER = 1,
  SCX_STATUS_INVALID_ARGUMENT = 2,
  SCX_STATUS_PARSE_ERROR = 3,
  SCX_STATUS_PRECONDITION = 4,
  SCX_STATUS_OVERFLOW = 5,
  SCX_STATUS_COLLAPSE_STUCK = 6,
  /**
   * A verification ran and at least one check failed.
   */
  SCX_STATUS_CHECK_FAILED = 7,
  SCX_STATUS_BUFFER_TOO_SMALL = 8,
  SCX_STATUS_INTERNAL = 9,
} ScxStatus;

/**
 * A built complex `P(r)`.
 */
typedef struct ScxComplex ScxComplex;

/**
 * A round counter.
 */
typedef struct ScxCounter ScxCounter;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a counter in the comma syntax (`"2,x,1"`).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ScxStatus scx_counter_parse(const char *text, struct ScxCounter **out);

/**
 * Build a counter from `len` values; `UINT32_MAX` marks an absent process.
 *
 * # Safety
 * `values` must point to `len` readable integers (or be null with `len == 0`).
 */
enum ScxStatus scx_counter_from_values(const uint32_t *values, size_t len, struct ScxCounter **out);

/**
 * # Safety
 * `counter` must come from this library and not be used afterwards.
 */
void scx_counter_free(struct ScxCounter *counter);

/**
 * The counter in comma syntax.
 *
 * # Safety
 * `counter` must be a live handle and `out` writable.
 */
enum ScxStatus scx_counter_to_string(const struct ScxCounter *counter, char **out);

/**
 * Number of top simplices of `P(r)` by the counting recursion.
 *
 * # Safety
 * `counter` must be a live handle and `out` writable.
 */
enum ScxStatus scx_count_top(const struct ScxCounter *counter, uint64_t *out);

/**
 * Build `P(r)`.
 *
 * # Safety
 * `counter` must be a live handle and `out` writable.
 */
enum ScxStatus scx_complex_build(const struct ScxCounter *counter, struct ScxComplex **out);

/**
 * # Safety
 * `complex` must come from this library and not be used afterwards.
 */
void scx_complex_free(struct ScxComplex *complex);

/**
 * Dimension, or -2 for a null handle.
 *
 * # Safety
 * `complex` must be null or a live handle.
 */
int64_t scx_complex_dim(const struct ScxComplex *complex);

/**
 * Number of simplices including the empty one, or 0 for a null handle.
 *
 * # Safety
 * `complex` must be null or a live handle.
 */
size_t scx_complex_len(const struct ScxComplex *complex);

/**
 * Write the f-vector, starting with the empty simplex, into `buf`. `len`
 * receives the needed length even when `cap` is too small.
 *
 * # Safety
 * `buf` must have room for `cap` values (or be null with `cap == 0`); `len`
 * must be writable.
 */
enum ScxStatus scx_complex_f_vector(const struct ScxComplex *complex,
                                    uint64_t *buf,
                                    size_t cap,
                                    size_t *len);

/**
 * The complex as JSON.
 *
 * # Safety
 * `complex` must be a live handle and `out` writable.
 */
enum ScxStatus scx_complex_to_json(const struct ScxComplex *complex, char **out);

/**
 * The dual graph in DOT.
 *
 * # Safety
 * `complex` must be a live handle and `out` writable.
 */
enum ScxStatus scx_complex_to_dot(const struct ScxComplex *complex, char **out);

/**
 * Run checks by name (comma separated, null for all) and return the reports
 * as JSON lines in `out`. Returns `CheckFailed` when any check failed.
 *
 * # Safety
 * `counter` must be a live handle, `checks` null or a NUL-terminated string,
 * `out` writable.
 */
enum ScxStatus scx_verify(const struct ScxCounter *counter, const char *checks, char **out);

/**
 * Collapse `P(r)` to a vertex; `out` receives
 * `{"steps":[{"free","coface"}],"residual":[...]}`.
 *
 * # Safety
 * `counter` must be a live handle and `out` writable.
 */
enum ScxStatus scx_collapse(const struct ScxCounter *counter, char **out);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on this thread.
 */
const char *scx_last_error(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed only once.
 */
void scx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SNAPCX_H */
