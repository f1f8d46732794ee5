#ifndef CDZERO_H
#define CDZERO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes. Nonzero values match the exit codes of the `cdzero` CLI
 * where a library error class exists.
 */
typedef enum CdzStatus {
  CDZ_STATUS_OK = 0,
  CDZ_STATUS_NULL_POINTER = 1,
  CDZ_STATUS_PARSE = 2,
  CDZ_STATUS_LEVEL = 3,
  CDZ_STATUS_PRECONDITION = 4,
  CDZ_STATUS_NUMERICAL = 5,
  CDZ_STATUS_INVALID_UTF8 = 6,
  CDZ_STATUS_PANIC = 7,
} CdzStatus;

/**
 * Opaque element handle.
 */
typedef struct CdzElement CdzElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses `text` (e.g. `"e1 - 1/2 e10"`) as an element of level `level`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CdzStatus cdz_element_parse(uint32_t level, const char *text, struct CdzElement **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `e` must come from this library and not have been freed.
 */
void cdz_element_free(struct CdzElement *e);

/**
 * Level of the element, or 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live handle.
 */
uint32_t cdz_element_level(const struct CdzElement *e);

/**
 * Canonical text form, released with `cdz_string_free`.
 *
 * # Safety
 * `e` must be a live handle and `out` a valid pointer.
 */
enum CdzStatus cdz_element_to_string(const struct CdzElement *e, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void cdz_string_free(char *s);

/**
 * `out = a b`. Both operands must have the same level.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a valid pointer.
 */
enum CdzStatus cdz_multiply(const struct CdzElement *a,
                            const struct CdzElement *b,
                            struct CdzElement **out);

/**
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CdzStatus cdz_conjugate(const struct CdzElement *a, struct CdzElement **out);

/**
 * `a~ = a e~0`; requires level >= 1.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CdzStatus cdz_tilde(const struct CdzElement *a, struct CdzElement **out);

/**
 * Swaps the two halves; requires level >= 1.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CdzStatus cdz_hat(const struct CdzElement *a, struct CdzElement **out);

/**
 * Spectrum report of a doubly pure element as JSON, released with
 * `cdz_string_free`. `tol` is the eigenvalue clustering tolerance.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CdzStatus cdz_spectrum_json(const struct CdzElement *a, double tol, char **out);

/**
 * Dimension of the kernel of left multiplication by `a`.
 *
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CdzStatus cdz_annihilator_dim(const struct CdzElement *a, size_t *out);

/**
 * Message of the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cdz_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CDZERO_H */
