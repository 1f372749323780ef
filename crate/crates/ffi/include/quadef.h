#ifndef QUADEF_H
#define QUADEF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Result of a C-interface call. Values 1 to 4 match the command-line exit codes.
 */
typedef enum QuadefStatus {
  QUADEF_STATUS_OK = 0,
  /*
   Malformed input text or unknown name.
   */
  QUADEF_STATUS_PARSE = 1,
  /*
   Well-formed input that violates a mathematical requirement.
   */
  QUADEF_STATUS_INVALID = 2,
  /*
   The Cech window is too small for a stable answer.
   */
  QUADEF_STATUS_UNSTABLE = 3,
  /*
   A construction failed its own verification.
   */
  QUADEF_STATUS_INTERNAL = 4,
  /*
   A required pointer argument was null.
   */
  QUADEF_STATUS_NULL_ARGUMENT = 5,
  /*
   Input text was not valid UTF-8.
   */
  QUADEF_STATUS_INVALID_UTF8 = 6,
  /*
   The engine panicked; this is a bug.
   */
  QUADEF_STATUS_PANIC = 7,
} QuadefStatus;

/*
 A parsed orthogonal or symplectic sheaf.
 */
typedef struct QuadefSheaf QuadefSheaf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *quadef_version(void);

/*
 Message of the last failure on this thread, or NULL if none. Valid until
 the next failing call on the same thread.
 */
const char *quadef_last_error_message(void);

/*
 Error class of the last failure on this thread (e.g. "DescentFailure"), or NULL.
 */
const char *quadef_last_error_kind(void);

/*
 Forgets the last error on this thread.
 */
void quadef_clear_error(void);

/*
 Parses a document into a new sheaf handle stored in `*out`.

 Only the shape and degrees are checked here; use [`quadef_sheaf_validate`]
 for the full set of conditions.

 # Safety
 `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QuadefStatus quadef_sheaf_parse(const char *text, struct QuadefSheaf **out);

/*
 Releases a handle. NULL is accepted.

 # Safety
 `sheaf` must come from [`quadef_sheaf_parse`] and not be freed twice.
 */
void quadef_sheaf_free(struct QuadefSheaf *sheaf);

/*
 Ambient dimension n of P^n, or 0 for a NULL handle.

 # Safety
 `sheaf` must be NULL or a live handle.
 */
uintptr_t quadef_sheaf_ambient_dim(const struct QuadefSheaf *sheaf);

/*
 Number of generators (rank of the degree-0 term), or 0 for a NULL handle.

 # Safety
 `sheaf` must be NULL or a live handle.
 */
uintptr_t quadef_sheaf_generators(const struct QuadefSheaf *sheaf);

/*
 Checks the complex, symmetry, descent and nondegeneracy conditions.

 # Safety
 `sheaf` must be a live handle.
 */
enum QuadefStatus quadef_sheaf_validate(const struct QuadefSheaf *sheaf);

/*
 Writes h0, h1, h2 of the deformation complex into `out[0..3]`.

 # Safety
 `sheaf` must be a live handle and `out` must point to 3 writable `size_t`.
 */
enum QuadefStatus quadef_hypercohomology(const struct QuadefSheaf *sheaf,
                                         uint32_t window,
                                         uintptr_t *out);

/*
 Full report as JSON (the same document `quadef report --json` prints).

 # Safety
 `sheaf` must be a live handle and `out` a valid pointer; free the result
 with [`quadef_string_free`].
 */
enum QuadefStatus quadef_report_json(const struct QuadefSheaf *sheaf, uint32_t window, char **out);

/*
 Realizes basis class `class` of H^1 as a first-order deformation, as JSON
 (the same document `quadef realize --json` prints).

 # Safety
 `sheaf` must be a live handle and `out` a valid pointer; free the result
 with [`quadef_string_free`].
 */
enum QuadefStatus quadef_realize_json(const struct QuadefSheaf *sheaf,
                                      uintptr_t class_,
                                      uint32_t window,
                                      char **out);

/*
 Releases a string returned by this library. NULL is accepted.

 # Safety
 `s` must come from this library and not be freed twice.
 */
void quadef_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUADEF_H */
