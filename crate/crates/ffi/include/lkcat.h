#ifndef LKCAT_H
#define LKCAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum LkStatus {
  LK_STATUS_OK = 0,
  LK_STATUS_NULL_POINTER = 1,
  LK_STATUS_INVALID_UTF8 = 2,
  LK_STATUS_PARSE = 3,
  LK_STATUS_INVALID = 4,
  LK_STATUS_VALIDATION_FAILED = 5,
  LK_STATUS_PANIC = 6,
} LkStatus;

/**
 * A front diagram with the epsilon it was built at.
 */
typedef struct LkFront LkFront;

/**
 * A sheaf on a front.
 */
typedef struct LkFrontSheaf LkFrontSheaf;

/**
 * An exceptional sequence in an Euler lattice.
 */
typedef struct LkSequence LkSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next call on the same thread; do not free.
 */
const char *lk_last_error(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void lk_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *lk_version(void);

/**
 * Build a front. `formal_type` is formal-type JSON or a JSON list of class
 * expressions; `epsilon` is a positive rational such as `"1/10"`.
 *
 * # Safety
 * Pointers must be valid NUL-terminated strings and a writable out-pointer.
 */
enum LkStatus lk_front_build(const char *formal_type, const char *epsilon, struct LkFront **out);

/**
 * Strand, crossing and component counts; any out-pointer may be NULL.
 *
 * # Safety
 * `front` must be a live handle; non-NULL out-pointers must be writable.
 */
enum LkStatus lk_front_counts(const struct LkFront *front,
                              uintptr_t *strands,
                              uintptr_t *crossings,
                              uintptr_t *components);

/**
 * Front JSON.
 *
 * # Safety
 * `front` must be a live handle and `out` writable.
 */
enum LkStatus lk_front_to_json(const struct LkFront *front, char **out);

/**
 * SVG drawing with `samples` points per strand.
 *
 * # Safety
 * `front` must be a live handle and `out` writable.
 */
enum LkStatus lk_front_svg(const struct LkFront *front, uintptr_t samples, char **out);

/**
 * # Safety
 * `front` must come from `lk_front_build` and not be freed twice. NULL is ignored.
 */
void lk_front_free(struct LkFront *front);

/**
 * Parse a front sheaf from JSON with an inline front.
 *
 * # Safety
 * `json` must be a valid string and `out` writable.
 */
enum LkStatus lk_sheaf_from_json(const char *json, struct LkFrontSheaf **out);

/**
 * Validate; writes the JSON report and returns `LK_STATUS_VALIDATION_FAILED`
 * if the sheaf fails. `report` may be NULL.
 *
 * # Safety
 * `sheaf` must be a live handle; `report` NULL or writable.
 */
enum LkStatus lk_sheaf_validate(const struct LkFrontSheaf *sheaf, char **report);

/**
 * Monodromy of a component as matrix JSON.
 *
 * # Safety
 * `sheaf` must be a live handle and `out` writable.
 */
enum LkStatus lk_sheaf_monodromy(const struct LkFrontSheaf *sheaf, uintptr_t component, char **out);

/**
 * # Safety
 * `sheaf` must come from `lk_sheaf_from_json` and not be freed twice. NULL is ignored.
 */
void lk_sheaf_free(struct LkFrontSheaf *sheaf);

/**
 * Parse `{"gram": [[...]], "vectors": [[...]]}`.
 *
 * # Safety
 * `json` must be a valid string and `out` writable.
 */
enum LkStatus lk_sequence_from_json(const char *json, struct LkSequence **out);

/**
 * Apply a braid word such as `"s1 S2"` in place. On failure the sequence
 * is unchanged.
 *
 * # Safety
 * `seq` must be a live handle and `word` a valid string.
 */
enum LkStatus lk_sequence_act(struct LkSequence *seq, const char *word);

/**
 * Sequence JSON.
 *
 * # Safety
 * `seq` must be a live handle and `out` writable.
 */
enum LkStatus lk_sequence_to_json(const struct LkSequence *seq, char **out);

/**
 * # Safety
 * `seq` must come from `lk_sequence_from_json` and not be freed twice. NULL is ignored.
 */
void lk_sequence_free(struct LkSequence *seq);

/**
 * Period of left mutation on a two-block pair, or `-1` if none within `max`.
 *
 * # Safety
 * `pair_json` must be a valid string and `out` writable.
 */
enum LkStatus lk_mutation_period(const char *pair_json, uintptr_t max, int64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LKCAT_H */
