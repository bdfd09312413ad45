/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef ECTOWER_H
#define ECTOWER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum EctStatus {
  ECT_STATUS_OK = 0,
  // A required pointer argument was null.
  ECT_STATUS_NULL = 1,
  // Malformed text, bad UTF-8, or a symbol outside the alphabet.
  ECT_STATUS_PARSE = 2,
  // The presentation or case is outside what the library decides.
  ECT_STATUS_UNSUPPORTED = 3,
  // A bounded search ran out of budget.
  ECT_STATUS_BOUND = 4,
  // A panic or an unexpected library error.
  ECT_STATUS_INTERNAL = 5,
} EctStatus;

// A finitely presented group.
typedef struct EctGroup EctGroup;

// A tower of centralizer extensions.
typedef struct EctTower EctTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if there was none.
// The pointer stays valid until the next failing call on the same thread.
const char *ect_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed already.
void ect_string_free(char *s);

// Freely reduces `word` (for example `"a b b^-1"` gives `"a"`).
//
// # Safety
// `word` must be a NUL-terminated string and `out` a valid pointer.
enum EctStatus ect_word_reduce(const char *word, char **out);

// Parses a group in the `.grp` text format.
//
// # Safety
// `src` must be a NUL-terminated string and `out` a valid pointer.
enum EctStatus ect_group_parse(const char *src, struct EctGroup **out);

// # Safety
// `g` must come from [`ect_group_parse`] and not have been freed already.
void ect_group_free(struct EctGroup *g);

// Sets `*is_trivial` to 1 if `word` is the identity in `g`, else 0.
//
// # Safety
// `g` must be a live handle, `word` NUL-terminated and `is_trivial` valid.
enum EctStatus ect_group_wp(const struct EctGroup *g, const char *word, int *is_trivial);

// Parses a tower in the `.twr` text format. The base group must be given
// inline.
//
// # Safety
// `src` must be a NUL-terminated string and `out` a valid pointer.
enum EctStatus ect_tower_parse(const char *src, struct EctTower **out);

// A tower with no levels over `g`. The group is copied.
//
// # Safety
// `g` must be a live group handle and `out` a valid pointer.
enum EctStatus ect_tower_from_group(const struct EctGroup *g, struct EctTower **out);

// # Safety
// `t` must come from this library and not have been freed already.
void ect_tower_free(struct EctTower *t);

// Number of centralizer extensions in `t`, or -1 if `t` is null.
//
// # Safety
// `t` must be null or a live tower handle.
int ect_tower_height(const struct EctTower *t);

// Sets `*is_trivial` to 1 if `word` is the identity in `t`, else 0.
//
// # Safety
// `t` must be a live handle, `word` NUL-terminated and `is_trivial` valid.
enum EctStatus ect_tower_wp(const struct EctTower *t, const char *word, int *is_trivial);

// Writes the Britton-reduced form of `word` to `*out`.
//
// # Safety
// `t` must be a live handle, `word` NUL-terminated and `out` valid.
enum EctStatus ect_tower_britton_reduce(const struct EctTower *t, const char *word, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECTOWER_H */
