#ifndef QWALK_H
#define QWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum QwStatus {
  QW_STATUS_OK = 0,
  // A required pointer was null.
  QW_STATUS_NULL_POINTER = 1,
  // Malformed input, failed validation or a bad argument.
  QW_STATUS_INVALID = 2,
  // Two bands could not be told apart at a near-degeneracy.
  QW_STATUS_UNRESOLVED_CROSSING = 3,
  // An output buffer is too small.
  QW_STATUS_BUFFER_TOO_SMALL = 4,
  // The evolution window would exceed the memory cap.
  QW_STATUS_MEMORY_CAP = 5,
  // Any other failure.
  QW_STATUS_FAILED = 6,
  // A panic was caught at the boundary.
  QW_STATUS_PANIC = 7,
} QwStatus;

// Opaque state handle.
typedef struct QwState QwState;

// Opaque walk handle.
typedef struct QwWalk QwWalk;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread. Valid until the next
// call into the library from the same thread.
const char *qw_last_error(void);

// Parses a walk from its JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum QwStatus qw_walk_from_json(const char *json, struct QwWalk **out);

// Built-in walk by name, e.g. `grover4` or `coined:0.5`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum QwStatus qw_walk_builtin(const char *name, struct QwWalk **out);

// Releases a walk. Null is ignored.
//
// # Safety
// `walk` must come from this library and not be used afterwards.
void qw_walk_free(struct QwWalk *walk);

// Coin dimension `n`.
//
// # Safety
// `walk` must be a live handle and `out` writable.
enum QwStatus qw_walk_dim(const struct QwWalk *walk, uintptr_t *out);

// Largest `|j|` with a nonzero term.
//
// # Safety
// `walk` must be a live handle and `out` writable.
enum QwStatus qw_walk_bandwidth(const struct QwWalk *walk, uintptr_t *out);

// Writes `Û(k)` row-major as interleaved `(re, im)` pairs into `out`,
// which must hold `2·n·n` doubles.
//
// # Safety
// `walk` must be a live handle and `out` must point to `len` doubles.
enum QwStatus qw_walk_symbol(const struct QwWalk *walk, double k, double *out, uintptr_t len);

// `‖[D, U]‖ = max_k ‖Û′(k)‖`.
//
// # Safety
// `walk` must be a live handle and `out` writable.
enum QwStatus qw_commutator_norm(const struct QwWalk *walk, double *out);

// Winding number of `k ↦ det Û(k)`.
//
// # Safety
// `walk` must be a live handle and `out` writable.
enum QwStatus qw_det_winding(const struct QwWalk *walk, uintptr_t grid, int64_t *out);

// Whether every band has winding zero.
//
// # Safety
// `walk` must be a live handle and `out` writable.
enum QwStatus qw_is_realizable(const struct QwWalk *walk, uintptr_t grid, bool *out);

// Full analysis report as a JSON string, released with [`qw_string_free`].
//
// # Safety
// `walk` must be a live handle and `out` writable.
enum QwStatus qw_analyze_json(const struct QwWalk *walk, uintptr_t grid, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void qw_string_free(char *s);

// Built-in state (`e1`..`en`, `uniform`, `random`) for coin dimension `n`.
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum QwStatus qw_state_builtin(const char *name, uintptr_t n, uint64_t seed, struct QwState **out);

// Parses a state from `{"entries":[{"site":x,"vector":[[re,im],…]},…]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum QwStatus qw_state_from_json(const char *json, struct QwState **out);

// Releases a state. Null is ignored.
//
// # Safety
// `state` must come from this library and not be used afterwards.
void qw_state_free(struct QwState *state);

// `Uᵗ ξ` as a new state.
//
// # Safety
// `walk` and `state` must be live handles and `out` writable.
enum QwStatus qw_evolve(const struct QwWalk *walk,
                        const struct QwState *state,
                        uintptr_t steps,
                        struct QwState **out);

// `‖ξ‖₂`.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QwStatus qw_state_norm(const struct QwState *state, double *out);

// `Σ_x (x/t)^m ‖ξ_x‖²`.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QwStatus qw_state_moment(const struct QwState *state, uint64_t t, uint32_t m, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QWALK_H */
