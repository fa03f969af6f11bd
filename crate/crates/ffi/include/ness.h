#ifndef NESS_H
#define NESS_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes. Values 2 to 5 match the exit codes of the `ness` binary.
 */
typedef enum NessStatus {
  NESS_STATUS_OK = 0,
  NESS_STATUS_NULL_POINTER = 1,
  NESS_STATUS_PARSE = 2,
  NESS_STATUS_VALIDATION = 3,
  NESS_STATUS_RESOURCE_CAP = 4,
  NESS_STATUS_NUMERIC = 5,
  NESS_STATUS_BUFFER_TOO_SMALL = 6,
  NESS_STATUS_PANIC = 7,
} NessStatus;

/*
 A weighted cycle decomposition of a steady-state flux field.
 */
typedef struct NessDecomposition NessDecomposition;

/*
 A finite Markov process.
 */
typedef struct NessProcess NessProcess;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *ness_last_error(void);

/*
 Parses a JSON model (1-based indices in the file) and validates it.

 # Safety
 `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum NessStatus ness_process_from_json(const char *json, struct NessProcess **out);

/*
 Builds a continuous-time process from `n_edges` triples
 `(from[k], to[k], rates[k])` with 0-based states.

 # Safety
 `from`, `to` and `rates` must each point to `n_edges` elements.
 */
enum NessStatus ness_process_new_continuous(size_t n_states,
                                            const size_t *from,
                                            const size_t *to,
                                            const double *rates,
                                            size_t n_edges,
                                            struct NessProcess **out);

/*
 The 2-particle, 4-site ring with boundary rate `x`.

 # Safety
 `out` must be a valid pointer.
 */
enum NessStatus ness_process_tasep(double x, struct NessProcess **out);

/*
 # Safety
 `p` must come from a `ness_process_*` constructor and not be freed twice.
 */
void ness_process_free(struct NessProcess *p);

/*
 Number of states, or 0 for NULL.

 # Safety
 `p` must be NULL or a live process handle.
 */
size_t ness_process_n_states(const struct NessProcess *p);

/*
 Writes the steady state into `out[0..len]`; `len` must be at least the
 number of states.

 # Safety
 `p` must be a live handle and `out` point to `len` writable doubles.
 */
enum NessStatus ness_stationary_distribution(const struct NessProcess *p, double *out, size_t len);

/*
 Writes the steady flux matrix row-major into `out[0..len]`
 (`out[i*n + j]` is the flux from i to j); `len` must be at least n².

 # Safety
 `p` must be a live handle and `out` point to `len` writable doubles.
 */
enum NessStatus ness_steady_fluxes(const struct NessProcess *p, double *out, size_t len);

/*
 Steady-state entropy production and its system and medium parts.
 Fails with `Validation` when a transition with current has no reverse.

 # Safety
 `p` must be a live handle; the outputs must be valid pointers.
 */
enum NessStatus ness_entropy_production(const struct NessProcess *p,
                                        double *total,
                                        double *system,
                                        double *medium);

/*
 Decomposes the steady flux field with the default cycle ordering.

 # Safety
 `p` must be a live handle and `out` a valid pointer.
 */
enum NessStatus ness_decompose_default(const struct NessProcess *p, struct NessDecomposition **out);

/*
 # Safety
 `d` must come from `ness_decompose_default` and not be freed twice.
 */
void ness_decomposition_free(struct NessDecomposition *d);

/*
 Number of cycles in processing order, zero weights included.

 # Safety
 `d` must be NULL or a live handle.
 */
size_t ness_decomposition_len(const struct NessDecomposition *d);

/*
 Weight of entry `k`.

 # Safety
 `d` must be a live handle and `out` a valid pointer.
 */
enum NessStatus ness_decomposition_weight(const struct NessDecomposition *d, size_t k, double *out);

/*
 Number of states on the cycle of entry `k`.

 # Safety
 `d` must be a live handle and `out` a valid pointer.
 */
enum NessStatus ness_decomposition_cycle_len(const struct NessDecomposition *d,
                                             size_t k,
                                             size_t *out);

/*
 Writes the 0-based states of the cycle of entry `k` (smallest state
 first) into `out[0..len]`.

 # Safety
 `d` must be a live handle and `out` point to `len` writable elements.
 */
enum NessStatus ness_decomposition_cycle(const struct NessDecomposition *d,
                                         size_t k,
                                         size_t *out,
                                         size_t len);

/*
 JSON export (1-based cycles). Release the string with `ness_string_free`.

 # Safety
 `d` must be a live handle and `out` a valid pointer.
 */
enum NessStatus ness_decomposition_to_json(const struct NessDecomposition *d, char **out);

/*
 # Safety
 `s` must come from this library and not be freed twice.
 */
void ness_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NESS_H */
