#ifndef WSTATE_H
#define WSTATE_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsBackend {
  WS_BACKEND_DENSE = 0,
  WS_BACKEND_SPARSE = 1,
  WS_BACKEND_AUTO = 2,
} WsBackend;

typedef enum WsLevel {
  WS_LEVEL_COMPOSITE = 0,
  WS_LEVEL_CZ_LEVEL = 1,
  WS_LEVEL_ELEMENTARY = 2,
} WsLevel;

/**
 * Result code of every fallible call.
 */
typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_ARGUMENT = 2,
  WS_STATUS_PARSE = 3,
  WS_STATUS_UNSUPPORTED_SIZE = 4,
  WS_STATUS_CAPACITY = 5,
  WS_STATUS_INVALID_LOWERING = 6,
  WS_STATUS_UTF8 = 7,
  WS_STATUS_PANIC = 8,
} WsStatus;

/**
 * Opaque circuit handle.
 */
typedef struct WsCircuit WsCircuit;

/**
 * Opaque state handle.
 */
typedef struct WsState WsState;

/**
 * Per-kind tally of a circuit.
 */
typedef struct WsGateCounts {
  size_t f;
  size_t cnot;
  size_t cz;
  size_t rot;
} WsGateCounts;

/**
 * Closed-form counts of the n-qubit construction.
 */
typedef struct WsCounts {
  size_t total_two_qubit;
  size_t f_gates;
  size_t cnot_gates;
} WsCounts;

typedef struct WsResourceReport {
  size_t n;
  struct WsCounts counts;
  size_t elementary_cnots;
  double gate_success_prob;
  double log10_success_probability;
} WsResourceReport;

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *ws_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ws_string_free(char *s);

/**
 * Builds the n-qubit W-state circuit (n >= 3).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum WsStatus ws_circuit_build_w(size_t n, struct WsCircuit **out);

/**
 * Parses `wcircuit 1` text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum WsStatus ws_circuit_parse(const char *text, struct WsCircuit **out);

/**
 * Serializes a circuit; free the result with `ws_string_free`.
 *
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum WsStatus ws_circuit_to_text(const struct WsCircuit *circuit, char **out);

/**
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum WsStatus ws_circuit_lower(const struct WsCircuit *circuit,
                               enum WsLevel level,
                               struct WsCircuit **out);

/**
 * Qubit count, or 0 for a NULL handle.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t ws_circuit_num_qubits(const struct WsCircuit *circuit);

/**
 * Gate count, or 0 for a NULL handle.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t ws_circuit_num_gates(const struct WsCircuit *circuit);

/**
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum WsStatus ws_circuit_level(const struct WsCircuit *circuit, enum WsLevel *out);

/**
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum WsStatus ws_circuit_counts(const struct WsCircuit *circuit, struct WsGateCounts *out);

/**
 * # Safety
 * `circuit` must be NULL or a handle from this library, not yet freed.
 */
void ws_circuit_free(struct WsCircuit *circuit);

/**
 * Basis state from `H`/`V` or `0`/`1` characters.
 *
 * # Safety
 * `bits` must be a NUL-terminated string; `out` must be writable.
 */
enum WsStatus ws_state_basis(size_t n,
                             const char *bits,
                             enum WsBackend backend,
                             struct WsState **out);

/**
 * The reference W state on n >= 2 qubits (sparse).
 *
 * # Safety
 * `out` must be writable.
 */
enum WsStatus ws_state_w_reference(size_t n, struct WsState **out);

/**
 * Runs `circuit` on `input`, producing a new state on the input's backend.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum WsStatus ws_simulate(const struct WsCircuit *circuit,
                          const struct WsState *input,
                          struct WsState **out);

/**
 * # Safety
 * `state` must be a live handle; `bits` NUL-terminated; `out` writable.
 */
enum WsStatus ws_state_amplitude(const struct WsState *state, const char *bits, double *out);

/**
 * Stored nonzero amplitudes, or 0 for a NULL handle.
 *
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t ws_state_nnz(const struct WsState *state);

/**
 * # Safety
 * `state` must be NULL or a live handle.
 */
size_t ws_state_num_qubits(const struct WsState *state);

/**
 * State dump text; free with `ws_string_free`.
 *
 * # Safety
 * `state` must be a live handle; `out` must be writable.
 */
enum WsStatus ws_state_dump(const struct WsState *state, char **out);

/**
 * # Safety
 * `state` must be NULL or a handle from this library, not yet freed.
 */
void ws_state_free(struct WsState *state);

/**
 * `|<a|b>|^2`.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum WsStatus ws_fidelity(const struct WsState *a, const struct WsState *b, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WsStatus ws_predicted_counts(size_t n, struct WsCounts *out);

/**
 * First half-wave plate angle in degrees for an n-qubit W state.
 *
 * # Safety
 * `out` must be writable.
 */
enum WsStatus ws_first_plate_angle_deg(size_t n, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum WsStatus ws_resource_report(size_t n, double gate_success_prob, struct WsResourceReport *out);

#endif  /* WSTATE_H */
