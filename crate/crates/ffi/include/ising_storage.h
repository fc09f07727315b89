#ifndef ISING_STORAGE_H
#define ISING_STORAGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IsBoundary {
  IS_BOUNDARY_FREE = 0,
  IS_BOUNDARY_MINUS_FRAME = 1,
} IsBoundary;

typedef enum IsStatus {
  IS_STATUS_OK = 0,
  IS_STATUS_NULL_POINTER = 1,
  IS_STATUS_INVALID_ARGUMENT = 2,
  IS_STATUS_INFEASIBLE_GEOMETRY = 3,
  IS_STATUS_DEFECT = 4,
  IS_STATUS_IO = 5,
  IS_STATUS_MESSAGE_TOO_LONG = 6,
  IS_STATUS_LATTICE_MISMATCH = 7,
  IS_STATUS_PARSE = 8,
  IS_STATUS_PANIC = 9,
} IsStatus;

typedef struct IsCodec IsCodec;

typedef struct IsConfig IsConfig;

typedef struct IsLattice IsLattice;

// Dynamics settings. `beta` may be `INFINITY` for zero temperature;
// `field` is -1, 0 or +1.
typedef struct IsDynamics {
  double beta;
  int32_t field;
  bool per_system_clock;
  bool freeze_minus;
} IsDynamics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *is_last_error_message(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void is_string_free(char *s);

// # Safety
// `out` must be writable.
enum IsStatus is_lattice_square(size_t k, enum IsBoundary boundary, struct IsLattice **out);

// # Safety
// `out` must be writable.
enum IsStatus is_lattice_honeycomb(size_t rows, size_t cols, struct IsLattice **out);

// Number of sites, or 0 for a null handle.
//
// # Safety
// `lattice` must be null or a live handle.
size_t is_lattice_site_count(const struct IsLattice *lattice);

// # Safety
// `lattice` must be null or a live handle; it is invalid afterwards.
void is_lattice_free(struct IsLattice *lattice);

// All sites `+1` when `plus`, else all `-1`.
//
// # Safety
// `lattice` must be a live handle and `out` writable.
enum IsStatus is_config_uniform(const struct IsLattice *lattice, bool plus, struct IsConfig **out);

// I.i.d. spins, `+1` with probability `p`.
//
// # Safety
// `lattice` must be a live handle and `out` writable.
enum IsStatus is_config_random(const struct IsLattice *lattice,
                               double p,
                               uint64_t seed,
                               struct IsConfig **out);

// Parses the JSON form produced by [`is_config_to_json`].
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum IsStatus is_config_from_json(const char *json, struct IsConfig **out);

// JSON record of the configuration; free with [`is_string_free`].
// Returns NULL for a null handle.
//
// # Safety
// `cfg` must be null or a live handle.
char *is_config_to_json(const struct IsConfig *cfg);

// # Safety
// `cfg` must be a live handle and `out` writable.
enum IsStatus is_config_clone(const struct IsConfig *cfg, struct IsConfig **out);

// # Safety
// `cfg` must be null or a live handle; it is invalid afterwards.
void is_config_free(struct IsConfig *cfg);

// Spin (`+1` or `-1`) of site `v`.
//
// # Safety
// `cfg` must be a live handle and `out` writable.
enum IsStatus is_config_spin(const struct IsConfig *cfg, size_t v, int8_t *out);

// # Safety
// `cfg` must be a live handle.
enum IsStatus is_config_set(struct IsConfig *cfg, size_t v, int8_t spin);

// Number of `+1` sites, or 0 for a null handle.
//
// # Safety
// `cfg` must be null or a live handle.
size_t is_config_plus_count(const struct IsConfig *cfg);

// Whether no site can flip under zero-temperature dynamics.
//
// # Safety
// `cfg` must be a live handle and `out` writable.
enum IsStatus is_config_is_stable(const struct IsConfig *cfg, bool *out);

// Runs continuous-time dynamics in place up to `horizon`; the number of
// flips goes to `events` when it is non-null.
//
// # Safety
// `cfg` and `params` must be valid; `events` null or writable.
enum IsStatus is_run_continuous(struct IsConfig *cfg,
                                double horizon,
                                const struct IsDynamics *params,
                                uint64_t seed,
                                uint64_t *events);

// Runs `steps` steps of the discrete chain in place.
//
// # Safety
// `cfg` and `params` must be valid.
enum IsStatus is_run_discrete(struct IsConfig *cfg,
                              uint64_t steps,
                              const struct IsDynamics *params,
                              uint64_t seed);

// Builds a codec from its JSON descriptor, e.g.
// `{"scheme":"droplet","k":64,"area":16}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum IsStatus is_codec_from_json(const char *json, struct IsCodec **out);

// # Safety
// `codec` must be null or a live handle; it is invalid afterwards.
void is_codec_free(struct IsCodec *codec);

// Bits per codeword, or 0 for a null handle.
//
// # Safety
// `codec` must be null or a live handle.
size_t is_codec_capacity(const struct IsCodec *codec);

// Recommended dynamics for the codec.
//
// # Safety
// `codec` must be a live handle and `out` writable.
enum IsStatus is_codec_dynamics(const struct IsCodec *codec, struct IsDynamics *out);

// Encodes `len` bits (one byte each, nonzero meaning 1).
//
// # Safety
// `bits` must point to `len` readable bytes (or be null with `len == 0`).
enum IsStatus is_codec_encode(const struct IsCodec *codec,
                              const uint8_t *bits,
                              size_t len,
                              struct IsConfig **out);

// Decodes the first `len` bits into `out` (one byte each, 0 or 1).
//
// # Safety
// `out` must point to `len` writable bytes.
enum IsStatus is_codec_decode(const struct IsCodec *codec,
                              const struct IsConfig *cfg,
                              uint8_t *out,
                              size_t len);

// Z-channel capacity in bits for crossover `q`.
//
// # Safety
// `out` must be writable.
enum IsStatus is_z_capacity(double q, double *out);

// Binary channel capacity in bits for `P(1|0) = q0`, `P(0|1) = q1`.
//
// # Safety
// `out` must be writable.
enum IsStatus is_binary_channel_capacity(double q0, double q1, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISING_STORAGE_H */
