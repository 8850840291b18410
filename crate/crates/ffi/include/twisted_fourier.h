#ifndef TWISTED_FOURIER_H
#define TWISTED_FOURIER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_UTF8 = 2,
  TF_STATUS_CONFIG = 3,
  TF_STATUS_INVALID_PARAMETER = 4,
  TF_STATUS_SHAPE_MISMATCH = 5,
  TF_STATUS_CONDITION_VIOLATED = 6,
  TF_STATUS_INTERNAL = 7,
} TfStatus;

// A finitely supported element of the crossed product.
typedef struct TfElement TfElement;

// A twisted system `(A, G, α, σ)`.
typedef struct TfSystem TfSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *tf_last_error_message(void);

// Builds a system from TOML text holding a `[system]` table; other
// top-level keys are ignored.
//
// # Safety
// `config` must be a NUL-terminated string and `out` a writable pointer.
enum TfStatus tf_system_from_config(const char *config, struct TfSystem **out);

// Builds a named preset system (see `twisted-fourier presets list`) with
// default parameters.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a writable pointer.
enum TfStatus tf_system_preset(const char *name, struct TfSystem **out);

// # Safety
// `sys` must be null or a handle from this library not yet freed.
void tf_system_free(struct TfSystem *sys);

// Number of doubles in an interleaved coefficient: `2 Σ d_j²`.
//
// # Safety
// `sys` must be a live handle.
size_t tf_system_coefficient_len(const struct TfSystem *sys);

// Validates the twisted-action axioms on triples from `ball(radius)`
// (exhaustive on groups of order at most 64, otherwise at most `cap`
// seeded triples). `pass` is set to 1 or 0.
//
// # Safety
// `sys` must be a live handle; `max_violation` and `pass` writable.
enum TfStatus tf_validate_system(const struct TfSystem *sys,
                                 double radius,
                                 size_t cap,
                                 uint64_t seed,
                                 double *max_violation,
                                 int *pass);

// The zero element over the system's algebra.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum TfStatus tf_element_zero(const struct TfSystem *sys, struct TfElement **out);

// `1 ⊙ δ_e`.
//
// # Safety
// `sys` must be a live handle and `out` writable.
enum TfStatus tf_element_unit(const struct TfSystem *sys, struct TfElement **out);

// Adds `a ⊙ δ_g` to `f`, with `g` a group word and `a` given by
// `tf_system_coefficient_len` interleaved doubles.
//
// # Safety
// Handles must be live, `word` NUL-terminated, `values` readable for `len`
// doubles.
enum TfStatus tf_element_add_term(const struct TfSystem *sys,
                                  struct TfElement *f,
                                  const char *word,
                                  const double *values,
                                  size_t len);

// Writes `f(g)` as interleaved doubles into `out[0..len]`.
//
// # Safety
// Handles must be live, `word` NUL-terminated, `out` writable for `len`
// doubles.
enum TfStatus tf_element_coefficient(const struct TfSystem *sys,
                                     const struct TfElement *f,
                                     const char *word,
                                     double *out,
                                     size_t len);

// Number of group elements in the support.
//
// # Safety
// `f` must be a live handle.
size_t tf_element_support_len(const struct TfElement *f);

// `out = f₁ ⋆ f₂`.
//
// # Safety
// Handles must be live and `out` writable.
enum TfStatus tf_element_mul(const struct TfSystem *sys,
                             const struct TfElement *f1,
                             const struct TfElement *f2,
                             struct TfElement **out);

// `out = f*`.
//
// # Safety
// Handles must be live and `out` writable.
enum TfStatus tf_element_star(const struct TfSystem *sys,
                              const struct TfElement *f,
                              struct TfElement **out);

// `‖f‖₁` and `‖f‖_α`.
//
// # Safety
// Handles must be live; `l1` and `alpha` writable.
enum TfStatus tf_element_norms(const struct TfSystem *sys,
                               const struct TfElement *f,
                               double *l1,
                               double *alpha);

// # Safety
// `f` must be null or a handle from this library not yet freed.
void tf_element_free(struct TfElement *f);

// Certified `lower ≤ ‖Λ(f)‖ ≤ upper` from compressions at the given radii.
//
// # Safety
// Handles must be live, `radii` readable for `n` doubles, `lower` and
// `upper` writable.
enum TfStatus tf_opnorm_bounds(const struct TfSystem *sys,
                               const struct TfElement *f,
                               const double *radii,
                               size_t n,
                               double *lower,
                               double *upper);

// Runs a full experiment configuration and returns its JSON report. When
// `override_seed` is nonzero, `seed` replaces the configured seed.
// `exit_code` receives 0 (all checks pass) or 2 (a check failed).
//
// # Safety
// `config` must be NUL-terminated; `json` and `exit_code` writable.
enum TfStatus tf_run_experiment(const char *config,
                                int override_seed,
                                uint64_t seed,
                                char **json,
                                int *exit_code);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void tf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTED_FOURIER_H */
