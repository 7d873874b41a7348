#ifndef PENCIL_LAB_H
#define PENCIL_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Status of a call. Codes 2 to 5 match the exit codes of the `pencil-lab`
// binary.
typedef enum PlStatus {
  PL_STATUS_OK = 0,
  // Null pointer, bad size or a buffer that is too small.
  PL_STATUS_INVALID_ARGUMENT = 1,
  PL_STATUS_PARSE = 2,
  // The input violates a precondition (not posH, singular, and so on).
  PL_STATUS_REJECTED = 3,
  // A rank decision fell inside the ambiguity gap.
  PL_STATUS_AMBIGUOUS = 4,
  PL_STATUS_INTERNAL = 5,
  // A panic was caught at the boundary.
  PL_STATUS_PANIC = 6,
} PlStatus;

typedef enum PlConvention {
  // `λL + C`.
  PL_CONVENTION_PLUS = 0,
  // `λE − A`.
  PL_CONVENTION_MINUS = 1,
} PlConvention;

typedef enum PlLhpConclusion {
  PL_LHP_CONCLUSION_NONE = 0,
  PL_LHP_CONCLUSION_NUMRANGE_IN_LHP = 1,
  PL_LHP_CONCLUSION_EIGENVALUES_IN_LHP = 2,
} PlLhpConclusion;

typedef enum PlEvidence {
  PL_EVIDENCE_EXACT = 0,
  PL_EVIDENCE_SAMPLED = 1,
  PL_EVIDENCE_HEURISTIC = 2,
} PlEvidence;

typedef enum PlCubicConclusion {
  PL_CUBIC_CONCLUSION_LHP_CERTIFIED = 0,
  PL_CUBIC_CONCLUSION_REGION_EXCLUDED_ONLY = 1,
  PL_CUBIC_CONCLUSION_INCONCLUSIVE = 2,
} PlCubicConclusion;

// Opaque pencil handle.
typedef struct PlPencil PlPencil;

// Opaque matrix polynomial handle.
typedef struct PlPolynomial PlPolynomial;

// Opaque posH pencil handle.
typedef struct PlPosh PlPosh;

// Counts read off the Kronecker structure.
typedef struct PlKcfSummary {
  size_t rows;
  size_t cols;
  bool regular;
  size_t index;
  size_t right_minimal_indices;
  size_t left_minimal_indices;
  size_t infinite_blocks;
  // Finite eigenvalues counted with algebraic multiplicity.
  size_t finite_eigenvalues;
} PlKcfSummary;

// Pacman thresholds. `+inf` means unbounded, NaN means undefined.
typedef struct PlBeta {
  double beta_plus;
  double beta_minus;
  // `σ_min(tR₁+R₂)/‖J₁‖`, NaN when not available.
  double lower_bound;
} PlBeta;

typedef struct PlLhpResult {
  enum PlLhpConclusion conclusion;
  enum PlEvidence evidence;
  bool eejjx_proved;
  bool eejjx_falsified;
} PlLhpResult;

typedef struct PlCubicResult {
  enum PlCubicConclusion conclusion;
  bool hypotheses_hold;
  bool pos2_holds;
  // `+inf` when unbounded, NaN when undefined.
  double beta_star;
} PlCubicResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string, statically allocated.
const char *pl_version(void);

// Message of the latest failed call on this thread, or an empty string.
// Valid until the next failing call on the same thread.
const char *pl_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library that was not yet freed.
void pl_string_free(char *s);

// Builds a `rows×cols` pencil from its two coefficients.
//
// # Safety
// `lead` and `constant` must each hold `2·rows·cols` doubles and `out` must
// be writable.
enum PlStatus pl_pencil_new(size_t rows,
                            size_t cols,
                            const double *lead,
                            const double *constant,
                            enum PlConvention convention,
                            struct PlPencil **out);

// Parses a pencil or posH document in the CLI's JSON format.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum PlStatus pl_pencil_from_json(const char *json, struct PlPencil **out);

// # Safety
// `p` must be null or a live handle, not used afterwards.
void pl_pencil_free(struct PlPencil *p);

// # Safety
// `p` must be a live handle; `rows` and `cols` writable.
enum PlStatus pl_pencil_dims(const struct PlPencil *p, size_t *rows, size_t *cols);

// All generalized eigenvalues of a square regular pencil. `count` receives
// `n` even when `capacity` is too small.
//
// # Safety
// `buf` must hold `2·capacity` doubles; `count` must be writable.
enum PlStatus pl_pencil_eigenvalues(const struct PlPencil *p,
                                    double *buf,
                                    size_t capacity,
                                    size_t *count);

// Kronecker structure counts. `rank_tol > 0` overrides the default rank
// tolerance.
//
// # Safety
// `out` must be writable.
enum PlStatus pl_pencil_kcf(const struct PlPencil *p, double rank_tol, struct PlKcfSummary *out);

// Full Kronecker structure as JSON. Release with [`pl_string_free`].
//
// # Safety
// `out` must be writable.
enum PlStatus pl_pencil_kcf_json(const struct PlPencil *p, double rank_tol, char **out);

// Samples the numerical range with `samples` random unit vectors; isotropic
// draws are discarded, so `count` may be smaller than `samples`.
//
// # Safety
// `buf` must hold `2·capacity` doubles; `count` must be writable.
enum PlStatus pl_pencil_sample_numrange(const struct PlPencil *p,
                                        size_t samples,
                                        uint64_t seed,
                                        double *buf,
                                        size_t capacity,
                                        size_t *count);

// `λ(J₁+R₁) + (J₂+R₂)` from its four `n×n` parts, validated.
//
// # Safety
// Each part must hold `2·n·n` doubles; `out` must be writable.
enum PlStatus pl_posh_from_parts(size_t n,
                                 const double *j1,
                                 const double *r1,
                                 const double *j2,
                                 const double *r2,
                                 struct PlPosh **out);

// Splits and validates a pencil. A negative or NaN `tol` selects the
// default PSD tolerance.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum PlStatus pl_posh_from_pencil(const struct PlPencil *p, double tol, struct PlPosh **out);

// # Safety
// `p` must be null or a live handle, not used afterwards.
void pl_posh_free(struct PlPosh *p);

// The plus-convention pencil of a posH pencil, as a new handle.
//
// # Safety
// `pp` must be a live handle and `out` writable.
enum PlStatus pl_posh_to_pencil(const struct PlPosh *pp, struct PlPencil **out);

// Pacman thresholds of `tR₁ + R₂ ± β(iJ₁)`; `t = 1` gives the unscaled ones.
//
// # Safety
// `pp` must be a live handle and `out` writable.
enum PlStatus pl_posh_beta(const struct PlPosh *pp, double t, struct PlBeta *out);

// Left-half-plane certificate. Zero budgets select the defaults.
//
// # Safety
// `pp` must be a live handle and `out` writable.
enum PlStatus pl_posh_lhp_certificate(const struct PlPosh *pp,
                                      size_t falsify_budget,
                                      size_t sample_budget,
                                      uint64_t seed,
                                      struct PlLhpResult *out);

// `A₀ + A₁λ + … + A_dλ^d` from `degree + 1` consecutive `n×n` matrices.
//
// # Safety
// `coefficients` must hold `2·n·n·(degree+1)` doubles; `out` writable.
enum PlStatus pl_polynomial_new(size_t n,
                                size_t degree,
                                const double *coefficients,
                                struct PlPolynomial **out);

// Parses a polynomial document in the CLI's JSON format.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum PlStatus pl_polynomial_from_json(const char *json, struct PlPolynomial **out);

// # Safety
// `p` must be null or a live handle, not used afterwards.
void pl_polynomial_free(struct PlPolynomial *p);

// posH linearization of a PSD polynomial.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum PlStatus pl_polynomial_linearize(const struct PlPolynomial *p, struct PlPosh **out);

// Eigenvalues through the linearization.
//
// # Safety
// `buf` must hold `2·capacity` doubles; `count` must be writable.
enum PlStatus pl_polynomial_eigenvalues(const struct PlPolynomial *p,
                                        double *buf,
                                        size_t capacity,
                                        size_t *count);

// Sufficient stability conditions for a cubic.
//
// # Safety
// `p` must be a live handle and `out` writable.
enum PlStatus pl_polynomial_cubic_stability(const struct PlPolynomial *p,
                                            struct PlCubicResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PENCIL_LAB_H */
