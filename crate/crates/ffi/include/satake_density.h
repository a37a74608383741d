#ifndef SATAKE_DENSITY_H
#define SATAKE_DENSITY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SdFactorKind {
  SD_FACTOR_KIND_SPIN = 0,
  SD_FACTOR_KIND_STD = 1,
} SdFactorKind;

typedef enum SdMode {
  SD_MODE_ABS = 0,
  SD_MODE_SIGNED = 1,
} SdMode;

typedef enum SdSamplerKind {
  SD_SAMPLER_KIND_UNIFORM_TORUS = 0,
  SD_SAMPLER_KIND_SATO_TATE_G1 = 1,
  SD_SAMPLER_KIND_EXTREMAL_CONSTANT = 2,
  SD_SAMPLER_KIND_ANGLE_FAMILY = 3,
} SdSamplerKind;

typedef enum SdStatus {
  SD_STATUS_OK = 0,
  SD_STATUS_NULL_POINTER = 1,
  SD_STATUS_INVALID_ARGUMENT = 2,
  SD_STATUS_DOMAIN = 3,
  SD_STATUS_OVERFLOW = 4,
  SD_STATUS_BUFFER_TOO_SMALL = 5,
  SD_STATUS_PANIC = 6,
} SdStatus;

/**
 * Opaque map from each table prime to a Satake tuple.
 */
typedef struct SdAssignment SdAssignment;

/**
 * Opaque table of all primes up to a bound.
 */
typedef struct SdPrimeTable SdPrimeTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or "". The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *sd_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sd_version(void);

/**
 * Sieves all primes up to `bound` into a new table.
 */
enum SdStatus sd_sieve(uint64_t bound, struct SdPrimeTable **out);

void sd_prime_table_free(struct SdPrimeTable *table);

/**
 * Number of primes in the table; 0 for null.
 */
size_t sd_prime_table_len(const struct SdPrimeTable *table);

/**
 * The bound the table was sieved to; 0 for null.
 */
uint64_t sd_prime_table_bound(const struct SdPrimeTable *table);

/**
 * Copies the primes into `buf`, which must hold `sd_prime_table_len` values.
 */
enum SdStatus sd_prime_table_copy(const struct SdPrimeTable *table, uint64_t *buf, size_t cap);

/**
 * `mu = a_0 prod (1 + a_i)` for the tuple with angles `theta_0..theta_g`.
 */
enum SdStatus sd_mu(size_t genus, const double *angles, size_t n_angles, double *out);

/**
 * Dirichlet coefficients `c_0..c_{r_max}` of one local factor into `out`,
 * which must hold `r_max + 1` values.
 */
enum SdStatus sd_expand(size_t genus,
                        const double *angles,
                        size_t n_angles,
                        enum SdFactorKind kind,
                        size_t r_max,
                        double *out,
                        size_t out_len);

/**
 * The exact coefficient bound; `SD_STATUS_OVERFLOW` when it exceeds 64 bits.
 */
enum SdStatus sd_coeff_bound(enum SdFactorKind kind, size_t genus, uint64_t r, uint64_t *out);

/**
 * `(2 - 1/g) c^{-2/g}`; NaN for `genus == 0`.
 */
double sd_theorem1_bound(size_t genus, double c);

/**
 * `4 / (c + 4)`.
 */
double sd_theorem2_bound(double c);

/**
 * Builds a synthetic assignment over `table`. `c` is used by
 * `EXTREMAL_CONSTANT` only; `seed` by the stochastic kinds.
 */
enum SdStatus sd_assignment_build(const struct SdPrimeTable *table,
                                  enum SdSamplerKind kind,
                                  size_t genus,
                                  double c,
                                  uint64_t seed,
                                  struct SdAssignment **out);

void sd_assignment_free(struct SdAssignment *assignment);

/**
 * Number of primes covered; 0 for null.
 */
size_t sd_assignment_len(const struct SdAssignment *assignment);

/**
 * `mu(p)` for every table prime into `out`, which must hold
 * `sd_assignment_len` values.
 */
enum SdStatus sd_assignment_mu(const struct SdAssignment *assignment, double *out, size_t cap);

/**
 * Truncated Dirichlet ratio of the exceptional set `{p : mu(p) exceeds c}`.
 */
enum SdStatus sd_exceptional_dirichlet_ratio(const struct SdAssignment *assignment,
                                             double c,
                                             enum SdMode mode,
                                             double s,
                                             double *out);

/**
 * Fraction of primes up to `x` in the exceptional set.
 */
enum SdStatus sd_exceptional_natural_ratio(const struct SdAssignment *assignment,
                                           double c,
                                           enum SdMode mode,
                                           uint64_t x,
                                           double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SATAKE_DENSITY_H */
