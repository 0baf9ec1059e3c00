/* C interface to the rotdisc rotation-discrepancy toolkit. */

#ifndef ROTDISC_H
#define ROTDISC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define ROTDISC_OK 0

/**
 * Invalid input: bad literal, null pointer, out-of-range parameter.
 */
#define ROTDISC_INVALID 1

/**
 * Computation error: resource budget exceeded or internal failure.
 */
#define ROTDISC_COMPUTE 2

/**
 * Verification failure: a property suite failed, or the two path
 * evaluators disagreed.
 */
#define ROTDISC_VERIFY 3

/**
 * Opaque handle to an irrational rotation number.
 */
typedef struct RotdiscAlpha RotdiscAlpha;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message from the most recent failing call on this thread.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *rotdisc_last_error(void);

/**
 * Returns the library version as a static string (do not free).
 */
const char *rotdisc_version(void);

/**
 * Parses a continued-fraction literal such as "0;(2)" or "0;2,1,(3,1)" into
 * a rotation-number handle. The expansion must be eventually periodic
 * (irrational).
 *
 * # Safety
 * `literal` must be a valid C string; `out` must be a valid pointer.
 */
int32_t rotdisc_alpha_from_cf(const char *literal, struct RotdiscAlpha **out);

/**
 * Parses a real quadratic surd literal "(a+b*sqrt(d))/e" into a
 * rotation-number handle. The value must be irrational.
 *
 * # Safety
 * `literal` must be a valid C string; `out` must be a valid pointer.
 */
int32_t rotdisc_alpha_from_surd(const char *literal, struct RotdiscAlpha **out);

/**
 * Releases a rotation-number handle (null is ignored).
 *
 * # Safety
 * `ptr` must come from an alpha constructor and not be freed twice.
 */
void rotdisc_alpha_free(struct RotdiscAlpha *ptr);

/**
 * Releases a string returned by this library (null is ignored).
 *
 * # Safety
 * `ptr` must come from a `rotdisc_*` call that documents this release
 * function and not be freed twice.
 */
void rotdisc_string_free(char *ptr);

/**
 * Writes the expansion and its convergents up to index `depth` as JSON.
 *
 * # Safety
 * `alpha` must be a live handle; `out` must be a valid pointer.
 */
int32_t rotdisc_expand_json(const struct RotdiscAlpha *alpha, uint64_t depth, char **out);

/**
 * Computes the k-scaled discrepancy path for window `c` (a literal like
 * "1/2") over `n` steps with both evaluators, writes the CSV on agreement,
 * and reports ROTDISC_VERIFY if they ever disagree.
 *
 * # Safety
 * `alpha` must be a live handle; `c` a valid C string; `out` valid.
 */
int32_t rotdisc_path_csv(const struct RotdiscAlpha *alpha, const char *c, uint64_t n, char **out);

/**
 * Classifies one-sided boundedness at window `c` (a literal like "1/2")
 * and writes the JSON verdict.
 *
 * # Safety
 * `alpha` must be a live handle; `c` a valid C string; `out` valid.
 */
int32_t rotdisc_classify_json(const struct RotdiscAlpha *alpha, const char *c, char **out);

/**
 * Enumerates the pattern table for modulus `k`; `kind` is "elementary",
 * "prime", or "type-k-prime". Writes the table as JSON.
 *
 * # Safety
 * `kind` must be a valid C string; `out` must be a valid pointer.
 */
int32_t rotdisc_patterns_json(uint64_t k, const char *kind, char **out);

/**
 * Decomposes the tuple `tuple[0..len]` (residues mod `k`) into a prime core
 * plus elementary insertions, written as JSON.
 *
 * # Safety
 * `tuple` must point to `len` readable u64 values (or be null with
 * `len == 0`); `out` must be a valid pointer.
 */
int32_t rotdisc_decompose_json(const uint64_t *tuple, size_t len, uint64_t k, char **out);

/**
 * Builds an expansion extending `prefix[0..len]` whose discrepancy at every
 * window with denominator `k` is bounded above (`odd_parity == 0`) or below
 * (`odd_parity != 0`), classifies it, and writes the JSON result.
 *
 * # Safety
 * `prefix` must point to `len` readable i64 values (or be null with
 * `len == 0`); `out` must be a valid pointer.
 */
int32_t rotdisc_construct_json(const int64_t *prefix,
                               size_t len,
                               int64_t k,
                               int32_t odd_parity,
                               char **out);

/**
 * Certifies an enclosure for the crossing point c* of the growth factor g,
 * to the bracket width given by the literal `tol` (e.g. "1e-6"), and writes
 * the JSON bound.
 *
 * # Safety
 * `tol` must be a valid C string; `out` must be a valid pointer.
 */
int32_t rotdisc_dimension_json(const char *tol, char **out);

/**
 * Runs the bundled property suites (`suites` is a comma-separated list, or
 * null/"all" for every suite) with the given seed. Writes the JSON report
 * even when a suite fails, returning ROTDISC_VERIFY in that case.
 *
 * # Safety
 * `suites` must be a valid C string or null; `out` must be a valid pointer.
 */
int32_t rotdisc_verify_json(const char *suites, uint64_t seed, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROTDISC_H */
