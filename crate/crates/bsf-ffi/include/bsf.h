#ifndef BSF_H
#define BSF_H

/* Generated by cbindgen from the bsf-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum BsfStatus {
  BSF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  BSF_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  BSF_STATUS_UTF8 = 2,
  /**
   * A parameter string could not be parsed.
   */
  BSF_STATUS_PARSE = 3,
  /**
   * A size, order, weight index or lag was out of range.
   */
  BSF_STATUS_RANGE = 4,
  /**
   * A mathematically invalid input (law, path, involution, composition).
   */
  BSF_STATUS_DOMAIN = 5,
  /**
   * An internal invariant failed.
   */
  BSF_STATUS_INTERNAL = 6,
} BsfStatus;

/**
 * Which tree family `bsf_tree_count` counts.
 */
typedef enum BsfTreeKind {
  BSF_TREE_KIND_PLANE = 0,
  BSF_TREE_KIND_SHAPES = 1,
} BsfTreeKind;

/**
 * Opaque handle: a truncated power series with exact coefficients.
 */
typedef struct BsfSeries BsfSeries;

/**
 * Opaque handle: a plane rooted tree.
 */
typedef struct BsfTree BsfTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The crate version as a static string; never freed.
 */
const char *bsf_version(void);

/**
 * Message of the last failure on this thread, or null if none occurred.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *bsf_last_error_message(void);

/**
 * Releases a string returned through a `char**` out-parameter.
 *
 * # Safety
 * `s` must be null or a pointer previously returned by this library.
 */
void bsf_string_free(char *s);

/**
 * Parses a balanced-parentheses encoding like `(()())` into a tree handle.
 *
 * # Safety
 * `encoding` must be a valid NUL-terminated string; `out_tree` non-null.
 */
enum BsfStatus bsf_tree_parse(const char *encoding, struct BsfTree **out_tree);

/**
 * Releases a tree handle.
 *
 * # Safety
 * `tree` must be null or a pointer from `bsf_tree_parse`.
 */
void bsf_tree_free(struct BsfTree *tree);

/**
 * Number of nodes.
 *
 * # Safety
 * Both pointers must be valid.
 */
enum BsfStatus bsf_tree_size(const struct BsfTree *tree, size_t *out_size);

/**
 * The canonical balanced-parentheses encoding, as a caller-owned string.
 *
 * # Safety
 * Both pointers must be valid.
 */
enum BsfStatus bsf_tree_encode(const struct BsfTree *tree, char **out_encoding);

/**
 * The four counting statistics of the tree (of its unordered shape, for
 * the symmetry/labelling/embedding counts), as decimal strings.
 *
 * # Safety
 * All pointers must be valid.
 */
enum BsfStatus bsf_tree_statistics(const struct BsfTree *tree,
                                   char **out_tree_factorial,
                                   char **out_sigma,
                                   char **out_alpha,
                                   char **out_kappa);

/**
 * The contour walk of the tree as an up-down word like `UUDUDD`.
 *
 * # Safety
 * Both pointers must be valid.
 */
enum BsfStatus bsf_tree_to_dyck(const struct BsfTree *tree, char **out_path);

/**
 * Counts trees with `n` nodes (plane trees or rooted unordered shapes).
 *
 * # Safety
 * `out_count` must be valid.
 */
enum BsfStatus bsf_tree_count(size_t n, enum BsfTreeKind kind, uint64_t *out_count);

/**
 * Builds the weighted-tree-sum series for a weight family and degree
 * function given in the same spec grammar as the command line
 * (`ones`, `master:C0,C1,...`, `inverse-power:L`, `geometric:RHO`,
 * `explicit:B1,...` and `geometric`, `exponential`, `poly:C0,...`).
 *
 * # Safety
 * String arguments must be valid NUL-terminated strings; `out_series`
 * non-null.
 */
enum BsfStatus bsf_generating_series(const char *weights,
                                     const char *psi,
                                     size_t order,
                                     struct BsfSeries **out_series);

/**
 * Releases a series handle.
 *
 * # Safety
 * `series` must be null or a pointer from `bsf_generating_series`.
 */
void bsf_series_free(struct BsfSeries *series);

/**
 * Truncation order of the series.
 *
 * # Safety
 * Both pointers must be valid.
 */
enum BsfStatus bsf_series_order(const struct BsfSeries *series, size_t *out_order);

/**
 * Coefficient of z^n as exact decimal numerator/denominator strings.
 *
 * # Safety
 * All pointers must be valid.
 */
enum BsfStatus bsf_series_coefficient(const struct BsfSeries *series,
                                      size_t n,
                                      char **out_numerator,
                                      char **out_denominator);

/**
 * The n-th triangular-operator moment n^n/(n+1)! as exact decimal strings.
 *
 * # Safety
 * Out-pointers must be valid.
 */
enum BsfStatus bsf_dh_moment(size_t n, char **out_numerator, char **out_denominator);

/**
 * Exact limit of the normalized word trace of half-length k under the
 * given covariance (same spec grammar as the command line) and the point
 * mass at 1 on the diagonal.
 *
 * # Safety
 * String and out-pointers must be valid.
 */
enum BsfStatus bsf_limit_trace(size_t k,
                               const char *cov,
                               const char *beta2,
                               char **out_numerator,
                               char **out_denominator);

/**
 * Runs a named verification suite (`identities`, `master-ode`,
 * `inversion`, `special-bare`, `fond-lemma`, `dk8`) with the given tree
 * range and series order (each suite reads the parameter it needs).
 * Writes whether every statement was exact, and optionally the full JSON
 * report array into `out_json` (pass null to skip it).
 *
 * # Safety
 * `suite` must be a valid NUL-terminated string and `out_all_exact`
 * non-null; `out_json` may be null.
 */
enum BsfStatus bsf_verify_suite(const char *suite,
                                size_t max_n,
                                size_t order,
                                bool *out_all_exact,
                                char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSF_H */
