#ifndef ALIGNCMP_H
#define ALIGNCMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AcStatus {
  AC_OK = 0,
  AC_ERR_NULL_POINTER = 1,
  AC_ERR_INVALID_UTF8 = 2,
  AC_ERR_INVALID_ARGUMENT = 3,
  AC_ERR_PARSE = 4,
  AC_ERR_UNDEFINED_STATISTIC = 5,
  AC_ERR_MODE_MISMATCH = 6,
  AC_ERR_TOO_MANY_SYSTEMS = 7,
  AC_ERR_OUT_OF_RANGE = 8,
  AC_ERR_PANIC = 9,
} AcStatus;

// Finished comparison with its rendered outputs.
typedef struct AcComparison AcComparison;

// Square matrix of discordant counts between named systems.
typedef struct AcMatrix AcMatrix;

typedef uint32_t AcTest;

typedef uint32_t AcCorrection;

// Settings for [`ac_compare`]. Fill with [`ac_config_default`] first.
typedef struct AcConfig {
  AcTest test;
  AcCorrection correction;
  double alpha;
  size_t bergmann_cap;
  // NUL-terminated baseline name for N×1 mode; NULL compares all pairs.
  const char *baseline;
} AcConfig;

typedef uint32_t AcPerspective;

typedef uint32_t AcMetric;

#define AC_PERSPECTIVE_IFP 0

#define AC_PERSPECTIVE_CFP 1

#define AC_TEST_ASYMPTOTIC 0

#define AC_TEST_EXACT 1

#define AC_TEST_CC 2

#define AC_TEST_MIDP 3

#define AC_CORRECTION_NONE 0

#define AC_CORRECTION_BONFERRONI 1

#define AC_CORRECTION_HOLM 2

#define AC_CORRECTION_HOLLAND 3

#define AC_CORRECTION_FINNER 4

#define AC_CORRECTION_HOCHBERG 5

#define AC_CORRECTION_NEMENYI 6

#define AC_CORRECTION_SHAFFER 7

#define AC_CORRECTION_BERGMANN 8

#define AC_METRIC_EQUAL 0

#define AC_METRIC_HAMMING 1

#define AC_METRIC_JARO 2

#define AC_METRIC_JARO_WINKLER 3

#define AC_METRIC_LEVENSHTEIN 4

#define AC_METRIC_NGRAM 5

#define AC_METRIC_NEEDLEMAN_WUNSCH 6

#define AC_METRIC_SMOA 7

#define AC_METRIC_SUBSTRING 8

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code. Never NULL.
const char *ac_status_message(enum AcStatus status);

// Message of the last failure on the calling thread, or NULL. Valid until
// the next failing call on the same thread.
const char *ac_last_error(void);

const char *ac_version(void);

// Mid-p test, Bergmann correction, α = 0.05, all pairs.
//
// # Safety
// `out` must point to writable memory for one `AcConfig`.
enum AcStatus ac_config_default(struct AcConfig *out);

// Parses a matrix in TSV layout: a header of system names, then one row per
// system with its name and integer counts.
//
// # Safety
// `tsv` must be a NUL-terminated string; `out` must be writable.
enum AcStatus ac_matrix_from_tsv(const char *tsv,
                                 AcPerspective perspective_value,
                                 struct AcMatrix **out);

// Builds a matrix from `n` names and `n × n` row-major counts, where
// `counts[i * n + j]` is the number of correspondences in favour of system
// `i` against system `j`.
//
// # Safety
// `names` must hold `n` NUL-terminated strings, `counts` must hold `n * n`
// values and `out` must be writable.
enum AcStatus ac_matrix_from_counts(const char *const *names,
                                    size_t n,
                                    const uint64_t *counts,
                                    AcPerspective perspective_value,
                                    struct AcMatrix **out);

// Number of systems; 0 for NULL.
//
// # Safety
// `m` must be NULL or a live matrix handle.
size_t ac_matrix_size(const struct AcMatrix *m);

// Count in favour of system `i` against system `j`, indexed in the order
// the systems were given.
//
// # Safety
// `m` must be a live matrix handle; `out` must be writable.
enum AcStatus ac_matrix_count(const struct AcMatrix *m, size_t i, size_t j, uint64_t *out);

// Name of system `i`, owned by `m`; NULL when out of range.
//
// # Safety
// `m` must be NULL or a live matrix handle.
const char *ac_matrix_system(const struct AcMatrix *m, size_t i);

// # Safety
// `m` must be NULL or a handle not freed before.
void ac_matrix_free(struct AcMatrix *m);

// Runs every pairwise test, applies the correction and builds the
// significance graph.
//
// # Safety
// `m` must be a live matrix handle, `config` must point to an `AcConfig`
// whose `baseline` is NULL or NUL-terminated, and `out` must be writable.
enum AcStatus ac_compare(const struct AcMatrix *m,
                         const struct AcConfig *config,
                         struct AcComparison **out);

// Significance graph in DOT. Owned by `c`; NULL for NULL.
//
// # Safety
// `c` must be NULL or a live comparison handle.
const char *ac_comparison_dot(const struct AcComparison *c);

// JSON report. Owned by `c`; NULL for NULL.
//
// # Safety
// `c` must be NULL or a live comparison handle.
const char *ac_comparison_json(const struct AcComparison *c);

// Rank groups, one per line, members joined by " & ". Owned by `c`.
//
// # Safety
// `c` must be NULL or a live comparison handle.
const char *ac_comparison_ranking(const struct AcComparison *c);

// # Safety
// `c` must be NULL or a live comparison handle.
size_t ac_comparison_edge_count(const struct AcComparison *c);

// Edge `i` of the graph, sorted by winner then loser. The name pointers
// are owned by `c`. Any output pointer may be NULL.
//
// # Safety
// `c` must be a live comparison handle; non-NULL outputs must be writable.
enum AcStatus ac_comparison_edge(const struct AcComparison *c,
                                 size_t i,
                                 const char **winner,
                                 const char **loser,
                                 double *apv);

// # Safety
// `c` must be NULL or a handle not freed before.
void ac_comparison_free(struct AcComparison *c);

// Two-sided McNemar p-value for one pair of discordant counts.
//
// # Safety
// `out` must be writable.
enum AcStatus ac_mcnemar_pvalue(AcTest test, uint64_t n01, uint64_t n10, double *out);

// Adjusted p-values for `k` raw p-values.
//
// With `n_systems = 0` the values form a plain family of `k` hypotheses,
// which the pairwise-only corrections (Nemenyi, Shaffer, Bergmann) reject.
// With `n_systems ≥ 2`, `k` must equal `n_systems·(n_systems−1)/2` and the
// values are the pairs `(0,1), (0,2), …, (n−2,n−1)` in that order.
//
// # Safety
// `raw_p` must hold `k` values and `out` must have room for `k` values.
enum AcStatus ac_adjust_pvalues(AcCorrection correction_value,
                                size_t n_systems,
                                const double *raw_p,
                                size_t k,
                                double *out);

// Similarity in [0, 1] between two strings under one of the nine metrics.
//
// # Safety
// `a` and `b` must be NUL-terminated; `out` must be writable.
enum AcStatus ac_similarity(AcMetric metric_value, const char *a, const char *b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALIGNCMP_H */
