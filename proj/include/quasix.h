/*
 * quasix - exact conditional tests for comparing square contingency tables
 * under quasi-independence and quasi-symmetry.
 *
 * C API over the core library. All objects are opaque handles created and
 * destroyed here; every fallible call returns a qx_status and leaves a
 * human-readable explanation in qx_last_error() on failure. Handles are not
 * thread-safe for concurrent mutation but are safe to share for reads.
 *
 * Conventions:
 *   - cell addresses (row, col, layer) are 1-based;
 *   - cells are linearized layer-major then row-major everywhere;
 *   - model names: "independence" | "quasi-independence" | "quasi-symmetry"
 *     (short forms "ind" | "qi" | "qs" are accepted);
 *   - stacking names: "single" | "m0" | "m1" | "m2".
 */

#ifndef QUASIX_H
#define QUASIX_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QUASIX_API __declspec(dllexport)
#else
#define QUASIX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qx_status {
  QX_OK = 0,
  QX_ERROR_INVALID = 1,      /* bad argument or contract violation */
  QX_ERROR_PARSE = 2,        /* malformed input file */
  QX_ERROR_UNSUPPORTED = 3,  /* documented refusal (e.g. m2 basis, H > 2) */
  QX_ERROR_CAP_EXCEEDED = 4, /* enumeration node cap hit */
  QX_ERROR_INTERNAL = 5
} qx_status;

typedef struct qx_table qx_table;
typedef struct qx_model qx_model;
typedef struct qx_basis qx_basis;
typedef struct qx_result qx_result;

/* Thread-local message describing the most recent failure in this thread. */
QUASIX_API const char *qx_last_error(void);
QUASIX_API const char *qx_status_name(qx_status status);

/* Frees strings returned through `char **` out-parameters. */
QUASIX_API void qx_string_free(char *text);

/* ---- tables ------------------------------------------------------------ */

/* CSV layout: header `I,H`, then H*I lines of I comma-separated counts,
 * layers in order, rows in order. Blank lines and `#` comments ignored. */
QUASIX_API qx_status qx_table_read_csv(const char *path, qx_table **out);
QUASIX_API qx_status qx_table_create(int size, int layers,
                                     const int64_t *counts, qx_table **out);
/* Stack single-layer (or compatible) tables into one table, layers in
 * argument order. */
QUASIX_API qx_status qx_table_stack(const qx_table *const *tables, int count,
                                    qx_table **out);
/* Extract one layer as a new single-layer table. */
QUASIX_API qx_status qx_table_layer(const qx_table *table, int layer,
                                    qx_table **out);
QUASIX_API void qx_table_free(qx_table *table);

QUASIX_API int qx_table_size(const qx_table *table);
QUASIX_API int qx_table_layers(const qx_table *table);
QUASIX_API int64_t qx_table_count(const qx_table *table, int row, int col,
                                  int layer);
QUASIX_API int64_t qx_table_total(const qx_table *table);
QUASIX_API int64_t qx_table_layer_total(const qx_table *table, int layer);

/* ---- model matrices ---------------------------------------------------- */

QUASIX_API qx_status qx_model_create(const char *model, const char *stack,
                                     int size, int layers, qx_model **out);
QUASIX_API void qx_model_free(qx_model *model);

QUASIX_API int qx_model_rows(const qx_model *model);
QUASIX_API int qx_model_cols(const qx_model *model);
/* Exact rank over the rationals. */
QUASIX_API int qx_model_rank(const qx_model *model);
QUASIX_API int qx_model_entry(const qx_model *model, int row, int col);
/* Plain-text export: first line `n d`, then n lines of d integers. */
QUASIX_API qx_status qx_model_format(const qx_model *model, char **out);
/* rank(alt) - rank(null); fails unless the null column space is contained
 * in the alternative's. */
QUASIX_API qx_status qx_nested_df(const qx_model *null_model,
                                  const qx_model *alt_model, int *out_df);

/* ---- Markov bases ------------------------------------------------------ */

QUASIX_API qx_status qx_basis_create(const char *model, const char *stack,
                                     int size, int layers, qx_basis **out);
QUASIX_API void qx_basis_free(qx_basis *basis);

/* Number of stored moves; each move stands for the pair {+m, -m}. */
QUASIX_API int64_t qx_basis_count(const qx_basis *basis);
QUASIX_API int qx_basis_cells(const qx_basis *basis);
QUASIX_API int qx_basis_entry(const qx_basis *basis, int64_t move, int cell);
/* format: "moves" = one move per line of K' integers; "matrix" = the same
 * preceded by an `n d` header line. */
QUASIX_API qx_status qx_basis_format(const qx_basis *basis, const char *format,
                                     char **out);

/* ---- maximum likelihood fits ------------------------------------------- */

typedef struct qx_fit_report {
  double statistic;    /* G2 (nonnegative; +inf on boundary) */
  int df;              /* rank-based degrees of freedom */
  double p_asymptotic; /* chi-square upper tail */
  int boundary;        /* observed count positive on a forced-zero cell */
  int converged;
  int iterations;
} qx_fit_report;

/* Goodness of fit of the table under the model, against saturated. */
QUASIX_API qx_status qx_fit_gof(const qx_table *table, const char *model,
                                const char *stack, qx_fit_report *out);
/* Nested-model statistic between two stackings of the same base model. */
QUASIX_API qx_status qx_fit_nested(const qx_table *table, const char *model,
                                   const char *null_stack,
                                   const char *alt_stack, qx_fit_report *out);
/* Fitted expected counts; `out` must hold size*size*layers doubles. */
QUASIX_API qx_status qx_fitted_values(const qx_table *table, const char *model,
                                      const char *stack, double *out);

/* Upper tail of the chi-square distribution. */
QUASIX_API qx_status qx_chi_square_sf(double x, int df, double *out);

/* ---- exact tests (Metropolis walk over the fiber) ----------------------- */

typedef struct qx_walk_config {
  int64_t burn_in;  /* default 50000 */
  int64_t thinning; /* default 50 */
  int64_t samples;  /* default 10000 */
  uint64_t seed;    /* default 1 */
} qx_walk_config;

QUASIX_API void qx_walk_config_init(qx_walk_config *config);

/* Exact conditional test of the null model against `alt` (a stacking name,
 * or "saturated" for a goodness-of-fit test). The walk uses the null
 * model's Markov basis. */
QUASIX_API qx_status qx_exact_test(const qx_table *table, const char *model,
                                   const char *null_stack, const char *alt,
                                   const qx_walk_config *config,
                                   qx_result **out);
QUASIX_API void qx_result_free(qx_result *result);

QUASIX_API double qx_result_statistic(const qx_result *result);
QUASIX_API int qx_result_df(const qx_result *result);
QUASIX_API double qx_result_p_exact(const qx_result *result);
QUASIX_API double qx_result_mc_se(const qx_result *result);
QUASIX_API double qx_result_p_asymptotic(const qx_result *result);
QUASIX_API double qx_result_acceptance_rate(const qx_result *result);
QUASIX_API double qx_result_sampled_min(const qx_result *result);
QUASIX_API double qx_result_sampled_median(const qx_result *result);
QUASIX_API double qx_result_sampled_max(const qx_result *result);
QUASIX_API int64_t qx_result_samples(const qx_result *result);
QUASIX_API uint64_t qx_result_seed(const qx_result *result);

/* JSON object with fields `statistic`, `df`, `p_exact`, `mc_se`,
 * `p_asymptotic`, `acceptance_rate`, `samples`, `seed`, `sampled`. */
QUASIX_API qx_status qx_result_json(const qx_result *result, char **out);

/* ---- brute-force fiber oracle ------------------------------------------ */

/* Number of tables in the fiber of `table` under the model; `cap` bounds
 * the search (<= 0 uses the default of 1e6 nodes). */
QUASIX_API qx_status qx_fiber_size(const qx_table *table, const char *model,
                                   const char *stack, int64_t cap,
                                   int64_t *out_size);
/* Exact p-value by total enumeration; `alt` as in qx_exact_test. */
QUASIX_API qx_status qx_fiber_exact_pvalue(const qx_table *table,
                                           const char *model,
                                           const char *null_stack,
                                           const char *alt, int64_t cap,
                                           double *out_p);

#ifdef __cplusplus
}
#endif

#endif /* QUASIX_H */
