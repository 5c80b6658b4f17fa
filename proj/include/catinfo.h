/* catinfo — information-theoretic analysis of categorical data tables.
 *
 * C API for the shared library. All objects are opaque handles created and
 * destroyed through these functions; every fallible call returns a
 * catinfo_status and leaves a human-readable message in catinfo_last_error()
 * (thread-local, valid until the next failing call on the same thread).
 *
 * Analyses produce report handles renderable as stable JSON or as text;
 * both renderings carry the same numbers.
 */

#ifndef CATINFO_H
#define CATINFO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CATINFO_API __declspec(dllexport)
#else
#define CATINFO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum catinfo_status {
    CATINFO_OK = 0,
    CATINFO_ERR_INVALID_ARGUMENT = 1, /* null handles, bad enum values */
    CATINFO_ERR_IO = 2,               /* file not readable */
    CATINFO_ERR_PARSE = 3,            /* malformed CSV/JSON/formula text */
    CATINFO_ERR_SCHEMA = 4,           /* unknown variables or levels */
    CATINFO_ERR_DOMAIN = 5,           /* operation preconditions violated */
    CATINFO_ERR_NUMERIC = 6           /* degenerate tables, rank deficiency */
} catinfo_status;

typedef enum catinfo_input_kind {
    CATINFO_KIND_CELLS = 0,  /* variable columns + literal `count` column */
    CATINFO_KIND_RECORDS = 1 /* one row per subject */
} catinfo_input_kind;

typedef enum catinfo_format {
    CATINFO_FORMAT_TEXT = 0,
    CATINFO_FORMAT_JSON = 1
} catinfo_format;

typedef struct catinfo_schema catinfo_schema;
typedef struct catinfo_table catinfo_table;
typedef struct catinfo_report catinfo_report;

CATINFO_API const char* catinfo_version(void);
CATINFO_API const char* catinfo_last_error(void);

/* ---- schema and table ingestion ---------------------------------------- */

CATINFO_API catinfo_status catinfo_schema_load(const char* path,
                                               catinfo_schema** out);
CATINFO_API catinfo_status catinfo_schema_parse(const char* json_text,
                                                catinfo_schema** out);
CATINFO_API void catinfo_schema_free(catinfo_schema* schema);

CATINFO_API catinfo_status catinfo_table_load_csv(const catinfo_schema* schema,
                                                  const char* path,
                                                  catinfo_input_kind kind,
                                                  catinfo_table** out);
CATINFO_API void catinfo_table_free(catinfo_table* table);

CATINFO_API double catinfo_table_total(const catinfo_table* table);
CATINFO_API int catinfo_table_variable_count(const catinfo_table* table);
CATINFO_API size_t catinfo_table_cell_count(const catinfo_table* table);

/* ---- direct statistics -------------------------------------------------- */

/* Upper chi-square tail probability. */
CATINFO_API catinfo_status catinfo_chi_square_sf(double x, long df, double* p);

/* Grouped mutual information; groups like "A,B|C" (comma within a group,
 * '|' between groups). */
CATINFO_API catinfo_status catinfo_mutual_information(const catinfo_table* table,
                                                      const char* groups,
                                                      double* value, long* df,
                                                      double* p);

/* Conditional mutual information I(a;b|cond); cond may be "" or NULL. */
CATINFO_API catinfo_status catinfo_cmi(const catinfo_table* table, const char* a,
                                       const char* b, const char* cond,
                                       double* value, long* df, double* p);

/* ---- analyses producing reports ----------------------------------------- *
 * options_json may be NULL; recognized keys (all optional):
 *   alpha (0.05), alpha_int (= alpha), alpha_fit (0.05),
 *   seed (20080531), threads (1), refine_depth (2),
 *   target, predictors [..], order [..]  -- command-specific
 */

CATINFO_API catinfo_status catinfo_describe(const catinfo_table* table,
                                            const char* options_json,
                                            catinfo_report** out);

/* Chain decomposition of I(target; predictors). Predictors default to all
 * other variables; options key "order" forces the explicit chain, otherwise
 * the greedy most-insignificant-first peel is used. */
CATINFO_API catinfo_status catinfo_decompose(const catinfo_table* table,
                                             const char* target,
                                             const char* options_json,
                                             catinfo_report** out);

CATINFO_API catinfo_status catinfo_loglinear_fit(const catinfo_table* table,
                                                 const char* formula,
                                                 const char* options_json,
                                                 catinfo_report** out);

CATINFO_API catinfo_status catinfo_loglinear_select(const catinfo_table* table,
                                                    const char* options_json,
                                                    catinfo_report** out);

CATINFO_API catinfo_status catinfo_logit_fit(const catinfo_table* table,
                                             const char* model,
                                             const char* options_json,
                                             catinfo_report** out);

CATINFO_API catinfo_status catinfo_logit_select(const catinfo_table* table,
                                                const char* target,
                                                const char* options_json,
                                                catinfo_report** out);

/* candidate_terms: comma-separated two-way terms, e.g. "M:A,M:D,M:H". */
CATINFO_API catinfo_status catinfo_logit_aic_search(const catinfo_table* table,
                                                    const char* model,
                                                    const char* candidate_terms,
                                                    const char* options_json,
                                                    catinfo_report** out);

/* config_json: {designs:[...], models:[{name,formula},...], replicates,
 * sample_sizes:[...], alpha_fit, master_seed}; options_json may carry
 * {threads, seed} where seed overrides master_seed. */
CATINFO_API catinfo_status catinfo_simulate(const catinfo_table* table,
                                            const char* config_json,
                                            const char* options_json,
                                            catinfo_report** out);

/* ---- reports ------------------------------------------------------------ */

/* Renders into a NUL-terminated string owned by the caller; release it with
 * catinfo_string_free. */
CATINFO_API catinfo_status catinfo_report_render(const catinfo_report* report,
                                                 catinfo_format format, char** out);
CATINFO_API int catinfo_report_has_warnings(const catinfo_report* report);
CATINFO_API void catinfo_report_free(catinfo_report* report);
CATINFO_API void catinfo_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CATINFO_H */
