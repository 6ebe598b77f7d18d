#ifndef CHAMBERSIM_H
#define CHAMBERSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CS_API __declspec(dllexport)
#else
#define CS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every function returns a status. On failure the thread's last error message
 * describes the problem; out-parameters are left untouched. */
typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_INVALID_ARGUMENT = 1,
  CS_ERR_PARSE = 2,
  CS_ERR_RANGE = 3,
  CS_ERR_IO = 4,
  CS_ERR_NOT_FOUND = 5,
  CS_ERR_NUMERIC = 6,
  CS_ERR_UNDERPOWERED = 7,
  CS_ERR_INTERNAL = 8
} cs_status;

typedef struct cs_params cs_params;
typedef struct cs_protocol cs_protocol;
typedef struct cs_run cs_run;

CS_API const char* cs_version(void);
CS_API const char* cs_status_string(cs_status status);
/* Message of the last failed call on this thread; "" if none. */
CS_API const char* cs_last_error_message(void);
/* Source line of the last parse error, 0 if not a parse error. */
CS_API size_t cs_last_error_line(void);
/* Strings returned through char** out-parameters are freed with this. */
CS_API void cs_string_free(char* s);

/* ---- parameters ---- */
CS_API cs_status cs_params_default(cs_params** out);
CS_API cs_status cs_params_parse(const char* text, cs_params** out);
CS_API cs_status cs_params_load(const char* path, cs_params** out);
/* Apply one `key = value` line on top of the current values. */
CS_API cs_status cs_params_set(cs_params* params, const char* key, const char* value);
CS_API cs_status cs_params_dump(const cs_params* params, char** out);
CS_API void cs_params_free(cs_params* params);

/* ---- protocols ---- */
CS_API cs_status cs_protocol_parse(const char* text, cs_protocol** out);
CS_API cs_status cs_protocol_load(const char* path, cs_protocol** out);
CS_API cs_status cs_protocol_serialize(const cs_protocol* protocol, char** out);
/* Configuration name, e.g. "wt_standard". Static storage. */
CS_API const char* cs_protocol_config(const cs_protocol* protocol);
CS_API void cs_protocol_free(cs_protocol* protocol);

/* ---- runs ---- */
typedef struct cs_run_options {
  const char* fidelity; /* "steady_state" (default when NULL) or "dynamic" */
  int has_seed;         /* nonzero: `seed` overrides the protocol's SEED */
  uint64_t seed;
  int render_images;    /* lt_camera: render a frame per row */
} cs_run_options;

CS_API void cs_run_options_init(cs_run_options* options);
/* `params` may be NULL for defaults. The run copies what it needs. */
CS_API cs_status cs_run_create(const cs_protocol* protocol, const cs_params* params,
                               const cs_run_options* options, cs_run** out);
CS_API size_t cs_run_column_count(const cs_run* run);
CS_API const char* cs_run_column_name(const cs_run* run, size_t index);

typedef struct cs_row {
  double timestamp;
  int intervention;
  size_t n_values;
  const double* values; /* valid until the next cs_run_next or cs_run_free */
  int has_image;
  int image_width;
  int image_height;
  const uint8_t* image_rgb; /* row-major RGB */
} cs_row;

/* Pulls the next row. *has_row is 0 once the protocol is exhausted. */
CS_API cs_status cs_run_next(cs_run* run, cs_row* row, int* has_row);
/* Drains the remaining rows into `<dir>/<name>.csv` (and images). */
CS_API cs_status cs_run_write(cs_run* run, const char* dir, const char* name,
                              size_t* rows_written);
CS_API void cs_run_free(cs_run* run);

/* ---- ground-truth graphs ---- */
CS_API cs_status cs_graph_export(const char* config, char** csv);
CS_API cs_status cs_graph_edge_count(const char* config, size_t* count);
CS_API cs_status cs_graph_is_acyclic(const char* config, int* acyclic);
/* Score a `from,to` edge CSV against the ground truth. */
CS_API cs_status cs_graph_score(const char* config, const char* estimate_csv, double* precision,
                                double* recall);

/* ---- statistics ---- */
CS_API cs_status cs_ks_two_sample(const double* a, size_t n, const double* b, size_t m,
                                  int exact, double* statistic, double* p_value);
/* method: 0 automatic, 1 normal approximation, 2 exact */
CS_API cs_status cs_rank_sum(const double* a, size_t n, const double* b, size_t m, int method,
                             double* statistic, double* p_value);

/* ---- edge validation ---- */
typedef struct cs_validate_options {
  size_t N;
  double alpha;
  double T;
  const char* fidelity;
  uint64_t seed;
  size_t runs;
  unsigned threads;
  int exact_p;
} cs_validate_options;

typedef struct cs_validate_summary {
  size_t requested; /* edges in the request */
  size_t skipped;   /* edges that could not be run */
  size_t tested;    /* (edge, run) pairs with a test result */
  size_t rejected;
  size_t underpowered;
} cs_validate_summary;

CS_API void cs_validate_options_init(cs_validate_options* options);
/* `edges_csv` is a `from,to[,x_A,x_B]` table, or NULL for every ground-truth
 * edge. `report` receives the report CSV, `warnings` one line per skipped
 * edge (may be empty). Either output pointer may be NULL. */
CS_API cs_status cs_validate(const char* config, const cs_params* params, const char* edges_csv,
                             const cs_validate_options* options, char** report, char** warnings,
                             cs_validate_summary* summary);
/* Rejection rate of `from -> to` over `runs` seeded runs, with the bound
 * alpha + 3 sqrt(alpha (1 - alpha) / runs). */
CS_API cs_status cs_level_test(const char* config, const cs_params* params, const char* from,
                               const char* to, size_t runs, const cs_validate_options* options,
                               size_t* rejections, double* rate, double* bound);
/* Curated non-edge list as a `from,to` CSV. */
CS_API cs_status cs_non_edges(const char* config, char** csv);

/* ---- mechanistic models ---- */
/* `axes` are `var=start:stop:step`, `var=value` or `var=v1,v2` strings. */
CS_API cs_status cs_model_table(const char* model, const char* const* axes, size_t n_axes,
                                const cs_params* params, char** csv);

typedef struct cs_model_fit {
  size_t n;
  double rmse;
  double r2;
  double beta0; /* E1 only */
  double beta1; /* E1 only */
} cs_model_fit;

/* Compare a model against `<dir>/<name>.csv`. `target` may be NULL. */
CS_API cs_status cs_model_compare(const char* model, const char* dir, const char* name,
                                  const char* target, const cs_params* params,
                                  cs_model_fit* fit);

#ifdef __cplusplus
}
#endif

#endif
