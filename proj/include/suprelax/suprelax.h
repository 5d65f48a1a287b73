/*
 * C interface to the suprelax library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function (passing NULL is allowed). Every fallible call
 * returns an sr_status; on failure the message is available from
 * sr_last_error() on the same thread until the next failing call.
 */
#ifndef SUPRELAX_H
#define SUPRELAX_H

#include <stddef.h>

#if defined(_WIN32)
#define SR_API __declspec(dllexport)
#else
#define SR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sr_status {
  SR_OK = 0,
  SR_ERR_DOMAIN = 1,
  SR_ERR_RESOURCE = 2,
  SR_ERR_PARSE = 3,
  SR_ERR_IO = 4,
  SR_ERR_PRECONDITION = 5,
  SR_ERR_INTERNAL = 6,
  SR_ERR_ARGUMENT = 7
} sr_status;

typedef enum sr_hull_kind { SR_HULL_SC = 0, SR_HULL_HAT = 1, SR_HULL_CARTESIAN = 2 } sr_hull_kind;

typedef enum sr_envelope_kind { SR_ENV_SLC = 0, SR_ENV_XLC = 1, SR_ENV_HAT = 2 } sr_envelope_kind;

typedef struct sr_options {
  int threads;
  size_t clique_vertex_cap;
  size_t square_cap;
  size_t subset_cap;
} sr_options;

typedef struct sr_mask sr_mask;
typedef struct sr_polytopes sr_polytopes;
typedef struct sr_density sr_density;
typedef struct sr_envelope sr_envelope;
typedef struct sr_field sr_field;
typedef struct sr_fn sr_fn;
typedef struct sr_report sr_report;
typedef struct sr_lsc sr_lsc;

SR_API const char* sr_version(void);
SR_API const char* sr_last_error(void);
SR_API const char* sr_status_name(sr_status status);

/* threads 1, clique cap 64, square cap 100000, subset cap 6 */
SR_API void sr_options_init(sr_options* opts);

/* ---- masks ---- */
SR_API sr_status sr_mask_read_csv(const char* path, sr_mask** out);
SR_API sr_status sr_mask_write_csv(const sr_mask* mask, const char* path);
SR_API size_t sr_mask_size(const sr_mask* mask);
SR_API int sr_mask_test(const sr_mask* mask, size_t i, size_t j);
SR_API int sr_mask_is_symmetric(const sr_mask* mask);
SR_API int sr_mask_is_diagonal(const sr_mask* mask);
SR_API void sr_mask_free(sr_mask* mask);

/* SR_HULL_SC and SR_HULL_HAT only; use sr_mask_cartesian_hull for the third kind. */
SR_API sr_status sr_mask_hull(const sr_mask* mask, sr_hull_kind kind, sr_mask** out);
SR_API sr_status sr_mask_cartesian_hull(const sr_mask* mask, const sr_options* opts, sr_polytopes** out);
SR_API sr_status sr_mask_has_basic_cartesian_convexification(const sr_mask* mask, const sr_options* opts,
                                                              int* out);

SR_API size_t sr_polytopes_count(const sr_polytopes* set);
SR_API sr_status sr_polytopes_rasterize(const sr_polytopes* set, sr_mask** out);
SR_API sr_status sr_polytopes_write_json(const sr_polytopes* set, const char* path);
SR_API void sr_polytopes_free(sr_polytopes* set);

/* ---- densities ---- */
SR_API sr_status sr_density_from_config(const char* config_path, sr_density** out);
SR_API sr_status sr_density_from_expr(const char* expr, int d, double min, double max, int n, sr_density** out);
SR_API sr_status sr_density_read_csv(const char* path, sr_density** out);
SR_API sr_status sr_density_write_csv(const sr_density* density, const char* path);
SR_API size_t sr_density_size(const sr_density* density);
SR_API double sr_density_value(const sr_density* density, size_t i, size_t j);
SR_API int sr_density_is_symmetric(const sr_density* density);
SR_API int sr_density_is_diagonal(const sr_density* density);
SR_API sr_status sr_density_sublevel(const sr_density* density, double c, sr_mask** out);
SR_API void sr_density_free(sr_density* density);

SR_API sr_status sr_envelope_compute(const sr_density* density, sr_envelope_kind kind, const sr_options* opts,
                                     sr_envelope** out);
/* Borrowed view of the envelope table; valid while the envelope lives. */
SR_API const sr_density* sr_envelope_table(const sr_envelope* env);
SR_API size_t sr_envelope_fixups(const sr_envelope* env);
SR_API size_t sr_envelope_level_count(const sr_envelope* env);
/* Writes the table CSV to csv_path and {levels, fixups} to sidecar_path (may be NULL). */
SR_API sr_status sr_envelope_write(const sr_envelope* env, const char* csv_path, const char* sidecar_path);
SR_API void sr_envelope_free(sr_envelope* env);

/* ---- fields and functionals ---- */
SR_API sr_status sr_field_read_csv(const char* path, sr_field** out);
SR_API sr_status sr_field_write_csv(const sr_field* field, const char* path);
SR_API size_t sr_field_cells(const sr_field* field);
SR_API void sr_field_free(sr_field* field);

SR_API sr_status sr_eval_sup(const sr_density* density, const sr_field* field, double* out);
SR_API sr_status sr_feasibility(const sr_mask* mask, const sr_field* field, int* out);

SR_API sr_status sr_fn_write_csv(const sr_fn* fn, const char* path);
SR_API sr_status sr_fn_eval(const sr_fn* fn, double x, double* out_components);
SR_API void sr_fn_free(sr_fn* fn);

/* ---- relaxation oracle ---- */
SR_API sr_status sr_relax(const sr_density* density, const sr_field* target, const sr_options* opts,
                          sr_report** out);
SR_API sr_status sr_report_read_json(const char* path, sr_report** out);
SR_API sr_status sr_report_write_json(const sr_report* report, const char* path);
/* Return 1 and store the value when present, 0 otherwise. */
SR_API int sr_report_oracle_value(const sr_report* report, double* out);
SR_API int sr_report_envelope_value(const sr_report* report, double* out);
SR_API int sr_report_gap(const sr_report* report, double* out);
SR_API void sr_report_free(sr_report* report);

/* Oscillating recovery sequence from a report's witness; *out_distance may be NULL. */
SR_API sr_status sr_oscillate(const sr_report* report, size_t k, sr_fn** out, double* out_distance);

SR_API sr_status sr_check_lsc(const sr_density* density, const sr_field* target, const size_t* ks, size_t nk,
                              const sr_options* opts, sr_lsc** out);
/* 1 when lsc is violated, 0 when consistent. */
SR_API int sr_lsc_violated(const sr_lsc* lsc);
SR_API sr_status sr_lsc_write_json(const sr_lsc* lsc, const char* path);
SR_API void sr_lsc_free(sr_lsc* lsc);

#ifdef __cplusplus
}
#endif

#endif /* SUPRELAX_H */
