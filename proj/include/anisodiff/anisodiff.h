/*
 * anisodiff C API.
 *
 * Every function returns an ad_status (or a plain value where it cannot fail).
 * On failure a description is available from ad_last_error() on the calling
 * thread until the next failing call on that thread. Handles are opaque and
 * owned by the caller; free them with the matching *_free function.
 */
#ifndef ANISODIFF_H
#define ANISODIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(ANISODIFF_BUILDING_LIBRARY)
#define AD_API __attribute__((visibility("default")))
#else
#define AD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2, 3, 4 double as the CLI exit codes. */
typedef enum ad_status {
    AD_OK = 0,
    AD_ERR_ARGUMENT = 1,
    AD_ERR_CONFIG = 2,
    AD_ERR_NUMERIC = 3,
    AD_ERR_IO = 4,
    AD_ERR_INTERNAL = 5
} ad_status;

typedef enum ad_curve { AD_CURVE_BLUE = 0, AD_CURVE_RED = 1, AD_CURVE_GREEN = 2 } ad_curve;

typedef struct ad_config ad_config;
typedef struct ad_series ad_series;

AD_API const char* ad_version(void);
AD_API const char* ad_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* experiment: "pde", "sde", "fdr", "sweep" or "figures"; other fields default. */
AD_API ad_status ad_config_new(const char* experiment, ad_config** out);
AD_API ad_status ad_config_from_file(const char* path, ad_config** out);
AD_API ad_status ad_config_from_json(const char* json_text, ad_config** out);
/* Dotted key with a JSON (or bare string) value, e.g. "solver.kappa", "0.01". */
AD_API ad_status ad_config_set(ad_config* cfg, const char* key, const char* value);
AD_API ad_status ad_config_validate(const ad_config* cfg);
/* Writes the resolved config as JSON. *needed receives the size including the
 * terminator; pass buf = NULL to query it. */
AD_API ad_status ad_config_to_json(const ad_config* cfg, char* buf, size_t capacity, size_t* needed);
AD_API void ad_config_free(ad_config* cfg);

/* ---- commands ---------------------------------------------------------- */

/* Runs the configured experiment. out_dir may be NULL to use output.dir, then
 * $ANISODIFF_OUTPUT_ROOT/<experiment>, then ./anisodiff-out/<experiment>. */
AD_API ad_status ad_run(const ad_config* cfg, const char* out_dir);
/* Like ad_run, also copying the run summary into buf (truncated if needed). */
AD_API ad_status ad_run_with_summary(const ad_config* cfg, const char* out_dir, char* buf, size_t capacity,
                                     size_t* needed);
/* Re-runs a manifest into out_dir; *identical is 1 when every CSV matches. */
AD_API ad_status ad_replay(const char* manifest_path, const char* out_dir, int* identical);

/* ---- closed-form rates ------------------------------------------------- */

AD_API ad_status ad_theoretical_exponent(double p, double q, double* out);
/* Exact pq/(p+q+2) for rational p = p_num/p_den, q = q_num/q_den. */
AD_API ad_status ad_theoretical_exponent_rational(int64_t p_num, int64_t p_den, int64_t q_num, int64_t q_den,
                                                  int64_t* out_num, int64_t* out_den);
AD_API ad_status ad_figure_exponent(double p, double q, double* out);
AD_API ad_status ad_figure1_curve(double kappa, ad_curve curve, double* out);
AD_API ad_status ad_figure2_surface(double p, double q, double* out);

/* ---- solver access ----------------------------------------------------- */

/* Runs the PDE described by a config (any experiment kind; solver.kappa is used). */
AD_API ad_status ad_pde_run(const ad_config* cfg, ad_series** out);
AD_API size_t ad_series_size(const ad_series* series);
AD_API ad_status ad_series_get(const ad_series* series, size_t index, double* t, double* norm_sq, double* dissipation);
AD_API void ad_series_free(ad_series* series);

/* Least-squares exponential fit of norm_sq(t) over the [0.1, 0.9] window. */
AD_API ad_status ad_fit_decay(const double* t, const double* norm_sq, size_t n, double* rate, double* prefactor,
                              double* r_squared);

#ifdef __cplusplus
}
#endif

#endif /* ANISODIFF_H */
