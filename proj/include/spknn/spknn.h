/* spknn: spatial kNN kernel regression and classification.
 *
 * Plain C interface over the C++ core. Every fallible call returns an
 * spknn_status; on failure spknn_last_error() holds a message for the calling
 * thread. Handles are opaque and released with the matching *_free. */
#ifndef SPKNN_SPKNN_H
#define SPKNN_SPKNN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SPKNN_BUILDING)
#    define SPKNN_API __declspec(dllexport)
#  else
#    define SPKNN_API __declspec(dllimport)
#  endif
#else
#  define SPKNN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spknn_status {
  SPKNN_OK = 0,
  SPKNN_E_INVALID_ARGUMENT = 1,
  SPKNN_E_INVALID_STATE = 2,
  SPKNN_E_INVALID_DATA = 3,
  SPKNN_E_SCHEMA = 4,
  SPKNN_E_PARSE = 5,
  SPKNN_E_IO = 6,
  SPKNN_E_CONFIG = 7,
  SPKNN_E_NUMERICAL = 8,
  SPKNN_E_DEGENERATE = 9,
  SPKNN_E_OUT_OF_MEMORY = 10,
  SPKNN_E_INTERNAL = 11
} spknn_status;

/* Catalog order; also the tie-break order of the grid search. */
typedef enum spknn_kernel {
  SPKNN_KERNEL_BIWEIGHT = 0,
  SPKNN_KERNEL_EPANECHNIKOV = 1,
  SPKNN_KERNEL_GAUSSIAN = 2,
  SPKNN_KERNEL_INDICATOR = 3,
  SPKNN_KERNEL_PARZEN = 4,
  SPKNN_KERNEL_TRIANGULAR = 5
} spknn_kernel;

SPKNN_API const char* spknn_version(void);
SPKNN_API const char* spknn_last_error(void);
SPKNN_API const char* spknn_status_name(spknn_status status);
/* 0 ok, 1 user error, 2 data error, 3 numerical failure */
SPKNN_API int spknn_exit_code(spknn_status status);

/* ---- kernels ---- */
SPKNN_API const char* spknn_kernel_name(spknn_kernel k);
SPKNN_API spknn_status spknn_kernel_from_name(const char* name, spknn_kernel* out);
SPKNN_API spknn_status spknn_kernel_eval(spknn_kernel k, double u, double* out);

/* ---- neighbors ---- */
/* Distance from `query` to its k-th nearest row of `points` (n x dim). */
SPKNN_API spknn_status spknn_knn_bandwidth(const double* points, size_t n, size_t dim, const double* query,
                                           size_t k, double* out);

/* ---- datasets ---- */
typedef struct spknn_dataset spknn_dataset;

typedef struct spknn_csv_schema {
  const char* const* site_columns;
  size_t n_site_columns;
  const char* const* covariate_columns;
  size_t n_covariate_columns;
  const char* response_column; /* NULL: none */
  const char* label_column;    /* NULL: none */
  char delimiter;              /* 0: ',' */
} spknn_csv_schema;

/* Row-major sites (n x site_dim) and covariates (n x cov_dim). responses and
 * labels (classes 1..M) may be NULL. Constructors set *out to NULL on failure. */
SPKNN_API spknn_status spknn_dataset_create(size_t n, size_t site_dim, const double* sites, size_t cov_dim,
                                            const double* covariates, const double* responses, const int* labels,
                                            spknn_dataset** out);
SPKNN_API spknn_status spknn_dataset_read_csv(const char* path, const spknn_csv_schema* schema,
                                              spknn_dataset** out);
SPKNN_API spknn_status spknn_dataset_write_csv(const spknn_dataset* data, const char* path,
                                               const spknn_csv_schema* schema);
SPKNN_API void spknn_dataset_free(spknn_dataset* data);

SPKNN_API size_t spknn_dataset_size(const spknn_dataset* data);
SPKNN_API size_t spknn_dataset_site_dim(const spknn_dataset* data);
SPKNN_API size_t spknn_dataset_cov_dim(const spknn_dataset* data);
SPKNN_API int spknn_dataset_has_responses(const spknn_dataset* data);
SPKNN_API int spknn_dataset_num_classes(const spknn_dataset* data);
/* Copies row i; any output pointer may be NULL. */
SPKNN_API spknn_status spknn_dataset_row(const spknn_dataset* data, size_t i, double* site, double* covariate,
                                         double* response, int* label);

/* Simulated lattice dataset (one covariate X, response Y). */
SPKNN_API spknn_status spknn_simulate(size_t rows, size_t cols, double a, double z_variance, uint64_t seed,
                                      spknn_dataset** out);

/* ---- estimation ---- */
typedef struct spknn_knn_params {
  size_t k;
  size_t k_prime;
  spknn_kernel k1;
  spknn_kernel k2;
} spknn_knn_params;

typedef struct spknn_nw_params {
  double h;
  double rho;
  spknn_kernel k1;
  spknn_kernel k2;
} spknn_nw_params;

SPKNN_API spknn_status spknn_predict_knn(const spknn_dataset* data, const double* s0, const double* x,
                                         const spknn_knn_params* p, double* out);
SPKNN_API spknn_status spknn_predict_nw(const spknn_dataset* data, const double* s0, const double* x,
                                        const spknn_nw_params* p, double* out);
SPKNN_API spknn_status spknn_classify_knn(const spknn_dataset* data, const double* s0, const double* x,
                                          const spknn_knn_params* p, int num_classes, int* out);
SPKNN_API spknn_status spknn_classify_nw(const spknn_dataset* data, const double* s0, const double* x,
                                         const spknn_nw_params* p, int num_classes, int* out);

/* ---- tuning and evaluation ---- */
SPKNN_API spknn_status spknn_loo_mae_knn(const spknn_dataset* data, const spknn_knn_params* p,
                                         unsigned threads, double* out);
SPKNN_API spknn_status spknn_loo_mae_nw(const spknn_dataset* data, const spknn_nw_params* p, unsigned threads,
                                        double* out);
/* Empty (n = 0) lists take the defaults for `data`. */
SPKNN_API spknn_status spknn_cv_select_knn(const spknn_dataset* data, const size_t* k_values, size_t n_k,
                                           const size_t* k_prime_values, size_t n_k_prime, unsigned threads,
                                           spknn_knn_params* best, double* score);
SPKNN_API spknn_status spknn_cv_select_nw(const spknn_dataset* data, const double* h_values, size_t n_h,
                                          const double* rho_values, size_t n_rho, unsigned threads,
                                          spknn_nw_params* best, double* score);
/* One-sided paired test of mean(a - b) > 0. */
SPKNN_API spknn_status spknn_paired_ttest(const double* a, const double* b, size_t n, double* t, double* p);
SPKNN_API spknn_status spknn_student_t_cdf(double t, double df, double* out);

/* ---- configuration and commands ---- */
typedef struct spknn_config spknn_config;

SPKNN_API spknn_status spknn_config_new(spknn_config** out);
SPKNN_API spknn_status spknn_config_parse_file(const char* path, spknn_config** out);
SPKNN_API spknn_status spknn_config_parse_text(const char* text, spknn_config** out);
SPKNN_API spknn_status spknn_config_set(spknn_config* cfg, const char* key, const char* value);
/* String getters follow snprintf: *needed gets the full length without the
 * terminator; buf may be NULL when cap is 0. */
SPKNN_API spknn_status spknn_config_get(const spknn_config* cfg, const char* key, char* buf, size_t cap,
                                        size_t* needed);
SPKNN_API spknn_status spknn_config_render(const spknn_config* cfg, char* buf, size_t cap, size_t* needed);
SPKNN_API void spknn_config_free(spknn_config* cfg);

typedef void (*spknn_progress_fn)(const char* message, void* user);
typedef struct spknn_outcome spknn_outcome;

/* mode: simulate, cv, predict, classify or benchmark; NULL uses the
 * config's mode key. An outcome is produced whenever the returned status is
 * not SPKNN_E_INVALID_ARGUMENT for a NULL argument. */
SPKNN_API spknn_status spknn_run(const spknn_config* cfg, const char* mode, spknn_progress_fn progress,
                                 void* user, spknn_outcome** out);
SPKNN_API int spknn_outcome_exit_code(const spknn_outcome* o);
SPKNN_API const char* spknn_outcome_summary(const spknn_outcome* o);
SPKNN_API const char* spknn_outcome_report_path(const spknn_outcome* o);
SPKNN_API void spknn_outcome_free(spknn_outcome* o);

#ifdef __cplusplus
}
#endif

#endif /* SPKNN_SPKNN_H */
