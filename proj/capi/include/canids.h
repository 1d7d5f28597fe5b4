/* C API for the canids detection library.
 *
 * Every function that can fail returns canids_status; on failure the
 * thread-local message from canids_last_error() describes the problem.
 * Out-parameters are written only on CANIDS_OK. Handles are opaque and must
 * be released with their matching _free function (NULL is accepted).
 */
#ifndef CANIDS_H
#define CANIDS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum canids_status {
    CANIDS_OK = 0,
    CANIDS_ERR_IO = 1,
    CANIDS_ERR_PARSE = 2,
    CANIDS_ERR_INVALID = 3,
    CANIDS_ERR_DOMAIN = 4,
    CANIDS_ERR_STATE = 5,
    CANIDS_ERR_DEGENERATE = 6,
    CANIDS_ERR_INTERNAL = 7
} canids_status;

typedef enum canids_log_format { CANIDS_FORMAT_LONG = 0, CANIDS_FORMAT_WIDE = 1 } canids_log_format;
typedef enum canids_span_policy { CANIDS_SPAN_INTERSECT = 0, CANIDS_SPAN_COVER = 1 } canids_span_policy;
typedef enum canids_method {
    CANIDS_METHOD_CORR_DISTRIBUTION = 0,
    CANIDS_METHOD_CORR_CORRELATION = 1,
    CANIDS_METHOD_GANESAN17 = 2,
    CANIDS_METHOD_MORIANO22 = 3
} canids_method;
typedef enum canids_inject_mode {
    CANIDS_INJECT_CONSTANT_MAX = 0,
    CANIDS_INJECT_CONSTANT_VALUE = 1,
    CANIDS_INJECT_DECORRELATE = 2
} canids_inject_mode;

typedef struct canids_matrix canids_matrix;
typedef struct canids_params canids_params;
typedef struct canids_truthset canids_truthset;
typedef struct canids_model canids_model;
typedef struct canids_scores canids_scores;
typedef struct canids_report canids_report;
typedef struct canids_hpreport canids_hpreport;

const char* canids_version(void);
const char* canids_last_error(void);

/* ------------------------------ matrices ------------------------------ */

canids_status canids_log_load(const char* path, canids_log_format format, double rate_hz,
                              canids_span_policy span, canids_matrix** out);
canids_status canids_matrix_read_csv(const char* path, canids_matrix** out);
canids_status canids_matrix_write_csv(const canids_matrix* m, const char* path);
size_t canids_matrix_rows(const canids_matrix* m);
size_t canids_matrix_cols(const canids_matrix* m);
double canids_matrix_rate_hz(const canids_matrix* m);
double canids_matrix_start_time(const canids_matrix* m);
/* Returns NULL when the column index is out of range. */
const char* canids_matrix_signal_id(const canids_matrix* m, size_t column);
void canids_matrix_free(canids_matrix* m);

/* --------------------------- normalization ---------------------------- */

canids_status canids_params_fit(const canids_matrix* m, canids_params** out);
canids_status canids_params_apply(const canids_matrix* m, const canids_params* p, canids_matrix** out);
canids_status canids_params_write_json(const canids_params* p, double rate_hz, const char* path);
canids_status canids_params_read_json(const char* path, canids_params** out);
size_t canids_params_retained_count(const canids_params* p);
void canids_params_free(canids_params* p);

/* --------------------------- attack synthesis ------------------------- */

canids_status canids_benign_fixture(size_t samples, double rate_hz, uint64_t seed, size_t pairs,
                                    canids_matrix** out);
canids_status canids_inject(const canids_matrix* m, const char* signal_id, double t_start, double t_end,
                            canids_inject_mode mode, double value, uint64_t seed,
                            const canids_params* train_params_or_null, canids_matrix** out);

/* ------------------------------ ground truth -------------------------- */

canids_status canids_truth_new(canids_truthset** out);
canids_status canids_truth_add(canids_truthset* t, const char* capture, double t_start, double t_end);
canids_status canids_truth_read_csv(const char* path, canids_truthset** out);
canids_status canids_truth_write_csv(const canids_truthset* t, const char* path);
void canids_truth_free(canids_truthset* t);

/* ------------------------------ detection ----------------------------- */

typedef struct canids_detector_config {
    canids_method method;
    double eps;      /* ganesan17 */
    int min_samples; /* ganesan17 */
    double r;        /* moriano22 */
    double alpha;    /* moriano22 */
} canids_detector_config;

/* Fills the method's default hyperparameters. */
void canids_config_default(canids_method method, canids_detector_config* out);

canids_status canids_fit(const canids_matrix* normalized_train, const canids_detector_config* config,
                         size_t omega, size_t delta, canids_model** out);
canids_status canids_score(const canids_model* model, const canids_matrix* normalized_capture,
                           size_t omega, size_t delta, canids_scores** out);
/* Moriano22 models only: the training dendrogram as merge-list text. */
canids_status canids_model_dendrogram_text(const canids_model* model, char** out_text);
void canids_model_free(canids_model* m);
void canids_text_free(char* text);

size_t canids_scores_count(const canids_scores* s);
canids_status canids_scores_get(const canids_scores* s, size_t i, size_t* window_index, double* start_time,
                                double* end_time, double* score, int64_t* duration_ns, int* degenerate);
canids_status canids_scores_write_jsonl(const canids_scores* s, const char* path);
canids_status canids_scores_write_csv(const canids_scores* s, const char* path);
canids_status canids_scores_read_jsonl(const char* path, canids_scores** out);
void canids_scores_free(canids_scores* s);

/* ------------------------------ evaluation ---------------------------- */

typedef struct canids_ttw {
    double mean_ms, std_ms, median_ms, min_ms, max_ms, total_ms;
    size_t window_count;
} canids_ttw;

/* AUC of a score stream against the capture's injection intervals.
 * auc_defined is 0 when the windows hold a single class. */
canids_status canids_evaluate_scores(const canids_scores* s, const canids_truthset* truth, const char* capture,
                                     double* auc, int* auc_defined, double* positive_fraction, canids_ttw* ttw);

typedef struct canids_grid {
    size_t omega_min, omega_max, omega_step;
    size_t delta_min, delta_step; /* delta runs up to omega */
} canids_grid;

void canids_grid_default(canids_grid* out);

/* Sweep one attack set: captures[i] is a normalized capture whose injections
 * are listed under capture_names[i] in truth. workers 0 = all cores;
 * ttw_fidelity nonzero forces a single worker. */
canids_status canids_sweep(const canids_matrix* normalized_train, const canids_matrix* const* captures,
                           const char* const* capture_names, size_t capture_count, const canids_truthset* truth,
                           const canids_detector_config* config, const canids_grid* grid_or_null, int workers,
                           int ttw_fidelity, const char* attack_set, canids_report** out);

size_t canids_report_cell_count(const canids_report* r);
canids_status canids_report_cell(const canids_report* r, size_t i, size_t* omega, size_t* delta,
                                 int* state /* 0 computed, 1 skipped, 2 undefined */, double* auc,
                                 canids_ttw* ttw, size_t* window_count, double* positive_fraction);
canids_status canids_report_auc_summary(const canids_report* r, double* mean, double* stddev, double* median,
                                        double* min, double* max);
canids_status canids_report_write_csv(const canids_report* r, const char* path);
canids_status canids_report_write_json(const canids_report* r, const char* path);
/* Combined summary table across several reports: one row per (attack set,
 * detector) with the AUC and TTW summary statistics. */
canids_status canids_reports_write_summary_csv(const canids_report* const* reports, size_t count,
                                               const char* path);
void canids_report_free(canids_report* r);

canids_status canids_hyperparam_search(const canids_matrix* normalized_train, const canids_matrix* const* captures,
                                       const char* const* capture_names, size_t capture_count,
                                       const canids_truthset* truth, size_t omega, size_t delta, int workers,
                                       const char* attack_set, canids_hpreport** out);
size_t canids_hpreport_cell_count(const canids_hpreport* r);
canids_status canids_hpreport_cell(const canids_hpreport* r, size_t i, double* param_r, double* alpha, double* auc,
                                   int* defined, int* is_default);
canids_status canids_hpreport_best(const canids_hpreport* r, double* param_r, double* alpha, double* auc,
                                   double* default_auc, double* absolute_change);
canids_status canids_hpreport_write_csv(const canids_hpreport* r, const char* path);
canids_status canids_hpreport_write_json(const canids_hpreport* r, const char* path);
void canids_hpreport_free(canids_hpreport* r);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CANIDS_H */
