#include "canids.h"

#include <cstring>
#include <new>
#include <string>

#include "canids/detector.hpp"
#include "canids/error.hpp"
#include "canids/evaluate.hpp"
#include "canids/signal.hpp"
#include "canids/synth.hpp"

namespace {

thread_local std::string g_last_error;

canids_status status_of(canids::Errc code) {
    using canids::Errc;
    switch (code) {
    case Errc::io: return CANIDS_ERR_IO;
    case Errc::parse: return CANIDS_ERR_PARSE;
    case Errc::invalid_argument: return CANIDS_ERR_INVALID;
    case Errc::domain: return CANIDS_ERR_DOMAIN;
    case Errc::state: return CANIDS_ERR_STATE;
    case Errc::degenerate_input: return CANIDS_ERR_DEGENERATE;
    case Errc::internal: return CANIDS_ERR_INTERNAL;
    }
    return CANIDS_ERR_INTERNAL;
}

template <typename Fn>
canids_status guarded(Fn&& fn) {
    try {
        fn();
        return CANIDS_OK;
    } catch (const canids::Error& e) {
        g_last_error = e.what();
        return status_of(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return CANIDS_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CANIDS_ERR_INTERNAL;
    }
}

canids_status require(bool ok, const char* message) {
    if (ok) return CANIDS_OK;
    g_last_error = message;
    return CANIDS_ERR_INVALID;
}

canids::Method to_method(canids_method m) {
    switch (m) {
    case CANIDS_METHOD_CORR_DISTRIBUTION: return canids::Method::corr_distribution;
    case CANIDS_METHOD_CORR_CORRELATION: return canids::Method::corr_correlation;
    case CANIDS_METHOD_GANESAN17: return canids::Method::ganesan17;
    case CANIDS_METHOD_MORIANO22: return canids::Method::moriano22;
    }
    canids::raise(canids::Errc::invalid_argument, "bad method enum value");
}

canids::DetectorConfig to_config(const canids_detector_config& c) {
    canids::DetectorConfig out;
    out.method = to_method(c.method);
    out.eps = c.eps;
    out.min_samples = c.min_samples;
    out.r = c.r;
    out.alpha = c.alpha;
    return out;
}

canids_ttw to_ttw(const canids::TtwStats& t) {
    return {t.mean_ms, t.std_ms, t.median_ms, t.min_ms, t.max_ms, t.total_ms, t.window_count};
}

} // namespace

struct canids_matrix {
    canids::SignalMatrix m;
};
struct canids_params {
    canids::NormalizationParams p;
    double rate_hz = 100.0;
};
struct canids_truthset {
    canids::TruthSet t;
};
struct canids_model {
    canids::TrainedModel m;
};
struct canids_scores {
    std::vector<canids::AnomalyScore> s;
};
struct canids_report {
    canids::HeatmapReport r;
};
struct canids_hpreport {
    canids::HyperparamReport r;
};

namespace {

std::vector<canids::Capture> collect_captures(const canids_matrix* const* captures,
                                              const char* const* capture_names, size_t capture_count,
                                              const canids_truthset* truth) {
    std::vector<canids::Capture> out;
    out.reserve(capture_count);
    for (size_t i = 0; i < capture_count; ++i) {
        if (!captures[i] || !capture_names[i])
            canids::raise(canids::Errc::invalid_argument, "null capture entry");
        canids::Capture c;
        c.name = capture_names[i];
        c.matrix = captures[i]->m;
        if (truth) {
            auto it = truth->t.find(c.name);
            if (it != truth->t.end()) c.truth = it->second;
        }
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace

extern "C" {

const char* canids_version(void) { return "0.1.0"; }
const char* canids_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------ matrices ------------------------------ */

canids_status canids_log_load(const char* path, canids_log_format format, double rate_hz,
                              canids_span_policy span, canids_matrix** out) {
    if (auto st = require(path && out, "canids_log_load: null argument")) return st;
    return guarded([&] {
        const auto traces = canids::parse_signal_log(
            path, format == CANIDS_FORMAT_LONG ? canids::LogFormat::csv_long : canids::LogFormat::csv_wide);
        auto m = canids::resample(traces, rate_hz,
                                  span == CANIDS_SPAN_COVER ? canids::SpanPolicy::cover
                                                            : canids::SpanPolicy::intersect);
        *out = new canids_matrix{std::move(m)};
    });
}

canids_status canids_matrix_read_csv(const char* path, canids_matrix** out) {
    if (auto st = require(path && out, "canids_matrix_read_csv: null argument")) return st;
    return guarded([&] { *out = new canids_matrix{canids::read_matrix_csv(path)}; });
}

canids_status canids_matrix_write_csv(const canids_matrix* m, const char* path) {
    if (auto st = require(m && path, "canids_matrix_write_csv: null argument")) return st;
    return guarded([&] { canids::write_matrix_csv(m->m, path); });
}

size_t canids_matrix_rows(const canids_matrix* m) { return m ? m->m.rows() : 0; }
size_t canids_matrix_cols(const canids_matrix* m) { return m ? m->m.cols() : 0; }
double canids_matrix_rate_hz(const canids_matrix* m) { return m ? m->m.rate_hz : 0.0; }
double canids_matrix_start_time(const canids_matrix* m) { return m ? m->m.start_time : 0.0; }

const char* canids_matrix_signal_id(const canids_matrix* m, size_t column) {
    if (!m || column >= m->m.cols()) return nullptr;
    return m->m.columns[column].c_str();
}

void canids_matrix_free(canids_matrix* m) { delete m; }

/* --------------------------- normalization ---------------------------- */

canids_status canids_params_fit(const canids_matrix* m, canids_params** out) {
    if (auto st = require(m && out, "canids_params_fit: null argument")) return st;
    return guarded([&] { *out = new canids_params{canids::fit_normalization(m->m), m->m.rate_hz}; });
}

canids_status canids_params_apply(const canids_matrix* m, const canids_params* p, canids_matrix** out) {
    if (auto st = require(m && p && out, "canids_params_apply: null argument")) return st;
    return guarded([&] { *out = new canids_matrix{canids::apply_normalization(m->m, p->p)}; });
}

canids_status canids_params_write_json(const canids_params* p, double rate_hz, const char* path) {
    if (auto st = require(p && path, "canids_params_write_json: null argument")) return st;
    return guarded([&] { canids::write_params_json(p->p, rate_hz > 0 ? rate_hz : p->rate_hz, path); });
}

canids_status canids_params_read_json(const char* path, canids_params** out) {
    if (auto st = require(path && out, "canids_params_read_json: null argument")) return st;
    return guarded([&] {
        double rate = 100.0;
        auto params = canids::read_params_json(path, &rate);
        *out = new canids_params{std::move(params), rate};
    });
}

size_t canids_params_retained_count(const canids_params* p) { return p ? p->p.retained.size() : 0; }
void canids_params_free(canids_params* p) { delete p; }

/* --------------------------- attack synthesis ------------------------- */

canids_status canids_benign_fixture(size_t samples, double rate_hz, uint64_t seed, size_t pairs,
                                    canids_matrix** out) {
    if (auto st = require(out != nullptr, "canids_benign_fixture: null output")) return st;
    return guarded([&] { *out = new canids_matrix{canids::make_benign_fixture(samples, rate_hz, seed, pairs)}; });
}

canids_status canids_inject(const canids_matrix* m, const char* signal_id, double t_start, double t_end,
                            canids_inject_mode mode, double value, uint64_t seed,
                            const canids_params* train_params_or_null, canids_matrix** out) {
    if (auto st = require(m && signal_id && out, "canids_inject: null argument")) return st;
    return guarded([&] {
        canids::InjectionSpec spec;
        spec.signal_id = signal_id;
        spec.t_start = t_start;
        spec.t_end = t_end;
        spec.value = value;
        spec.seed = seed;
        switch (mode) {
        case CANIDS_INJECT_CONSTANT_MAX: spec.mode = canids::InjectMode::constant_max; break;
        case CANIDS_INJECT_CONSTANT_VALUE: spec.mode = canids::InjectMode::constant_value; break;
        case CANIDS_INJECT_DECORRELATE: spec.mode = canids::InjectMode::decorrelate; break;
        default: canids::raise(canids::Errc::invalid_argument, "bad injection mode enum value");
        }
        canids::GroundTruth truth;
        auto injected =
            canids::inject(m->m, spec, train_params_or_null ? &train_params_or_null->p : nullptr, truth);
        *out = new canids_matrix{std::move(injected)};
    });
}

/* ------------------------------ ground truth -------------------------- */

canids_status canids_truth_new(canids_truthset** out) {
    if (auto st = require(out != nullptr, "canids_truth_new: null output")) return st;
    return guarded([&] { *out = new canids_truthset{}; });
}

canids_status canids_truth_add(canids_truthset* t, const char* capture, double t_start, double t_end) {
    if (auto st = require(t && capture, "canids_truth_add: null argument")) return st;
    return guarded([&] { canids::add_injection_interval(t->t[capture], t_start, t_end, "canids_truth_add"); });
}

canids_status canids_truth_read_csv(const char* path, canids_truthset** out) {
    if (auto st = require(path && out, "canids_truth_read_csv: null argument")) return st;
    return guarded([&] { *out = new canids_truthset{canids::read_truth_csv(path)}; });
}

canids_status canids_truth_write_csv(const canids_truthset* t, const char* path) {
    if (auto st = require(t && path, "canids_truth_write_csv: null argument")) return st;
    return guarded([&] { canids::write_truth_csv(t->t, path); });
}

void canids_truth_free(canids_truthset* t) { delete t; }

/* ------------------------------ detection ----------------------------- */

void canids_config_default(canids_method method, canids_detector_config* out) {
    if (!out) return;
    out->method = method;
    out->eps = 1.0;
    out->min_samples = 1;
    out->r = -5.0;
    out->alpha = 0.9;
}

canids_status canids_fit(const canids_matrix* normalized_train, const canids_detector_config* config,
                         size_t omega, size_t delta, canids_model** out) {
    if (auto st = require(normalized_train && config && out, "canids_fit: null argument")) return st;
    return guarded([&] {
        *out = new canids_model{canids::fit(normalized_train->m, to_config(*config), {omega, delta})};
    });
}

canids_status canids_score(const canids_model* model, const canids_matrix* normalized_capture, size_t omega,
                           size_t delta, canids_scores** out) {
    if (auto st = require(model && normalized_capture && out, "canids_score: null argument")) return st;
    return guarded([&] {
        *out = new canids_scores{canids::score_capture(model->m, normalized_capture->m, {omega, delta})};
    });
}

canids_status canids_model_dendrogram_text(const canids_model* model, char** out_text) {
    if (auto st = require(model && out_text, "canids_model_dendrogram_text: null argument")) return st;
    return guarded([&] {
        if (model->m.method != canids::Method::moriano22)
            canids::raise(canids::Errc::invalid_argument, "dendrogram text is only available for moriano22 models");
        const auto text = canids::dendrogram_to_text(model->m.train_dendrogram);
        char* buf = new char[text.size() + 1];
        std::memcpy(buf, text.data(), text.size());
        buf[text.size()] = '\0';
        *out_text = buf;
    });
}

void canids_model_free(canids_model* m) { delete m; }
void canids_text_free(char* text) { delete[] text; }

size_t canids_scores_count(const canids_scores* s) { return s ? s->s.size() : 0; }

canids_status canids_scores_get(const canids_scores* s, size_t i, size_t* window_index, double* start_time,
                                double* end_time, double* score, int64_t* duration_ns, int* degenerate) {
    if (auto st = require(s != nullptr, "canids_scores_get: null scores")) return st;
    if (auto st = require(i < s->s.size(), "canids_scores_get: index out of range")) return st;
    const auto& rec = s->s[i];
    if (window_index) *window_index = rec.window_index;
    if (start_time) *start_time = rec.start_time;
    if (end_time) *end_time = rec.end_time;
    if (score) *score = rec.score;
    if (duration_ns) *duration_ns = rec.duration_ns;
    if (degenerate) *degenerate = rec.degenerate ? 1 : 0;
    return CANIDS_OK;
}

canids_status canids_scores_write_jsonl(const canids_scores* s, const char* path) {
    if (auto st = require(s && path, "canids_scores_write_jsonl: null argument")) return st;
    return guarded([&] { canids::write_scores_jsonl(s->s, path); });
}

canids_status canids_scores_write_csv(const canids_scores* s, const char* path) {
    if (auto st = require(s && path, "canids_scores_write_csv: null argument")) return st;
    return guarded([&] { canids::write_scores_csv(s->s, path); });
}

canids_status canids_scores_read_jsonl(const char* path, canids_scores** out) {
    if (auto st = require(path && out, "canids_scores_read_jsonl: null argument")) return st;
    return guarded([&] { *out = new canids_scores{canids::read_scores_jsonl(path)}; });
}

void canids_scores_free(canids_scores* s) { delete s; }

/* ------------------------------ evaluation ---------------------------- */

canids_status canids_evaluate_scores(const canids_scores* s, const canids_truthset* truth, const char* capture,
                                     double* auc, int* auc_defined, double* positive_fraction, canids_ttw* ttw) {
    if (auto st = require(s && truth && capture, "canids_evaluate_scores: null argument")) return st;
    return guarded([&] {
        auto it = truth->t.find(capture);
        const canids::GroundTruth empty;
        const canids::GroundTruth& gt = it == truth->t.end() ? empty : it->second;
        std::vector<canids::WindowView> views;
        std::vector<double> values;
        views.reserve(s->s.size());
        for (const auto& rec : s->s) {
            canids::WindowView v;
            v.index = rec.window_index;
            v.start_time = rec.start_time;
            v.end_time = rec.end_time;
            views.push_back(v);
            values.push_back(rec.score);
        }
        const auto labels = canids::label_windows(views, gt);
        std::size_t positives = 0;
        for (int l : labels) positives += l != 0 ? 1 : 0;
        if (positive_fraction)
            *positive_fraction = labels.empty() ? 0.0 : static_cast<double>(positives) / labels.size();
        if (ttw) *ttw = to_ttw(canids::measure_ttw(s->s));
        double auc_value = 0.0;
        int defined = 0;
        try {
            auc_value = canids::auc_roc(values, labels);
            defined = 1;
        } catch (const canids::Error& e) {
            if (e.code() != canids::Errc::degenerate_input) throw;
        }
        if (auc) *auc = auc_value;
        if (auc_defined) *auc_defined = defined;
    });
}

void canids_grid_default(canids_grid* out) {
    if (!out) return;
    const auto g = canids::SweepGrid::defaults();
    out->omega_min = g.omega_min;
    out->omega_max = g.omega_max;
    out->omega_step = g.omega_step;
    out->delta_min = g.delta_min;
    out->delta_step = g.delta_step;
}

canids_status canids_sweep(const canids_matrix* normalized_train, const canids_matrix* const* captures,
                           const char* const* capture_names, size_t capture_count, const canids_truthset* truth,
                           const canids_detector_config* config, const canids_grid* grid_or_null, int workers,
                           int ttw_fidelity, const char* attack_set, canids_report** out) {
    if (auto st = require(normalized_train && captures && capture_names && capture_count > 0 && truth && config &&
                              attack_set && out,
                          "canids_sweep: null argument"))
        return st;
    return guarded([&] {
        canids::SweepOptions options;
        if (grid_or_null) {
            options.grid.omega_min = grid_or_null->omega_min;
            options.grid.omega_max = grid_or_null->omega_max;
            options.grid.omega_step = grid_or_null->omega_step;
            options.grid.delta_min = grid_or_null->delta_min;
            options.grid.delta_step = grid_or_null->delta_step;
        }
        options.workers = workers < 0 ? 0 : static_cast<unsigned>(workers);
        options.ttw_fidelity = ttw_fidelity != 0;
        const auto caps = collect_captures(captures, capture_names, capture_count, truth);
        *out = new canids_report{
            canids::sweep(normalized_train->m, caps, to_config(*config), options, attack_set)};
    });
}

size_t canids_report_cell_count(const canids_report* r) { return r ? r->r.cells.size() : 0; }

canids_status canids_report_cell(const canids_report* r, size_t i, size_t* omega, size_t* delta, int* state,
                                 double* auc, canids_ttw* ttw, size_t* window_count, double* positive_fraction) {
    if (auto st = require(r != nullptr, "canids_report_cell: null report")) return st;
    if (auto st = require(i < r->r.cells.size(), "canids_report_cell: index out of range")) return st;
    const auto& c = r->r.cells[i];
    if (omega) *omega = c.omega;
    if (delta) *delta = c.delta;
    if (state) *state = static_cast<int>(c.state);
    if (auc) *auc = c.auc;
    if (ttw) *ttw = to_ttw(c.ttw);
    if (window_count) *window_count = c.window_count;
    if (positive_fraction) *positive_fraction = c.positive_fraction;
    return CANIDS_OK;
}

canids_status canids_report_auc_summary(const canids_report* r, double* mean, double* stddev, double* median,
                                        double* min, double* max) {
    if (auto st = require(r != nullptr, "canids_report_auc_summary: null report")) return st;
    const auto& s = r->r.auc_summary;
    if (mean) *mean = s.mean;
    if (stddev) *stddev = s.stddev;
    if (median) *median = s.median;
    if (min) *min = s.min;
    if (max) *max = s.max;
    return CANIDS_OK;
}

canids_status canids_report_write_csv(const canids_report* r, const char* path) {
    if (auto st = require(r && path, "canids_report_write_csv: null argument")) return st;
    return guarded([&] { canids::write_report_csv(r->r, path); });
}

canids_status canids_report_write_json(const canids_report* r, const char* path) {
    if (auto st = require(r && path, "canids_report_write_json: null argument")) return st;
    return guarded([&] { canids::write_report_json(r->r, path); });
}

canids_status canids_reports_write_summary_csv(const canids_report* const* reports, size_t count,
                                               const char* path) {
    if (auto st = require(reports && count > 0 && path, "canids_reports_write_summary_csv: null argument"))
        return st;
    return guarded([&] {
        std::vector<canids::HeatmapReport> all;
        all.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (!reports[i]) canids::raise(canids::Errc::invalid_argument, "null report entry");
            all.push_back(reports[i]->r);
        }
        canids::write_summary_table_csv(all, path);
    });
}

void canids_report_free(canids_report* r) { delete r; }

canids_status canids_hyperparam_search(const canids_matrix* normalized_train, const canids_matrix* const* captures,
                                       const char* const* capture_names, size_t capture_count,
                                       const canids_truthset* truth, size_t omega, size_t delta, int workers,
                                       const char* attack_set, canids_hpreport** out) {
    if (auto st = require(normalized_train && captures && capture_names && capture_count > 0 && truth &&
                              attack_set && out,
                          "canids_hyperparam_search: null argument"))
        return st;
    return guarded([&] {
        const auto caps = collect_captures(captures, capture_names, capture_count, truth);
        *out = new canids_hpreport{canids::hyperparam_search_moriano(
            normalized_train->m, caps, omega, delta, workers < 0 ? 0 : static_cast<unsigned>(workers), attack_set)};
    });
}

size_t canids_hpreport_cell_count(const canids_hpreport* r) { return r ? r->r.cells.size() : 0; }

canids_status canids_hpreport_cell(const canids_hpreport* r, size_t i, double* param_r, double* alpha, double* auc,
                                   int* defined, int* is_default) {
    if (auto st = require(r != nullptr, "canids_hpreport_cell: null report")) return st;
    if (auto st = require(i < r->r.cells.size(), "canids_hpreport_cell: index out of range")) return st;
    const auto& c = r->r.cells[i];
    if (param_r) *param_r = c.r;
    if (alpha) *alpha = c.alpha;
    if (auc) *auc = c.auc;
    if (defined) *defined = c.defined ? 1 : 0;
    if (is_default) *is_default = c.is_default ? 1 : 0;
    return CANIDS_OK;
}

canids_status canids_hpreport_best(const canids_hpreport* r, double* param_r, double* alpha, double* auc,
                                   double* default_auc, double* absolute_change) {
    if (auto st = require(r != nullptr, "canids_hpreport_best: null report")) return st;
    if (param_r) *param_r = r->r.best_r;
    if (alpha) *alpha = r->r.best_alpha;
    if (auc) *auc = r->r.best_auc;
    if (default_auc) *default_auc = r->r.default_auc;
    if (absolute_change) *absolute_change = r->r.absolute_change;
    return CANIDS_OK;
}

canids_status canids_hpreport_write_csv(const canids_hpreport* r, const char* path) {
    if (auto st = require(r && path, "canids_hpreport_write_csv: null argument")) return st;
    return guarded([&] { canids::write_hyperparam_csv(r->r, path); });
}

canids_status canids_hpreport_write_json(const canids_hpreport* r, const char* path) {
    if (auto st = require(r && path, "canids_hpreport_write_json: null argument")) return st;
    return guarded([&] { canids::write_hyperparam_json(r->r, path); });
}

void canids_hpreport_free(canids_hpreport* r) { delete r; }

} // extern "C"
