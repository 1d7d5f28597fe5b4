// canids command-line frontend. Talks to the detection library exclusively
// through the C API in canids.h.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "canids.h"

namespace {

struct MatrixDeleter {
    void operator()(canids_matrix* m) const { canids_matrix_free(m); }
};
struct ParamsDeleter {
    void operator()(canids_params* p) const { canids_params_free(p); }
};
struct TruthDeleter {
    void operator()(canids_truthset* t) const { canids_truth_free(t); }
};
struct ModelDeleter {
    void operator()(canids_model* m) const { canids_model_free(m); }
};
struct ScoresDeleter {
    void operator()(canids_scores* s) const { canids_scores_free(s); }
};
struct ReportDeleter {
    void operator()(canids_report* r) const { canids_report_free(r); }
};
struct HpDeleter {
    void operator()(canids_hpreport* r) const { canids_hpreport_free(r); }
};

using MatrixPtr = std::unique_ptr<canids_matrix, MatrixDeleter>;
using ParamsPtr = std::unique_ptr<canids_params, ParamsDeleter>;
using TruthPtr = std::unique_ptr<canids_truthset, TruthDeleter>;
using ModelPtr = std::unique_ptr<canids_model, ModelDeleter>;
using ScoresPtr = std::unique_ptr<canids_scores, ScoresDeleter>;
using ReportPtr = std::unique_ptr<canids_report, ReportDeleter>;
using HpPtr = std::unique_ptr<canids_hpreport, HpDeleter>;

[[noreturn]] void die(const std::string& context) {
    std::fprintf(stderr, "canids: %s: %s\n", context.c_str(), canids_last_error());
    std::exit(1);
}

void check(canids_status st, const std::string& context) {
    if (st != CANIDS_OK) die(context);
}

canids_method method_from_name(const std::string& name) {
    if (name == "corr-distribution") return CANIDS_METHOD_CORR_DISTRIBUTION;
    if (name == "corr-correlation") return CANIDS_METHOD_CORR_CORRELATION;
    if (name == "ganesan17") return CANIDS_METHOD_GANESAN17;
    if (name == "moriano22") return CANIDS_METHOD_MORIANO22;
    std::fprintf(stderr, "canids: unknown detector method: %s\n", name.c_str());
    std::exit(1);
}

const char* method_label(canids_method m) {
    switch (m) {
    case CANIDS_METHOD_CORR_DISTRIBUTION: return "corr-distribution";
    case CANIDS_METHOD_CORR_CORRELATION: return "corr-correlation";
    case CANIDS_METHOD_GANESAN17: return "ganesan17";
    case CANIDS_METHOD_MORIANO22: return "moriano22";
    }
    return "?";
}

MatrixPtr load_matrix(const std::string& path) {
    canids_matrix* m = nullptr;
    check(canids_matrix_read_csv(path.c_str(), &m), "reading " + path);
    return MatrixPtr(m);
}

ParamsPtr load_params(const std::string& path) {
    canids_params* p = nullptr;
    check(canids_params_read_json(path.c_str(), &p), "reading " + path);
    return ParamsPtr(p);
}

MatrixPtr normalize(const canids_matrix* raw, const canids_params* params, const std::string& what) {
    canids_matrix* out = nullptr;
    check(canids_params_apply(raw, params, &out), "normalizing " + what);
    return MatrixPtr(out);
}

std::string capture_stem(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

// correlated_signal_2 -> correlated_signal; names without a numeric suffix
// are their own category.
std::string category_of(const std::string& capture_name) {
    static const std::regex suffix("^(.*)_[0-9]+$");
    std::smatch m;
    if (std::regex_match(capture_name, m, suffix)) return m[1].str();
    return capture_name;
}

struct CommonDetectorFlags {
    std::string method = "corr-distribution";
    double eps = 1.0;
    int min_samples = 1;
    double r = -5.0;
    double alpha = 0.9;

    canids_detector_config to_config() const {
        canids_detector_config config;
        canids_config_default(method_from_name(method), &config);
        config.eps = eps;
        config.min_samples = min_samples;
        config.r = r;
        config.alpha = alpha;
        return config;
    }
};

void add_detector_flags(CLI::App* cmd, CommonDetectorFlags& flags, bool with_method) {
    if (with_method)
        cmd->add_option("--method", flags.method, "Detector: corr-distribution, corr-correlation, ganesan17, moriano22")
            ->required();
    cmd->add_option("--eps", flags.eps, "ganesan17 DBSCAN eps")->capture_default_str();
    cmd->add_option("--min-samples", flags.min_samples, "ganesan17 DBSCAN min_samples")->capture_default_str();
    cmd->add_option("--r", flags.r, "moriano22 level-scaling r")->capture_default_str();
    cmd->add_option("--alpha", flags.alpha, "moriano22 lineage parameter alpha")->capture_default_str();
}

int run_preprocess(const std::string& input, const std::string& format, double rate, const std::string& span,
                   const std::string& out_matrix, const std::string& fit_params_path,
                   const std::string& params_path, const std::string& out_normalized) {
    canids_matrix* raw = nullptr;
    check(canids_log_load(input.c_str(), format == "wide" ? CANIDS_FORMAT_WIDE : CANIDS_FORMAT_LONG, rate,
                          span == "cover" ? CANIDS_SPAN_COVER : CANIDS_SPAN_INTERSECT, &raw),
          "loading " + input);
    MatrixPtr matrix(raw);
    if (!out_matrix.empty()) check(canids_matrix_write_csv(matrix.get(), out_matrix.c_str()), "writing " + out_matrix);

    ParamsPtr params;
    if (!fit_params_path.empty()) {
        canids_params* p = nullptr;
        check(canids_params_fit(matrix.get(), &p), "fitting normalization");
        params = ParamsPtr(p);
        check(canids_params_write_json(params.get(), rate, fit_params_path.c_str()), "writing " + fit_params_path);
    } else if (!params_path.empty()) {
        params = load_params(params_path);
    }
    if (!out_normalized.empty()) {
        if (!params) {
            std::fprintf(stderr, "canids: --out-normalized needs --fit-params or --params\n");
            return 1;
        }
        auto normalized = normalize(matrix.get(), params.get(), input);
        check(canids_matrix_write_csv(normalized.get(), out_normalized.c_str()), "writing " + out_normalized);
    }
    std::printf("preprocess: %zu signals x %zu samples at %.6g Hz\n", canids_matrix_cols(matrix.get()),
                canids_matrix_rows(matrix.get()), canids_matrix_rate_hz(matrix.get()));
    return 0;
}

int run_synth_generate(std::size_t samples, double rate, std::uint64_t seed, std::size_t pairs,
                       const std::string& out) {
    canids_matrix* m = nullptr;
    check(canids_benign_fixture(samples, rate, seed, pairs, &m), "generating benign fixture");
    MatrixPtr matrix(m);
    check(canids_matrix_write_csv(matrix.get(), out.c_str()), "writing " + out);
    std::printf("synth: wrote benign fixture (%zu signals x %zu samples) to %s\n", canids_matrix_cols(matrix.get()),
                canids_matrix_rows(matrix.get()), out.c_str());
    return 0;
}

int run_synth_inject(const std::string& input, const std::string& signal, double t_start, double t_end,
                     const std::string& mode, double value, std::uint64_t seed, const std::string& params_path,
                     const std::string& out, const std::string& truth_out, std::string capture_name) {
    auto matrix = load_matrix(input);
    ParamsPtr params;
    if (!params_path.empty()) params = load_params(params_path);

    canids_inject_mode inject_mode = CANIDS_INJECT_DECORRELATE;
    if (mode == "constant-max") inject_mode = CANIDS_INJECT_CONSTANT_MAX;
    else if (mode == "constant-value") inject_mode = CANIDS_INJECT_CONSTANT_VALUE;
    else if (mode != "decorrelate") {
        std::fprintf(stderr, "canids: unknown injection mode: %s\n", mode.c_str());
        return 1;
    }

    canids_matrix* injected = nullptr;
    check(canids_inject(matrix.get(), signal.c_str(), t_start, t_end, inject_mode, value, seed, params.get(),
                        &injected),
          "injecting into " + input);
    MatrixPtr attacked(injected);
    check(canids_matrix_write_csv(attacked.get(), out.c_str()), "writing " + out);

    if (!truth_out.empty()) {
        if (capture_name.empty()) capture_name = capture_stem(out);
        canids_truthset* t = nullptr;
        check(canids_truth_new(&t), "creating ground truth");
        TruthPtr truth(t);
        check(canids_truth_add(truth.get(), capture_name.c_str(), t_start, t_end), "recording interval");
        check(canids_truth_write_csv(truth.get(), truth_out.c_str()), "writing " + truth_out);
    }
    std::printf("synth: injected %s on %s over [%.6g, %.6g] s -> %s\n", mode.c_str(), signal.c_str(), t_start,
                t_end, out.c_str());
    return 0;
}

int run_detect(const std::string& train_path, const std::string& test_path, const std::string& params_path,
               const CommonDetectorFlags& flags, std::size_t omega, std::size_t delta, const std::string& out,
               const std::string& out_csv, const std::string& dendrogram_out) {
    auto train_raw = load_matrix(train_path);
    auto test_raw = load_matrix(test_path);
    auto params = load_params(params_path);
    auto train = normalize(train_raw.get(), params.get(), train_path);
    auto test = normalize(test_raw.get(), params.get(), test_path);

    const auto config = flags.to_config();
    canids_model* model_raw = nullptr;
    check(canids_fit(train.get(), &config, omega, delta, &model_raw), "fitting " + flags.method);
    ModelPtr model(model_raw);

    canids_scores* scores_raw = nullptr;
    check(canids_score(model.get(), test.get(), omega, delta, &scores_raw), "scoring " + test_path);
    ScoresPtr scores(scores_raw);

    check(canids_scores_write_jsonl(scores.get(), out.c_str()), "writing " + out);
    if (!out_csv.empty()) check(canids_scores_write_csv(scores.get(), out_csv.c_str()), "writing " + out_csv);
    if (!dendrogram_out.empty()) {
        char* text = nullptr;
        check(canids_model_dendrogram_text(model.get(), &text), "serializing dendrogram");
        FILE* f = std::fopen(dendrogram_out.c_str(), "wb");
        if (!f) {
            canids_text_free(text);
            std::fprintf(stderr, "canids: cannot write %s\n", dendrogram_out.c_str());
            return 1;
        }
        std::fputs(text, f);
        std::fclose(f);
        canids_text_free(text);
    }
    std::printf("detect: %s scored %zu windows -> %s\n", flags.method.c_str(), canids_scores_count(scores.get()),
                out.c_str());
    return 0;
}

int run_report(const std::string& scores_path, const std::string& truth_path, std::string capture_name,
               const std::string& out_json) {
    canids_scores* scores_raw = nullptr;
    check(canids_scores_read_jsonl(scores_path.c_str(), &scores_raw), "reading " + scores_path);
    ScoresPtr scores(scores_raw);
    canids_truthset* truth_raw = nullptr;
    check(canids_truth_read_csv(truth_path.c_str(), &truth_raw), "reading " + truth_path);
    TruthPtr truth(truth_raw);
    if (capture_name.empty()) capture_name = capture_stem(scores_path);

    double auc = 0.0, positive_fraction = 0.0;
    int defined = 0;
    canids_ttw ttw{};
    check(canids_evaluate_scores(scores.get(), truth.get(), capture_name.c_str(), &auc, &defined,
                                 &positive_fraction, &ttw),
          "evaluating scores");

    std::string json = "{\n";
    json += "  \"capture\": \"" + capture_name + "\",\n";
    json += "  \"windows\": " + std::to_string(ttw.window_count) + ",\n";
    json += "  \"positive_fraction\": " + std::to_string(positive_fraction) + ",\n";
    json += defined ? "  \"auc\": " + std::to_string(auc) + ",\n" : std::string("  \"auc\": null,\n");
    json += "  \"ttw_ms\": {\"mean\": " + std::to_string(ttw.mean_ms) + ", \"std\": " + std::to_string(ttw.std_ms) +
            ", \"median\": " + std::to_string(ttw.median_ms) + ", \"min\": " + std::to_string(ttw.min_ms) +
            ", \"max\": " + std::to_string(ttw.max_ms) + "}\n}\n";
    if (out_json.empty()) {
        std::fputs(json.c_str(), stdout);
    } else {
        FILE* f = std::fopen(out_json.c_str(), "wb");
        if (!f) {
            std::fprintf(stderr, "canids: cannot write %s\n", out_json.c_str());
            return 1;
        }
        std::fputs(json.c_str(), f);
        std::fclose(f);
    }
    return 0;
}

int run_sweep(const std::string& train_path, const std::string& params_path,
              const std::vector<std::string>& capture_paths, const std::string& truth_path,
              const std::string& detectors, const canids_grid& grid, int workers, bool ttw_fidelity,
              const std::string& out_dir, bool hyperparam, std::size_t hp_omega, std::size_t hp_delta) {
    auto train_raw = load_matrix(train_path);
    auto params = load_params(params_path);
    auto train = normalize(train_raw.get(), params.get(), train_path);

    canids_truthset* truth_raw = nullptr;
    check(canids_truth_read_csv(truth_path.c_str(), &truth_raw), "reading " + truth_path);
    TruthPtr truth(truth_raw);

    // Group normalized captures by attack category.
    std::map<std::string, std::vector<std::pair<std::string, MatrixPtr>>> categories;
    for (const auto& path : capture_paths) {
        auto raw = load_matrix(path);
        auto normalized = normalize(raw.get(), params.get(), path);
        const std::string name = capture_stem(path);
        categories[category_of(name)].emplace_back(name, std::move(normalized));
    }

    std::vector<canids_method> methods;
    if (detectors == "all") {
        methods = {CANIDS_METHOD_CORR_DISTRIBUTION, CANIDS_METHOD_CORR_CORRELATION, CANIDS_METHOD_GANESAN17,
                   CANIDS_METHOD_MORIANO22};
    } else {
        std::stringstream ss(detectors);
        std::string token;
        while (std::getline(ss, token, ',')) methods.push_back(method_from_name(token));
    }

    std::filesystem::create_directories(out_dir);
    int failures = 0;
    std::vector<ReportPtr> finished;
    for (auto& [category, captures] : categories) {
        std::vector<const canids_matrix*> matrices;
        std::vector<const char*> names;
        for (const auto& [name, matrix] : captures) {
            matrices.push_back(matrix.get());
            names.push_back(name.c_str());
        }
        for (const auto method : methods) {
            canids_detector_config config;
            canids_config_default(method, &config);
            canids_report* report_raw = nullptr;
            const auto st = canids_sweep(train.get(), matrices.data(), names.data(), matrices.size(), truth.get(),
                                         &config, &grid, workers, ttw_fidelity ? 1 : 0, category.c_str(),
                                         &report_raw);
            if (st != CANIDS_OK) {
                std::fprintf(stderr, "canids: sweep %s/%s failed: %s\n", category.c_str(), method_label(method),
                             canids_last_error());
                ++failures;
                continue;
            }
            ReportPtr report(report_raw);
            const std::string base = out_dir + "/" + category + "_" + method_label(method);
            check(canids_report_write_csv(report.get(), (base + ".csv").c_str()), "writing " + base + ".csv");
            check(canids_report_write_json(report.get(), (base + ".json").c_str()), "writing " + base + ".json");
            double mean = 0, mx = 0;
            canids_report_auc_summary(report.get(), &mean, nullptr, nullptr, nullptr, &mx);
            std::printf("sweep: %s %s cells=%zu auc_mean=%.3f auc_max=%.3f\n", category.c_str(),
                        method_label(method), canids_report_cell_count(report.get()), mean, mx);
            finished.push_back(std::move(report));
        }
        if (hyperparam) {
            canids_hpreport* hp_raw = nullptr;
            const auto st = canids_hyperparam_search(train.get(), matrices.data(), names.data(), matrices.size(),
                                                     truth.get(), hp_omega, hp_delta, workers, category.c_str(),
                                                     &hp_raw);
            if (st != CANIDS_OK) {
                std::fprintf(stderr, "canids: hyperparam search %s failed: %s\n", category.c_str(),
                             canids_last_error());
                ++failures;
                continue;
            }
            HpPtr hp(hp_raw);
            const std::string base = out_dir + "/" + category + "_moriano22_hyperparam";
            check(canids_hpreport_write_csv(hp.get(), (base + ".csv").c_str()), "writing " + base + ".csv");
            check(canids_hpreport_write_json(hp.get(), (base + ".json").c_str()), "writing " + base + ".json");
            double br = 0, ba = 0, bauc = 0, dauc = 0, change = 0;
            canids_hpreport_best(hp.get(), &br, &ba, &bauc, &dauc, &change);
            std::printf("hyperparam: %s best (r=%g, alpha=%g) auc=%.3f default=%.3f change=%+.3f\n",
                        category.c_str(), br, ba, bauc, dauc, change);
        }
    }
    if (!finished.empty()) {
        std::vector<const canids_report*> raw;
        raw.reserve(finished.size());
        for (const auto& r : finished) raw.push_back(r.get());
        const std::string summary_path = out_dir + "/summary.csv";
        check(canids_reports_write_summary_csv(raw.data(), raw.size(), summary_path.c_str()),
              "writing " + summary_path);
        std::printf("sweep: combined summary -> %s\n", summary_path.c_str());
    }
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming masquerade-attack detection over CAN signal windows"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML config file");

    // preprocess
    auto* preprocess = app.add_subcommand("preprocess", "Resample a signal log and fit/apply normalization");
    std::string pre_input, pre_format = "long", pre_span = "intersect";
    std::string pre_out_matrix, pre_fit_params, pre_params, pre_out_normalized;
    double pre_rate = 100.0;
    preprocess->add_option("--input", pre_input, "Signal log (CSV)")->required();
    preprocess->add_option("--format", pre_format, "Input layout: long or wide")
        ->check(CLI::IsMember({"long", "wide"}))
        ->capture_default_str();
    preprocess->add_option("--rate", pre_rate, "Resampling rate in Hz")->capture_default_str();
    preprocess->add_option("--span", pre_span, "Grid span: intersect (training) or cover (test captures)")
        ->check(CLI::IsMember({"intersect", "cover"}))
        ->capture_default_str();
    preprocess->add_option("--out-matrix", pre_out_matrix, "Write the resampled raw matrix (wide CSV)");
    preprocess->add_option("--fit-params", pre_fit_params, "Fit normalization on this capture and write params JSON");
    preprocess->add_option("--params", pre_params, "Use existing normalization params JSON");
    preprocess->add_option("--out-normalized", pre_out_normalized, "Write the normalized matrix (wide CSV)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate benign fixtures and inject masquerade attacks");
    bool synth_generate = false;
    std::string synth_input, synth_signal, synth_mode = "decorrelate", synth_params, synth_out, synth_truth_out,
                synth_capture;
    double synth_start = 0.0, synth_end = 0.0, synth_value = 0.0, synth_rate = 100.0;
    std::uint64_t synth_seed = 0;
    std::size_t synth_samples = 6000, synth_pairs = 5;
    synth->add_flag("--generate", synth_generate, "Generate the benign pair fixture instead of injecting");
    synth->add_option("--samples", synth_samples, "Fixture length in samples")->capture_default_str();
    synth->add_option("--pairs", synth_pairs, "Fixture correlated-pair count")->capture_default_str();
    synth->add_option("--rate", synth_rate, "Fixture rate in Hz")->capture_default_str();
    synth->add_option("--input", synth_input, "Capture matrix to attack (wide CSV)");
    synth->add_option("--signal", synth_signal, "Target signal id");
    synth->add_option("--start", synth_start, "Injection start time (s)");
    synth->add_option("--end", synth_end, "Injection end time (s)");
    synth->add_option("--mode", synth_mode, "constant-max, constant-value, or decorrelate")
        ->check(CLI::IsMember({"constant-max", "constant-value", "decorrelate"}))
        ->capture_default_str();
    synth->add_option("--value", synth_value, "Fill value for constant-value mode");
    synth->add_option("--seed", synth_seed, "Random seed (decorrelate mode / fixture)")->capture_default_str();
    synth->add_option("--params", synth_params, "Training params JSON (constant-max uses the training max)");
    synth->add_option("--out", synth_out, "Output matrix CSV")->required();
    synth->add_option("--truth-out", synth_truth_out, "Write ground-truth CSV for the injection");
    synth->add_option("--capture-name", synth_capture, "Capture name used in the ground-truth CSV");

    // detect
    auto* detect = app.add_subcommand("detect", "Fit on a training capture and score a test capture");
    std::string det_train, det_test, det_params, det_out, det_out_csv, det_dendrogram;
    std::size_t det_omega = 0, det_delta = 0;
    CommonDetectorFlags det_flags;
    detect->add_option("--train", det_train, "Training matrix (raw wide CSV)")->required();
    detect->add_option("--test", det_test, "Test matrix (raw wide CSV)")->required();
    detect->add_option("--params", det_params, "Normalization params JSON")->required();
    detect->add_option("--omega", det_omega, "Window length in samples")->required();
    detect->add_option("--delta", det_delta, "Window offset in samples")->required();
    add_detector_flags(detect, det_flags, true);
    detect->add_option("--out", det_out, "Scores JSONL output")->required();
    detect->add_option("--out-csv", det_out_csv, "Scores CSV output");
    detect->add_option("--dump-dendrogram", det_dendrogram, "Write the training dendrogram merge list (moriano22)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate detectors over the (omega, delta) grid");
    std::string sw_train, sw_params, sw_truth, sw_detectors = "all", sw_out_dir = "out";
    std::vector<std::string> sw_captures;
    canids_grid sw_grid;
    canids_grid_default(&sw_grid);
    int sw_workers = 0;
    bool sw_ttw = false;
    std::string sw_hyper;
    std::size_t sw_hp_omega = 0, sw_hp_delta = 0;
    sweep_cmd->add_option("--train", sw_train, "Training matrix (raw wide CSV)")->required();
    sweep_cmd->add_option("--params", sw_params, "Normalization params JSON")->required();
    sweep_cmd->add_option("--capture", sw_captures, "Attack capture matrix (repeatable)")->required();
    sweep_cmd->add_option("--truth", sw_truth, "Ground-truth CSV")->required();
    sweep_cmd->add_option("--detectors", sw_detectors, "'all' or comma-separated detector names")
        ->capture_default_str();
    sweep_cmd->add_option("--omega-min", sw_grid.omega_min)->capture_default_str();
    sweep_cmd->add_option("--omega-max", sw_grid.omega_max)->capture_default_str();
    sweep_cmd->add_option("--omega-step", sw_grid.omega_step)->capture_default_str();
    sweep_cmd->add_option("--delta-min", sw_grid.delta_min)->capture_default_str();
    sweep_cmd->add_option("--delta-step", sw_grid.delta_step)->capture_default_str();
    sweep_cmd->add_option("--workers", sw_workers, "Worker threads (0 = all cores)")
        ->envname("CANIDS_WORKERS")
        ->capture_default_str();
    sweep_cmd->add_flag("--ttw-fidelity", sw_ttw, "Force a single worker for trustworthy TTW numbers");
    sweep_cmd->add_option("--out-dir", sw_out_dir, "Report output directory")
        ->envname("CANIDS_OUT_DIR")
        ->capture_default_str();
    sweep_cmd->add_option("--hyperparam-search", sw_hyper,
                          "Also run the (r, alpha) grid search for this detector (moriano22)")
        ->check(CLI::IsMember({"moriano22"}));
    sweep_cmd->add_option("--hp-omega", sw_hp_omega, "Window length for the hyperparameter search");
    sweep_cmd->add_option("--hp-delta", sw_hp_delta, "Window offset for the hyperparameter search");

    // report
    auto* report_cmd = app.add_subcommand("report", "Evaluate a score stream against ground truth");
    std::string rep_scores, rep_truth, rep_capture, rep_out;
    report_cmd->add_option("--scores", rep_scores, "Scores JSONL")->required();
    report_cmd->add_option("--truth", rep_truth, "Ground-truth CSV")->required();
    report_cmd->add_option("--capture-name", rep_capture, "Capture name in the truth file");
    report_cmd->add_option("--out", rep_out, "Write the report JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    if (preprocess->parsed())
        return run_preprocess(pre_input, pre_format, pre_rate, pre_span, pre_out_matrix, pre_fit_params, pre_params,
                              pre_out_normalized);
    if (synth->parsed()) {
        if (synth_generate)
            return run_synth_generate(synth_samples, synth_rate, synth_seed, synth_pairs, synth_out);
        if (synth_input.empty() || synth_signal.empty()) {
            std::fprintf(stderr, "canids: synth needs --input and --signal (or --generate)\n");
            return 1;
        }
        return run_synth_inject(synth_input, synth_signal, synth_start, synth_end, synth_mode, synth_value,
                                synth_seed, synth_params, synth_out, synth_truth_out, synth_capture);
    }
    if (detect->parsed())
        return run_detect(det_train, det_test, det_params, det_flags, det_omega, det_delta, det_out, det_out_csv,
                          det_dendrogram);
    if (sweep_cmd->parsed()) {
        if (!sw_hyper.empty() && (sw_hp_omega == 0 || sw_hp_delta == 0)) {
            std::fprintf(stderr, "canids: --hyperparam-search needs --hp-omega and --hp-delta\n");
            return 1;
        }
        return run_sweep(sw_train, sw_params, sw_captures, sw_truth, sw_detectors, sw_grid, sw_workers, sw_ttw,
                         sw_out_dir, !sw_hyper.empty(), sw_hp_omega, sw_hp_delta);
    }
    if (report_cmd->parsed()) return run_report(rep_scores, rep_truth, rep_capture, rep_out);
    return 1;
}
