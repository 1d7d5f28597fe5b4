#include "canids/evaluate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "canids/error.hpp"
#include "canids/parallel.hpp"

namespace canids {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double median_of_sorted(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

nlohmann::json summary_to_json(const SummaryStats& s) {
    return {{"mean", s.mean},
            {"stddev", s.stddev},
            {"median", s.median},
            {"min", s.min},
            {"min_omega", s.min_omega},
            {"min_delta", s.min_delta},
            {"max", s.max},
            {"max_omega", s.max_omega},
            {"max_delta", s.max_delta},
            {"computed_cells", s.computed_cells},
            {"skipped_cells", s.skipped_cells},
            {"undefined_cells", s.undefined_cells}};
}

SummaryStats summarize_values(const std::vector<EvalCell>& cells, double EvalCell::*field,
                              const std::vector<const EvalCell*>& computed) {
    SummaryStats s;
    s.computed_cells = computed.size();
    for (const auto& c : cells) {
        if (c.state == CellState::skipped) ++s.skipped_cells;
        if (c.state == CellState::undefined_auc) ++s.undefined_cells;
    }
    if (computed.empty()) return s;
    std::vector<double> values;
    values.reserve(computed.size());
    const EvalCell* min_cell = computed.front();
    const EvalCell* max_cell = computed.front();
    double total = 0.0;
    for (const EvalCell* c : computed) {
        const double v = c->*field;
        values.push_back(v);
        total += v;
        if (v < min_cell->*field) min_cell = c;
        if (v > max_cell->*field) max_cell = c;
    }
    s.mean = total / static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(values.size()));
    std::sort(values.begin(), values.end());
    s.median = median_of_sorted(values);
    s.min = min_cell->*field;
    s.min_omega = min_cell->omega;
    s.min_delta = min_cell->delta;
    s.max = max_cell->*field;
    s.max_omega = max_cell->omega;
    s.max_delta = max_cell->delta;
    return s;
}

struct CellMeanTtw {
    std::size_t omega = 0, delta = 0;
    CellState state = CellState::computed;
    double mean_ttw = 0.0;
};

} // namespace

std::vector<int> label_windows(const std::vector<WindowView>& views, const GroundTruth& truth) {
    std::vector<int> labels(views.size(), 0);
    for (std::size_t i = 0; i < views.size(); ++i) {
        for (const auto& iv : truth.intervals) {
            if (views[i].start_time < iv.t_end && iv.t_start < views[i].end_time) {
                labels[i] = 1;
                break;
            }
        }
    }
    return labels;
}

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) raise(Errc::invalid_argument, "auc_roc: length mismatch");
    if (scores.empty()) raise(Errc::invalid_argument, "auc_roc: empty input");
    std::size_t positives = 0;
    for (int label : labels)
        if (label != 0) ++positives;
    const std::size_t negatives = labels.size() - positives;
    if (positives == 0 || negatives == 0)
        raise(Errc::degenerate_input, "auc_roc: needs both classes");

    const auto ranks = midranks(scores);
    double positive_rank_sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != 0) positive_rank_sum += ranks[i];
    const double np = static_cast<double>(positives);
    const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(negatives));
}

TtwStats measure_ttw(std::span<const AnomalyScore> scores) {
    if (scores.empty()) raise(Errc::invalid_argument, "measure_ttw: zero windows");
    std::vector<double> ms;
    ms.reserve(scores.size());
    for (const auto& s : scores) ms.push_back(static_cast<double>(s.duration_ns) / 1e6);
    TtwStats out;
    out.window_count = ms.size();
    out.total_ms = std::accumulate(ms.begin(), ms.end(), 0.0);
    out.mean_ms = out.total_ms / static_cast<double>(ms.size());
    double acc = 0.0;
    for (double v : ms) acc += (v - out.mean_ms) * (v - out.mean_ms);
    out.std_ms = std::sqrt(acc / static_cast<double>(ms.size()));
    std::sort(ms.begin(), ms.end());
    out.min_ms = ms.front();
    out.max_ms = ms.back();
    out.median_ms = median_of_sorted(ms);
    return out;
}

std::string cell_state_name(CellState state) {
    switch (state) {
    case CellState::computed: return "computed";
    case CellState::skipped: return "skipped";
    case CellState::undefined_auc: return "undefined-auc";
    }
    raise(Errc::internal, "cell_state_name: bad enum value");
}

std::vector<WindowSpec> SweepGrid::specs() const {
    std::vector<WindowSpec> out;
    for (std::size_t omega = omega_min; omega <= omega_max; omega += omega_step)
        for (std::size_t delta = delta_min; delta <= omega; delta += delta_step) out.push_back({omega, delta});
    if (out.empty()) raise(Errc::invalid_argument, "sweep grid is empty");
    return out;
}

EvalCell evaluate_cell(const TrainedModel& model, const std::vector<Capture>& captures, const WindowSpec& spec) {
    EvalCell cell;
    cell.omega = spec.omega;
    cell.delta = spec.delta;

    for (const auto& capture : captures) {
        if (capture.matrix.rows() < spec.omega) {
            cell.state = CellState::skipped;
            return cell;
        }
    }

    std::vector<double> capture_aucs;
    std::vector<AnomalyScore> all_scores;
    std::size_t positives = 0, windows = 0;
    bool undefined = false;
    for (const auto& capture : captures) {
        const auto views = enumerate_windows(capture.matrix.rows(), spec, capture.matrix.rate_hz,
                                             capture.matrix.start_time);
        const auto labels = label_windows(views, capture.truth);
        const auto scores = score_capture(model, capture.matrix, spec);
        std::vector<double> values;
        values.reserve(scores.size());
        for (const auto& s : scores) values.push_back(s.score);
        windows += views.size();
        positives += static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
        all_scores.insert(all_scores.end(), scores.begin(), scores.end());
        try {
            capture_aucs.push_back(auc_roc(values, labels));
        } catch (const Error& e) {
            if (e.code() != Errc::degenerate_input) throw;
            undefined = true;
        }
    }
    cell.window_count = windows;
    cell.positive_fraction = windows == 0 ? 0.0 : static_cast<double>(positives) / static_cast<double>(windows);
    cell.ttw = measure_ttw(all_scores);
    if (undefined || capture_aucs.empty()) {
        cell.state = CellState::undefined_auc;
        return cell;
    }
    cell.auc = std::accumulate(capture_aucs.begin(), capture_aucs.end(), 0.0) /
               static_cast<double>(capture_aucs.size());
    return cell;
}

SummaryStats summarize_auc(const std::vector<EvalCell>& cells) {
    std::vector<const EvalCell*> computed;
    for (const auto& c : cells)
        if (c.state == CellState::computed) computed.push_back(&c);
    return summarize_values(cells, &EvalCell::auc, computed);
}

HeatmapReport sweep(const SignalMatrix& train, const std::vector<Capture>& captures, const DetectorConfig& config,
                    const SweepOptions& options, const std::string& attack_set) {
    if (captures.empty()) raise(Errc::invalid_argument, "sweep: no captures");
    const auto specs = options.grid.specs();

    HeatmapReport report;
    report.detector = method_name(config.method);
    report.attack_set = attack_set;
    report.cells.resize(specs.size());

    // corr-* and moriano22 models do not depend on the window spec; fit once.
    // ganesan17 calibrates (mu_E, sigma_E) on the training windows of each cell.
    TrainedModel shared_model;
    const bool spec_dependent_fit = config.method == Method::ganesan17;
    if (!spec_dependent_fit) shared_model = fit(train, config, specs.front());

    const unsigned workers = options.ttw_fidelity ? 1 : options.workers;
    parallel_for(specs.size(), workers, [&](std::size_t i) {
        const auto& spec = specs[i];
        if (train.rows() < spec.omega) {
            report.cells[i].omega = spec.omega;
            report.cells[i].delta = spec.delta;
            report.cells[i].state = CellState::skipped;
            return;
        }
        if (spec_dependent_fit) {
            const TrainedModel model = fit(train, config, spec);
            report.cells[i] = evaluate_cell(model, captures, spec);
        } else {
            report.cells[i] = evaluate_cell(shared_model, captures, spec);
        }
    });

    report.auc_summary = summarize_auc(report.cells);

    // TTW summary runs over each computed cell's mean TTW.
    std::vector<EvalCell> ttw_cells;
    std::vector<const EvalCell*> computed;
    ttw_cells.reserve(report.cells.size());
    for (const auto& c : report.cells) {
        EvalCell t = c;
        t.auc = c.ttw.mean_ms;
        ttw_cells.push_back(t);
    }
    for (const auto& c : ttw_cells)
        if (c.state != CellState::skipped) computed.push_back(&c);
    report.ttw_summary = summarize_values(ttw_cells, &EvalCell::auc, computed);
    return report;
}

HyperparamReport hyperparam_search_moriano(const SignalMatrix& train, const std::vector<Capture>& captures,
                                           std::size_t omega, std::size_t delta, unsigned workers,
                                           const std::string& attack_set) {
    const WindowSpec spec{omega, delta};
    spec.validate();

    HyperparamReport report;
    report.omega = omega;
    report.delta = delta;
    report.attack_set = attack_set;

    std::vector<HyperparamCell> cells;
    for (const double r : {-5.0, -3.0, -1.0, 1.0, 3.0})
        for (int a = 1; a <= 8; ++a) cells.push_back({r, static_cast<double>(a) / 10.0, 0.0, false, false});
    // The method's default configuration sits outside the searched alpha range;
    // include it as a reference cell.
    cells.push_back({-5.0, 0.9, 0.0, false, true});

    std::vector<HyperparamCell> done(cells.size());
    parallel_for(cells.size(), workers, [&](std::size_t i) {
        DetectorConfig config;
        config.method = Method::moriano22;
        config.r = cells[i].r;
        config.alpha = cells[i].alpha;
        const auto model = fit(train, config, spec);
        const auto cell = evaluate_cell(model, captures, spec);
        HyperparamCell out = cells[i];
        out.defined = cell.state == CellState::computed;
        out.auc = out.defined ? cell.auc : 0.0;
        done[i] = out;
    });
    report.cells = std::move(done);

    bool have_best = false;
    for (const auto& c : report.cells) {
        if (c.is_default) {
            report.default_auc = c.auc;
            continue;
        }
        if (c.defined && (!have_best || c.auc > report.best_auc)) {
            have_best = true;
            report.best_auc = c.auc;
            report.best_r = c.r;
            report.best_alpha = c.alpha;
        }
    }
    report.absolute_change = report.best_auc - report.default_auc;
    return report;
}

void write_report_csv(const HeatmapReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << "omega,delta,state,auc,ttw_mean_ms,ttw_std_ms,ttw_median_ms,ttw_min_ms,ttw_max_ms,"
           "window_count,positive_fraction\n";
    for (const auto& c : report.cells) {
        out << c.omega << ',' << c.delta << ',' << cell_state_name(c.state) << ',';
        if (c.state == CellState::computed) out << fmt_double(c.auc);
        out << ',' << fmt_double(c.ttw.mean_ms) << ',' << fmt_double(c.ttw.std_ms) << ','
            << fmt_double(c.ttw.median_ms) << ',' << fmt_double(c.ttw.min_ms) << ',' << fmt_double(c.ttw.max_ms)
            << ',' << c.window_count << ',' << fmt_double(c.positive_fraction) << '\n';
    }
    if (!out) raise(Errc::io, "write failed: " + path);
}

void write_report_json(const HeatmapReport& report, const std::string& path) {
    nlohmann::json j;
    j["detector"] = report.detector;
    j["attack_set"] = report.attack_set;
    j["auc_summary"] = summary_to_json(report.auc_summary);
    j["ttw_summary"] = summary_to_json(report.ttw_summary);
    j["cells"] = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json cell{{"omega", c.omega},
                            {"delta", c.delta},
                            {"state", cell_state_name(c.state)},
                            {"window_count", c.window_count},
                            {"positive_fraction", c.positive_fraction},
                            {"ttw_mean_ms", c.ttw.mean_ms},
                            {"ttw_std_ms", c.ttw.std_ms},
                            {"ttw_median_ms", c.ttw.median_ms},
                            {"ttw_min_ms", c.ttw.min_ms},
                            {"ttw_max_ms", c.ttw.max_ms}};
        if (c.state == CellState::computed) cell["auc"] = c.auc;
        j["cells"].push_back(std::move(cell));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) raise(Errc::io, "write failed: " + path);
}

void write_hyperparam_csv(const HyperparamReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << "r,alpha,auc,defined,is_default\n";
    for (const auto& c : report.cells)
        out << fmt_double(c.r) << ',' << fmt_double(c.alpha) << ',' << fmt_double(c.auc) << ','
            << (c.defined ? 1 : 0) << ',' << (c.is_default ? 1 : 0) << '\n';
    if (!out) raise(Errc::io, "write failed: " + path);
}

void write_hyperparam_json(const HyperparamReport& report, const std::string& path) {
    nlohmann::json j;
    j["omega"] = report.omega;
    j["delta"] = report.delta;
    j["attack_set"] = report.attack_set;
    j["best"] = {{"r", report.best_r}, {"alpha", report.best_alpha}, {"auc", report.best_auc}};
    j["default"] = {{"r", -5.0}, {"alpha", 0.9}, {"auc", report.default_auc}};
    j["absolute_change"] = report.absolute_change;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : report.cells)
        j["cells"].push_back({{"r", c.r},
                              {"alpha", c.alpha},
                              {"auc", c.auc},
                              {"defined", c.defined},
                              {"is_default", c.is_default}});
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) raise(Errc::io, "write failed: " + path);
}

void write_summary_table_csv(const std::vector<HeatmapReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << "attack_set,detector,auc_mean,auc_std,auc_median,auc_min,auc_min_omega,auc_min_delta,"
           "auc_max,auc_max_omega,auc_max_delta,ttw_mean_ms,ttw_min_ms\n";
    for (const auto& r : reports) {
        const auto& a = r.auc_summary;
        const auto& t = r.ttw_summary;
        out << r.attack_set << ',' << r.detector << ',' << fmt_double(a.mean) << ',' << fmt_double(a.stddev) << ','
            << fmt_double(a.median) << ',' << fmt_double(a.min) << ',' << a.min_omega << ',' << a.min_delta << ','
            << fmt_double(a.max) << ',' << a.max_omega << ',' << a.max_delta << ',' << fmt_double(t.mean) << ','
            << fmt_double(t.min) << '\n';
    }
    if (!out) raise(Errc::io, "write failed: " + path);
}

} // namespace canids
