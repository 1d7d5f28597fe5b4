#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "canids/detector.hpp"
#include "canids/synth.hpp"
#include "canids/window.hpp"

namespace canids {

/// Label 1 iff the window's half-open time span overlaps any injection interval.
std::vector<int> label_windows(const std::vector<WindowView>& views, const GroundTruth& truth);

/// Rank-based AUC with ties counted half. Throws Errc::degenerate_input when
/// only one class is present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

struct TtwStats {
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double median_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    double total_ms = 0.0;
    std::size_t window_count = 0;
};

TtwStats measure_ttw(std::span<const AnomalyScore> scores);

enum class CellState { computed, skipped, undefined_auc };
std::string cell_state_name(CellState state);

struct EvalCell {
    std::size_t omega = 0;
    std::size_t delta = 0;
    CellState state = CellState::computed;
    double auc = 0.0;
    TtwStats ttw;
    std::size_t window_count = 0;
    double positive_fraction = 0.0;
};

struct SummaryStats {
    double mean = 0.0;
    double stddev = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t min_omega = 0, min_delta = 0;
    std::size_t max_omega = 0, max_delta = 0;
    std::size_t computed_cells = 0;
    std::size_t skipped_cells = 0;
    std::size_t undefined_cells = 0;
};

struct HeatmapReport {
    std::string detector;
    std::string attack_set;
    std::vector<EvalCell> cells;
    SummaryStats auc_summary;
    SummaryStats ttw_summary; // over cell mean TTW, in ms
};

struct Capture {
    std::string name;
    SignalMatrix matrix; // already normalized
    GroundTruth truth;
};

struct SweepGrid {
    std::size_t omega_min = 50, omega_max = 400, omega_step = 50;
    std::size_t delta_min = 10, delta_step = 10; // delta runs to omega
    static SweepGrid defaults() { return {}; }
    std::vector<WindowSpec> specs() const;
};

struct SweepOptions {
    SweepGrid grid = SweepGrid::defaults();
    unsigned workers = 0;       // 0 = hardware concurrency
    bool ttw_fidelity = false;  // force single worker for timing runs
};

HeatmapReport sweep(const SignalMatrix& train, const std::vector<Capture>& captures,
                    const DetectorConfig& config, const SweepOptions& options, const std::string& attack_set);

/// Single (omega, delta) evaluation used by both sweep cells and the CLI
/// report command.
EvalCell evaluate_cell(const TrainedModel& model, const std::vector<Capture>& captures, const WindowSpec& spec);

SummaryStats summarize_auc(const std::vector<EvalCell>& cells);

struct HyperparamCell {
    double r = 0.0;
    double alpha = 0.0;
    double auc = 0.0;
    bool defined = false;
    bool is_default = false;
};

struct HyperparamReport {
    std::size_t omega = 0, delta = 0;
    std::string attack_set;
    std::vector<HyperparamCell> cells; // 5x8 grid plus the default reference
    double best_r = 0.0, best_alpha = 0.0, best_auc = 0.0;
    double default_auc = 0.0;
    double absolute_change = 0.0;
};

HyperparamReport hyperparam_search_moriano(const SignalMatrix& train, const std::vector<Capture>& captures,
                                           std::size_t omega, std::size_t delta, unsigned workers,
                                           const std::string& attack_set);

void write_report_csv(const HeatmapReport& report, const std::string& path);
void write_report_json(const HeatmapReport& report, const std::string& path);
void write_hyperparam_csv(const HyperparamReport& report, const std::string& path);
void write_hyperparam_json(const HyperparamReport& report, const std::string& path);

/// Table-style summary across detectors and attack sets: one row per attack
/// set, one block of summary statistics per detector.
void write_summary_table_csv(const std::vector<HeatmapReport>& reports, const std::string& path);

} // namespace canids
