#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canids/cluster.hpp"
#include "canids/ecs.hpp"
#include "canids/signal.hpp"
#include "canids/stats.hpp"
#include "canids/window.hpp"

namespace canids {

enum class Method { corr_distribution, corr_correlation, ganesan17, moriano22 };

Method method_from_string(const std::string& name);
std::string method_name(Method method);

struct DetectorConfig {
    Method method = Method::corr_distribution;
    double eps = 1.0;      // ganesan17
    int min_samples = 1;   // ganesan17
    double r = -5.0;       // moriano22
    double alpha = 0.9;    // moriano22
    void validate() const;
};

/// Immutable per-detector reference representation from training data.
struct TrainedModel {
    Method method = Method::corr_distribution;
    DetectorConfig config;
    WindowSpec spec;
    std::size_t signal_count = 0;

    std::vector<double> u_train; // corr_distribution / corr_correlation
    // prepared once at fit time; reused by every window
    std::vector<double> u_train_sorted; // corr_distribution
    std::vector<double> u_train_ranks;  // corr_correlation

    Dendrogram train_dendrogram; // moriano22
    AffinityMatrix train_affinity;

    double error_mean = 0.0; // ganesan17 window-error calibration
    double error_std = 0.0;
    std::vector<double> signal_means; // ganesan17 per-signal training stats
    std::vector<double> signal_stds;
};

struct AnomalyScore {
    std::size_t window_index = 0;
    double start_time = 0.0;
    double end_time = 0.0;
    double score = 0.0;
    std::int64_t duration_ns = 0;
    bool degenerate = false;
};

/// Ordered mutable state for ganesan17: enforces in-order window scoring and
/// accumulates the observed window errors.
class GanesanState {
public:
    std::size_t next_index() const { return next_index_; }
    const std::vector<double>& history() const { return history_; }
    void record(std::size_t window_index, double error);

private:
    std::size_t next_index_ = 1;
    std::vector<double> history_;
};

TrainedModel fit(const SignalMatrix& train, const DetectorConfig& config, const WindowSpec& spec);

/// Max normalized within-cluster correlation deviation of one window.
double ganesan_window_error(const CorrelationMatrix& r, double eps, int min_samples);

AnomalyScore score_corr_distribution(const TrainedModel& model, const WindowBlock& window);
AnomalyScore score_corr_correlation(const TrainedModel& model, const WindowBlock& window);
AnomalyScore score_ganesan17(const TrainedModel& model, const WindowBlock& window, GanesanState& state);
AnomalyScore score_moriano22(const TrainedModel& model, const WindowBlock& window);

/// Dispatch on the model's method; state is required for ganesan17.
AnomalyScore score_window(const TrainedModel& model, const WindowBlock& window, GanesanState* state = nullptr);

/// Score every window of a capture in order. Window times/indices are filled
/// from the views; durations cover slicing, correlation, and scoring only.
std::vector<AnomalyScore> score_capture(const TrainedModel& model, const SignalMatrix& capture,
                                        const WindowSpec& spec);

void write_scores_jsonl(const std::vector<AnomalyScore>& scores, const std::string& path);
void write_scores_csv(const std::vector<AnomalyScore>& scores, const std::string& path);
std::vector<AnomalyScore> read_scores_jsonl(const std::string& path);

} // namespace canids
