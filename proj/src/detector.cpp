#include "canids/detector.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "canids/error.hpp"

namespace canids {

namespace {

constexpr double kSigmaFloor = 1e-9;

class ScopedTimer {
public:
    explicit ScopedTimer(std::int64_t& out) : out_(out), start_(std::chrono::steady_clock::now()) {}
    ~ScopedTimer() {
        out_ = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start_)
                   .count();
    }

private:
    std::int64_t& out_;
    std::chrono::steady_clock::time_point start_;
};

void require_method(const TrainedModel& model, Method expected, const char* caller) {
    if (model.method != expected)
        raise(Errc::invalid_argument, std::string(caller) + ": model was fitted for " + method_name(model.method));
}

double population_std(const std::vector<double>& v, double mean) {
    double acc = 0.0;
    for (double x : v) {
        const double d = x - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(v.size()));
}

} // namespace

Method method_from_string(const std::string& name) {
    if (name == "corr-distribution") return Method::corr_distribution;
    if (name == "corr-correlation") return Method::corr_correlation;
    if (name == "ganesan17") return Method::ganesan17;
    if (name == "moriano22") return Method::moriano22;
    raise(Errc::invalid_argument, "unknown detector method: " + name);
}

std::string method_name(Method method) {
    switch (method) {
    case Method::corr_distribution: return "corr-distribution";
    case Method::corr_correlation: return "corr-correlation";
    case Method::ganesan17: return "ganesan17";
    case Method::moriano22: return "moriano22";
    }
    raise(Errc::internal, "method_name: bad enum value");
}

void DetectorConfig::validate() const {
    if (method == Method::ganesan17) {
        if (!(eps > 0.0)) raise(Errc::invalid_argument, "detector config: eps must be positive");
        if (min_samples < 1) raise(Errc::invalid_argument, "detector config: min_samples must be >= 1");
    }
    if (method == Method::moriano22) {
        if (!(alpha > 0.0 && alpha < 1.0)) raise(Errc::invalid_argument, "detector config: alpha must be in (0,1)");
        if (!std::isfinite(r)) raise(Errc::invalid_argument, "detector config: r must be finite");
    }
}

void GanesanState::record(std::size_t window_index, double error) {
    if (window_index != next_index_)
        raise(Errc::state, "ganesan17: windows must be scored in order (expected window " +
                               std::to_string(next_index_) + ", got " + std::to_string(window_index) + ")");
    history_.push_back(error);
    ++next_index_;
}

double ganesan_window_error(const CorrelationMatrix& r, double eps, int min_samples) {
    const auto d = correlation_to_distance(r);
    const auto clustering = dbscan_precomputed(d, eps, min_samples);
    double max_error = 0.0;
    for (int c = 0; c < clustering.cluster_count; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < clustering.labels.size(); ++i)
            if (clustering.labels[i] == c) members.push_back(i);
        if (members.size() < 2) continue;
        std::vector<double> rhos;
        rhos.reserve(members.size() * (members.size() - 1) / 2);
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b) rhos.push_back(r.at(members[a], members[b]));
        const double mean = std::accumulate(rhos.begin(), rhos.end(), 0.0) / static_cast<double>(rhos.size());
        const double sigma = std::max(population_std(rhos, mean), kSigmaFloor);
        double cluster_error = 0.0;
        for (double rho : rhos) cluster_error = std::max(cluster_error, std::abs(rho - mean) / sigma);
        max_error = std::max(max_error, cluster_error);
    }
    return max_error;
}

TrainedModel fit(const SignalMatrix& train, const DetectorConfig& config, const WindowSpec& spec) {
    config.validate();
    spec.validate();
    if (train.cols() < 2) raise(Errc::domain, "fit: need at least 2 retained signals");
    if (train.rows() < spec.omega) raise(Errc::domain, "fit: training stream shorter than one window");

    TrainedModel model;
    model.method = config.method;
    model.config = config;
    model.spec = spec;
    model.signal_count = train.cols();

    switch (config.method) {
    case Method::corr_distribution:
    case Method::corr_correlation: {
        model.u_train = upper_triangle(pearson_matrix(train));
        if (config.method == Method::corr_distribution) {
            model.u_train_sorted = model.u_train;
            std::sort(model.u_train_sorted.begin(), model.u_train_sorted.end());
        } else {
            model.u_train_ranks = midranks(model.u_train);
        }
        break;
    }
    case Method::moriano22: {
        model.train_dendrogram = ward_ahc(correlation_to_distance(pearson_matrix(train)));
        model.train_affinity =
            build_affinity(HierarchicalClustering::from_dendrogram(model.train_dendrogram), config.alpha, config.r);
        break;
    }
    case Method::ganesan17: {
        std::vector<double> errors;
        for (const auto& view : enumerate_windows(train.rows(), spec, train.rate_hz, train.start_time)) {
            const auto r = pearson_matrix(slice(train, view));
            errors.push_back(ganesan_window_error(r, config.eps, config.min_samples));
        }
        model.error_mean = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(errors.size());
        model.error_std = std::max(population_std(errors, model.error_mean), kSigmaFloor);
        model.signal_means.resize(train.cols());
        model.signal_stds.resize(train.cols());
        for (std::size_t c = 0; c < train.cols(); ++c) {
            const auto& col = train.values[c];
            const double mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
            model.signal_means[c] = mean;
            model.signal_stds[c] = population_std(col, mean);
        }
        break;
    }
    }
    return model;
}

namespace {

// All four detectors share the correlation step; everything downstream of the
// window's Pearson matrix lives here.
AnomalyScore score_from_correlation(const TrainedModel& model, const CorrelationMatrix& r, GanesanState* state) {
    AnomalyScore out;
    switch (model.method) {
    case Method::corr_distribution: {
        auto u_test = upper_triangle(r);
        std::sort(u_test.begin(), u_test.end());
        out.score = 1.0 - mann_whitney_u_sorted(model.u_train_sorted, u_test).p_value;
        break;
    }
    case Method::corr_correlation: {
        const auto u_test = upper_triangle(r);
        try {
            out.score = spearman_ranked(model.u_train_ranks, u_test).p_value;
        } catch (const Error& e) {
            if (e.code() != Errc::degenerate_input) throw;
            out.score = 1.0; // no rank structure at all
            out.degenerate = true;
        }
        break;
    }
    case Method::ganesan17: {
        const double error = ganesan_window_error(r, model.config.eps, model.config.min_samples);
        out.score = normal_cdf((error - model.error_mean) / model.error_std);
        state->record(state->next_index(), error);
        break;
    }
    case Method::moriano22: {
        const auto dend = ward_ahc(correlation_to_distance(r));
        const auto affinity =
            build_affinity(HierarchicalClustering::from_dendrogram(dend), model.config.alpha, model.config.r);
        out.score = 1.0 - ecs_similarity(model.train_affinity, affinity, model.config.alpha);
        break;
    }
    }
    return out;
}

AnomalyScore timed_score(const TrainedModel& model, const WindowBlock& window, GanesanState* state) {
    AnomalyScore out;
    ScopedTimer timer(out.duration_ns);
    const auto r = pearson_matrix(window);
    const auto scored = score_from_correlation(model, r, state);
    out.score = scored.score;
    out.degenerate = scored.degenerate;
    return out;
}

} // namespace

AnomalyScore score_corr_distribution(const TrainedModel& model, const WindowBlock& window) {
    require_method(model, Method::corr_distribution, "score_corr_distribution");
    return timed_score(model, window, nullptr);
}

AnomalyScore score_corr_correlation(const TrainedModel& model, const WindowBlock& window) {
    require_method(model, Method::corr_correlation, "score_corr_correlation");
    return timed_score(model, window, nullptr);
}

AnomalyScore score_ganesan17(const TrainedModel& model, const WindowBlock& window, GanesanState& state) {
    require_method(model, Method::ganesan17, "score_ganesan17");
    return timed_score(model, window, &state);
}

AnomalyScore score_moriano22(const TrainedModel& model, const WindowBlock& window) {
    require_method(model, Method::moriano22, "score_moriano22");
    return timed_score(model, window, nullptr);
}

AnomalyScore score_window(const TrainedModel& model, const WindowBlock& window, GanesanState* state) {
    if (window.cols() != model.signal_count)
        raise(Errc::invalid_argument, "score_window: window has " + std::to_string(window.cols()) +
                                          " signals, model expects " + std::to_string(model.signal_count));
    if (model.method == Method::ganesan17 && !state)
        raise(Errc::invalid_argument, "score_window: ganesan17 requires ordered state");
    return timed_score(model, window, state);
}

std::vector<AnomalyScore> score_capture(const TrainedModel& model, const SignalMatrix& capture,
                                        const WindowSpec& spec) {
    const auto views = enumerate_windows(capture.rows(), spec, capture.rate_hz, capture.start_time);
    GanesanState state;
    std::vector<AnomalyScore> scores;
    scores.reserve(views.size());
    for (const auto& view : views) {
        auto score = score_window(model, slice(capture, view), &state);
        score.window_index = view.index;
        score.start_time = view.start_time;
        score.end_time = view.end_time;
        scores.push_back(score);
    }
    return scores;
}

void write_scores_jsonl(const std::vector<AnomalyScore>& scores, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    for (const auto& s : scores) {
        nlohmann::json j{{"window_index", s.window_index}, {"start_time", s.start_time},
                         {"end_time", s.end_time},         {"score", s.score},
                         {"duration_ns", s.duration_ns}};
        if (s.degenerate) j["degenerate"] = true;
        out << j.dump() << '\n';
    }
    if (!out) raise(Errc::io, "write failed: " + path);
}

std::vector<AnomalyScore> read_scores_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot open file: " + path);
    std::vector<AnomalyScore> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            AnomalyScore s;
            s.window_index = j.at("window_index").get<std::size_t>();
            s.start_time = j.at("start_time").get<double>();
            s.end_time = j.at("end_time").get<double>();
            s.score = j.at("score").get<double>();
            s.duration_ns = j.at("duration_ns").get<std::int64_t>();
            s.degenerate = j.value("degenerate", false);
            scores.push_back(s);
        } catch (const nlohmann::json::exception& e) {
            raise(Errc::parse, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (scores.empty()) raise(Errc::parse, path + ": no score records");
    return scores;
}

void write_scores_csv(const std::vector<AnomalyScore>& scores, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << "window_index,start_time,end_time,score,duration_ns,degenerate\n";
    char buf[32];
    auto fmt = [&buf](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    for (const auto& s : scores)
        out << s.window_index << ',' << fmt(s.start_time) << ',' << fmt(s.end_time) << ',' << fmt(s.score) << ','
            << s.duration_ns << ',' << (s.degenerate ? 1 : 0) << '\n';
    if (!out) raise(Errc::io, "write failed: " + path);
}

} // namespace canids
