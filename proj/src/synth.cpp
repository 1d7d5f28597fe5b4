#include "canids/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "canids/error.hpp"

namespace canids {

namespace {

// Deterministic standard normals from mt19937_64 via Box-Muller.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    double uniform() { return uniform_open(); }

private:
    double uniform_open() {
        // (0, 1], so log() above never sees zero.
        const std::uint64_t bits = rng_() >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

double column_mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double column_std(const std::vector<double>& v) {
    const double mean = column_mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size()));
}

} // namespace

InjectMode inject_mode_from_string(const std::string& name) {
    if (name == "constant-max") return InjectMode::constant_max;
    if (name == "constant-value") return InjectMode::constant_value;
    if (name == "decorrelate") return InjectMode::decorrelate;
    raise(Errc::invalid_argument, "unknown injection mode: " + name);
}

std::string inject_mode_name(InjectMode mode) {
    switch (mode) {
    case InjectMode::constant_max: return "constant-max";
    case InjectMode::constant_value: return "constant-value";
    case InjectMode::decorrelate: return "decorrelate";
    }
    raise(Errc::internal, "inject_mode_name: bad enum value");
}

SignalMatrix inject(const SignalMatrix& matrix, const InjectionSpec& spec,
                    const NormalizationParams* train_params, GroundTruth& truth) {
    const auto col = matrix.column_index(spec.signal_id);
    if (!col) raise(Errc::invalid_argument, "inject: unknown signal: " + spec.signal_id);
    if (!(spec.t_start < spec.t_end)) raise(Errc::invalid_argument, "inject: interval must have t_start < t_end");
    const double capture_end = matrix.time_at(matrix.rows() - 1);
    if (spec.t_start < matrix.start_time || spec.t_end > capture_end)
        raise(Errc::invalid_argument, "inject: interval outside capture span");

    SignalMatrix out = matrix;
    auto& target = out.values[*col];
    const auto [mn_it, mx_it] = std::minmax_element(target.begin(), target.end());
    const double observed_min = *mn_it;
    const double observed_max = *mx_it;

    double fill = spec.value;
    if (spec.mode == InjectMode::constant_max) {
        fill = observed_max;
        if (train_params) {
            for (const auto& e : train_params->retained)
                if (e.id == spec.signal_id) fill = e.max;
        }
    }

    Gaussian gauss(spec.seed);
    const double step_scale = (observed_max - observed_min) * 0.002;
    double walk = 0.0;
    double velocity = 0.0;
    bool walk_started = false;

    for (std::size_t i = 0; i < out.rows(); ++i) {
        const double t = out.time_at(i);
        if (t < spec.t_start || t > spec.t_end) continue;
        switch (spec.mode) {
        case InjectMode::constant_max:
        case InjectMode::constant_value:
            target[i] = fill;
            break;
        case InjectMode::decorrelate:
            if (!walk_started) {
                walk = target[i];
                walk_started = true;
            }
            velocity = 0.99 * velocity + step_scale * gauss();
            walk = std::clamp(walk + velocity, observed_min, observed_max);
            target[i] = walk;
            break;
        }
    }
    add_injection_interval(truth, spec.t_start, spec.t_end, "inject");
    return out;
}

namespace {

// Piecewise-linear ladder through five anchor gains, sampled at `pairs`
// evenly spaced positions; pairs = 5 hits the anchors exactly.
double ladder_gain(const double (&anchors)[5], std::size_t pair, std::size_t pairs) {
    if (pairs == 1) return anchors[0];
    const double x = 4.0 * static_cast<double>(pair) / static_cast<double>(pairs - 1);
    const auto lo = static_cast<std::size_t>(std::min(x, 3.0));
    const double frac = x - static_cast<double>(lo);
    return anchors[lo] * (1.0 - frac) + anchors[lo + 1] * frac;
}

} // namespace

SignalMatrix make_benign_fixture(std::size_t samples, double rate_hz, std::uint64_t seed, std::size_t pairs) {
    if (samples < 2) raise(Errc::invalid_argument, "make_benign_fixture: need at least 2 samples");
    if (!(rate_hz > 0.0)) raise(Errc::invalid_argument, "make_benign_fixture: rate must be positive");
    if (pairs < 1) raise(Errc::invalid_argument, "make_benign_fixture: need at least 1 pair");

    constexpr double kToneA = 3.1; // Hz
    constexpr double kToneB = 9.7;
    constexpr double kGainA[5] = {1.00, 0.80, 0.62, 0.47, 0.35};
    constexpr double kGainB[5] = {1.05, 0.97, 0.89, 0.82, 0.76};
    constexpr double kNoiseBase = 0.02;

    Gaussian gauss(seed);
    const double phase_a = gauss.uniform() * 2.0 * std::numbers::pi;
    const double phase_b = gauss.uniform() * 2.0 * std::numbers::pi;

    SignalMatrix m;
    m.rate_hz = rate_hz;
    m.start_time = 0.0;

    std::vector<double> tone_a(samples), tone_b(samples);
    const double root2 = std::sqrt(2.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / rate_hz;
        tone_a[i] = root2 * std::sin(2.0 * std::numbers::pi * kToneA * t + phase_a);
        tone_b[i] = root2 * std::sin(2.0 * std::numbers::pi * kToneB * t + phase_b);
    }

    for (std::size_t pair = 0; pair < pairs; ++pair) {
        const double gain_a = ladder_gain(kGainA, pair, pairs);
        const double gain_b = ladder_gain(kGainB, pair, pairs);
        const double sd = kNoiseBase * (1.0 + 2.0 * static_cast<double>(pair) / std::max<std::size_t>(pairs - 1, 1));
        std::vector<double> primary(samples), secondary(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            const double base = gain_a * tone_a[i] + gain_b * tone_b[i];
            primary[i] = base + sd * gauss();
            secondary[i] = 0.8 * base + 3.0 + sd * gauss();
        }
        m.columns.push_back("s" + std::to_string(2 * pair));
        m.values.push_back(std::move(primary));
        m.columns.push_back("s" + std::to_string(2 * pair + 1));
        m.values.push_back(std::move(secondary));
    }
    return m;
}

void write_truth_csv(const TruthSet& truth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << "capture,t_start,t_end\n";
    char buf[32];
    auto fmt = [&buf](double v) {
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    for (const auto& [capture, gt] : truth)
        for (const auto& iv : gt.intervals) out << capture << ',' << fmt(iv.t_start) << ',' << fmt(iv.t_end) << '\n';
    if (!out) raise(Errc::io, "write failed: " + path);
}

void add_injection_interval(GroundTruth& truth, double t_start, double t_end, const std::string& context) {
    if (!(t_start < t_end)) raise(Errc::invalid_argument, context + ": interval must have t_start < t_end");
    for (const auto& iv : truth.intervals)
        if (t_start < iv.t_end && iv.t_start < t_end)
            raise(Errc::invalid_argument, context + ": injection intervals must not overlap");
    truth.intervals.push_back({t_start, t_end});
}

TruthSet read_truth_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot open file: " + path);
    TruthSet truth;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string capture, start_s, end_s;
        if (!std::getline(ss, capture, ',') || !std::getline(ss, start_s, ',') || !std::getline(ss, end_s))
            raise(Errc::parse, path + ":" + std::to_string(line_no) + ": expected capture,t_start,t_end");
        if (line_no == 1 && capture == "capture") continue;
        try {
            const double t0 = std::stod(start_s);
            const double t1 = std::stod(end_s);
            add_injection_interval(truth[capture], t0, t1, path + ":" + std::to_string(line_no));
        } catch (const std::invalid_argument&) {
            raise(Errc::parse, path + ":" + std::to_string(line_no) + ": non-numeric interval bound");
        }
    }
    return truth;
}

} // namespace canids
