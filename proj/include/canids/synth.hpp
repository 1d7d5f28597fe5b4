#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "canids/signal.hpp"

namespace canids {

enum class InjectMode { constant_max, constant_value, decorrelate };

InjectMode inject_mode_from_string(const std::string& name);
std::string inject_mode_name(InjectMode mode);

struct InjectionSpec {
    std::string signal_id;
    double t_start = 0.0;
    double t_end = 0.0;
    InjectMode mode = InjectMode::decorrelate;
    double value = 0.0;      // constant_value
    std::uint64_t seed = 0;  // decorrelate
};

struct InjectionInterval {
    double t_start = 0.0;
    double t_end = 0.0;
};

struct GroundTruth {
    std::vector<InjectionInterval> intervals;
};

/// Appends an interval, rejecting inverted bounds and overlaps with the
/// intervals already present.
void add_injection_interval(GroundTruth& truth, double t_start, double t_end,
                            const std::string& context = "ground truth");

/// Replace the target signal's samples inside [t_start, t_end] (inclusive)
/// according to the mode; every other sample is untouched. constant_max uses
/// the training max from params when given, else the capture's own max.
/// The injected interval is appended to truth.
SignalMatrix inject(const SignalMatrix& matrix, const InjectionSpec& spec,
                    const NormalizationParams* train_params, GroundTruth& truth);

/// Benign test stream: `pairs` correlated signal pairs (default five, i.e.
/// ten signals) driven by two shared tones with laddered mixing gains and a
/// per-pair noise ladder.
SignalMatrix make_benign_fixture(std::size_t samples, double rate_hz, std::uint64_t seed,
                                 std::size_t pairs = 5);

using TruthSet = std::map<std::string, GroundTruth>;

void write_truth_csv(const TruthSet& truth, const std::string& path);
TruthSet read_truth_csv(const std::string& path);

} // namespace canids
