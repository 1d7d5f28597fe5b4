#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace canids {

/// One decoded CAN signal as captured: timestamps are seconds, strictly
/// increasing after parsing, and need not be uniformly spaced.
struct RawSignalTrace {
    std::string id;
    std::vector<double> timestamps;
    std::vector<double> values;
};

enum class LogFormat { csv_long, csv_wide };

/// Uniform-rate multivariate time series. Values are stored column-major:
/// values[c][t] is signal c at sample t.
struct SignalMatrix {
    double rate_hz = 100.0;
    double start_time = 0.0;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;

    std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }
    std::size_t cols() const { return columns.size(); }
    double time_at(std::size_t sample) const { return start_time + static_cast<double>(sample) / rate_hz; }
    std::optional<std::size_t> column_index(std::string_view id) const;
};

struct NormalizationParams {
    struct Entry {
        std::string id;
        double min = 0.0;
        double max = 0.0;
    };
    std::vector<Entry> retained;            // order defines output column order
    std::vector<std::string> constant_mask; // signals dropped as constant
};

std::vector<RawSignalTrace> parse_signal_log(const std::string& path, LogFormat format);
std::vector<RawSignalTrace> parse_signal_log_text(std::string_view text, LogFormat format,
                                                  const std::string& origin = "<memory>");

/// Grid span policy: intersect uses [max first ts, min last ts] and never
/// extrapolates; cover uses [min first ts, max last ts] and edge-holds each
/// trace outside its own span.
enum class SpanPolicy { intersect, cover };

SignalMatrix resample(const std::vector<RawSignalTrace>& traces, double rate_hz,
                      SpanPolicy span = SpanPolicy::intersect);

NormalizationParams fit_normalization(const SignalMatrix& matrix);
SignalMatrix apply_normalization(const SignalMatrix& matrix, const NormalizationParams& params);

void write_matrix_csv(const SignalMatrix& matrix, const std::string& path);
SignalMatrix read_matrix_csv(const std::string& path);

void write_params_json(const NormalizationParams& params, double rate_hz, const std::string& path);
NormalizationParams read_params_json(const std::string& path, double* rate_hz = nullptr);

} // namespace canids
