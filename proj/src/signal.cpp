#include "canids/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "canids/error.hpp"

#include <json.hpp>

namespace canids {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& raw, double& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    if (res.ec == std::errc() && res.ptr == last) return std::isfinite(out);
    // from_chars on libstdc++ rejects leading '+'; fall back to strtod for those.
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t line_no, const std::string& why) {
    raise(Errc::parse, origin + ":" + std::to_string(line_no) + ": " + why);
}

std::vector<RawSignalTrace> parse_long(std::string_view text, const std::string& origin) {
    std::map<std::string, std::size_t> index;
    std::vector<RawSignalTrace> traces;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 3) parse_fail(origin, line_no, "expected 3 fields (timestamp,signal_id,value)");
        double ts = 0.0;
        if (!parse_double(fields[0], ts)) {
            if (line_no == 1) continue; // header row
            parse_fail(origin, line_no, "non-numeric timestamp '" + trim(fields[0]) + "'");
        }
        const std::string id = trim(fields[1]);
        if (id.empty()) parse_fail(origin, line_no, "empty signal_id");
        double value = 0.0;
        if (!parse_double(fields[2], value)) parse_fail(origin, line_no, "non-numeric value '" + trim(fields[2]) + "'");
        auto [it, inserted] = index.try_emplace(id, traces.size());
        if (inserted) traces.push_back(RawSignalTrace{id, {}, {}});
        auto& tr = traces[it->second];
        tr.timestamps.push_back(ts);
        tr.values.push_back(value);
    }
    return traces;
}

std::vector<RawSignalTrace> parse_wide(std::string_view text, const std::string& origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) raise(Errc::parse, origin + ": empty input");
    auto header = split_csv_line(line);
    if (header.size() < 2) parse_fail(origin, 1, "wide header needs a time column plus signals");
    std::vector<RawSignalTrace> traces(header.size() - 1);
    for (std::size_t c = 1; c < header.size(); ++c) {
        traces[c - 1].id = trim(header[c]);
        if (traces[c - 1].id.empty()) parse_fail(origin, 1, "empty signal name in header");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            parse_fail(origin, line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                            std::to_string(fields.size()));
        double ts = 0.0;
        if (!parse_double(fields[0], ts)) parse_fail(origin, line_no, "non-numeric timestamp '" + trim(fields[0]) + "'");
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = 0.0;
            if (!parse_double(fields[c], v))
                parse_fail(origin, line_no, "non-numeric value '" + trim(fields[c]) + "' in column " + traces[c - 1].id);
            traces[c - 1].timestamps.push_back(ts);
            traces[c - 1].values.push_back(v);
        }
    }
    return traces;
}

// Sort by timestamp (stable: file order breaks ties), then collapse duplicate
// timestamps keeping the last-seen value. Latest frame wins on CAN.
void normalize_trace(RawSignalTrace& tr) {
    const std::size_t n = tr.timestamps.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tr.timestamps[a] < tr.timestamps[b]; });
    std::vector<double> ts, vs;
    ts.reserve(n);
    vs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = tr.timestamps[order[i]];
        const double v = tr.values[order[i]];
        if (!ts.empty() && ts.back() == t) {
            vs.back() = v;
        } else {
            ts.push_back(t);
            vs.push_back(v);
        }
    }
    tr.timestamps = std::move(ts);
    tr.values = std::move(vs);
}

double interpolate(const RawSignalTrace& tr, double t) {
    const auto& ts = tr.timestamps;
    const auto& vs = tr.values;
    if (t <= ts.front()) return vs.front();
    if (t >= ts.back()) return vs.back();
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double span = ts[hi] - ts[lo];
    const double frac = (t - ts[lo]) / span;
    return vs[lo] + frac * (vs[hi] - vs[lo]);
}

} // namespace

std::optional<std::size_t> SignalMatrix::column_index(std::string_view id) const {
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == id) return c;
    return std::nullopt;
}

std::vector<RawSignalTrace> parse_signal_log_text(std::string_view text, LogFormat format,
                                                  const std::string& origin) {
    if (trim(std::string(text)).empty()) raise(Errc::parse, origin + ": empty input");
    auto traces = format == LogFormat::csv_long ? parse_long(text, origin) : parse_wide(text, origin);
    if (traces.empty()) raise(Errc::parse, origin + ": no signal rows");
    for (auto& tr : traces) {
        if (tr.timestamps.empty()) raise(Errc::parse, origin + ": signal " + tr.id + " has no samples");
        normalize_trace(tr);
    }
    return traces;
}

std::vector<RawSignalTrace> parse_signal_log(const std::string& path, LogFormat format) {
    return parse_signal_log_text(read_file(path), format, path);
}

SignalMatrix resample(const std::vector<RawSignalTrace>& traces, double rate_hz, SpanPolicy span) {
    if (traces.empty()) raise(Errc::invalid_argument, "resample: no traces");
    if (!(rate_hz > 0.0)) raise(Errc::invalid_argument, "resample: rate must be positive");
    double start = traces.front().timestamps.front();
    double stop = traces.front().timestamps.back();
    for (const auto& tr : traces) {
        const double first = tr.timestamps.front();
        const double last = tr.timestamps.back();
        if (span == SpanPolicy::intersect) {
            start = std::max(start, first);
            stop = std::min(stop, last);
        } else {
            start = std::min(start, first);
            stop = std::max(stop, last);
        }
    }
    if (stop < start) raise(Errc::domain, "resample: traces have no common time span");

    // Guard the count against representation error in stop-start so a span
    // that is an exact multiple of the step keeps its final grid point.
    const double step = 1.0 / rate_hz;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;

    SignalMatrix m;
    m.rate_hz = rate_hz;
    m.start_time = start;
    m.columns.reserve(traces.size());
    m.values.reserve(traces.size());
    for (const auto& tr : traces) {
        std::vector<double> col(count);
        for (std::size_t i = 0; i < count; ++i) col[i] = interpolate(tr, start + static_cast<double>(i) * step);
        m.columns.push_back(tr.id);
        m.values.push_back(std::move(col));
    }
    return m;
}

NormalizationParams fit_normalization(const SignalMatrix& matrix) {
    if (matrix.cols() == 0 || matrix.rows() == 0) raise(Errc::invalid_argument, "fit_normalization: empty matrix");
    NormalizationParams params;
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
        const auto& col = matrix.values[c];
        const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
        if (*mn == *mx) {
            params.constant_mask.push_back(matrix.columns[c]);
        } else {
            params.retained.push_back({matrix.columns[c], *mn, *mx});
        }
    }
    if (params.retained.empty()) raise(Errc::domain, "fit_normalization: all signals constant");
    return params;
}

SignalMatrix apply_normalization(const SignalMatrix& matrix, const NormalizationParams& params) {
    SignalMatrix out;
    out.rate_hz = matrix.rate_hz;
    out.start_time = matrix.start_time;
    out.columns.reserve(params.retained.size());
    out.values.reserve(params.retained.size());
    for (const auto& entry : params.retained) {
        auto idx = matrix.column_index(entry.id);
        if (!idx) raise(Errc::invalid_argument, "apply_normalization: signal missing from matrix: " + entry.id);
        const double scale = 1.0 / (entry.max - entry.min);
        std::vector<double> col(matrix.values[*idx].size());
        for (std::size_t i = 0; i < col.size(); ++i) col[i] = (matrix.values[*idx][i] - entry.min) * scale;
        out.columns.push_back(entry.id);
        out.values.push_back(std::move(col));
    }
    return out;
}

void write_matrix_csv(const SignalMatrix& matrix, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << "time";
    for (const auto& id : matrix.columns) out << ',' << id;
    out << '\n';
    const std::size_t rows = matrix.rows();
    for (std::size_t i = 0; i < rows; ++i) {
        out << format_double(matrix.time_at(i));
        for (std::size_t c = 0; c < matrix.cols(); ++c) out << ',' << format_double(matrix.values[c][i]);
        out << '\n';
    }
    if (!out) raise(Errc::io, "write failed: " + path);
}

SignalMatrix read_matrix_csv(const std::string& path) {
    auto traces = parse_signal_log(path, LogFormat::csv_wide);
    SignalMatrix m;
    const auto& ts = traces.front().timestamps;
    if (ts.size() < 2) raise(Errc::parse, path + ": matrix needs at least 2 rows");
    const double step = ts[1] - ts[0];
    if (!(step > 0.0)) raise(Errc::parse, path + ": non-increasing time column");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double d = ts[i] - ts[i - 1];
        if (std::abs(d - step) > 1e-6 * std::max(1.0, std::abs(step)))
            raise(Errc::parse, path + ": time column is not a uniform grid (row " + std::to_string(i + 1) + ")");
    }
    m.rate_hz = 1.0 / step;
    m.start_time = ts.front();
    for (auto& tr : traces) {
        m.columns.push_back(tr.id);
        m.values.push_back(std::move(tr.values));
    }
    return m;
}

void write_params_json(const NormalizationParams& params, double rate_hz, const std::string& path) {
    nlohmann::json j;
    j["rate_hz"] = rate_hz;
    j["retained"] = nlohmann::json::array();
    for (const auto& e : params.retained) j["retained"].push_back({{"id", e.id}, {"min", e.min}, {"max", e.max}});
    j["constant"] = params.constant_mask;
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write file: " + path);
    out << j.dump(2) << '\n';
    if (!out) raise(Errc::io, "write failed: " + path);
}

NormalizationParams read_params_json(const std::string& path, double* rate_hz) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse, path + ": " + e.what());
    }
    NormalizationParams params;
    try {
        if (rate_hz) *rate_hz = j.at("rate_hz").get<double>();
        for (const auto& e : j.at("retained")) {
            NormalizationParams::Entry entry;
            entry.id = e.at("id").get<std::string>();
            entry.min = e.at("min").get<double>();
            entry.max = e.at("max").get<double>();
            if (!(entry.min < entry.max))
                raise(Errc::parse, path + ": invalid min/max for signal " + entry.id);
            params.retained.push_back(std::move(entry));
        }
        for (const auto& c : j.at("constant")) params.constant_mask.push_back(c.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        raise(Errc::parse, path + ": " + e.what());
    }
    if (params.retained.empty()) raise(Errc::parse, path + ": no retained signals");
    return params;
}

} // namespace canids
