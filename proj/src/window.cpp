#include "canids/window.hpp"

#include "canids/error.hpp"

namespace canids {

void WindowSpec::validate() const {
    if (omega < 2) raise(Errc::invalid_argument, "window spec: omega must be >= 2");
    if (delta < 1 || delta > omega) raise(Errc::invalid_argument, "window spec: delta must be in [1, omega]");
}

std::vector<WindowView> enumerate_windows(std::size_t stream_len, const WindowSpec& spec, double rate_hz,
                                          double start_time) {
    spec.validate();
    if (stream_len < spec.omega) raise(Errc::domain, "enumerate_windows: stream shorter than one window");
    const std::size_t count = (stream_len - spec.omega) / spec.delta + 1;
    std::vector<WindowView> views;
    views.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        WindowView v;
        v.index = j + 1;
        v.start_sample = j * spec.delta;
        v.end_sample = v.start_sample + spec.omega;
        v.start_time = start_time + static_cast<double>(v.start_sample) / rate_hz;
        v.end_time = start_time + static_cast<double>(v.end_sample) / rate_hz;
        views.push_back(v);
    }
    return views;
}

WindowBlock slice(const SignalMatrix& matrix, const WindowView& view) {
    if (view.end_sample > matrix.rows() || view.start_sample >= view.end_sample)
        raise(Errc::invalid_argument, "slice: window out of matrix bounds");
    return WindowBlock(matrix, view.start_sample, view.end_sample - view.start_sample);
}

} // namespace canids
