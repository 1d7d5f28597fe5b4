#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "canids/signal.hpp"

namespace canids {

/// Sliding-window parameters: omega samples per window, delta samples between
/// consecutive window starts. Valid iff 1 <= delta <= omega and omega >= 2.
struct WindowSpec {
    std::size_t omega = 0;
    std::size_t delta = 0;
    void validate() const;
};

/// One concrete window. index is 1-based, sample range is half-open
/// [start_sample, end_sample), times are seconds on the stream clock.
struct WindowView {
    std::size_t index = 0;
    std::size_t start_sample = 0;
    std::size_t end_sample = 0;
    double start_time = 0.0;
    double end_time = 0.0;
};

std::vector<WindowView> enumerate_windows(std::size_t stream_len, const WindowSpec& spec,
                                          double rate_hz = 1.0, double start_time = 0.0);

/// Borrowed view of matrix rows [start, start+len); no data is copied.
class WindowBlock {
public:
    WindowBlock(const SignalMatrix& matrix, std::size_t start, std::size_t len)
        : matrix_(&matrix), start_(start), len_(len) {}

    std::size_t rows() const { return len_; }
    std::size_t cols() const { return matrix_->cols(); }
    std::span<const double> col(std::size_t c) const {
        return std::span<const double>(matrix_->values[c]).subspan(start_, len_);
    }

private:
    const SignalMatrix* matrix_;
    std::size_t start_;
    std::size_t len_;
};

WindowBlock slice(const SignalMatrix& matrix, const WindowView& view);

} // namespace canids
