#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "canids/window.hpp"

namespace canids {

struct SquareMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Pearson matrix of a window: symmetric, unit diagonal; pairs involving a
/// window-constant signal are fixed at 0.
struct CorrelationMatrix : SquareMatrix {
    using SquareMatrix::SquareMatrix;
};

CorrelationMatrix pearson_matrix(const WindowBlock& block);
CorrelationMatrix pearson_matrix(const SignalMatrix& matrix);

/// Strict upper triangle (i < j) in row-major order; length n(n-1)/2.
std::vector<double> upper_triangle(const CorrelationMatrix& r);

/// Midranks of a sample: ties share the average of the ranks they occupy.
/// Ranks are 1-based.
std::vector<double> midranks(std::span<const double> values);

double normal_cdf(double z);

struct MannWhitneyResult {
    double u_statistic = 0.0; // U of the first sample
    double z = 0.0;
    double p_value = 1.0; // two-sided
};

/// Normal approximation with tie and continuity correction.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

/// Same test for pre-sorted samples; used on hot paths where one side is
/// fixed across many calls. Ranks come from a linear merge walk.
MannWhitneyResult mann_whitney_u_sorted(std::span<const double> a_sorted, std::span<const double> b_sorted);

/// Exact two-sided p by enumerating all C(|a|+|b|, |a|) rank assignments.
/// Intended for small samples; refuses |a|+|b| > 20.
double mann_whitney_u_exact_p(std::span<const double> a, std::span<const double> b);

struct SpearmanResult {
    double rho = 0.0;
    double p_value = 1.0; // two-sided, t approximation with n-2 dof
};

/// Throws Errc::degenerate_input when either input is constant.
SpearmanResult spearman(std::span<const double> a, std::span<const double> b);

/// Spearman against a side whose midranks are already known.
SpearmanResult spearman_ranked(std::span<const double> a_ranks, std::span<const double> b);

double student_t_cdf(double t, double dof);

} // namespace canids
