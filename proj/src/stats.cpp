#include "canids/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "canids/error.hpp"

namespace canids {

namespace {

struct ColumnStats {
    double mean = 0.0;
    double ssd = 0.0; // sum of squared deviations
    bool constant = false;
};

ColumnStats column_stats(std::span<const double> col) {
    ColumnStats s;
    const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
    if (*mn == *mx) {
        s.constant = true;
        s.mean = *mn;
        return s;
    }
    s.mean = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
    for (double v : col) {
        const double d = v - s.mean;
        s.ssd += d * d;
    }
    // All-equal columns are caught above; treat vanishing spread the same way.
    if (s.ssd <= 0.0) s.constant = true;
    return s;
}

template <typename ColFn>
CorrelationMatrix pearson_impl(std::size_t n, std::size_t rows, ColFn col) {
    if (rows < 2) raise(Errc::invalid_argument, "pearson: need at least 2 samples per window");
    std::vector<ColumnStats> stats(n);
    std::vector<std::vector<double>> centered(n);
    for (std::size_t c = 0; c < n; ++c) {
        auto values = col(c);
        stats[c] = column_stats(values);
        if (stats[c].constant) continue;
        centered[c].resize(rows);
        for (std::size_t i = 0; i < rows; ++i) centered[c][i] = values[i] - stats[c].mean;
    }
    CorrelationMatrix r(n);
    for (std::size_t i = 0; i < n; ++i) r.at(i, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (stats[i].constant) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (stats[j].constant) continue;
            double dot = 0.0;
            const double* a = centered[i].data();
            const double* b = centered[j].data();
            for (std::size_t k = 0; k < rows; ++k) dot += a[k] * b[k];
            double v = dot / std::sqrt(stats[i].ssd * stats[j].ssd);
            v = std::clamp(v, -1.0, 1.0);
            r.at(i, j) = v;
            r.at(j, i) = v;
        }
    }
    return r;
}

// Merge walk over two sorted samples: rank sum of the first sample via
// midranks plus the (t^3 - t) tie correction term.
struct PooledRanks {
    double rank_sum_first = 0.0;
    double tie_term = 0.0;
};

PooledRanks pooled_ranks_sorted(std::span<const double> a, std::span<const double> b) {
    PooledRanks out;
    std::size_t ia = 0, ib = 0, consumed = 0;
    while (ia < a.size() || ib < b.size()) {
        double v;
        if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib])) v = a[ia];
        else v = b[ib];
        std::size_t ca = 0, cb = 0;
        while (ia < a.size() && a[ia] == v) {
            ++ia;
            ++ca;
        }
        while (ib < b.size() && b[ib] == v) {
            ++ib;
            ++cb;
        }
        const double group = static_cast<double>(ca + cb);
        const double shared = static_cast<double>(consumed) + (group + 1.0) / 2.0;
        out.rank_sum_first += shared * static_cast<double>(ca);
        out.tie_term += group * group * group - group;
        consumed += ca + cb;
    }
    return out;
}

MannWhitneyResult mann_whitney_from_ranks(const PooledRanks& ranks, double m, double n) {
    const double big_n = m + n;
    MannWhitneyResult res;
    res.u_statistic = ranks.rank_sum_first - m * (m + 1.0) / 2.0;
    const double mean_u = m * n / 2.0;
    const double var_u = m * n / 12.0 * ((big_n + 1.0) - ranks.tie_term / (big_n * (big_n - 1.0)));
    if (var_u <= 0.0) {
        res.z = 0.0;
        res.p_value = 1.0;
        return res;
    }
    const double shift = std::max(std::abs(res.u_statistic - mean_u) - 0.5, 0.0);
    res.z = shift / std::sqrt(var_u);
    res.p_value = std::clamp(std::erfc(res.z / std::sqrt(2.0)), 0.0, 1.0);
    return res;
}

} // namespace

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = shared;
        i = j;
    }
    return ranks;
}

CorrelationMatrix pearson_matrix(const WindowBlock& block) {
    return pearson_impl(block.cols(), block.rows(), [&](std::size_t c) { return block.col(c); });
}

CorrelationMatrix pearson_matrix(const SignalMatrix& matrix) {
    return pearson_impl(matrix.cols(), matrix.rows(),
                        [&](std::size_t c) { return std::span<const double>(matrix.values[c]); });
}

std::vector<double> upper_triangle(const CorrelationMatrix& r) {
    std::vector<double> u;
    u.reserve(r.n * (r.n - 1) / 2);
    for (std::size_t i = 0; i < r.n; ++i)
        for (std::size_t j = i + 1; j < r.n; ++j) u.push_back(r.at(i, j));
    return u;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) raise(Errc::invalid_argument, "mann_whitney_u: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return mann_whitney_from_ranks(pooled_ranks_sorted(sa, sb), static_cast<double>(a.size()),
                                   static_cast<double>(b.size()));
}

MannWhitneyResult mann_whitney_u_sorted(std::span<const double> a_sorted, std::span<const double> b_sorted) {
    if (a_sorted.empty() || b_sorted.empty()) raise(Errc::invalid_argument, "mann_whitney_u: empty sample");
    return mann_whitney_from_ranks(pooled_ranks_sorted(a_sorted, b_sorted), static_cast<double>(a_sorted.size()),
                                   static_cast<double>(b_sorted.size()));
}

double mann_whitney_u_exact_p(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) raise(Errc::invalid_argument, "mann_whitney_u_exact_p: empty sample");
    const std::size_t m = a.size();
    const std::size_t total = a.size() + b.size();
    if (total > 20) raise(Errc::invalid_argument, "mann_whitney_u_exact_p: samples too large for enumeration");

    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    double observed = 0.0;
    for (std::size_t i = 0; i < m; ++i) observed += ranks[i];
    observed -= static_cast<double>(m) * (static_cast<double>(m) + 1.0) / 2.0;

    // Enumerate every way to pick which pooled ranks belong to the first sample.
    std::vector<bool> pick(total, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(m), true);
    std::sort(pick.begin(), pick.end(), [](bool x, bool y) { return x > y; });

    std::uint64_t count_total = 0, count_le = 0, count_ge = 0;
    const double eps = 1e-9;
    // std::prev_permutation over the descending-sorted mask walks all subsets.
    do {
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < total; ++i)
            if (pick[i]) rank_sum += ranks[i];
        const double u = rank_sum - static_cast<double>(m) * (static_cast<double>(m) + 1.0) / 2.0;
        ++count_total;
        if (u <= observed + eps) ++count_le;
        if (u >= observed - eps) ++count_ge;
    } while (std::prev_permutation(pick.begin(), pick.end()));

    const std::uint64_t tail = 2 * std::min(count_le, count_ge);
    const double p = static_cast<double>(std::min(tail, count_total)) / static_cast<double>(count_total);
    return p;
}

double student_t_cdf(double t, double dof) {
    boost::math::students_t dist(dof);
    return boost::math::cdf(dist, t);
}

SpearmanResult spearman_ranked(std::span<const double> a_ranks, std::span<const double> b) {
    if (a_ranks.size() != b.size()) raise(Errc::invalid_argument, "spearman: length mismatch");
    const std::size_t n = b.size();
    if (n < 3) raise(Errc::invalid_argument, "spearman: need at least 3 observations");

    const auto rb = midranks(b);
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a_ranks[i] - mean;
        const double db = rb[i] - mean;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    // a constant input collapses all of its midranks onto (n+1)/2
    if (saa <= 0.0 || sbb <= 0.0)
        raise(Errc::degenerate_input, "spearman: constant input has no rank structure");

    SpearmanResult res;
    res.rho = std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
    const double denom = 1.0 - res.rho * res.rho;
    if (denom <= 0.0) {
        res.p_value = 0.0;
        return res;
    }
    const double dof = static_cast<double>(n - 2);
    const double t = res.rho * std::sqrt(dof / denom);
    res.p_value = std::clamp(2.0 * (1.0 - student_t_cdf(std::abs(t), dof)), 0.0, 1.0);
    return res;
}

SpearmanResult spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) raise(Errc::invalid_argument, "spearman: length mismatch");
    return spearman_ranked(midranks(a), b);
}

} // namespace canids
