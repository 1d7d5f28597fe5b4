#include "canids/ecs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "canids/error.hpp"

namespace canids {

namespace {

std::vector<int> contiguous_labels(const std::vector<int>& raw) {
    std::vector<int> out(raw.size());
    std::vector<int> remap;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const int v = raw[i];
        int label = -1;
        for (std::size_t k = 0; k < remap.size(); ++k)
            if (remap[k] == v) {
                label = static_cast<int>(k);
                break;
            }
        if (label < 0) {
            label = static_cast<int>(remap.size());
            remap.push_back(v);
        }
        out[i] = label;
    }
    return out;
}

// Element-to-element transition matrix: pick a level by weight, then move to
// a uniformly random member of the element's cluster at that level.
std::vector<double> walk_matrix(const HierarchicalClustering& hc, double r) {
    const std::size_t n = static_cast<std::size_t>(hc.element_count);
    const auto weights = level_weights(hc, r);
    std::vector<double> w(n * n, 0.0);
    for (std::size_t level = 0; level < hc.levels.size(); ++level) {
        const auto& labels = hc.levels[level];
        const int clusters = *std::max_element(labels.begin(), labels.end()) + 1;
        std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(clusters));
        for (std::size_t e = 0; e < n; ++e) members[static_cast<std::size_t>(labels[e])].push_back(e);
        for (const auto& mem : members) {
            const double share = weights[level] / static_cast<double>(mem.size());
            for (std::size_t a : mem)
                for (std::size_t b : mem) w[a * n + b] += share;
        }
    }
    return w;
}

} // namespace

HierarchicalClustering HierarchicalClustering::from_dendrogram(const Dendrogram& dend) {
    const int n = dend.leaf_count;
    HierarchicalClustering hc;
    hc.element_count = n;
    if (n == 1) {
        hc.levels.push_back({0});
        hc.depths.push_back(0.0);
        return hc;
    }
    // Replay merges; the partition after merge m is one level. Depth runs from
    // (n-2)/(n-1) for the first (finest) partition down to 0 at the root.
    std::vector<int> node_of(static_cast<std::size_t>(n));
    std::iota(node_of.begin(), node_of.end(), 0);
    std::vector<std::vector<int>> members(static_cast<std::size_t>(2 * n - 1));
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(i)] = {i};

    const int total_merges = n - 1;
    for (int m = 0; m < total_merges; ++m) {
        const auto& merge = dend.merges[static_cast<std::size_t>(m)];
        const int node = n + m;
        auto& dst = members[static_cast<std::size_t>(node)];
        dst = members[static_cast<std::size_t>(merge.left)];
        const auto& src = members[static_cast<std::size_t>(merge.right)];
        dst.insert(dst.end(), src.begin(), src.end());
        for (int e : dst) node_of[static_cast<std::size_t>(e)] = node;

        std::vector<int> raw(static_cast<std::size_t>(n));
        for (int e = 0; e < n; ++e) raw[static_cast<std::size_t>(e)] = node_of[static_cast<std::size_t>(e)];
        hc.levels.push_back(contiguous_labels(raw));
        hc.depths.push_back(static_cast<double>(total_merges - 1 - m) / static_cast<double>(total_merges));
    }
    return hc;
}

HierarchicalClustering HierarchicalClustering::from_partition(const std::vector<int>& labels) {
    if (labels.empty()) raise(Errc::invalid_argument, "from_partition: empty labels");
    HierarchicalClustering hc;
    hc.element_count = static_cast<int>(labels.size());
    hc.levels.push_back(contiguous_labels(labels));
    hc.depths.push_back(0.0);
    return hc;
}

std::vector<double> level_weights(const HierarchicalClustering& hc, double r) {
    std::vector<double> w(hc.depths.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(r * hc.depths[i]);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

AffinityMatrix build_affinity(const HierarchicalClustering& hc, double alpha, double r) {
    if (!(alpha > 0.0 && alpha < 1.0)) raise(Errc::invalid_argument, "build_affinity: alpha must be in (0,1)");
    if (hc.element_count < 1) raise(Errc::invalid_argument, "build_affinity: empty clustering");
    const std::size_t n = static_cast<std::size_t>(hc.element_count);
    if (n == 1) {
        AffinityMatrix a;
        a.n = 1;
        a.p = {1.0};
        return a;
    }

    const auto w = walk_matrix(hc, r);
    AffinityMatrix a;
    a.n = n;
    a.p.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a.p[i * n + i] = 1.0;

    std::vector<double> next(n * n);
    constexpr double kTol = 1e-10;
    constexpr int kMaxIter = 10000;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        // next = (1 - alpha) I + alpha * a * w
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double* dst = next.data() + i * n;
            const double* row = a.p.data() + i * n;
            for (std::size_t k = 0; k < n; ++k) {
                const double scale = alpha * row[k];
                if (scale == 0.0) continue;
                const double* wr = w.data() + k * n;
                for (std::size_t j = 0; j < n; ++j) dst[j] += scale * wr[j];
            }
            dst[i] += 1.0 - alpha;
        }
        double residual = 0.0;
        for (std::size_t k = 0; k < n * n; ++k) residual = std::max(residual, std::abs(next[k] - a.p[k]));
        a.p.swap(next);
        if (residual < kTol) return a;
    }
    raise(Errc::internal, "build_affinity: fixed point did not converge");
}

double ecs_similarity(const AffinityMatrix& a, const AffinityMatrix& b, double alpha) {
    if (a.n != b.n) raise(Errc::invalid_argument, "ecs: affinity dimension mismatch");
    if (a.n == 0) raise(Errc::invalid_argument, "ecs: empty affinity");
    const std::size_t n = a.n;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double l1 = 0.0;
        for (std::size_t j = 0; j < n; ++j) l1 += std::abs(a.p[i * n + j] - b.p[i * n + j]);
        total += 1.0 - l1 / (2.0 * alpha);
    }
    const double raw = total / static_cast<double>(n);
    const double s = std::clamp(raw, 0.0, 1.0);
    if (std::abs(raw - s) > 1e-9)
        std::fprintf(stderr, "canids: ecs similarity clamped from %.17g\n", raw);
    return s;
}

double moriano_similarity(const Dendrogram& train, const Dendrogram& test, double r, double alpha) {
    if (train.leaf_count != test.leaf_count)
        raise(Errc::invalid_argument, "moriano_similarity: dendrogram leaf sets differ");
    const auto a = build_affinity(HierarchicalClustering::from_dendrogram(train), alpha, r);
    const auto b = build_affinity(HierarchicalClustering::from_dendrogram(test), alpha, r);
    return ecs_similarity(a, b, alpha);
}

} // namespace canids
