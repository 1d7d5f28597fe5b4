#include "canids/cluster.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "canids/error.hpp"

namespace canids {

DistanceMatrix correlation_to_distance(const CorrelationMatrix& r) {
    DistanceMatrix d(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        for (std::size_t j = 0; j < r.n; ++j) d.at(i, j) = i == j ? 0.0 : 2.0 * (1.0 - r.at(i, j));
    }
    return d;
}

FlatClustering dbscan_precomputed(const DistanceMatrix& d, double eps, int min_samples) {
    if (!(eps > 0.0)) raise(Errc::invalid_argument, "dbscan: eps must be positive");
    if (min_samples < 1) raise(Errc::invalid_argument, "dbscan: min_samples must be >= 1");
    const std::size_t n = d.n;
    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;

    std::vector<std::vector<std::size_t>> neighbors(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (d.at(i, j) <= eps) neighbors[i].push_back(j); // includes i itself (d_ii = 0)

    FlatClustering out;
    out.labels.assign(n, kUnvisited);
    int cluster = 0;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (out.labels[seed] != kUnvisited) continue;
        if (neighbors[seed].size() < static_cast<std::size_t>(min_samples)) {
            out.labels[seed] = kNoise;
            continue;
        }
        out.labels[seed] = cluster;
        std::queue<std::size_t> frontier;
        for (std::size_t nb : neighbors[seed]) frontier.push(nb);
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop();
            if (out.labels[p] == kNoise) out.labels[p] = cluster; // border point
            if (out.labels[p] != kUnvisited) continue;
            out.labels[p] = cluster;
            if (neighbors[p].size() >= static_cast<std::size_t>(min_samples))
                for (std::size_t nb : neighbors[p]) frontier.push(nb);
        }
        ++cluster;
    }
    out.cluster_count = cluster;
    return out;
}

Dendrogram ward_ahc(const DistanceMatrix& d) {
    const std::size_t n = d.n;
    if (n < 2) raise(Errc::invalid_argument, "ward_ahc: need at least 2 elements");

    // Slot j holds an active cluster; merged clusters reuse the left slot.
    std::vector<double> work(d.data);
    std::vector<int> ids(n);
    std::vector<int> sizes(n, 1);
    std::vector<bool> active(n, true);
    std::iota(ids.begin(), ids.end(), 0);

    auto wd = [&](std::size_t i, std::size_t j) -> double& { return work[i * n + j]; };

    Dendrogram dend;
    dend.leaf_count = static_cast<int>(n);
    dend.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        int bid_lo = 0, bid_hi = 0;
        bool found = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                const double dist = wd(i, j);
                const int lo = std::min(ids[i], ids[j]);
                const int hi = std::max(ids[i], ids[j]);
                if (!found || dist < best || (dist == best && (lo < bid_lo || (lo == bid_lo && hi < bid_hi)))) {
                    found = true;
                    best = dist;
                    bi = i;
                    bj = j;
                    bid_lo = lo;
                    bid_hi = hi;
                }
            }
        }
        const int merged_size = sizes[bi] + sizes[bj];
        dend.merges.push_back({bid_lo, bid_hi, best, merged_size});

        // Lance-Williams Ward update against every other active cluster.
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            const double ni = sizes[bi], nj = sizes[bj], nk = sizes[k];
            const double updated = ((ni + nk) * wd(bi, k) + (nj + nk) * wd(bj, k) - nk * best) / (ni + nj + nk);
            wd(bi, k) = updated;
            wd(k, bi) = updated;
        }
        sizes[bi] = merged_size;
        ids[bi] = static_cast<int>(n + step);
        active[bj] = false;
    }
    return dend;
}

FlatClustering cut_dendrogram(const Dendrogram& dend, int k) {
    const int n = dend.leaf_count;
    if (k < 1 || k > n) raise(Errc::invalid_argument, "cut_dendrogram: k out of range");

    // Apply the first n-k merges with union-find over node ids.
    std::vector<int> parent(2 * n - 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (int m = 0; m < n - k; ++m) {
        const auto& merge = dend.merges[static_cast<std::size_t>(m)];
        const int node = n + m;
        parent[find(merge.left)] = node;
        parent[find(merge.right)] = node;
    }

    // Contiguous labels ordered by each cluster's smallest leaf.
    FlatClustering out;
    out.labels.assign(static_cast<std::size_t>(n), -1);
    std::vector<int> root_label(2 * n - 1, -1);
    int next = 0;
    for (int leaf = 0; leaf < n; ++leaf) {
        const int root = find(leaf);
        if (root_label[root] < 0) root_label[root] = next++;
        out.labels[static_cast<std::size_t>(leaf)] = root_label[root];
    }
    out.cluster_count = next;
    return out;
}

std::string dendrogram_to_text(const Dendrogram& dend) {
    std::string out;
    char buf[64];
    for (const auto& m : dend.merges) {
        out += std::to_string(m.left);
        out += ' ';
        out += std::to_string(m.right);
        out += ' ';
        auto res = std::to_chars(buf, buf + sizeof(buf), m.height);
        out.append(buf, res.ptr);
        out += ' ';
        out += std::to_string(m.size);
        out += '\n';
    }
    return out;
}

} // namespace canids
