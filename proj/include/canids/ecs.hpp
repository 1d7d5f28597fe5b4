#pragma once

#include <cstddef>
#include <vector>

#include "canids/cluster.hpp"

namespace canids {

/// Nested partitions of the same element set, one per dendrogram merge,
/// each with a normalized depth in [0, 1] (0 = root/coarsest).
///
/// Note on the construction: published element-centric comparison tools build
/// the cluster-induced walk graph in slightly different ways. Here a
/// dendrogram contributes its n-1 nested merge partitions as levels, level
/// weights are proportional to exp(r * depth), and the walk picks a level by
/// weight before moving inside the element's cluster at that level. Larger r
/// therefore emphasizes the finer levels. Swapping in an alternative
/// construction only touches this module.
struct HierarchicalClustering {
    int element_count = 0;
    std::vector<std::vector<int>> levels; // per level: label per element
    std::vector<double> depths;           // per level, in [0, 1]

    static HierarchicalClustering from_dendrogram(const Dendrogram& dend);
    static HierarchicalClustering from_partition(const std::vector<int>& labels);
};

/// Normalized level weights proportional to exp(r * depth).
std::vector<double> level_weights(const HierarchicalClustering& hc, double r);

/// Row-stochastic personalized random-walk affinity: row i is the stationary
/// distribution of a walk restarted at element i with probability 1 - alpha.
struct AffinityMatrix {
    std::size_t n = 0;
    std::vector<double> p;
    double at(std::size_t i, std::size_t j) const { return p[i * n + j]; }
};

AffinityMatrix build_affinity(const HierarchicalClustering& hc, double alpha, double r);

/// Element-centric similarity: mean over elements of
/// 1 - (1/(2 alpha)) * L1(row_i(a) - row_i(b)), clamped into [0, 1].
double ecs_similarity(const AffinityMatrix& a, const AffinityMatrix& b, double alpha);

double moriano_similarity(const Dendrogram& train, const Dendrogram& test, double r, double alpha);

} // namespace canids
