#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "canids/stats.hpp"

namespace canids {

/// Symmetric nonnegative dissimilarity with zero diagonal.
struct DistanceMatrix : SquareMatrix {
    using SquareMatrix::SquareMatrix;
};

/// d = 2 * (1 - r); range [0, 4], diagonal 0.
DistanceMatrix correlation_to_distance(const CorrelationMatrix& r);

/// Flat clustering: labels[i] in 0..cluster_count-1, or -1 for noise.
/// min_samples = 1 never produces noise.
struct FlatClustering {
    std::vector<int> labels;
    int cluster_count = 0;
};

FlatClustering dbscan_precomputed(const DistanceMatrix& d, double eps, int min_samples);

/// Scipy-style merge record: nodes 0..n-1 are leaves, node n+k is the cluster
/// created by merge k.
struct DendrogramMerge {
    int left = 0;
    int right = 0;
    double height = 0.0;
    int size = 0;
};

struct Dendrogram {
    int leaf_count = 0;
    std::vector<DendrogramMerge> merges;
};

/// Agglomerative clustering with the Ward update on the given dissimilarity,
/// treating entries as squared-Euclidean-like. Equal merge costs break toward
/// the lexicographically smallest (id_left, id_right) pair.
Dendrogram ward_ahc(const DistanceMatrix& d);

FlatClustering cut_dendrogram(const Dendrogram& dend, int k);

/// One merge per line: left right height size.
std::string dendrogram_to_text(const Dendrogram& dend);

} // namespace canids
