#pragma once

#include "dgot/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dgot {

struct Partition {
  std::vector<int> labels;
  std::size_t size() const { return labels.size(); }
};

enum class ClusterAlgorithm { kPam, kMdsKmeans };

struct Clustering {
  Partition partition;
  std::vector<std::size_t> medoids;  ///< PAM only; medoids[c] is cluster c's medoid
  double cost = 0.0;
  std::vector<std::string> warnings;
};

/// k-medoids (PAM: BUILD for restart 0, random seeded starts after, then
/// greedy SWAP) on a distance matrix. An asymmetric D is replaced by
/// (D + Dᵀ)/2 with a warning. Deterministic given (D, k, seed, restarts).
Clustering cluster(const Matrix& d, int k, std::uint64_t seed = 0, int restarts = 8,
                   ClusterAlgorithm algorithm = ClusterAlgorithm::kPam);

/// Hubert-Arabie adjusted Rand index.
double ari(const Partition& a, const Partition& b);

/// Euclidean distances between samples after centering each row of the
/// E×p edge weight matrix and projecting on the top p-1 principal axes.
Matrix pca_baseline(const Matrix& edge_weights);

/// 1 - Pearson correlation between every pair of rows of the edge weight
/// matrix. Zero-variance rows get cost 1 to every other row.
Matrix correlation_cost(const Matrix& edge_weights, std::vector<std::string>* warnings = nullptr);

/// 1 - Pearson correlation between columns (samples), for clustering directly.
Matrix correlation_sample_distances(const Matrix& edge_weights);

/// ‖A₁ - A₂‖_F with both adjacency matrices padded to the union of labels.
double frobenius_distance(const DiGraph& a, const DiGraph& b);

}  // namespace dgot
