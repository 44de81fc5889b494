#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace dgot {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct EdgeRow {
  std::string source;
  std::string target;
  double weight = 0.0;
};

/// Directed weighted graph with dense storage. weights()(i, j) is the weight
/// of edge i -> j; zero means the edge is absent. Self-loops are kept.
class DiGraph {
 public:
  DiGraph() = default;

  /// Throws InputError on duplicate labels, size mismatch, or negative or
  /// non-finite weights.
  DiGraph(std::vector<std::string> labels, Matrix weights);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& weights() const { return weights_; }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }

  /// Index of a label, or -1 when absent.
  std::ptrdiff_t index_of(const std::string& label) const;

  /// Out-degree vector A·1.
  Vector out_degree() const { return weights_.rowwise().sum(); }

  /// Positive-weight edges in row-major order.
  std::vector<EdgeRow> edges() const;
  std::size_t edge_count() const;
  double total_weight() const { return weights_.sum(); }

  friend bool operator==(const DiGraph& a, const DiGraph& b) {
    return a.labels_ == b.labels_ && a.weights_ == b.weights_;
  }

 private:
  std::vector<std::string> labels_;
  Matrix weights_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Reachability {
  bool strongly_connected = false;
  bool has_globally_reachable_node = false;
};

/// Builds a graph from (source, target, weight) rows. Nodes are numbered in
/// order of first appearance; duplicate rows sum their weights.
DiGraph from_edge_list(const std::vector<EdgeRow>& rows);

/// Strongly connected components over positive-weight edges (Tarjan).
/// Returns the component id of each node; ids are in reverse topological
/// order of the condensation (sink components get the smallest ids).
std::vector<std::size_t> strongly_connected_components(const DiGraph& g,
                                                       std::size_t* count = nullptr);

/// A globally reachable node exists iff the condensation has a single sink.
Reachability analyze_reachability(const DiGraph& g);

constexpr double kDefaultAlpha = 0.85;

/// Teleportation regularization: alpha·rownorm(W) + (1 - alpha)/N · 11ᵀ.
/// Rows with zero out-degree become uniform before mixing.
DiGraph regularize(const DiGraph& g, double alpha = kDefaultAlpha);

/// Row-stochastic D⁻¹A. Throws NumericalError on zero out-degree rows.
Matrix transition_matrix(const DiGraph& g);

/// Graph over the same labels with weights A + Aᵀ.
DiGraph undirected_view(const DiGraph& g);

}  // namespace dgot
