#pragma once

#include "dgot/graph.hpp"
#include "dgot/node_metrics.hpp"
#include "dgot/ot.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dgot {

using EdgeKey = std::pair<std::string, std::string>;  // (source, target)

/// Union of positive-weight edges over an ensemble, sorted lexicographically.
class EdgeUniverse {
 public:
  EdgeUniverse() = default;
  explicit EdgeUniverse(std::vector<EdgeKey> edges);

  const std::vector<EdgeKey>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  std::ptrdiff_t index_of(const EdgeKey& e) const;
  /// Line-graph node label "source->target".
  std::string label(std::size_t e) const;

 private:
  std::vector<EdgeKey> edges_;
  std::map<EdgeKey, std::size_t> index_;
};

struct EnsembleEdges {
  EdgeUniverse universe;
  Matrix weights;  ///< E×p; column k holds graph k's edge weights
  std::vector<std::string> warnings;
};

EnsembleEdges build_ensemble(const std::vector<DiGraph>& graphs);

/// Directed line graph: node e for every universe edge, edge (u', v') when
/// target(u') = source(v'), weighted by the fraction of graphs holding both.
DiGraph build_line_graph(const EdgeUniverse& universe, const std::vector<DiGraph>& graphs);

/// Marginal of column k of the edge weight matrix, rescaled to total mass 1.
Marginal edge_marginal(const Matrix& edge_weights, std::size_t k);

struct GraphDistance {
  double distance = 0.0;
  TransportPlan plan;
};

/// Earth mover's distance between columns k and l under a precomputed
/// E×E ground cost (line-graph metric or correlation cost).
GraphDistance wasserstein_distance(const Matrix& edge_weights, std::size_t k, std::size_t l,
                                   const Matrix& ground_cost, double entropic_epsilon = 0.0);

/// Line-graph ground metric for an ensemble, regularized with alpha when
/// the line graph fails the metric's reachability precondition.
DistanceMatrix line_graph_costs(const std::vector<DiGraph>& graphs, const MetricSpec& metric,
                                double alpha = kDefaultAlpha, bool force_alpha = false);

/// Convenience form building the ensemble and line graph from scratch.
GraphDistance wasserstein_distance(const std::vector<DiGraph>& graphs, std::size_t k,
                                   std::size_t l, const MetricSpec& metric,
                                   double alpha = kDefaultAlpha, bool force_alpha = false);

/// Gromov-Wasserstein distance between two node-metric spaces with uniform
/// node masses.
GraphDistance gw_distance(const DistanceMatrix& ck, const DistanceMatrix& cl,
                          const GwOptions& opts = {});

GraphDistance gw_distance(const DiGraph& gk, const DiGraph& gl, const MetricSpec& metric,
                          double alpha = kDefaultAlpha, const GwOptions& opts = {},
                          bool force_alpha = false);

enum class Method { kWasserstein, kGw };

struct PairwiseParams {
  Method method = Method::kWasserstein;
  MetricSpec metric = MetricSpec::grd();
  double alpha = kDefaultAlpha;
  bool force_alpha = false;
  GwOptions gw;
  int jobs = 1;
  /// Wasserstein path only: Sinkhorn smoothing when positive, exact EMD at 0.
  double entropic_epsilon = 0.0;
};

struct PairwiseResult {
  Matrix distances;  ///< p×p, zero diagonal
  double max_asymmetry = 0.0;
  std::vector<std::string> warnings;
  /// Indices of graphs (GW) whose metric needed regularization; for the
  /// Wasserstein path, {0} when the line graph was regularized.
  std::vector<std::size_t> regularized;
  std::vector<std::pair<std::size_t, std::size_t>> non_converged;
  std::size_t line_graph_nodes = 0;
};

/// All pairwise distances. Per-pair failures are rethrown as NumericalError
/// naming the pair.
PairwiseResult pairwise_distances(const std::vector<DiGraph>& graphs,
                                  const PairwiseParams& params);

/// Pairwise Wasserstein distances under an arbitrary E×E ground cost.
PairwiseResult pairwise_wasserstein(const Matrix& edge_weights, const Matrix& ground_cost,
                                    int jobs = 1, double entropic_epsilon = 0.0);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Exceptions are
/// collected and the first by index is rethrown.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace dgot
