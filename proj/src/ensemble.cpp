#include "dgot/ensemble.hpp"

#include "dgot/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

namespace dgot {

EdgeUniverse::EdgeUniverse(std::vector<EdgeKey> edges) : edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (std::size_t e = 0; e < edges_.size(); ++e) index_.emplace(edges_[e], e);
}

std::ptrdiff_t EdgeUniverse::index_of(const EdgeKey& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::string EdgeUniverse::label(std::size_t e) const {
  return edges_[e].first + "->" + edges_[e].second;
}

EnsembleEdges build_ensemble(const std::vector<DiGraph>& graphs) {
  if (graphs.size() < 2) throw InputError("an ensemble needs at least 2 graphs");
  std::vector<EdgeKey> keys;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    if (graphs[k].size() == 0 || graphs[k].edge_count() == 0) {
      throw InputError("graph " + std::to_string(k) + " in the ensemble is empty");
    }
    for (const auto& e : graphs[k].edges()) keys.emplace_back(e.source, e.target);
  }
  EnsembleEdges out;
  out.universe = EdgeUniverse(std::move(keys));
  const auto p = static_cast<Eigen::Index>(graphs.size());
  out.weights = Matrix::Zero(static_cast<Eigen::Index>(out.universe.size()), p);
  for (Eigen::Index k = 0; k < p; ++k) {
    for (const auto& e : graphs[k].edges()) {
      out.weights(out.universe.index_of({e.source, e.target}), k) = e.weight;
    }
  }
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const std::set<std::string> a(graphs[k].labels().begin(), graphs[k].labels().end());
    for (std::size_t l = k + 1; l < graphs.size(); ++l) {
      const auto& lb = graphs[l].labels();
      if (std::none_of(lb.begin(), lb.end(), [&](const auto& s) { return a.count(s) > 0; })) {
        out.warnings.push_back("graphs " + std::to_string(k) + " and " + std::to_string(l) +
                               " share no node labels; line-graph Wasserstein distances "
                               "between them are not meaningful");
      }
    }
  }
  return out;
}

DiGraph build_line_graph(const EdgeUniverse& universe, const std::vector<DiGraph>& graphs) {
  const auto n = static_cast<Eigen::Index>(universe.size());
  if (n == 0) throw InputError("line graph of an empty edge universe");
  // presence(e, k): graph k carries universe edge e with positive weight.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> presence(n, graphs.size());
  presence.setConstant(false);
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    for (const auto& e : graphs[k].edges()) {
      const auto idx = universe.index_of({e.source, e.target});
      if (idx >= 0) presence(idx, static_cast<Eigen::Index>(k)) = true;
    }
  }
  const double p = static_cast<double>(graphs.size());
  Matrix w = Matrix::Zero(n, n);
  const auto& edges = universe.edges();
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      if (edges[u].second != edges[v].first) continue;
      const auto both = (presence.row(u).array() && presence.row(v).array()).count();
      w(u, v) = p > 0.0 ? static_cast<double>(both) / p : 0.0;
    }
  }
  std::vector<std::string> labels;
  labels.reserve(universe.size());
  for (std::size_t e = 0; e < universe.size(); ++e) labels.push_back(universe.label(e));
  return DiGraph(std::move(labels), std::move(w));
}

Marginal edge_marginal(const Matrix& edge_weights, std::size_t k) {
  const Vector column = edge_weights.col(static_cast<Eigen::Index>(k));
  if (!(column.sum() > 0.0)) {
    throw InputError("graph " + std::to_string(k) + " has zero total edge weight");
  }
  return Marginal::normalized(column);
}

GraphDistance wasserstein_distance(const Matrix& edge_weights, std::size_t k, std::size_t l,
                                   const Matrix& ground_cost, double entropic_epsilon) {
  if (ground_cost.rows() != edge_weights.rows() || ground_cost.cols() != edge_weights.rows()) {
    throw InputError("ground cost must be E×E for an edge universe of size " +
                     std::to_string(edge_weights.rows()));
  }
  GraphDistance out;
  const Marginal mu = edge_marginal(edge_weights, k);
  const Marginal nu = edge_marginal(edge_weights, l);
  if (entropic_epsilon > 0.0) {
    SinkhornOptions opts;
    opts.epsilon = entropic_epsilon;
    out.plan = sinkhorn(mu, nu, ground_cost, opts);
  } else {
    out.plan = emd(mu, nu, ground_cost);
  }
  out.distance = out.plan.objective;
  return out;
}

DistanceMatrix line_graph_costs(const std::vector<DiGraph>& graphs, const MetricSpec& metric,
                                double alpha, bool force_alpha) {
  const EnsembleEdges ens = build_ensemble(graphs);
  const DiGraph line = build_line_graph(ens.universe, graphs);
  if (line.size() < 2) throw InputError("line graph has fewer than 2 nodes");
  return node_distances(line, metric, alpha, force_alpha);
}

GraphDistance wasserstein_distance(const std::vector<DiGraph>& graphs, std::size_t k,
                                   std::size_t l, const MetricSpec& metric, double alpha,
                                   bool force_alpha) {
  const EnsembleEdges ens = build_ensemble(graphs);
  const DistanceMatrix cost = line_graph_costs(graphs, metric, alpha, force_alpha);
  return wasserstein_distance(ens.weights, k, l, cost.values);
}

GraphDistance gw_distance(const DistanceMatrix& ck, const DistanceMatrix& cl,
                          const GwOptions& opts) {
  GraphDistance out;
  out.plan = gromov_wasserstein(ck.values, cl.values, Marginal::uniform(ck.size()),
                                Marginal::uniform(cl.size()), opts);
  out.distance = out.plan.objective;
  return out;
}

GraphDistance gw_distance(const DiGraph& gk, const DiGraph& gl, const MetricSpec& metric,
                          double alpha, const GwOptions& opts, bool force_alpha) {
  return gw_distance(node_distances(gk, metric, alpha, force_alpha),
                     node_distances(gl, metric, alpha, force_alpha), opts);
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> unordered_pairs(std::size_t p) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = k + 1; l < p; ++l) pairs.emplace_back(k, l);
  }
  return pairs;
}

[[noreturn]] void rethrow_for_pair(std::size_t k, std::size_t l) {
  try {
    throw;
  } catch (const InputError& e) {
    throw InputError("pair (" + std::to_string(k) + ", " + std::to_string(l) + "): " + e.what());
  } catch (const std::exception& e) {
    throw NumericalError("pair (" + std::to_string(k) + ", " + std::to_string(l) +
                         "): " + e.what());
  }
}

std::uint64_t pair_seed(std::uint64_t seed, std::size_t k, std::size_t l) {
  std::uint64_t x = seed ^ (0x9E3779B97F4A7C15ULL * (k + 1)) ^ (0xC2B2AE3D27D4EB4FULL * (l + 1));
  x ^= x >> 31;
  return x * 0xBF58476D1CE4E5B9ULL;
}

}  // namespace

PairwiseResult pairwise_wasserstein(const Matrix& edge_weights, const Matrix& ground_cost,
                                    int jobs, double entropic_epsilon) {
  const auto p = static_cast<std::size_t>(edge_weights.cols());
  if (p < 2) throw InputError("pairwise distances need at least 2 graphs");
  PairwiseResult out;
  out.distances = Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  const auto pairs = unordered_pairs(p);
  std::vector<char> converged(pairs.size(), 1);
  parallel_for(pairs.size(), jobs, [&](std::size_t idx) {
    const auto [k, l] = pairs[idx];
    try {
      const GraphDistance fwd = wasserstein_distance(edge_weights, k, l, ground_cost, entropic_epsilon);
      const GraphDistance bwd = wasserstein_distance(edge_weights, l, k, ground_cost, entropic_epsilon);
      out.distances(k, l) = fwd.distance;
      out.distances(l, k) = bwd.distance;
      converged[idx] = fwd.plan.converged && bwd.plan.converged;
    } catch (...) {
      rethrow_for_pair(k, l);
    }
  });
  out.max_asymmetry = (out.distances - out.distances.transpose()).cwiseAbs().maxCoeff();
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    if (!converged[idx]) out.non_converged.push_back(pairs[idx]);
  }
  return out;
}

PairwiseResult pairwise_distances(const std::vector<DiGraph>& graphs,
                                  const PairwiseParams& params) {
  const std::size_t p = graphs.size();
  if (p < 2) throw InputError("pairwise distances need at least 2 graphs");

  if (params.method == Method::kWasserstein) {
    const EnsembleEdges ens = build_ensemble(graphs);
    const DiGraph line = build_line_graph(ens.universe, graphs);
    const DistanceMatrix cost =
        node_distances(line, params.metric, params.alpha, params.force_alpha);
    PairwiseResult out =
        pairwise_wasserstein(ens.weights, cost.values, params.jobs, params.entropic_epsilon);
    out.line_graph_nodes = line.size();
    out.warnings = ens.warnings;
    out.warnings.insert(out.warnings.end(), cost.warnings.begin(), cost.warnings.end());
    if (cost.alpha) out.regularized.push_back(0);
    return out;
  }

  std::vector<DistanceMatrix> costs(p);
  parallel_for(p, params.jobs, [&](std::size_t k) {
    try {
      costs[k] = node_distances(graphs[k], params.metric, params.alpha, params.force_alpha);
    } catch (const InputError& e) {
      throw InputError("graph " + std::to_string(k) + ": " + e.what());
    } catch (const std::exception& e) {
      throw NumericalError("graph " + std::to_string(k) + ": " + e.what());
    }
  });

  PairwiseResult out;
  out.distances = Matrix::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < p; ++k) {
    if (costs[k].alpha) out.regularized.push_back(k);
    for (const auto& w : costs[k].warnings) out.warnings.push_back("graph " + std::to_string(k) + ": " + w);
  }
  const auto pairs = unordered_pairs(p);
  std::vector<double> asym(pairs.size(), 0.0);
  std::vector<char> converged(pairs.size(), 1);
  parallel_for(pairs.size(), params.jobs, [&](std::size_t idx) {
    const auto [k, l] = pairs[idx];
    try {
      GwOptions opts = params.gw;
      opts.seed = pair_seed(params.gw.seed, k, l);
      const GraphDistance forward = gw_distance(costs[k], costs[l], opts);
      opts.seed = pair_seed(params.gw.seed, l, k);
      const GraphDistance backward = gw_distance(costs[l], costs[k], opts);
      // Both are objective values of feasible plans; the smaller is the
      // better estimate of the minimum.
      const double d = std::min(forward.distance, backward.distance);
      out.distances(k, l) = out.distances(l, k) = d;
      asym[idx] = std::abs(forward.distance - backward.distance);
      converged[idx] = forward.plan.converged && backward.plan.converged;
    } catch (...) {
      rethrow_for_pair(k, l);
    }
  });
  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    out.max_asymmetry = std::max(out.max_asymmetry, asym[idx]);
    if (!converged[idx]) out.non_converged.push_back(pairs[idx]);
  }
  if (out.max_asymmetry > 1e-6) {
    out.warnings.push_back("GW forward/backward solves differ by up to " +
                           std::to_string(out.max_asymmetry) +
                           " (local minima); the smaller value is reported");
  }
  return out;
}

}  // namespace dgot
