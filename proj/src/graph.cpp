#include "dgot/graph.hpp"

#include "dgot/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dgot {

DiGraph::DiGraph(std::vector<std::string> labels, Matrix weights)
    : labels_(std::move(labels)), weights_(std::move(weights)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (weights_.rows() != n || weights_.cols() != n) {
    throw InputError("weight matrix is " + std::to_string(weights_.rows()) + "x" +
                     std::to_string(weights_.cols()) + " but there are " +
                     std::to_string(n) + " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw InputError("duplicate node label '" + labels_[i] + "'");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0) {
        throw InputError("invalid weight " + std::to_string(w) + " on edge " +
                         labels_[i] + "->" + labels_[j]);
      }
    }
  }
}

std::ptrdiff_t DiGraph::index_of(const std::string& label) const {
  auto it = index_.find(label);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<EdgeRow> DiGraph::edges() const {
  std::vector<EdgeRow> out;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      if (weights_(i, j) > 0.0) out.push_back({labels_[i], labels_[j], weights_(i, j)});
    }
  }
  return out;
}

std::size_t DiGraph::edge_count() const {
  return static_cast<std::size_t>((weights_.array() > 0.0).count());
}

DiGraph from_edge_list(const std::vector<EdgeRow>& rows) {
  if (rows.empty()) throw InputError("empty graph");
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> index;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, labels.size());
    if (inserted) labels.push_back(s);
    return it->second;
  };
  std::vector<std::tuple<std::size_t, std::size_t, double>> resolved;
  resolved.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.source.empty() || row.target.empty()) {
      throw InputError("row " + std::to_string(r) + ": empty node label");
    }
    if (!std::isfinite(row.weight)) {
      throw InputError("row " + std::to_string(r) + ": weight is not finite");
    }
    if (row.weight < 0.0) {
      throw InputError("row " + std::to_string(r) + ": negative weight " +
                       std::to_string(row.weight));
    }
    const auto s = intern(row.source);
    const auto t = intern(row.target);
    resolved.emplace_back(s, t, row.weight);
  }
  const auto n = static_cast<Eigen::Index>(labels.size());
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [s, t, x] : resolved) w(s, t) += x;
  return DiGraph(std::move(labels), std::move(w));
}

std::vector<std::size_t> strongly_connected_components(const DiGraph& g,
                                                       std::size_t* count) {
  // Iterative Tarjan. Components are emitted sinks-first.
  const std::size_t n = g.size();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (node, next neighbour)
  std::size_t next_index = 0, next_comp = 0;
  const auto& w = g.weights();

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto& [v, k] = call.back();
      bool descended = false;
      while (k < n) {
        const std::size_t u = k++;
        if (!(w(v, u) > 0.0)) continue;
        if (index[u] == kUnvisited) {
          index[u] = low[u] = next_index++;
          stack.push_back(u);
          on_stack[u] = true;
          call.emplace_back(u, 0);
          descended = true;
          break;
        }
        if (on_stack[u]) low[v] = std::min(low[v], index[u]);
      }
      if (descended) continue;
      const std::size_t done = v;
      if (low[done] == index[done]) {
        std::size_t u;
        do {
          u = stack.back();
          stack.pop_back();
          on_stack[u] = false;
          comp[u] = next_comp;
        } while (u != done);
        ++next_comp;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
    }
  }
  if (count) *count = next_comp;
  return comp;
}

Reachability analyze_reachability(const DiGraph& g) {
  std::size_t ncomp = 0;
  const auto comp = strongly_connected_components(g, &ncomp);
  if (ncomp == 0) return {};
  std::vector<bool> has_exit(ncomp, false);
  const auto& w = g.weights();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (w(i, j) > 0.0 && comp[i] != comp[j]) has_exit[comp[i]] = true;
    }
  }
  const auto sinks = std::count(has_exit.begin(), has_exit.end(), false);
  return {ncomp == 1, sinks == 1};
}

DiGraph regularize(const DiGraph& g, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InputError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n < 2) throw InputError("regularization needs at least 2 nodes");
  const double uniform = 1.0 / static_cast<double>(n);
  Matrix w = g.weights();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = w.row(i).sum();
    if (d > 0.0) {
      w.row(i) /= d;
    } else {
      w.row(i).setConstant(uniform);
    }
  }
  w = alpha * w + Matrix::Constant(n, n, (1.0 - alpha) * uniform);
  return DiGraph(g.labels(), std::move(w));
}

Matrix transition_matrix(const DiGraph& g) {
  const Vector deg = g.out_degree();
  Matrix p = g.weights();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if (!(deg(i) > 0.0)) {
      throw NumericalError("node '" + g.labels()[i] +
                           "' has zero out-degree; transition matrix undefined "
                           "(apply regularization, e.g. --alpha)");
    }
    p.row(i) /= deg(i);
  }
  return p;
}

DiGraph undirected_view(const DiGraph& g) {
  return DiGraph(g.labels(), g.weights() + g.weights().transpose());
}

}  // namespace dgot
