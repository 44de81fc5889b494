#include "dgot/ot.hpp"

#include "dgot/error.hpp"
#include "dgot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dgot {

Marginal::Marginal(Vector weights) : weights_(std::move(weights)) {
  if (!weights_.allFinite() || (weights_.array() < 0.0).any()) {
    throw InputError("marginal weights must be finite and nonnegative");
  }
}

Marginal Marginal::uniform(std::size_t n) {
  if (n == 0) throw InputError("uniform marginal over zero points");
  const auto m = static_cast<Eigen::Index>(n);
  return Marginal(Vector::Constant(m, 1.0 / static_cast<double>(n)));
}

Marginal Marginal::normalized(const Vector& weights) {
  Marginal raw(weights);
  const double total = raw.total();
  if (!(total > 0.0)) throw InputError("cannot normalize a marginal with zero total mass");
  return Marginal(weights / total);
}

double marginal_violation(const Matrix& gamma, const Marginal& mu, const Marginal& nu) {
  const double rows = (gamma.rowwise().sum() - mu.weights()).cwiseAbs().maxCoeff();
  const double cols = (gamma.colwise().sum().transpose() - nu.weights()).cwiseAbs().maxCoeff();
  return std::max(rows, cols);
}

// ------------------------------------------------------------------ EMD ----

namespace {

// Spanning-tree basis of the transportation problem. Tree nodes 0..m-1 are
// sources, m..m+n-1 are sinks; every basic cell (i, j) is the tree edge
// i -- m+j.
class TransportationSimplex {
 public:
  TransportationSimplex(const Vector& a, const Vector& b, const Matrix& cost)
      : m_(a.size()), n_(b.size()), cost_(cost), flow_(Matrix::Zero(m_, n_)),
        basic_(m_, n_), adj_(static_cast<std::size_t>(m_ + n_)) {
    basic_.setZero();
    northwest_corner(a, b);
    const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
    eps_ = 1e-12 * scale;
  }

  void solve() {
    const long max_pivots = 200L * (m_ + n_) * (m_ + n_) + 10000;
    int degenerate_streak = 0;
    for (long pivot = 0;; ++pivot) {
      if (pivot > max_pivots) {
        throw NumericalError("transportation simplex exceeded its pivot limit");
      }
      compute_potentials();
      Eigen::Index ei = -1, ej = -1;
      if (!price(ei, ej)) break;
      const double theta = pivot_on(ei, ej);
      degenerate_streak = theta > 0.0 ? 0 : degenerate_streak + 1;
      // Long runs of degenerate pivots switch to Bland's rule, which cannot cycle.
      if (degenerate_streak > 2 * (m_ + n_)) bland_ = true;
    }
    flow_ = flow_.cwiseMax(0.0);
  }

  const Matrix& flow() const { return flow_; }
  const Vector& u() const { return u_; }
  const Vector& v() const { return v_; }

 private:
  using Index = Eigen::Index;

  void add_edge(Index i, Index j) {
    basic_(i, j) = 1;
    adj_[static_cast<std::size_t>(i)].push_back(m_ + j);
    adj_[static_cast<std::size_t>(m_ + j)].push_back(i);
  }

  void remove_edge(Index i, Index j) {
    basic_(i, j) = 0;
    auto drop = [](std::vector<Index>& list, Index x) {
      list.erase(std::find(list.begin(), list.end(), x));
    };
    drop(adj_[static_cast<std::size_t>(i)], m_ + j);
    drop(adj_[static_cast<std::size_t>(m_ + j)], i);
  }

  void northwest_corner(const Vector& a, const Vector& b) {
    Vector ra = a, rb = b;
    Index i = 0, j = 0;
    while (true) {
      const double x = std::max(0.0, std::min(ra(i), rb(j)));
      flow_(i, j) = x;
      add_edge(i, j);
      ra(i) -= x;
      rb(j) -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (ra(i) <= rb(j)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void compute_potentials() {
    u_.setConstant(m_, std::numeric_limits<double>::quiet_NaN());
    v_.setConstant(n_, std::numeric_limits<double>::quiet_NaN());
    u_(0) = 0.0;
    queue_.assign(1, 0);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const Index node = queue_[head];
      for (Index next : adj_[static_cast<std::size_t>(node)]) {
        if (node < m_) {
          const Index j = next - m_;
          if (std::isnan(v_(j))) {
            v_(j) = cost_(node, j) - u_(node);
            queue_.push_back(next);
          }
        } else if (std::isnan(u_(next))) {
          u_(next) = cost_(next, node - m_) - v_(node - m_);
          queue_.push_back(next);
        }
      }
    }
  }

  // Selects an entering cell; false at optimality.
  bool price(Index& ei, Index& ej) const {
    double best = -eps_;
    for (Index i = 0; i < m_; ++i) {
      for (Index j = 0; j < n_; ++j) {
        if (basic_(i, j)) continue;
        const double rc = cost_(i, j) - u_(i) - v_(j);
        if (rc < best) {
          best = rc;
          ei = i;
          ej = j;
          if (bland_) return true;
        }
      }
    }
    return ei >= 0;
  }

  // Pushes flow around the cycle closed by (ei, ej); returns the step size.
  double pivot_on(Index ei, Index ej) {
    const auto total = static_cast<std::size_t>(m_ + n_);
    parent_.assign(total, -1);
    parent_[static_cast<std::size_t>(ei)] = ei;
    queue_.assign(1, ei);
    const Index goal = m_ + ej;
    for (std::size_t head = 0; head < queue_.size() && parent_[goal] < 0; ++head) {
      const Index node = queue_[head];
      for (Index next : adj_[static_cast<std::size_t>(node)]) {
        if (parent_[static_cast<std::size_t>(next)] < 0) {
          parent_[static_cast<std::size_t>(next)] = node;
          queue_.push_back(next);
        }
      }
    }
    // Walk the tree path sink(ej) -> ... -> source(ei); signs alternate -, +, -, ...
    cycle_.clear();
    for (Index node = goal; node != ei; node = parent_[static_cast<std::size_t>(node)]) {
      const Index prev = parent_[static_cast<std::size_t>(node)];
      const Index i = node < m_ ? node : prev;
      const Index j = (node < m_ ? prev : node) - m_;
      cycle_.emplace_back(i, j);
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = 0;
    for (std::size_t k = 0; k < cycle_.size(); k += 2) {
      const auto [i, j] = cycle_[k];
      const double f = flow_(i, j);
      const bool better =
          f < theta ||
          (bland_ && f == theta &&
           i * n_ + j < cycle_[leave].first * n_ + cycle_[leave].second);
      if (better) {
        theta = f;
        leave = k;
      }
    }
    theta = std::max(theta, 0.0);
    flow_(ei, ej) = theta;
    for (std::size_t k = 0; k < cycle_.size(); ++k) {
      const auto [i, j] = cycle_[k];
      flow_(i, j) += (k % 2 == 0) ? -theta : theta;
    }
    const auto [li, lj] = cycle_[leave];
    flow_(li, lj) = 0.0;
    remove_edge(li, lj);
    add_edge(ei, ej);
    return theta;
  }

  Index m_, n_;
  const Matrix& cost_;
  Matrix flow_;
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> basic_;
  std::vector<std::vector<Index>> adj_;
  Vector u_, v_;
  std::vector<Index> queue_;
  std::vector<Index> parent_;
  std::vector<std::pair<Index, Index>> cycle_;
  double eps_ = 1e-12;
  bool bland_ = false;
};

}  // namespace

TransportPlan emd(const Marginal& mu, const Marginal& nu, const Matrix& cost) {
  if (mu.size() == 0 || nu.size() == 0) throw InputError("emd: empty marginal");
  if (cost.rows() != static_cast<Eigen::Index>(mu.size()) ||
      cost.cols() != static_cast<Eigen::Index>(nu.size())) {
    throw InputError("emd: cost is " + std::to_string(cost.rows()) + "x" +
                     std::to_string(cost.cols()) + " but marginals have sizes " +
                     std::to_string(mu.size()) + " and " + std::to_string(nu.size()));
  }
  if (!cost.allFinite()) throw InputError("emd: cost matrix has non-finite entries");
  if (std::abs(mu.total() - nu.total()) > 1e-9) {
    throw InputError("emd: mass mismatch between marginals (" + std::to_string(mu.total()) +
                     " vs " + std::to_string(nu.total()) + ")");
  }
  TransportationSimplex simplex(mu.weights(), nu.weights(), cost);
  simplex.solve();
  TransportPlan plan;
  plan.gamma = simplex.flow();
  plan.objective = plan.gamma.cwiseProduct(cost).sum();
  plan.dual_u = simplex.u();
  plan.dual_v = simplex.v();
  return plan;
}

TransportPlan sinkhorn(const Marginal& mu, const Marginal& nu, const Matrix& cost,
                       const SinkhornOptions& opts) {
  if (!(opts.epsilon > 0.0) || !std::isfinite(opts.epsilon)) {
    throw InputError("sinkhorn: epsilon must be positive and finite");
  }
  if (mu.size() == 0 || nu.size() == 0) throw InputError("sinkhorn: empty marginal");
  if (cost.rows() != static_cast<Eigen::Index>(mu.size()) ||
      cost.cols() != static_cast<Eigen::Index>(nu.size())) {
    throw InputError("sinkhorn: cost shape does not match the marginals");
  }
  if (!cost.allFinite()) throw InputError("sinkhorn: cost matrix has non-finite entries");
  if (std::abs(mu.total() - nu.total()) > 1e-9) {
    throw InputError("sinkhorn: mass mismatch between marginals");
  }
  // Log-domain iterations restricted to the supports of both marginals.
  std::vector<Eigen::Index> rows, cols;
  for (Eigen::Index i = 0; i < cost.rows(); ++i)
    if (mu.weights()(i) > 0.0) rows.push_back(i);
  for (Eigen::Index j = 0; j < cost.cols(); ++j)
    if (nu.weights()(j) > 0.0) cols.push_back(j);
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());
  Matrix c(m, n);
  Vector log_a(m), log_b(n);
  for (Eigen::Index i = 0; i < m; ++i) log_a(i) = std::log(mu.weights()(rows[i]));
  for (Eigen::Index j = 0; j < n; ++j) log_b(j) = std::log(nu.weights()(cols[j]));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = cost(rows[i], cols[j]) / opts.epsilon;

  auto logsumexp = [](const auto& v) {
    const double hi = v.maxCoeff();
    return hi + std::log((v.array() - hi).exp().sum());
  };
  Vector f = Vector::Zero(m), g = Vector::Zero(n);
  auto log_plan = [&] {
    Matrix lp = -c;
    lp.colwise() += f;
    lp.rowwise() += g.transpose();
    return lp;
  };
  TransportPlan plan;
  plan.converged = false;
  for (int it = 1; it <= opts.max_iter; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      f(i) = log_a(i) - logsumexp((g.transpose() - c.row(i)).eval());
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      g(j) = log_b(j) - logsumexp((f - c.col(j)).eval());
    }
    plan.iterations = it;
    // Columns match exactly after the g update; check the rows.
    const Vector row_mass = log_plan().array().exp().rowwise().sum();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      worst = std::max(worst, std::abs(row_mass(i) - mu.weights()(rows[i])));
    }
    if (worst <= opts.tol) {
      plan.converged = true;
      break;
    }
  }
  const Matrix reduced = log_plan().array().exp();
  plan.gamma = Matrix::Zero(cost.rows(), cost.cols());
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) plan.gamma(rows[i], cols[j]) = reduced(i, j);
  plan.objective = plan.gamma.cwiseProduct(cost).sum();
  plan.dual_u = Vector::Zero(cost.rows());
  plan.dual_v = Vector::Zero(cost.cols());
  for (Eigen::Index i = 0; i < m; ++i) plan.dual_u(rows[i]) = opts.epsilon * f(i);
  for (Eigen::Index j = 0; j < n; ++j) plan.dual_v(cols[j]) = opts.epsilon * g(j);
  return plan;
}

// ------------------------------------------------------------------- GW ----

double gw_objective(const Matrix& c1, const Matrix& c2, const Matrix& gamma) {
  // Σ (a - b)² ΓΓ = Σ a² r_i r_k + Σ b² s_j s_l - 2 <Γ, C1 Γ C2ᵀ>
  const Vector r = gamma.rowwise().sum();
  const Vector s = gamma.colwise().sum().transpose();
  const double first = r.dot(c1.cwiseAbs2() * r);
  const double second = s.dot(c2.cwiseAbs2() * s);
  const double cross = gamma.cwiseProduct(c1 * gamma * c2.transpose()).sum();
  return std::max(0.0, first + second - 2.0 * cross);
}

double gw_objective_bruteforce(const Matrix& c1, const Matrix& c2, const Matrix& gamma) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < c1.rows(); ++i) {
    for (Eigen::Index j = 0; j < c2.rows(); ++j) {
      if (gamma(i, j) == 0.0) continue;
      for (Eigen::Index k = 0; k < c1.rows(); ++k) {
        for (Eigen::Index l = 0; l < c2.rows(); ++l) {
          const double diff = c1(i, k) - c2(j, l);
          total += diff * diff * gamma(i, j) * gamma(k, l);
        }
      }
    }
  }
  return total;
}

namespace {

void check_gw_inputs(const Matrix& c1, const Matrix& c2, const Marginal& p, const Marginal& q) {
  if (c1.rows() != c1.cols() || c2.rows() != c2.cols()) {
    throw InputError("GW cost matrices must be square");
  }
  if (static_cast<std::size_t>(c1.rows()) != p.size() ||
      static_cast<std::size_t>(c2.rows()) != q.size()) {
    throw InputError("GW cost matrix sizes do not match marginals");
  }
  if (!c1.allFinite() || !c2.allFinite()) throw InputError("GW costs must be finite");
  if (std::abs(p.total() - q.total()) > 1e-9) throw InputError("GW marginal mass mismatch");
}

// W1 between two discrete distributions on the real line, by sweeping the
// merged support and integrating |F_a - F_b|.
double w1_line(Vector xa, const Vector& wa, Vector xb, const Vector& wb) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<std::size_t>(xa.size() + xb.size()));
  for (Eigen::Index i = 0; i < xa.size(); ++i) pts.emplace_back(xa(i), wa(i));
  for (Eigen::Index j = 0; j < xb.size(); ++j) pts.emplace_back(xb(j), -wb(j));
  std::sort(pts.begin(), pts.end());
  double total = 0.0, cdf_gap = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    cdf_gap += pts[k].second;
    total += std::abs(cdf_gap) * (pts[k + 1].first - pts[k].first);
  }
  return total;
}

// Plan matching nodes whose outgoing and incoming distance distributions
// agree, refined by greedily anchoring the best matched pair and adding each
// node's distances to and from the anchors. Anchors break the ties that
// symmetric graphs leave in the profiles. The result follows any relabeling
// of the nodes, unlike pqᵀ or random starts.
Matrix anchored_profile_plan(const Matrix& c1, const Matrix& c2, const Marginal& p,
                             const Marginal& q) {
  const Eigen::Index m = c1.rows(), n = c2.rows();
  Matrix cost(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      cost(i, j) = w1_line(c1.row(i).transpose(), p.weights(), c2.row(j).transpose(), q.weights()) +
                   w1_line(c1.col(i), p.weights(), c2.col(j), q.weights());
    }
  }
  std::vector<bool> used_i(static_cast<std::size_t>(m), false), used_j(static_cast<std::size_t>(n), false);
  for (Eigen::Index step = 0; step < std::min(m, n); ++step) {
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (used_i[i]) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!used_j[j] && (bi < 0 || cost(i, j) < cost(bi, bj))) {
          bi = i;
          bj = j;
        }
      }
    }
    used_i[bi] = true;
    used_j[bj] = true;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        cost(i, j) += std::abs(c1(bi, i) - c2(bj, j)) + std::abs(c1(i, bi) - c2(j, bj));
      }
    }
  }
  return emd(p, q, cost).gamma;
}

Matrix random_feasible_plan(const Marginal& p, const Marginal& q, double spread, Rng& rng) {
  const Eigen::Index m = static_cast<Eigen::Index>(p.size());
  const Eigen::Index n = static_cast<Eigen::Index>(q.size());
  Matrix k(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = std::exp(spread * standard_normal(rng));
  }
  // Sinkhorn scaling onto the marginal constraints; ends on a column pass.
  for (int it = 0; it < 5000; ++it) {
    const Vector rows = k.rowwise().sum();
    for (Eigen::Index i = 0; i < m; ++i) k.row(i) *= rows(i) > 0.0 ? p.weights()(i) / rows(i) : 0.0;
    const Vector cols = k.colwise().sum().transpose();
    for (Eigen::Index j = 0; j < n; ++j) k.col(j) *= cols(j) > 0.0 ? q.weights()(j) / cols(j) : 0.0;
    if ((k.rowwise().sum() - p.weights()).cwiseAbs().maxCoeff() < 1e-14) break;
  }
  return k;
}

}  // namespace

TransportPlan gromov_wasserstein_from(const Matrix& c1, const Matrix& c2, const Marginal& p,
                                      const Marginal& q, Matrix start, const GwOptions& opts) {
  check_gw_inputs(c1, c2, p, q);
  Matrix gamma = std::move(start);
  double f = gw_objective(c1, c2, gamma);
  TransportPlan plan;
  plan.history.push_back(f);
  plan.converged = false;
  const double gap_tol = 1e-14 * std::max(1.0, c1.cwiseAbs2().maxCoeff() + c2.cwiseAbs2().maxCoeff());
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // Gradient up to row/column-constant terms, which do not change the
    // linear minimizer over plans with fixed marginals.
    const Matrix c1_g_c2 = c1 * gamma * c2.transpose();
    const Matrix grad = -2.0 * (c1_g_c2 + c1.transpose() * gamma * c2);
    const TransportPlan vertex = emd(p, q, grad);
    const Matrix delta = vertex.gamma - gamma;
    const double slope = grad.cwiseProduct(delta).sum();
    if (slope >= -gap_tol) {
      plan.converged = true;
      break;
    }
    const double curvature = -2.0 * delta.cwiseProduct(c1 * delta * c2.transpose()).sum();
    double step = 1.0;
    if (curvature > 0.0) {
      step = std::clamp(-slope / (2.0 * curvature), 0.0, 1.0);
    } else if (curvature + slope >= 0.0) {
      step = 0.0;
    }
    if (step <= 0.0) {
      plan.converged = true;
      break;
    }
    Matrix next = gamma + step * delta;
    const double f_next = gw_objective(c1, c2, next);
    if (f_next > f) {  // roundoff on a flat segment
      plan.converged = true;
      break;
    }
    const double decrease = f - f_next;
    gamma = std::move(next);
    f = f_next;
    plan.history.push_back(f);
    if (f <= 0.0 || decrease <= opts.rel_tol * std::abs(f + decrease)) {
      plan.converged = true;
      ++it;
      break;
    }
  }
  plan.iterations = it;
  plan.gamma = std::move(gamma);
  plan.objective = f;
  return plan;
}

TransportPlan gromov_wasserstein(const Matrix& c1, const Matrix& c2, const Marginal& p,
                                 const Marginal& q, const GwOptions& opts) {
  check_gw_inputs(c1, c2, p, q);
  if (opts.n_starts < 1) throw InputError("GW needs at least one start");
  Rng rng(opts.seed);
  TransportPlan best;
  bool have_best = false;
  for (int s = 0; s < opts.n_starts; ++s) {
    Matrix start = s == 0   ? Matrix(p.weights() * q.weights().transpose())
                   : s == 1 ? anchored_profile_plan(c1, c2, p, q)
                            : random_feasible_plan(p, q, opts.start_spread, rng);
    TransportPlan plan = gromov_wasserstein_from(c1, c2, p, q, std::move(start), opts);
    if (!have_best || plan.objective < best.objective) {
      best = std::move(plan);
      have_best = true;
    }
    if (best.objective <= 0.0) break;
  }
  return best;
}

}  // namespace dgot
