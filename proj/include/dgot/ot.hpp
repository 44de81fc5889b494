#pragma once

#include "dgot/graph.hpp"

#include <cstdint>
#include <vector>

namespace dgot {

/// Nonnegative mass vector over the support points of one side of a plan.
class Marginal {
 public:
  Marginal() = default;
  /// Throws InputError on negative or non-finite entries.
  explicit Marginal(Vector weights);

  static Marginal uniform(std::size_t n);
  /// Rescales to total mass 1. Throws InputError when the total is zero.
  static Marginal normalized(const Vector& weights);

  const Vector& weights() const { return weights_; }
  std::size_t size() const { return static_cast<std::size_t>(weights_.size()); }
  double total() const { return weights_.sum(); }

 private:
  Vector weights_;
};

struct TransportPlan {
  Matrix gamma;
  double objective = 0.0;
  bool converged = true;
  int iterations = 0;
  /// EMD only: optimal dual potentials with u_i + v_j <= C_ij.
  Vector dual_u;
  Vector dual_v;
  /// GW only: objective after each accepted iteration of the returned start.
  std::vector<double> history;

  double dual_objective(const Marginal& mu, const Marginal& nu) const {
    return dual_u.dot(mu.weights()) + dual_v.dot(nu.weights());
  }
};

/// Exact earth mover's distance by the transportation simplex (MODI
/// potentials on a spanning-tree basis). Rejects mass mismatch above 1e-9.
/// Costs may be any finite reals.
TransportPlan emd(const Marginal& mu, const Marginal& nu, const Matrix& cost);

struct SinkhornOptions {
  double epsilon = 1e-2;
  int max_iter = 100000;
  /// Largest tolerated row-marginal violation.
  double tol = 1e-10;
};

/// Entropy-smoothed transport in the log domain. The objective is the
/// transport cost ⟨Γ, C⟩ of the smoothed plan, so it is not below the EMD
/// value (up to the marginal tolerance) and approaches it as epsilon
/// shrinks. Duals are the scaled potentials epsilon·f and epsilon·g.
TransportPlan sinkhorn(const Marginal& mu, const Marginal& nu, const Matrix& cost,
                       const SinkhornOptions& opts = {});

struct GwOptions {
  int max_iter = 1000;
  double rel_tol = 1e-9;
  int n_starts = 4;
  std::uint64_t seed = 0;
  /// Spread of the log-normal perturbation used for random starts.
  double start_spread = 2.0;
};

/// Full quartic objective Σ (C1_ik - C2_jl)² Γ_ij Γ_kl.
double gw_objective(const Matrix& c1, const Matrix& c2, const Matrix& gamma);

/// Same objective by direct quadruple sum. O(m²n²); for tests and checks.
double gw_objective_bruteforce(const Matrix& c1, const Matrix& c2, const Matrix& gamma);

/// Local minimizer of the Gromov-Wasserstein problem with squared loss by
/// conditional gradient with exact line search. Start 0 is pqᵀ, start 1
/// couples nodes with similar distance profiles (anchored greedily so that
/// symmetric graphs are matched consistently), the rest are seeded random
/// feasible plans. The best start wins.
TransportPlan gromov_wasserstein(const Matrix& c1, const Matrix& c2, const Marginal& p,
                                 const Marginal& q, const GwOptions& opts = {});

/// Runs conditional gradient from a given feasible plan.
TransportPlan gromov_wasserstein_from(const Matrix& c1, const Matrix& c2, const Marginal& p,
                                      const Marginal& q, Matrix start, const GwOptions& opts);

/// Largest violation of the marginal constraints of gamma.
double marginal_violation(const Matrix& gamma, const Marginal& mu, const Marginal& nu);

}  // namespace dgot
