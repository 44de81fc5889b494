#pragma once

#include "dgot/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dgot {

enum class MetricKind { kGrd, kHtd };

/// Ground metric selection: GRD, or HTD with its beta parameter.
struct MetricSpec {
  MetricKind kind = MetricKind::kGrd;
  double beta = 1.0;

  static MetricSpec grd() { return {MetricKind::kGrd, 1.0}; }
  static MetricSpec htd(double beta) { return {MetricKind::kHtd, beta}; }
  std::string name() const;  // "GRD", "HTD^1", "HTD^0.5", ...
};

/// N×N node-to-node distances. Diagonal is exactly zero; entries within
/// 1e-12 below zero are snapped to 0, lower ones are kept and counted.
struct DistanceMatrix {
  Matrix values;
  MetricSpec metric;
  std::optional<double> alpha;  ///< regularization applied, if any
  std::vector<std::string> labels;
  std::vector<std::string> warnings;
  std::size_t negative_entries = 0;
  double min_entry = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

// ---------------------------------------------------------------- GRD ------

/// (n-1)×n matrix Q with Q·1 = 0, QQᵀ = I and QᵀQ = I - 11ᵀ/n, built by
/// Gram-Schmidt on e_1..e_{n-1} against 1/√n. Row k has a positive entry
/// in column k, so for n = 2 it is [1/√2, -1/√2].
Matrix grounding_matrix(int n);

/// Alternative Q using the Helmert construction. Spans the same subspace,
/// so it must give identical resistance distances.
Matrix helmert_grounding_matrix(int n);

enum class LyapunovMethod { kSchur, kKronecker };

/// Solves A·S + S·Aᵀ = C.
///  kSchur: complex Schur (Bartels-Stewart), O(n³).
///  kKronecker: dense solve of (I⊗A + A⊗I) vec(S) = vec(C), O(n⁶); the
///    reference path, refused for n > 60.
/// Throws NumericalError when some λ_i + λ_j vanishes.
Matrix solve_lyapunov(const Matrix& a, const Matrix& c,
                      LyapunovMethod method = LyapunovMethod::kSchur);

/// Frobenius norm of A·S + S·Aᵀ - C.
double lyapunov_residual(const Matrix& a, const Matrix& s, const Matrix& c);

struct GroundedSystem {
  Matrix q;        ///< (N-1)×N grounding matrix
  Matrix laplacian;
  Matrix l_tilde;  ///< Q L Qᵀ
  Matrix sigma;    ///< solves L̃Σ + ΣL̃ᵀ = I
  Matrix x;        ///< 2 Qᵀ Σ Q
  double residual = 0.0;
};

/// Laplacian L = D - A with D = diag(A·1).
Matrix laplacian(const DiGraph& g);

/// Throws NumericalError when g has no globally reachable node.
GroundedSystem grounded_system(const DiGraph& g,
                               LyapunovMethod method = LyapunovMethod::kSchur,
                               const Matrix* q_override = nullptr);

/// Generalized effective resistance d(k,j) = √((e_k - e_j)ᵀ X (e_k - e_j)).
DistanceMatrix grd_matrix(const DiGraph& g,
                          LyapunovMethod method = LyapunovMethod::kSchur,
                          const Matrix* q_override = nullptr);

// ---------------------------------------------------------------- HTD ------

/// π with πP = π, π·1 = 1. Throws NumericalError if P is reducible.
Vector stationary_distribution(const Matrix& p);

/// Q[i][j] = P_i[τ_j ≤ τ_i] for i ≠ j, diagonal 1. One absorbing-chain
/// solve per ordered pair. Throws NumericalError if P is reducible.
Matrix hitting_probability_matrix(const Matrix& p);

/// Same quantity from mean first-passage times of the fundamental matrix
/// Z = (I - P + 1π)⁻¹ via π_i·Q[i][j] = 1 / (m_ij + m_ji). O(N³) total.
Matrix hitting_probability_matrix_fundamental(const Matrix& p);

struct ChainStatistics {
  Matrix p;
  Vector pi;
  Matrix q_hit;
  Matrix t_beta;
  double beta = 1.0;
};

/// Above this size htd_matrix switches to the fundamental-matrix route.
constexpr std::size_t kPairwiseHittingLimit = 64;

ChainStatistics chain_statistics(const DiGraph& g, double beta);

/// d(i,j) = -log T^(β)_{ij}. Beta outside (0.5, 1] yields a warning;
/// beta = 0.5 is accepted with a boundary warning.
DistanceMatrix htd_matrix(const DiGraph& g, double beta = 1.0);

// --------------------------------------------------------------- common ----

/// True when g satisfies the reachability precondition of the metric
/// (globally reachable node for GRD, strong connectivity for HTD).
bool metric_precondition_holds(const DiGraph& g, const MetricSpec& metric);

/// Computes the metric, regularizing with alpha first when the precondition
/// fails or when force_alpha is set. The applied alpha is recorded.
DistanceMatrix node_distances(const DiGraph& g, const MetricSpec& metric,
                              double alpha = kDefaultAlpha, bool force_alpha = false);

}  // namespace dgot
