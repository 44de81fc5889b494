#include "dgot/node_metrics.hpp"

#include "dgot/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <string>

namespace dgot {

namespace {

using CMatrix = Eigen::MatrixXcd;

std::vector<std::string> index_labels(Eigen::Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

void require_stochastic(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() < 2) {
    throw InputError("transition matrix must be square with at least 2 states");
  }
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    if ((p.row(i).array() < 0.0).any() || !p.row(i).allFinite()) {
      throw InputError("transition matrix row " + std::to_string(i) +
                       " has negative or non-finite entries");
    }
    if (std::abs(p.row(i).sum() - 1.0) > 1e-9) {
      throw InputError("transition matrix row " + std::to_string(i) + " does not sum to 1");
    }
  }
}

void require_irreducible(const Matrix& p) {
  DiGraph support(index_labels(p.rows()), p.cwiseAbs());
  if (!analyze_reachability(support).strongly_connected) {
    throw NumericalError("transition matrix is reducible (graph not strongly connected); "
                         "apply regularization, e.g. --alpha");
  }
}

// Entries in [-kRoundoff, 0] are floating-point noise around a true zero
// (e.g. T = 1 for HTD^0.5) and become +0; anything lower is kept and reported.
constexpr double kRoundoff = 1e-12;

void finalize(DistanceMatrix& d) {
  d.values.diagonal().setZero();
  d.values = d.values.unaryExpr([](double x) { return x <= 0.0 && x >= -kRoundoff ? 0.0 : x; });
  d.negative_entries = static_cast<std::size_t>((d.values.array() < 0.0).count());
  d.min_entry = d.values.minCoeff();
  if (!d.values.allFinite()) {
    throw NumericalError(d.metric.name() + " distance matrix has non-finite entries");
  }
  if (d.negative_entries > 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu negative %s entries (min %.3e)", d.negative_entries,
                  d.metric.name().c_str(), d.min_entry);
    d.warnings.emplace_back(buf);
  }
}

}  // namespace

std::string MetricSpec::name() const {
  if (kind == MetricKind::kGrd) return "GRD";
  char buf[32];
  std::snprintf(buf, sizeof buf, "HTD^%g", beta);
  return buf;
}

// ---------------------------------------------------------------- GRD ------

Matrix grounding_matrix(int n) {
  if (n < 2) throw InputError("grounding matrix needs n >= 2, got " + std::to_string(n));
  Matrix basis(n, n);  // orthonormal rows; row 0 is 1/√n
  basis.row(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  for (int k = 0; k + 1 < n; ++k) {
    Eigen::RowVectorXd v = Eigen::RowVectorXd::Unit(n, k);
    // Two passes of modified Gram-Schmidt keep orthogonality near 1e-16.
    for (int pass = 0; pass < 2; ++pass) {
      for (int r = 0; r <= k; ++r) v -= v.dot(basis.row(r)) * basis.row(r);
    }
    basis.row(k + 1) = v / v.norm();
  }
  return basis.bottomRows(n - 1);
}

Matrix helmert_grounding_matrix(int n) {
  if (n < 2) throw InputError("grounding matrix needs n >= 2, got " + std::to_string(n));
  Matrix q = Matrix::Zero(n - 1, n);
  for (int k = 1; k < n; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    q.row(k - 1).head(k).setConstant(scale);
    q(k - 1, k) = -static_cast<double>(k) * scale;
  }
  return q;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& c, LyapunovMethod method) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || c.rows() != n || c.cols() != n) {
    throw InputError("Lyapunov operands must be square and of equal size");
  }
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;

  if (method == LyapunovMethod::kKronecker) {
    if (n > 60) throw InputError("Kronecker Lyapunov reference limited to n <= 60");
    const Eigen::Index m = n * n;
    Matrix k = Matrix::Zero(m, m);
    // Column-major vec: vec(A S) = (I ⊗ A) vec S, vec(S Aᵀ) = (A ⊗ I) vec S.
    for (Eigen::Index blk = 0; blk < n; ++blk) k.block(blk * n, blk * n, n, n) += a;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (a(i, j) != 0.0) k.block(i * n, j * n, n, n).diagonal().array() += a(i, j);
      }
    }
    Eigen::PartialPivLU<Matrix> lu(k);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (!(pivots.minCoeff() > 1e-13 * pivots.maxCoeff()) || !(lu.rcond() > 1e-14)) {
      throw NumericalError("Lyapunov operator (I⊗A + A⊗I) is singular (rcond " +
                           std::to_string(lu.rcond()) + ")");
    }
    const Vector s = lu.solve(Eigen::Map<const Vector>(c.data(), m));
    return Eigen::Map<const Matrix>(s.data(), n, n);
  }

  Eigen::ComplexSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
  const CMatrix& u = schur.matrixU();
  const CMatrix& t = schur.matrixT();
  const CMatrix f = u.adjoint() * c.cast<std::complex<double>>() * u;
  // T Y + Y Tᴴ = F with Tᴴ lower triangular: sweep columns from the right.
  CMatrix y = CMatrix::Zero(n, n);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = f.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    const std::complex<double> shift = std::conj(t(j, j));
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      std::complex<double> acc = rhs(i);
      for (Eigen::Index k = i + 1; k < n; ++k) acc -= t(i, k) * y(k, j);
      const std::complex<double> pivot = t(i, i) + shift;
      if (std::abs(pivot) <= tol) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "Lyapunov equation singular: eigenvalues %.6g%+.6gi and %.6g%+.6gi "
                      "sum to zero",
                      t(i, i).real(), t(i, i).imag(), t(j, j).real(), t(j, j).imag());
        throw NumericalError(buf);
      }
      y(i, j) = acc / pivot;
    }
  }
  return (u * y * u.adjoint()).real();
}

double lyapunov_residual(const Matrix& a, const Matrix& s, const Matrix& c) {
  return (a * s + s * a.transpose() - c).norm();
}

Matrix laplacian(const DiGraph& g) {
  Matrix l = -g.weights();
  l.diagonal() += g.out_degree();
  return l;
}

GroundedSystem grounded_system(const DiGraph& g, LyapunovMethod method,
                               const Matrix* q_override) {
  const int n = static_cast<int>(g.size());
  if (n < 2) throw InputError("GRD needs at least 2 nodes");
  if (!analyze_reachability(g).has_globally_reachable_node) {
    throw NumericalError("graph has no globally reachable node; generalized effective "
                         "resistance undefined (apply regularization, e.g. --alpha)");
  }
  GroundedSystem sys;
  sys.q = q_override ? *q_override : grounding_matrix(n);
  if (sys.q.rows() != n - 1 || sys.q.cols() != n) {
    throw InputError("grounding matrix override has the wrong shape");
  }
  sys.laplacian = laplacian(g);
  sys.l_tilde = sys.q * sys.laplacian * sys.q.transpose();
  const Matrix identity = Matrix::Identity(n - 1, n - 1);
  sys.sigma = solve_lyapunov(sys.l_tilde, identity, method);
  sys.residual = lyapunov_residual(sys.l_tilde, sys.sigma, identity);
  sys.x = 2.0 * sys.q.transpose() * sys.sigma * sys.q;
  return sys;
}

DistanceMatrix grd_matrix(const DiGraph& g, LyapunovMethod method, const Matrix* q_override) {
  const GroundedSystem sys = grounded_system(g, method, q_override);
  const auto n = static_cast<Eigen::Index>(g.size());
  const double res_tol = 1e-8 * std::max(1.0, sys.sigma.norm());
  if (!(sys.residual <= res_tol)) {
    throw NumericalError("Lyapunov residual " + std::to_string(sys.residual) +
                         " exceeds tolerance");
  }
  DistanceMatrix d;
  d.metric = MetricSpec::grd();
  d.labels = g.labels();
  d.values = Matrix::Zero(n, n);
  const Matrix& x = sys.x;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const double quad = x(k, k) + x(j, j) - x(k, j) - x(j, k);
      // Quadratic form of a PSD matrix; roundoff can dip just below zero.
      const double v = std::sqrt(std::max(quad, 0.0));
      d.values(k, j) = d.values(j, k) = v;
    }
  }
  finalize(d);
  return d;
}

// ---------------------------------------------------------------- HTD ------

Vector stationary_distribution(const Matrix& p) {
  require_stochastic(p);
  require_irreducible(p);
  const Eigen::Index n = p.rows();
  // π (I - P + 11ᵀ) = 1ᵀ has a unique solution for irreducible P.
  const Matrix m = Matrix::Identity(n, n) - p + Matrix::Ones(n, n);
  Vector pi = m.transpose().partialPivLu().solve(Vector::Ones(n));
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  return pi;
}

Matrix hitting_probability_matrix(const Matrix& p) {
  require_stochastic(p);
  require_irreducible(p);
  const Eigen::Index n = p.rows();
  Matrix q = Matrix::Identity(n, n);
  if (n == 2) {
    q(0, 1) = q(1, 0) = 1.0;  // leaving i means hitting j
    return q;
  }
  std::vector<Eigen::Index> rest;
  rest.reserve(static_cast<std::size_t>(n - 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      rest.clear();
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k != i && k != j) rest.push_back(k);
      }
      const auto m = static_cast<Eigen::Index>(rest.size());
      // h_k = P(hit j before i | start k) for k outside {i, j}.
      Matrix sys(m, m);
      Vector rhs(m);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) sys(r, c) = -p(rest[r], rest[c]);
        sys(r, r) += 1.0;
        rhs(r) = p(rest[r], j);
      }
      Eigen::PartialPivLU<Matrix> lu(sys);
      if (!(lu.rcond() > 1e-14)) {
        throw NumericalError("absorbing system singular for pair (" + std::to_string(i) +
                             ", " + std::to_string(j) + ")");
      }
      const Vector h = lu.solve(rhs);
      double value = p(i, j);
      for (Eigen::Index r = 0; r < m; ++r) value += p(i, rest[r]) * h(r);
      q(i, j) = std::clamp(value, 0.0, 1.0);
    }
  }
  return q;
}

Matrix hitting_probability_matrix_fundamental(const Matrix& p) {
  const Vector pi = stationary_distribution(p);
  const Eigen::Index n = p.rows();
  const Matrix z =
      (Matrix::Identity(n, n) - p + Vector::Ones(n) * pi.transpose()).partialPivLu().inverse();
  // Mean first-passage time m_ij = (z_jj - z_ij) / π_j.
  Matrix mfpt = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) mfpt(i, j) = (z(j, j) - z(i, j)) / pi(j);
    }
  }
  Matrix q = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) q(i, j) = std::clamp(1.0 / (pi(i) * (mfpt(i, j) + mfpt(j, i))), 0.0, 1.0);
    }
  }
  return q;
}

ChainStatistics chain_statistics(const DiGraph& g, double beta) {
  if (g.size() < 2) throw InputError("HTD needs at least 2 nodes");
  if (!analyze_reachability(g).strongly_connected) {
    throw NumericalError("graph is not strongly connected; hitting-time distance "
                         "undefined (apply regularization, e.g. --alpha)");
  }
  ChainStatistics st;
  st.beta = beta;
  st.p = transition_matrix(g);
  st.pi = stationary_distribution(st.p);
  st.q_hit = g.size() <= kPairwiseHittingLimit ? hitting_probability_matrix(st.p)
                                               : hitting_probability_matrix_fundamental(st.p);
  const auto n = static_cast<Eigen::Index>(g.size());
  st.t_beta = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) {
        st.t_beta(i, j) =
            std::pow(st.pi(i), beta) / std::pow(st.pi(j), 1.0 - beta) * st.q_hit(i, j);
      }
    }
  }
  return st;
}

DistanceMatrix htd_matrix(const DiGraph& g, double beta) {
  if (!std::isfinite(beta)) throw InputError("beta must be finite");
  DistanceMatrix d;
  d.metric = MetricSpec::htd(beta);
  d.labels = g.labels();
  if (beta == 0.5) {
    d.warnings.emplace_back("beta = 0.5 is the boundary of the range (0.5, 1]");
  } else if (!(beta > 0.5 && beta <= 1.0)) {
    d.warnings.emplace_back("beta = " + std::to_string(beta) + " lies outside (0.5, 1]");
  }
  const ChainStatistics st = chain_statistics(g, beta);
  d.values = -st.t_beta.array().log().matrix();
  finalize(d);
  return d;
}

// --------------------------------------------------------------- common ----

bool metric_precondition_holds(const DiGraph& g, const MetricSpec& metric) {
  const Reachability r = analyze_reachability(g);
  return metric.kind == MetricKind::kGrd ? r.has_globally_reachable_node
                                         : r.strongly_connected;
}

DistanceMatrix node_distances(const DiGraph& g, const MetricSpec& metric, double alpha,
                              bool force_alpha) {
  const bool regularized = force_alpha || !metric_precondition_holds(g, metric);
  const DiGraph input = regularized ? regularize(g, alpha) : g;
  DistanceMatrix d = metric.kind == MetricKind::kGrd ? grd_matrix(input)
                                                     : htd_matrix(input, metric.beta);
  if (regularized) d.alpha = alpha;
  return d;
}

}  // namespace dgot
