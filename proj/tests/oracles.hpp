#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's solvers; only plain Eigen and brute force.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// √((e_i - e_j)ᵀ L† (e_i - e_j)) with the Moore-Penrose pseudoinverse.
inline Matrix classical_resistance(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = -a;
  l.diagonal() += a.rowwise().sum();
  const Matrix pinv = l.completeOrthogonalDecomposition().pseudoInverse();
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = pinv(i, i) + pinv(j, j) - pinv(i, j) - pinv(j, i);
      d(i, j) = std::sqrt(std::max(r, 0.0));
    }
  }
  return d;
}

/// vec(Σ) = (I⊗A + A⊗I)⁻¹ vec(C), assembled with Eigen's kroneckerless loops.
inline Matrix kronecker_lyapunov(const Matrix& a, const Matrix& c) {
  const Eigen::Index n = a.rows();
  Matrix k = Matrix::Zero(n * n, n * n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index q = 0; q < n; ++q) {
      for (Eigen::Index r = 0; r < n; ++r) {
        // row index (p, q) ↔ p + n q, column index (r, q) or (p, r)
        k(p + n * q, r + n * q) += a(p, r);
        k(p + n * q, p + n * r) += a(q, r);
      }
    }
  }
  Vector rhs(n * n);
  for (Eigen::Index q = 0; q < n; ++q) {
    for (Eigen::Index p = 0; p < n; ++p) rhs(p + n * q) = c(p, q);
  }
  const Vector s = k.fullPivLu().solve(rhs);
  Matrix out(n, n);
  for (Eigen::Index q = 0; q < n; ++q) {
    for (Eigen::Index p = 0; p < n; ++p) out(p, q) = s(p + n * q);
  }
  return out;
}

/// GRD through an SVD-derived grounding basis and the Kronecker solve.
inline Matrix grd_reference(const Matrix& a) {
  const Eigen::Index n = a.rows();
  Matrix l = -a;
  l.diagonal() += a.rowwise().sum();
  const Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Eigen::JacobiSVD<Matrix> svd(centering, Eigen::ComputeFullU);
  const Matrix q = svd.matrixU().leftCols(n - 1).transpose();
  const Matrix lt = q * l * q.transpose();
  const Matrix sigma = kronecker_lyapunov(lt, Matrix::Identity(n - 1, n - 1));
  const Matrix x = 2.0 * q.transpose() * sigma * q;
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      d(i, j) = std::sqrt(std::max(x(i, i) + x(j, j) - x(i, j) - x(j, i), 0.0));
    }
  }
  return d;
}

/// reach(i, j): j reachable from i over positive entries (Floyd-Warshall).
inline std::vector<std::vector<bool>> transitive_closure(const Matrix& w) {
  const auto n = static_cast<std::size_t>(w.rows());
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    r[i][i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (w(i, j) > 0.0) r[i][j] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (r[i][k] && r[k][j]) r[i][j] = true;
      }
    }
  }
  return r;
}

/// Mass of length ≤ horizon paths from i that visit j before returning to i.
inline double hitting_by_paths(const Matrix& p, Eigen::Index i, Eigen::Index j, int horizon) {
  Vector mass = Vector::Zero(p.rows());
  mass(i) = 1.0;
  double hit = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    Vector next = p.transpose() * mass;
    hit += next(j);
    next(j) = 0.0;
    next(i) = 0.0;
    mass = next;
  }
  return hit;
}

struct MonteCarloEstimate {
  Matrix q;      ///< estimated P_i[τ_j ≤ τ_i]
  Matrix sigma;  ///< standard error of each estimate
};

/// Simulates `walks` excursions from every start state until the first return.
inline MonteCarloEstimate hitting_monte_carlo(const Matrix& p, long walks, std::uint64_t seed) {
  const Eigen::Index n = p.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix cumulative = p;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 1; j < n; ++j) cumulative(i, j) += cumulative(i, j - 1);
  }
  auto step = [&](Eigen::Index from) {
    const double u = unif(rng);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (u < cumulative(from, j)) return j;
    }
    return n - 1;
  };
  MonteCarloEstimate est{Matrix::Identity(n, n), Matrix::Zero(n, n)};
  std::vector<long> counts(static_cast<std::size_t>(n));
  std::vector<char> visited(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(counts.begin(), counts.end(), 0);
    for (long w = 0; w < walks; ++w) {
      std::fill(visited.begin(), visited.end(), 0);
      Eigen::Index state = i;
      do {
        state = step(state);
        visited[static_cast<std::size_t>(state)] = 1;
      } while (state != i);
      for (Eigen::Index j = 0; j < n; ++j) counts[static_cast<std::size_t>(j)] += visited[j];
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = static_cast<double>(counts[static_cast<std::size_t>(j)]) / walks;
      est.q(i, j) = q;
      est.sigma(i, j) = std::sqrt(q * (1.0 - q) / walks);
    }
  }
  return est;
}

/// Minimum of the transportation LP by enumerating every basic solution.
inline double transport_vertex_minimum(const Vector& a, const Vector& b, const Matrix& c) {
  const Eigen::Index m = a.size(), n = b.size(), cells = m * n;
  const Eigen::Index basis = m + n - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(cells), 0);
  std::fill(pick.end() - basis, pick.end(), 1);
  do {
    Matrix sys = Matrix::Zero(m + n, basis);
    Vector rhs(m + n);
    rhs << a, b;
    std::vector<Eigen::Index> chosen;
    for (Eigen::Index k = 0; k < cells; ++k) {
      if (pick[static_cast<std::size_t>(k)]) chosen.push_back(k);
    }
    for (Eigen::Index col = 0; col < basis; ++col) {
      const Eigen::Index cell = chosen[static_cast<std::size_t>(col)];
      sys(cell / n, col) = 1.0;
      sys(m + cell % n, col) = 1.0;
    }
    Eigen::FullPivLU<Matrix> lu(sys);
    if (lu.rank() < basis) continue;
    const Vector x = sys.colPivHouseholderQr().solve(rhs);
    if ((sys * x - rhs).norm() > 1e-9 || x.minCoeff() < -1e-12) continue;
    double obj = 0.0;
    for (Eigen::Index col = 0; col < basis; ++col) {
      const Eigen::Index cell = chosen[static_cast<std::size_t>(col)];
      obj += x(col) * c(cell / n, cell % n);
    }
    best = std::min(best, obj);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

/// Σ (C1_ik - C2_jl)² Γ_ij Γ_kl by direct summation.
inline double gw_quartic(const Matrix& c1, const Matrix& c2, const Matrix& g) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < c1.rows(); ++i)
    for (Eigen::Index j = 0; j < c2.rows(); ++j)
      for (Eigen::Index k = 0; k < c1.rows(); ++k)
        for (Eigen::Index l = 0; l < c2.rows(); ++l) {
          const double d = c1(i, k) - c2(j, l);
          total += d * d * g(i, j) * g(k, l);
        }
  return total;
}

/// Entropic plan by plain multiplicative scaling of K = exp(-C/eps).
inline Matrix sinkhorn_scaling(const Vector& a, const Vector& b, const Matrix& c, double eps,
                               int iters) {
  const Matrix k = (-c / eps).array().exp();
  Vector u = Vector::Ones(a.size()), v = Vector::Ones(b.size());
  for (int t = 0; t < iters; ++t) {
    u = a.array() / (k * v).array();
    v = b.array() / (k.transpose() * u).array();
  }
  return u.asDiagonal() * k * v.asDiagonal();
}

}  // namespace oracle
