#include "dgot/eval.hpp"

#include "dgot/error.hpp"
#include "dgot/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

namespace dgot {

namespace {

using Index = Eigen::Index;

struct Medoids {
  std::vector<std::size_t> ids;
  double cost = std::numeric_limits<double>::infinity();
};

double assignment_cost(const Matrix& d, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (Index i = 0; i < d.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (auto m : medoids) best = std::min(best, d(i, static_cast<Index>(m)));
    total += best;
  }
  return total;
}

std::vector<std::size_t> pam_build(const Matrix& d, int k) {
  const auto n = static_cast<std::size_t>(d.rows());
  std::vector<std::size_t> medoids;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (int c = 0; c < k; ++c) {
    std::size_t pick = n;
    double pick_cost = std::numeric_limits<double>::infinity();
    for (std::size_t cand = 0; cand < n; ++cand) {
      if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += std::min(nearest[i], d(i, cand));
      if (total < pick_cost) {
        pick_cost = total;
        pick = cand;
      }
    }
    medoids.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], d(i, pick));
  }
  return medoids;
}

std::vector<std::size_t> random_medoids(std::size_t n, int k, Rng& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    std::swap(all[i], all[i + uniform_index(rng, n - i)]);
  }
  all.resize(static_cast<std::size_t>(k));
  return all;
}

Medoids pam_swap(const Matrix& d, std::vector<std::size_t> medoids) {
  const auto n = static_cast<std::size_t>(d.rows());
  double cost = assignment_cost(d, medoids);
  while (true) {
    double best_cost = cost;
    std::size_t best_slot = 0, best_cand = n;
    for (std::size_t slot = 0; slot < medoids.size(); ++slot) {
      for (std::size_t cand = 0; cand < n; ++cand) {
        if (std::find(medoids.begin(), medoids.end(), cand) != medoids.end()) continue;
        auto trial = medoids;
        trial[slot] = cand;
        const double c = assignment_cost(d, trial);
        if (c < best_cost - 1e-12 * std::max(1.0, std::abs(best_cost))) {
          best_cost = c;
          best_slot = slot;
          best_cand = cand;
        }
      }
    }
    if (best_cand == n) break;
    medoids[best_slot] = best_cand;
    cost = best_cost;
  }
  return {std::move(medoids), cost};
}

Partition assign(const Matrix& d, std::vector<std::size_t>& medoids) {
  std::sort(medoids.begin(), medoids.end());
  Partition part;
  part.labels.assign(static_cast<std::size_t>(d.rows()), 0);
  for (Index i = 0; i < d.rows(); ++i) {
    int best = 0;
    for (std::size_t c = 0; c < medoids.size(); ++c) {
      if (static_cast<Index>(medoids[c]) == i) {
        best = static_cast<int>(c);
        break;
      }
      if (d(i, static_cast<Index>(medoids[c])) < d(i, static_cast<Index>(medoids[best]))) {
        best = static_cast<int>(c);
      }
    }
    part.labels[static_cast<std::size_t>(i)] = best;
  }
  return part;
}

// Classical MDS coordinates from squared distances (positive spectrum only).
Matrix mds_embedding(const Matrix& d) {
  const Index n = d.rows();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix b = -0.5 * j * d.cwiseAbs2() * j;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  std::vector<Index> keep;
  const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
  for (Index c = n - 1; c >= 0; --c) {
    if (eig.eigenvalues()(c) > 1e-12 * std::max(top, 1.0)) keep.push_back(c);
  }
  Matrix x(n, std::max<Index>(static_cast<Index>(keep.size()), 1));
  x.setZero();
  for (std::size_t c = 0; c < keep.size(); ++c) {
    x.col(static_cast<Index>(c)) =
        eig.eigenvectors().col(keep[c]) * std::sqrt(eig.eigenvalues()(keep[c]));
  }
  return x;
}

Clustering kmeans(const Matrix& x, int k, std::uint64_t seed, int restarts) {
  const Index n = x.rows();
  Rng rng(seed);
  Clustering best;
  best.cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    // k-means++ seeding.
    Matrix centers(k, x.cols());
    centers.row(0) = x.row(static_cast<Index>(uniform_index(rng, static_cast<std::size_t>(n))));
    for (int c = 1; c < k; ++c) {
      Vector d2(n);
      for (Index i = 0; i < n; ++i) {
        d2(i) = (centers.topRows(c).rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff();
      }
      const double total = d2.sum();
      Index pick = 0;
      if (total > 0.0) {
        double target = uniform01(rng) * total;
        for (pick = 0; pick + 1 < n && target >= d2(pick); ++pick) target -= d2(pick);
      } else {
        pick = static_cast<Index>(uniform_index(rng, static_cast<std::size_t>(n)));
      }
      centers.row(c) = x.row(pick);
    }
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double cost = 0.0;
    for (int it = 0; it < 300; ++it) {
      bool changed = false;
      cost = 0.0;
      for (Index i = 0; i < n; ++i) {
        Index arg;
        cost += (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&arg);
        if (labels[static_cast<std::size_t>(i)] != static_cast<int>(arg)) {
          labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
          changed = true;
        }
      }
      if (!changed) break;
      for (int c = 0; c < k; ++c) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
        int count = 0;
        for (Index i = 0; i < n; ++i) {
          if (labels[static_cast<std::size_t>(i)] == c) {
            sum += x.row(i);
            ++count;
          }
        }
        if (count > 0) centers.row(c) = sum / count;
      }
    }
    if (cost < best.cost) {
      best.cost = cost;
      best.partition.labels = labels;
    }
  }
  // Relabel by first appearance and drop empty ids.
  std::map<int, int> remap;
  for (int& l : best.partition.labels) {
    auto [it, inserted] = remap.emplace(l, static_cast<int>(remap.size()));
    l = it->second;
  }
  if (static_cast<int>(remap.size()) < k) {
    best.warnings.push_back("k-means produced " + std::to_string(remap.size()) +
                            " nonempty clusters out of " + std::to_string(k));
  }
  return best;
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

Clustering cluster(const Matrix& d_in, int k, std::uint64_t seed, int restarts,
                   ClusterAlgorithm algorithm) {
  if (d_in.rows() != d_in.cols() || d_in.rows() == 0) {
    throw InputError("distance matrix must be square and nonempty");
  }
  if (!d_in.allFinite()) throw InputError("distance matrix has non-finite entries");
  const auto n = static_cast<std::size_t>(d_in.rows());
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw InputError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (restarts < 1) throw InputError("restarts must be positive");
  Clustering out;
  Matrix d = d_in;
  const double asym = (d - d.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12) {
    d = 0.5 * (d + d.transpose());
    out.warnings.push_back("distance matrix asymmetric (max " + std::to_string(asym) +
                           "); symmetrized as (D + Dᵀ)/2");
  }
  if (d.diagonal().cwiseAbs().maxCoeff() > 0.0) {
    d.diagonal().setZero();
    out.warnings.push_back("nonzero diagonal set to zero");
  }

  if (algorithm == ClusterAlgorithm::kMdsKmeans) {
    Clustering km = kmeans(mds_embedding(d), k, seed, restarts);
    km.warnings.insert(km.warnings.begin(), out.warnings.begin(), out.warnings.end());
    return km;
  }

  Rng rng(seed);
  Medoids best;
  for (int r = 0; r < restarts; ++r) {
    auto start = r == 0 ? pam_build(d, k) : random_medoids(n, k, rng);
    Medoids m = pam_swap(d, std::move(start));
    if (m.cost < best.cost) best = std::move(m);  // ties keep the earlier restart
  }
  out.cost = best.cost;
  out.medoids = best.ids;
  out.partition = assign(d, out.medoids);
  return out;
}

double ari(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) {
    throw InputError("ARI needs partitions of equal length (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
  const double n = static_cast<double>(a.size());
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a.labels[i], b.labels[i]}] += 1.0;
    rows[a.labels[i]] += 1.0;
    cols[b.labels[i]] += 1.0;
  }
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, count] : table) index += choose2(count);
  for (const auto& [key, count] : rows) sum_a += choose2(count);
  for (const auto& [key, count] : cols) sum_b += choose2(count);
  const double total = choose2(n);
  if (total == 0.0) return 1.0;
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;  // both partitions trivial in the same way
  return (index - expected) / (max_index - expected);
}

Matrix pca_baseline(const Matrix& edge_weights) {
  const Index p = edge_weights.cols();
  if (p < 2) throw InputError("PCA baseline needs at least 2 samples");
  const Matrix centered = edge_weights.colwise() - edge_weights.rowwise().mean();
  // Samples as rows: X = P̃ᵀ = U S Vᵀ; principal-component scores are U S.
  Eigen::BDCSVD<Matrix> svd(centered.transpose(), Eigen::ComputeThinU);
  const Index r = std::min<Index>(p - 1, svd.singularValues().size());
  const Matrix scores = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal();
  Matrix d = Matrix::Zero(p, p);
  for (Index k = 0; k < p; ++k) {
    for (Index l = k + 1; l < p; ++l) d(k, l) = d(l, k) = (scores.row(k) - scores.row(l)).norm();
  }
  return d;
}

namespace {

Matrix row_correlation_distance(const Matrix& rows_data, std::vector<std::string>* warnings) {
  const Index e = rows_data.rows();
  Matrix centered = rows_data.colwise() - rows_data.rowwise().mean();
  const Vector norms = centered.rowwise().norm();
  std::size_t flat = 0;
  for (Index i = 0; i < e; ++i) {
    if (norms(i) > 0.0) {
      centered.row(i) /= norms(i);
    } else {
      ++flat;
    }
  }
  Matrix d = Matrix::Ones(e, e);
  for (Index i = 0; i < e; ++i) {
    d(i, i) = 0.0;
    if (!(norms(i) > 0.0)) continue;
    for (Index j = i + 1; j < e; ++j) {
      if (!(norms(j) > 0.0)) continue;
      const double corr = std::clamp(centered.row(i).dot(centered.row(j)), -1.0, 1.0);
      d(i, j) = d(j, i) = 1.0 - corr;
    }
  }
  if (flat > 0 && warnings) {
    warnings->push_back(std::to_string(flat) +
                        " zero-variance rows given correlation cost 1 to all others");
  }
  return d;
}

}  // namespace

Matrix correlation_cost(const Matrix& edge_weights, std::vector<std::string>* warnings) {
  return row_correlation_distance(edge_weights, warnings);
}

Matrix correlation_sample_distances(const Matrix& edge_weights) {
  return row_correlation_distance(edge_weights.transpose(), nullptr);
}

double frobenius_distance(const DiGraph& a, const DiGraph& b) {
  // Sorted union so that swapping the arguments sums identical terms.
  std::vector<std::string> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  const auto n = static_cast<Index>(labels.size());
  auto padded = [&](const DiGraph& g) {
    std::vector<std::ptrdiff_t> idx(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) idx[i] = g.index_of(labels[i]);
    Matrix m = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      if (idx[i] < 0) continue;
      for (Index j = 0; j < n; ++j) {
        if (idx[j] >= 0) m(i, j) = g.weight(idx[i], idx[j]);
      }
    }
    return m;
  };
  return (padded(a) - padded(b)).norm();
}

}  // namespace dgot
