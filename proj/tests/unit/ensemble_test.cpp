#include "dgot/ensemble.hpp"
#include "dgot/error.hpp"
#include "dgot/synthgen.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

namespace dgot {
namespace {

DiGraph g(const std::vector<EdgeRow>& rows) { return from_edge_list(rows); }

TEST(BuildEnsemble, HandExample) {
  const auto ens = build_ensemble({g({{"a", "b", 1}}), g({{"a", "b", 1}, {"b", "c", 1}})});
  ASSERT_EQ(ens.universe.edges(), (std::vector<EdgeKey>{{"a", "b"}, {"b", "c"}}));
  Matrix expected(2, 2);
  expected << 1, 1, 0, 1;
  EXPECT_EQ(ens.weights, expected);
}

TEST(BuildEnsemble, IdenticalMembersGiveEqualColumns) {
  const DiGraph x = g({{"a", "b", 2}, {"b", "c", 0.5}, {"c", "a", 1}});
  const auto ens = build_ensemble({x, x, x});
  EXPECT_EQ(ens.weights.col(0), ens.weights.col(1));
  EXPECT_EQ(ens.weights.col(1), ens.weights.col(2));
}

TEST(BuildEnsemble, SharedEdgePlusDisjointRest) {
  const auto ens = build_ensemble({g({{"a", "b", 3}, {"x", "y", 1}}), g({{"a", "b", 4}, {"p", "q", 2}})});
  ASSERT_EQ(ens.universe.edges(),
            (std::vector<EdgeKey>{{"a", "b"}, {"p", "q"}, {"x", "y"}}));
  Matrix expected(3, 2);
  expected << 3, 4, 0, 2, 1, 0;
  EXPECT_EQ(ens.weights, expected);
}

TEST(BuildEnsemble, WarnsOnDisjointVocabulariesAndRejectsEmpty) {
  const auto ens = build_ensemble({g({{"a", "b", 1}}), g({{"c", "d", 1}})});
  EXPECT_FALSE(ens.warnings.empty());
  EXPECT_THROW(build_ensemble({g({{"a", "b", 1}}), g({{"a", "b", 0}})}), InputError);
  EXPECT_THROW(build_ensemble({g({{"a", "b", 1}})}), InputError);
}

TEST(LineGraph, ChainedEdges) {
  const std::vector<DiGraph> graphs{g({{"a", "b", 1}, {"b", "c", 5}}),
                                    g({{"a", "b", 2}, {"b", "c", 1}})};
  const auto ens = build_ensemble(graphs);
  const DiGraph line = build_line_graph(ens.universe, graphs);
  EXPECT_EQ(line.labels(), (std::vector<std::string>{"a->b", "b->c"}));
  EXPECT_DOUBLE_EQ(line.weight(0, 1), 1.0);
  EXPECT_EQ(line.weight(1, 0), 0.0);
  EXPECT_EQ(line.weight(0, 0), 0.0);
}

TEST(LineGraph, WeightIsFractionHoldingBoth) {
  const std::vector<DiGraph> graphs{g({{"a", "b", 1}, {"b", "c", 1}}), g({{"a", "b", 1}}),
                                    g({{"b", "c", 1}}), g({{"a", "b", 1}, {"b", "c", 7}})};
  const auto ens = build_ensemble(graphs);
  const DiGraph line = build_line_graph(ens.universe, graphs);
  EXPECT_DOUBLE_EQ(line.weight(0, 1), 0.5);
}

TEST(LineGraph, NoChainingNoEdges) {
  const std::vector<DiGraph> graphs{g({{"a", "b", 1}, {"c", "d", 1}}), g({{"a", "b", 1}})};
  const auto ens = build_ensemble(graphs);
  EXPECT_EQ(build_line_graph(ens.universe, graphs).edge_count(), 0u);
}

TEST(LineGraph, ReciprocalEdgesChainBothWays) {
  const std::vector<DiGraph> graphs{g({{"a", "b", 1}, {"b", "a", 1}}),
                                    g({{"a", "b", 2}, {"b", "a", 3}})};
  const auto ens = build_ensemble(graphs);
  const DiGraph line = build_line_graph(ens.universe, graphs);
  EXPECT_DOUBLE_EQ(line.weight(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(line.weight(1, 0), 1.0);
  EXPECT_EQ(line.weight(0, 0), 0.0);
  EXPECT_TRUE(analyze_reachability(line).strongly_connected);
}

TEST(LineGraph, DirectedCycleMapsToDirectedCycle) {
  for (int n = 2; n <= 9; ++n) {
    std::vector<EdgeRow> rows;
    for (int i = 0; i < n; ++i) rows.push_back({"v" + std::to_string(i), "v" + std::to_string((i + 1) % n), 1.0});
    const std::vector<DiGraph> graphs{g(rows), g(rows)};
    const DiGraph line = build_line_graph(build_ensemble(graphs).universe, graphs);
    ASSERT_EQ(line.size(), static_cast<std::size_t>(n));
    ASSERT_EQ(line.edge_count(), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < line.size(); ++i) {
      ASSERT_EQ((line.weights().row(i).array() > 0).count(), 1);
      ASSERT_EQ((line.weights().col(i).array() > 0).count(), 1);
    }
    ASSERT_TRUE(analyze_reachability(line).strongly_connected);
  }
}

TEST(EdgeMarginal, PreservesRatios) {
  Matrix p(4, 2);
  p << 1, 0, 3, 2, 0, 2, 6, 4;
  const Marginal m = edge_marginal(p, 0);
  EXPECT_NEAR(m.total(), 1.0, 1e-15);
  for (int e = 0; e < 4; ++e) EXPECT_NEAR(m.weights()(e) * 10.0, p(e, 0), 1e-12);
  Matrix zero = Matrix::Zero(2, 2);
  EXPECT_THROW(edge_marginal(zero, 0), InputError);
}

TEST(Wasserstein, SelfDistanceZero) {
  const std::vector<DiGraph> graphs{g({{"a", "b", 1}, {"b", "c", 2}, {"c", "a", 1}}),
                                    g({{"a", "b", 1}, {"b", "a", 1}})};
  for (auto metric : {MetricSpec::grd(), MetricSpec::htd(1.0)}) {
    const GraphDistance d = wasserstein_distance(graphs, 0, 0, metric);
    EXPECT_NEAR(d.distance, 0.0, 1e-15);
    EXPECT_EQ(d.plan.gamma.diagonal().sum(), d.plan.gamma.sum());
  }
}

TEST(Wasserstein, DisjointSingleEdgesUseSingleRoute) {
  // Graph 0 holds a->b only, graph 1 holds b->c only.
  const std::vector<DiGraph> graphs{g({{"a", "b", 2}}), g({{"b", "c", 5}})};
  const auto ens = build_ensemble(graphs);
  const DistanceMatrix cost = line_graph_costs(graphs, MetricSpec::grd());
  const GraphDistance d = wasserstein_distance(graphs, 0, 1, MetricSpec::grd());
  EXPECT_NEAR(d.distance, cost.values(0, 1), 1e-15);
  EXPECT_GT(d.distance, 0.0);
  EXPECT_EQ(ens.universe.size(), 2u);
}

TEST(Wasserstein, SymmetricUnderSwapForGrd) {
  const auto triple = cycle_of_cycles_flips(4, 4);
  const std::vector<DiGraph> graphs{triple.original, triple.local_flip, triple.global_flip};
  const auto ens = build_ensemble(graphs);
  const DistanceMatrix cost = line_graph_costs(graphs, MetricSpec::grd());
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t l = 0; l < 3; ++l) {
      const auto a = wasserstein_distance(ens.weights, k, l, cost.values);
      const auto b = wasserstein_distance(ens.weights, l, k, cost.values);
      EXPECT_NEAR(a.distance, b.distance, 1e-9);
      EXPECT_LE(marginal_violation(a.plan.gamma, edge_marginal(ens.weights, k),
                                   edge_marginal(ens.weights, l)),
                1e-9);
    }
  }
}

TEST(Gw, SelfAndRelabeledCopy) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 5 + 3 * rep;
    std::vector<EdgeRow> rows, renamed;
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && (j == (i + 1) % n || unif(rng) < 0.25)) {
          const double w = 0.5 + unif(rng);
          rows.push_back({"v" + std::to_string(i), "v" + std::to_string(j), w});
          renamed.push_back({"u" + std::to_string(perm[i]), "u" + std::to_string(perm[j]), w});
        }
      }
    }
    const DiGraph a = g(rows), b = g(renamed);
    for (auto metric : {MetricSpec::grd(), MetricSpec::htd(1.0), MetricSpec::htd(0.5)}) {
      EXPECT_LE(gw_distance(a, a, metric).distance, 1e-9);
      EXPECT_LE(gw_distance(a, b, metric).distance, 1e-6) << metric.name() << " n=" << n;
    }
  }
}

TEST(Gw, RelabeledSymmetricGraphIsRecovered) {
  // Rotations of the cycle of cycles leave every node profile ambiguous.
  const DiGraph g = cycle_of_cycles(4, 4);
  std::vector<EdgeRow> relabeled;
  std::mt19937_64 rng(19);
  std::vector<std::string> labels = g.labels();
  std::shuffle(labels.begin(), labels.end(), rng);
  std::map<std::string, std::string> rename;
  for (std::size_t i = 0; i < labels.size(); ++i) rename[g.labels()[i]] = labels[i];
  for (const auto& e : g.edges()) relabeled.push_back({rename[e.source], rename[e.target], e.weight});
  const DiGraph h = from_edge_list(relabeled);
  for (auto metric : {MetricSpec::grd(), MetricSpec::htd(1.0), MetricSpec::htd(0.5)}) {
    EXPECT_LE(gw_distance(g, h, metric).distance, 1e-6) << metric.name();
  }
}

TEST(Pairwise, IdenticalGraphsGiveZeroMatrix) {
  const DiGraph x = g({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 2}, {"a", "c", 1}});
  for (Method m : {Method::kWasserstein, Method::kGw}) {
    PairwiseParams params;
    params.method = m;
    const auto res = pairwise_distances({x, x, x}, params);
    EXPECT_LE(res.distances.cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Pairwise, MatchesSinglePairOps) {
  const auto triple = cycle_of_cycles_flips(4, 4);
  const std::vector<DiGraph> graphs{triple.original, triple.local_flip, triple.global_flip};
  for (auto metric : {MetricSpec::grd(), MetricSpec::htd(1.0)}) {
    PairwiseParams params;
    params.metric = metric;
    params.method = Method::kWasserstein;
    const auto w = pairwise_distances(graphs, params);
    params.method = Method::kGw;
    params.jobs = 3;
    const auto gw = pairwise_distances(graphs, params);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(w.distances(k, k), 0.0);
      EXPECT_EQ(gw.distances(k, k), 0.0);
      for (std::size_t l = 0; l < 3; ++l) {
        if (k == l) continue;
        EXPECT_NEAR(w.distances(k, l), wasserstein_distance(graphs, k, l, metric).distance, 1e-12);
        EXPECT_EQ(gw.distances(k, l), gw.distances(l, k));
        EXPECT_GT(gw.distances(k, l), 0.0);
      }
    }
  }
}

TEST(Pairwise, JobsDoNotChangeResults) {
  const auto ens = dsbm_ensemble({{DsbmSpec{{3, 3}, 0.5, 0.4, 0.9, {}, 5}, 4}});
  for (Method m : {Method::kWasserstein, Method::kGw}) {
    PairwiseParams params;
    params.method = m;
    params.metric = MetricSpec::htd(1.0);
    params.jobs = 1;
    const auto serial = pairwise_distances(ens.graphs, params);
    params.jobs = 4;
    const auto parallel = pairwise_distances(ens.graphs, params);
    EXPECT_EQ(serial.distances, parallel.distances);
  }
}

TEST(Pairwise, ErrorsNamePair) {
  Matrix w(2, 3);
  w << 1, 0, 1, 1, 0, 2;
  try {
    pairwise_wasserstein(w, Matrix::Zero(2, 2));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("pair (0, 1)"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace dgot
