#include "dgot/error.hpp"
#include "dgot/graph.hpp"
#include "dgot/io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace dgot {
namespace {

DiGraph make(const std::vector<EdgeRow>& rows) { return from_edge_list(rows); }

TEST(FromEdgeList, BidirectionalPair) {
  const DiGraph g = make({{"a", "b", 1.0}, {"b", "a", 1.0}});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.labels(), (std::vector<std::string>{"a", "b"}));
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_EQ(g.weights(), expected);
}

TEST(FromEdgeList, EmptyIsRejected) {
  try {
    from_edge_list({});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("empty graph"), std::string::npos);
  }
}

TEST(FromEdgeList, DuplicateRowsSum) {
  const DiGraph g = make({{"a", "b", 0.5}, {"a", "b", 0.5}});
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(0, 1), 1.0);
}

TEST(FromEdgeList, NegativeWeightNamesRow) {
  try {
    make({{"a", "b", 1.0}, {"b", "c", -2.0}});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(FromEdgeList, LabelsInFirstAppearanceOrderAndSelfLoopsKept) {
  const DiGraph g = make({{"z", "y", 1.0}, {"x", "x", 2.0}, {"y", "z", 1.0}});
  EXPECT_EQ(g.labels(), (std::vector<std::string>{"z", "y", "x"}));
  EXPECT_DOUBLE_EQ(g.weight(2, 2), 2.0);
}

TEST(Reachability, Examples) {
  const auto cycle = analyze_reachability(make({{"a", "b", 1}, {"b", "c", 1}, {"c", "a", 1}}));
  EXPECT_TRUE(cycle.strongly_connected);
  EXPECT_TRUE(cycle.has_globally_reachable_node);

  const auto path = analyze_reachability(make({{"a", "b", 1}, {"b", "c", 1}}));
  EXPECT_FALSE(path.strongly_connected);
  EXPECT_TRUE(path.has_globally_reachable_node);

  const auto two = analyze_reachability(
      make({{"a", "b", 1}, {"b", "a", 1}, {"c", "d", 1}, {"d", "c", 1}}));
  EXPECT_FALSE(two.strongly_connected);
  EXPECT_FALSE(two.has_globally_reachable_node);
}

TEST(Reachability, ZeroWeightEdgesDoNotConnect) {
  const auto r = analyze_reachability(make({{"a", "b", 1}, {"b", "a", 0}}));
  EXPECT_FALSE(r.strongly_connected);
  EXPECT_TRUE(r.has_globally_reachable_node);
}

TEST(Reachability, AgreesWithTransitiveClosure) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int cases = 0;
  for (int n = 1; n <= 5; ++n) {
    for (int rep = 0; rep < 300; ++rep, ++cases) {
      const double density = unif(rng);
      Matrix w = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (unif(rng) < density) w(i, j) = 1.0;
        }
      }
      std::vector<std::string> labels;
      for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
      const auto got = analyze_reachability(DiGraph(labels, w));
      const auto reach = oracle::transitive_closure(w);
      bool strong = true, global = false;
      for (int j = 0; j < n; ++j) {
        bool all_reach_j = true;
        for (int i = 0; i < n; ++i) {
          strong = strong && reach[i][j];
          all_reach_j = all_reach_j && reach[i][j];
        }
        global = global || all_reach_j;
      }
      ASSERT_EQ(got.strongly_connected, strong) << "n=" << n << " rep=" << rep;
      ASSERT_EQ(got.has_globally_reachable_node, global) << "n=" << n << " rep=" << rep;
      if (got.strongly_connected) ASSERT_TRUE(got.has_globally_reachable_node);
    }
  }
  EXPECT_GE(cases, 1000);
}

TEST(Regularize, AlphaOneIsRowNormalization) {
  const DiGraph g = make({{"a", "b", 2}, {"b", "c", 4}, {"c", "a", 1}, {"c", "b", 3}});
  const DiGraph r = regularize(g, 1.0);
  EXPECT_DOUBLE_EQ(r.weight(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(r.weight(2, 0), 0.25);
  EXPECT_DOUBLE_EQ(r.weight(2, 1), 0.75);
  EXPECT_TRUE(analyze_reachability(r).strongly_connected);
}

TEST(Regularize, DanglingPathMixing) {
  const DiGraph r = regularize(make({{"a", "b", 1}}), 0.85);
  EXPECT_NEAR(r.weight(0, 0), 0.075, 1e-15);
  EXPECT_NEAR(r.weight(0, 1), 0.925, 1e-15);
  EXPECT_NEAR(r.weight(1, 0), 0.5, 1e-15);
  EXPECT_NEAR(r.weight(1, 1), 0.5, 1e-15);
  const auto reach = analyze_reachability(r);
  EXPECT_TRUE(reach.strongly_connected);
  EXPECT_TRUE(reach.has_globally_reachable_node);
}

TEST(Regularize, RejectsAlphaOutOfRange) {
  const DiGraph g = make({{"a", "b", 1}});
  EXPECT_THROW(regularize(g, 0.0), InputError);
  EXPECT_THROW(regularize(g, 1.5), InputError);
}

TEST(Regularize, RowsSumToOneOnRandomGraphs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + rep % 7;
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (unif(rng) < 0.3) w(i, j) = 10.0 * unif(rng);
      }
    }
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
    const double alpha = 0.05 + 0.9 * unif(rng);
    const DiGraph r = regularize(DiGraph(labels, w), alpha);
    for (int i = 0; i < n; ++i) ASSERT_NEAR(r.weights().row(i).sum(), 1.0, 1e-12);
    ASSERT_TRUE(analyze_reachability(r).strongly_connected);
  }
}

TEST(EdgeListIo, RoundTripIsIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<EdgeRow> rows;
    const int n = 2 + rep % 9;
    const int m = 1 + static_cast<int>(unif(rng) * 3 * n);
    for (int e = 0; e < m; ++e) {
      rows.push_back({"n" + std::to_string(static_cast<int>(unif(rng) * n)),
                      "n" + std::to_string(static_cast<int>(unif(rng) * n)),
                      unif(rng) < 0.1 ? 0.0 : unif(rng) * 1e3});
    }
    const DiGraph g = from_edge_list(rows);
    std::stringstream buf;
    io::write_edge_list(buf, g);
    const DiGraph back = from_edge_list(io::parse_edge_list(buf));
    ASSERT_EQ(back.labels(), g.labels()) << buf.str();
    ASSERT_EQ(back.weights(), g.weights()) << buf.str();
  }
}

}  // namespace
}  // namespace dgot
