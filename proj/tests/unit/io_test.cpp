#include "dgot/error.hpp"
#include "dgot/io.hpp"
#include "dgot/synthgen.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace dgot {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dgot_io_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    io::parse_edge_list(in, "g.csv");
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

TEST(EdgeListIo, ParsesCommentsBlanksAndWhitespace) {
  std::istringstream in("# header follows\nsource,target,weight\n\na, b ,1.5\n# note\nb,a,2e-1\n");
  const auto rows = io::parse_edge_list(in);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].source, "a");
  EXPECT_EQ(rows[0].target, "b");
  EXPECT_EQ(rows[1].weight, 0.2);
}

TEST(EdgeListIo, ErrorsNameTheLine) {
  EXPECT_NE(error_of("a,b,1\n").find("g.csv:1"), std::string::npos);
  EXPECT_NE(error_of("source,target,weight\na,b\n").find("g.csv:2"), std::string::npos);
  EXPECT_NE(error_of("source,target,weight\na,b,1\na,c,-1\n").find("g.csv:3: negative"),
            std::string::npos);
  EXPECT_NE(error_of("source,target,weight\na,b,x\n").find("unparseable"), std::string::npos);
  EXPECT_NE(error_of("source,target,weight\na,b,nan\n").find("unparseable"), std::string::npos);
  EXPECT_NE(error_of("").find("missing header"), std::string::npos);
}

TEST(EdgeListIo, MissingFileNamesPath) {
  try {
    io::read_edge_list("/nonexistent/dir/g.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/g.csv"), std::string::npos);
  }
}

TEST(EdgeListIo, ExactByteLayout) {
  const DiGraph g = from_edge_list({{"a", "b", 1}, {"b", "c", 0.1}, {"c", "a", 2.5}});
  std::ostringstream out;
  io::write_edge_list(out, g);
  EXPECT_EQ(out.str(), "source,target,weight\na,b,1\nb,c,0.1\nc,a,2.5\n");
}

TEST(EdgeListIo, RoundTripRandomGraphsBitExact) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("x" + std::to_string(rng() % 1000) + "_" + std::to_string(i));
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (u(rng) < 0.3) w(i, j) = u(rng) * std::pow(10.0, static_cast<int>(rng() % 9) - 4);
    const DiGraph g(labels, w);
    std::ostringstream out;
    io::write_edge_list(out, g);
    std::istringstream in(out.str());
    const auto rows = io::parse_edge_list(in);
    const DiGraph back = from_edge_list(rows);
    ASSERT_EQ(back.labels(), g.labels()) << out.str();
    ASSERT_EQ(back.weights(), g.weights()) << out.str();
  }
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.1");
  EXPECT_EQ(io::format_double(1.0), "1");
  EXPECT_EQ(io::format_double(0.0), "0");
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
  }
}

TEST(ManifestIo, RoundTripAndRelativePaths) {
  const fs::path dir = scratch("manifest");
  io::write_manifest(dir / "m.json", {{"g0", "graphs/g0.csv", std::string("0")},
                                      {"g1", "graphs/g1.csv", std::nullopt}});
  const auto entries = io::read_manifest(dir / "m.json");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].id, "g0");
  EXPECT_EQ(entries[0].path, dir / "graphs/g0.csv");
  EXPECT_EQ(entries[0].label, std::optional<std::string>("0"));
  EXPECT_FALSE(entries[1].label.has_value());
}

TEST(ManifestIo, IntegerLabelsAndErrors) {
  const fs::path dir = scratch("manifest_err");
  std::ofstream(dir / "ok.json") << R"({"graphs":[{"id":"a","path":"/abs/a.csv","label":3}]})";
  const auto entries = io::read_manifest(dir / "ok.json");
  EXPECT_EQ(entries[0].path, fs::path("/abs/a.csv"));
  EXPECT_EQ(entries[0].label, std::optional<std::string>("3"));
  std::ofstream(dir / "bad.json") << R"({"graphs":[{"id":"a"}]})";
  EXPECT_THROW(io::read_manifest(dir / "bad.json"), InputError);
  std::ofstream(dir / "junk.json") << "{not json";
  EXPECT_THROW(io::read_manifest(dir / "junk.json"), InputError);
  EXPECT_THROW(io::read_manifest(dir / "absent.json"), InputError);
}

TEST(MatrixIo, RoundTripBitExact) {
  const fs::path dir = scratch("matrix");
  Matrix m(3, 3);
  m << 0, 1.0 / 3.0, 2e-17, 0.1, 0, 12345.678, 1e300, 5e-324, 0;
  io::write_matrix_csv(dir / "d.csv", {"a", "b", "c"}, m);
  const auto back = io::read_matrix_csv(dir / "d.csv");
  EXPECT_EQ(back.ids, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(back.values, m);
  EXPECT_EQ(slurp(dir / "d.csv").substr(0, 9), "id,a,b,c\n");
}

TEST(MatrixIo, RejectsMalformed) {
  const fs::path dir = scratch("matrix_bad");
  std::ofstream(dir / "short.csv") << "id,a,b\na,0,1\n";
  EXPECT_THROW(io::read_matrix_csv(dir / "short.csv"), InputError);
  std::ofstream(dir / "order.csv") << "id,a,b\nb,0,1\na,1,0\n";
  EXPECT_THROW(io::read_matrix_csv(dir / "order.csv"), InputError);
  std::ofstream(dir / "value.csv") << "id,a\na,zero\n";
  EXPECT_THROW(io::read_matrix_csv(dir / "value.csv"), InputError);
}

TEST(DistanceMatrixIo, SidecarCarriesMetricAndAlpha) {
  const fs::path dir = scratch("sidecar");
  const auto t = cycle_of_cycles_flips(4, 4);
  const DistanceMatrix d = node_distances(t.local_flip, MetricSpec::htd(1.0));
  io::write_distance_matrix(dir / "htd.csv", d);
  const std::string meta = slurp(dir / "htd.json");
  EXPECT_NE(meta.find("\"metric_kind\": \"HTD\""), std::string::npos) << meta;
  EXPECT_NE(meta.find("\"alpha\": 0.85"), std::string::npos) << meta;
  EXPECT_NE(meta.find("\"beta\": 1.0"), std::string::npos) << meta;
  EXPECT_EQ(io::read_matrix_csv(dir / "htd.csv").values, d.values);
}

}  // namespace
}  // namespace dgot
