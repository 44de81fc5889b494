#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dgot::cli {

namespace fs = std::filesystem;

struct MetricOptions {
  std::string metric = "grd";
  double beta = 1.0;
  double alpha = 0.85;
  bool force_alpha = false;
};

struct MetricArgs {
  fs::path graph;
  fs::path out;
  MetricOptions metric;
};

struct DistArgs {
  fs::path manifest;
  fs::path out;
  std::string method = "wasserstein";
  MetricOptions metric;
  std::uint64_t seed = 0;
  int gw_starts = 4;
  int gw_max_iter = 1000;
  int jobs = 1;
  double entropic_eps = 0.0;
};

struct ClusterArgs {
  std::vector<fs::path> dists;
  std::optional<fs::path> labels;
  std::optional<int> k;
  std::uint64_t seed = 0;
  int restarts = 8;
  std::string algorithm = "pam";
  std::optional<fs::path> out;
};

struct SynthArgs {
  fs::path spec;
  fs::path outdir;
  std::optional<std::uint64_t> seed;
};

struct DemoArgs {
  int n_cycles = 4;
  int cycle_len = 4;
  std::uint64_t seed = 0;
  int gw_starts = 4;
  double beta = 1.0;
  double alpha = 0.85;
  std::optional<fs::path> out;
};

void run_metric(const MetricArgs& args, std::ostream& log);
void run_dist(const DistArgs& args, std::ostream& log);
void run_cluster(const ClusterArgs& args, std::ostream& out, std::ostream& log);
void run_synth(const SynthArgs& args, std::ostream& log);
void run_demo_figure1(const DemoArgs& args, std::ostream& out, std::ostream& log);

}  // namespace dgot::cli
