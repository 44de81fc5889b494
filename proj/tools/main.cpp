#include "commands.hpp"

#include "dgot/error.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace dgot::cli;

void add_metric_options(CLI::App* cmd, MetricOptions& m) {
  cmd->add_option("--metric", m.metric, "Node metric: grd or htd")
      ->check(CLI::IsMember({"grd", "htd"}))
      ->capture_default_str();
  cmd->add_option("--beta", m.beta, "HTD stationary weighting exponent")->capture_default_str();
  cmd->add_option("--alpha", m.alpha,
                  "Teleportation weight, applied only where a metric's reachability "
                  "precondition fails unless --force-alpha")
      ->capture_default_str();
  cmd->add_flag("--force-alpha", m.force_alpha, "Regularize every graph");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal-transport distances between directed weighted graphs"};
  app.require_subcommand(1);

  MetricArgs metric_args;
  auto* metric = app.add_subcommand("metric", "Node-to-node distance matrix of one graph");
  metric->add_option("--graph", metric_args.graph, "Edge list CSV")->required();
  metric->add_option("--out", metric_args.out, "Output CSV (a .json sidecar is written too)")
      ->required();
  add_metric_options(metric, metric_args.metric);

  DistArgs dist_args;
  auto* dist = app.add_subcommand("dist", "Pairwise graph distances for a manifest");
  dist->add_option("--manifest", dist_args.manifest, "Manifest JSON")->required();
  dist->add_option("--out", dist_args.out, "Output CSV (a .json sidecar is written too)")->required();
  dist->add_option("--method", dist_args.method,
                   "wasserstein, gw, pca, correlation, correlation-raw or frobenius")
      ->check(CLI::IsMember({"wasserstein", "gw", "pca", "correlation", "correlation-raw", "frobenius"}))
      ->capture_default_str();
  add_metric_options(dist, dist_args.metric);
  dist->add_option("--seed", dist_args.seed, "Seed for GW random starts")->capture_default_str();
  dist->add_option("--gw-starts", dist_args.gw_starts, "GW initializations per direction")
      ->capture_default_str();
  dist->add_option("--gw-max-iter", dist_args.gw_max_iter, "GW iteration cap")->capture_default_str();
  dist->add_option("--jobs", dist_args.jobs, "Worker threads")->capture_default_str();
  dist->add_option("--entropic-eps", dist_args.entropic_eps,
                   "Sinkhorn smoothing for wasserstein and correlation (0 = exact EMD)")
      ->capture_default_str();

  ClusterArgs cluster_args;
  auto* clus = app.add_subcommand("cluster", "Cluster graphs from distance matrices and score ARI");
  clus->add_option("--dist", cluster_args.dists, "Distance CSV (repeatable)")->required();
  clus->add_option("--labels,--manifest", cluster_args.labels, "Manifest carrying true labels");
  clus->add_option("--k", cluster_args.k, "Number of clusters (default: number of labels)");
  clus->add_option("--seed", cluster_args.seed, "Seed for restarts")->capture_default_str();
  clus->add_option("--restarts", cluster_args.restarts, "Initializations")->capture_default_str();
  clus->add_option("--algorithm", cluster_args.algorithm, "pam or mds-kmeans")
      ->check(CLI::IsMember({"pam", "mds-kmeans"}))
      ->capture_default_str();
  clus->add_option("--out", cluster_args.out, "Results JSON");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate synthetic graphs from a spec");
  synth->add_option("--spec", synth_args.spec, "Spec JSON")->required();
  synth->add_option("--outdir", synth_args.outdir, "Output directory")->required();
  synth->add_option("--seed", synth_args.seed, "Override the spec's seed");

  DemoArgs demo_args;
  auto* demo = app.add_subcommand("demo-figure1", "Cycle-of-cycles local vs global flip table");
  demo->add_option("--n-cycles", demo_args.n_cycles)->capture_default_str();
  demo->add_option("--cycle-len", demo_args.cycle_len)->capture_default_str();
  demo->add_option("--seed", demo_args.seed)->capture_default_str();
  demo->add_option("--gw-starts", demo_args.gw_starts)->capture_default_str();
  demo->add_option("--beta", demo_args.beta)->capture_default_str();
  demo->add_option("--alpha", demo_args.alpha)->capture_default_str();
  demo->add_option("--out", demo_args.out, "Also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*metric) run_metric(metric_args, std::cerr);
    if (*dist) run_dist(dist_args, std::cerr);
    if (*clus) run_cluster(cluster_args, std::cout, std::cerr);
    if (*synth) run_synth(synth_args, std::cerr);
    if (*demo) run_demo_figure1(demo_args, std::cout, std::cerr);
  } catch (const dgot::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
