#include "commands.hpp"

#include "dgot/ensemble.hpp"
#include "dgot/error.hpp"
#include "dgot/eval.hpp"
#include "dgot/io.hpp"
#include "dgot/synthgen.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace dgot::cli {

using nlohmann::json;

namespace {

MetricSpec parse_metric(const MetricOptions& m) {
  if (m.metric == "grd") return MetricSpec::grd();
  if (m.metric == "htd") return MetricSpec::htd(m.beta);
  throw InputError("--metric must be grd or htd, got '" + m.metric + "'");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
}

json metric_json(const MetricSpec& m) {
  return {{"kind", m.kind == MetricKind::kGrd ? "GRD" : "HTD"},
          {"name", m.name()},
          {"beta", m.kind == MetricKind::kHtd ? json(m.beta) : json(nullptr)}};
}

void write_json(const fs::path& path, const json& doc) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

std::optional<json> read_json_if_present(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
}

struct LoadedEnsemble {
  std::vector<std::string> ids;
  std::vector<DiGraph> graphs;
};

LoadedEnsemble load_manifest(const fs::path& manifest) {
  LoadedEnsemble out;
  std::set<std::string> seen;
  for (const auto& e : io::read_manifest(manifest)) {
    if (!seen.insert(e.id).second) {
      throw InputError(manifest.string() + ": duplicate graph id '" + e.id + "'");
    }
    out.ids.push_back(e.id);
    out.graphs.push_back(io::read_edge_list(e.path));
  }
  if (out.graphs.size() < 2) throw InputError(manifest.string() + ": need at least 2 graphs");
  return out;
}

// Library errors name pairs and graphs by position; swap in manifest ids.
std::string with_ids(const std::string& msg, const std::vector<std::string>& ids) {
  static const std::regex pattern(R"(pair \((\d+), (\d+)\)|graph (\d+)\b)");
  auto id = [&](const std::string& digits) {
    const auto i = std::stoul(digits);
    return i < ids.size() ? "'" + ids[i] + "'" : digits;
  };
  std::string out;
  auto begin = std::sregex_iterator(msg.begin(), msg.end(), pattern);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out += msg.substr(last, static_cast<std::size_t>(m.position()) - last);
    if (m[1].matched) {
      out += "graphs " + id(m[1].str()) + " and " + id(m[2].str());
    } else {
      out += "graph " + id(m[3].str());
    }
    last = static_cast<std::size_t>(m.position() + m.length());
  }
  return out + msg.substr(last);
}

template <typename F>
auto translating_ids(const std::vector<std::string>& ids, F&& fn) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(with_ids(e.what(), ids));
  } catch (const NumericalError& e) {
    throw NumericalError(with_ids(e.what(), ids) +
                         "\nhint: rerun with --force-alpha to regularize every graph"
                         " (strength set by --alpha)");
  }
}

void log_warnings(std::ostream& log, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) log << "warning: " << w << '\n';
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// ---- synth spec parsing ----

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw InputError(where + key + ": unknown field");
  }
}

double number_field(const json& obj, const std::string& key, const std::string& where,
                    std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw InputError(where + key + ": required");
  }
  if (!obj[key].is_number()) throw InputError(where + key + ": must be a number");
  return obj[key].get<double>();
}

std::int64_t int_field(const json& obj, const std::string& key, const std::string& where,
                       std::optional<std::int64_t> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw InputError(where + key + ": required");
  }
  if (!obj[key].is_number_integer()) throw InputError(where + key + ": must be an integer");
  return obj[key].get<std::int64_t>();
}

WeightDistribution parse_weights(const json& obj, const std::string& where) {
  WeightDistribution w;
  if (!obj.contains("weights")) return w;
  const json& spec = obj["weights"];
  const std::string at = where + "weights.";
  if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
    throw InputError(where + "weights: must be an object with a string 'kind'");
  }
  reject_unknown(spec, at, {"kind", "low", "high"});
  const std::string kind = spec["kind"].get<std::string>();
  if (kind == "unit") return w;
  if (kind != "uniform") throw InputError(at + "kind: must be 'unit' or 'uniform'");
  w.kind = WeightDistribution::Kind::kUniform;
  w.low = number_field(spec, "low", at);
  w.high = number_field(spec, "high", at);
  return w;
}

struct SynthOutput {
  std::vector<io::ManifestEntry> entries;
  std::vector<DiGraph> graphs;
};

SynthOutput synth_cycles(const json& spec) {
  reject_unknown(spec, "spec.", {"kind", "n_cycles", "cycle_len", "seed"});
  const auto n = int_field(spec, "n_cycles", "spec.", 4);
  const auto len = int_field(spec, "cycle_len", "spec.", 4);
  if (n < 3) throw InputError("spec.n_cycles: the flip experiment needs at least 3");
  if (len < 3) throw InputError("spec.cycle_len: the flip experiment needs at least 3");
  const auto t = cycle_of_cycles_flips(static_cast<int>(n), static_cast<int>(len));
  SynthOutput out;
  for (const auto& [id, g] : {std::pair{"original", &t.original}, std::pair{"local_flip", &t.local_flip},
                              std::pair{"global_flip", &t.global_flip}}) {
    out.entries.push_back({id, std::string(id) + ".csv", std::nullopt});
    out.graphs.push_back(*g);
  }
  return out;
}

SynthOutput synth_dsbm(const json& spec, std::optional<std::uint64_t> seed_override) {
  reject_unknown(spec, "spec.", {"kind", "seed", "classes"});
  std::uint64_t seed = static_cast<std::uint64_t>(int_field(spec, "seed", "spec.", 0));
  if (seed_override) seed = *seed_override;
  if (!spec.contains("classes") || !spec["classes"].is_array() || spec["classes"].empty()) {
    throw InputError("spec.classes: must be a nonempty array");
  }
  std::vector<std::pair<DsbmSpec, int>> classes;
  for (std::size_t c = 0; c < spec["classes"].size(); ++c) {
    const json& cls = spec["classes"][c];
    const std::string where = "spec.classes[" + std::to_string(c) + "].";
    if (!cls.is_object()) throw InputError(where.substr(0, where.size() - 1) + ": must be an object");
    reject_unknown(cls, where,
                   {"count", "block_sizes", "p_intra", "p_inter", "direction_bias", "weights", "seed"});
    DsbmSpec d;
    if (!cls.contains("block_sizes") || !cls["block_sizes"].is_array()) {
      throw InputError(where + "block_sizes: must be an array of positive integers");
    }
    for (const auto& b : cls["block_sizes"]) {
      if (!b.is_number_integer()) throw InputError(where + "block_sizes: must be an array of positive integers");
      d.block_sizes.push_back(b.get<int>());
    }
    d.p_intra = number_field(cls, "p_intra", where);
    d.p_inter = number_field(cls, "p_inter", where);
    d.direction_bias = number_field(cls, "direction_bias", where, 0.5);
    d.weights = parse_weights(cls, where);
    d.seed = cls.contains("seed") ? static_cast<std::uint64_t>(int_field(cls, "seed", where))
                                  : splitmix64(seed ^ splitmix64(c));
    const auto count = int_field(cls, "count", where);
    if (count < 1) throw InputError(where + "count: must be positive");
    try {
      d.validate();
    } catch (const InputError& e) {
      throw InputError(where + e.what());
    }
    classes.emplace_back(d, static_cast<int>(count));
  }
  const auto ens = dsbm_ensemble(classes);
  SynthOutput out;
  const std::size_t width = std::to_string(ens.graphs.size() - 1).size();
  for (std::size_t i = 0; i < ens.graphs.size(); ++i) {
    std::string num = std::to_string(i);
    num.insert(0, width - num.size(), '0');
    const std::string id = "g" + num;
    out.entries.push_back({id, "graphs/" + id + ".csv", std::to_string(ens.labels[i])});
    out.graphs.push_back(ens.graphs[i]);
  }
  return out;
}

struct DistOutcome {
  Matrix distances;
  json meta;
  std::vector<std::string> warnings;
};

void check_entropic(const DistArgs& args) {
  if (!(args.entropic_eps >= 0.0) || !std::isfinite(args.entropic_eps)) {
    throw InputError("--entropic-eps must be a finite value >= 0");
  }
  if (args.entropic_eps > 0.0 && args.method == "gw") {
    throw InputError("--entropic-eps applies to wasserstein and correlation only");
  }
}

DistOutcome compute_distances(const LoadedEnsemble& ens, const DistArgs& args) {
  DistOutcome out;
  out.meta = {{"method", args.method}, {"seed", args.seed}};
  const bool ot = args.method == "wasserstein" || args.method == "gw";
  if (ot) {
    check_alpha(args.metric.alpha);
    if (args.gw_starts < 1) throw InputError("--gw-starts must be positive");
    if (args.jobs < 1) throw InputError("--jobs must be positive");
    check_entropic(args);
    PairwiseParams params;
    params.method = args.method == "gw" ? Method::kGw : Method::kWasserstein;
    params.metric = parse_metric(args.metric);
    params.alpha = args.metric.alpha;
    params.force_alpha = args.metric.force_alpha;
    params.gw.seed = args.seed;
    params.gw.n_starts = args.gw_starts;
    params.gw.max_iter = args.gw_max_iter;
    params.jobs = args.jobs;
    params.entropic_epsilon = args.method == "wasserstein" ? args.entropic_eps : 0.0;
    const auto res = translating_ids(ens.ids, [&] { return pairwise_distances(ens.graphs, params); });
    out.distances = res.distances;
    out.warnings = res.warnings;
    json regularized = json::array();
    for (auto k : res.regularized) {
      regularized.push_back(params.method == Method::kGw ? json(ens.ids[k]) : json("line_graph"));
    }
    json non_converged = json::array();
    for (auto [k, l] : res.non_converged) non_converged.push_back({ens.ids[k], ens.ids[l]});
    out.meta["metric"] = metric_json(params.metric);
    out.meta["alpha"] = args.metric.alpha;
    out.meta["force_alpha"] = args.metric.force_alpha;
    out.meta["regularized"] = regularized;
    out.meta["max_asymmetry"] = res.max_asymmetry;
    out.meta["non_converged"] = non_converged;
    if (params.method == Method::kGw) {
      out.meta["gw_starts"] = args.gw_starts;
      out.meta["gw_max_iter"] = args.gw_max_iter;
    } else {
      out.meta["line_graph_nodes"] = res.line_graph_nodes;
      out.meta["entropic_eps"] = args.entropic_eps;
    }
  } else {
    out.meta["metric"] = nullptr;
    const auto p = static_cast<Eigen::Index>(ens.graphs.size());
    if (args.method == "frobenius") {
      out.distances = Matrix::Zero(p, p);
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j)
          out.distances(i, j) = out.distances(j, i) = frobenius_distance(ens.graphs[i], ens.graphs[j]);
    } else {
      const auto edges = translating_ids(ens.ids, [&] { return build_ensemble(ens.graphs); });
      out.warnings = edges.warnings;
      if (args.method == "pca") {
        out.distances = pca_baseline(edges.weights);
      } else if (args.method == "correlation") {
        check_entropic(args);
        const Matrix cost = correlation_cost(edges.weights, &out.warnings);
        const auto res = translating_ids(ens.ids, [&] {
          return pairwise_wasserstein(edges.weights, cost, args.jobs, args.entropic_eps);
        });
        out.distances = res.distances;
        out.meta["max_asymmetry"] = res.max_asymmetry;
        out.meta["entropic_eps"] = args.entropic_eps;
        json non_converged = json::array();
        for (auto [k, l] : res.non_converged) non_converged.push_back({ens.ids[k], ens.ids[l]});
        out.meta["non_converged"] = non_converged;
      } else if (args.method == "correlation-raw") {
        out.distances = correlation_sample_distances(edges.weights);
      } else {
        throw InputError("--method must be one of wasserstein, gw, pca, correlation, "
                         "correlation-raw, frobenius; got '" + args.method + "'");
      }
    }
  }
  out.meta["warnings"] = out.warnings;
  return out;
}

std::string fixed(double x, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

void run_metric(const MetricArgs& args, std::ostream& log) {
  check_alpha(args.metric.alpha);
  const DiGraph g = io::read_edge_list(args.graph);
  const DistanceMatrix d = node_distances(g, parse_metric(args.metric), args.metric.alpha,
                                          args.metric.force_alpha);
  log_warnings(log, d.warnings);
  io::write_distance_matrix(args.out, d);
}

void run_dist(const DistArgs& args, std::ostream& log) {
  const LoadedEnsemble ens = load_manifest(args.manifest);
  const DistOutcome res = compute_distances(ens, args);
  log_warnings(log, res.warnings);
  io::write_matrix_csv(args.out, ens.ids, res.distances);
  write_json(io::sidecar_path(args.out), res.meta);
}

void run_cluster(const ClusterArgs& args, std::ostream& out, std::ostream& log) {
  if (args.dists.empty()) throw InputError("at least one --dist is required");
  ClusterAlgorithm algorithm = ClusterAlgorithm::kPam;
  if (args.algorithm == "mds-kmeans") {
    algorithm = ClusterAlgorithm::kMdsKmeans;
  } else if (args.algorithm != "pam") {
    throw InputError("--algorithm must be pam or mds-kmeans");
  }
  std::map<std::string, std::string> truth_by_id;
  std::size_t n_classes = 0;
  if (args.labels) {
    std::set<std::string> classes;
    for (const auto& e : io::read_manifest(*args.labels)) {
      if (!e.label) throw InputError(args.labels->string() + ": graph '" + e.id + "' has no label");
      truth_by_id[e.id] = *e.label;
      classes.insert(*e.label);
    }
    n_classes = classes.size();
  }
  if (!args.k && !args.labels) throw InputError("--k is required when --labels is not given");
  const int k = args.k ? *args.k : static_cast<int>(n_classes);

  json results = json::array();
  out << pad("method", 18) << pad("metric", 10) << pad("k", 4) << "ARI\n";
  for (const auto& path : args.dists) {
    const auto m = io::read_matrix_csv(path);
    std::string method = path.stem().string();
    json metric = nullptr;
    if (const auto meta = read_json_if_present(io::sidecar_path(path))) {
      if (meta->contains("method")) method = (*meta)["method"].get<std::string>();
      if (meta->contains("metric")) metric = (*meta)["metric"];
    }
    std::optional<Partition> truth;
    if (args.labels) {
      std::map<std::string, int> code;
      Partition t;
      for (const auto& id : m.ids) {
        const auto it = truth_by_id.find(id);
        if (it == truth_by_id.end()) {
          throw InputError(path.string() + ": id '" + id + "' has no label in " + args.labels->string());
        }
        t.labels.push_back(code.emplace(it->second, static_cast<int>(code.size())).first->second);
      }
      truth = t;
    }
    const Clustering c = cluster(m.values, k, args.seed, args.restarts, algorithm);
    for (const auto& w : c.warnings) log << "warning: " << path.string() << ": " << w << '\n';
    json medoids = json::array();
    for (auto i : c.medoids) medoids.push_back(m.ids[i]);
    json r = {{"method", method},
              {"metric", metric.is_object() && metric.contains("name") ? metric["name"] : json(nullptr)},
              {"k", k},
              {"seed", args.seed},
              {"ari", truth ? json(ari(c.partition, *truth)) : json(nullptr)},
              {"labels", c.partition.labels},
              {"medoids", medoids},
              {"ids", m.ids},
              {"algorithm", args.algorithm},
              {"restarts", args.restarts},
              {"cost", c.cost},
              {"source", path.generic_string()},
              {"warnings", c.warnings}};
    const std::string metric_name = r["metric"].is_string() ? r["metric"].get<std::string>() : "-";
    out << pad(method, 18) << pad(metric_name, 10) << pad(std::to_string(k), 4)
        << (truth ? fixed(r["ari"].get<double>()) : "-") << '\n';
    results.push_back(std::move(r));
  }
  if (args.out) write_json(*args.out, results.size() == 1 ? results[0] : results);
}

void run_synth(const SynthArgs& args, std::ostream& log) {
  const auto spec = read_json_if_present(args.spec);
  if (!spec) throw InputError("cannot open '" + args.spec.string() + "'");
  if (!spec->is_object() || !spec->contains("kind") || !(*spec)["kind"].is_string()) {
    throw InputError("spec.kind: required, one of cycle_of_cycles, dsbm");
  }
  const std::string kind = (*spec)["kind"].get<std::string>();
  SynthOutput out;
  if (kind == "cycle_of_cycles") {
    out = synth_cycles(*spec);
  } else if (kind == "dsbm") {
    out = synth_dsbm(*spec, args.seed);
  } else {
    throw InputError("spec.kind: must be cycle_of_cycles or dsbm, got '" + kind + "'");
  }
  for (std::size_t i = 0; i < out.graphs.size(); ++i) {
    io::write_edge_list(args.outdir / out.entries[i].path, out.graphs[i]);
  }
  io::write_manifest(args.outdir / "manifest.json", out.entries);
  log << "wrote " << out.graphs.size() << " graphs and " << (args.outdir / "manifest.json").string()
      << '\n';
}

void run_demo_figure1(const DemoArgs& args, std::ostream& out, std::ostream& log) {
  check_alpha(args.alpha);
  const auto t = cycle_of_cycles_flips(args.n_cycles, args.cycle_len);
  const std::vector<DiGraph> graphs{t.original, t.local_flip, t.global_flip};
  const std::vector<std::string> ids{"original", "local_flip", "global_flip"};
  struct Column {
    std::string name;
    Matrix d;
  };
  std::vector<Column> columns;
  for (Method method : {Method::kWasserstein, Method::kGw}) {
    for (const MetricSpec& metric : {MetricSpec::grd(), MetricSpec::htd(args.beta)}) {
      PairwiseParams params;
      params.method = method;
      params.metric = metric;
      params.alpha = args.alpha;
      params.gw.seed = args.seed;
      params.gw.n_starts = args.gw_starts;
      const auto res = translating_ids(ids, [&] { return pairwise_distances(graphs, params); });
      for (const auto& w : res.warnings) log << "warning: " << w << '\n';
      columns.push_back({std::string(method == Method::kGw ? "GW-" : "W-") + metric.name(), res.distances});
    }
  }
  Matrix frob = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) frob(i, j) = frobenius_distance(graphs[i], graphs[j]);
  columns.push_back({"Frobenius", frob});

  const std::vector<std::pair<int, int>> rows{{0, 1}, {0, 2}, {1, 2}};
  std::ostringstream csv;
  out << pad("pair", 26);
  csv << "pair";
  for (const auto& c : columns) {
    out << pad(c.name, 13);
    csv << ',' << c.name;
  }
  out << '\n';
  csv << '\n';
  for (auto [i, j] : rows) {
    const std::string name = ids[i] + " vs " + ids[j];
    out << pad(name, 26);
    csv << ids[i] << " vs " << ids[j];
    for (const auto& c : columns) {
      out << pad(fixed(c.d(i, j)), 13);
      csv << ',' << io::format_double(c.d(i, j));
    }
    out << '\n';
    csv << '\n';
  }
  // Relative gap between the two perturbations as seen from the original.
  out << pad("relative gap local/global", 26);
  for (const auto& c : columns) {
    const double a = c.d(0, 1), b = c.d(0, 2);
    out << pad(fixed(std::abs(a - b) / std::max(a, b)), 13);
  }
  out << '\n';
  if (args.out) {
    std::ofstream f(*args.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + args.out->string() + "'");
    f << csv.str();
  }
}

}  // namespace dgot::cli
