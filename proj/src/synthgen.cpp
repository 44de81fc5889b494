#include "dgot/synthgen.hpp"

#include "dgot/error.hpp"
#include "dgot/rng.hpp"

#include <cmath>
#include <string>

namespace dgot {

DiGraph cycle_of_cycles(int n_cycles, int cycle_len) {
  if (n_cycles < 2) throw InputError("n_cycles must be at least 2");
  if (cycle_len < 2) throw InputError("cycle_len must be at least 2");
  const int n = n_cycles * cycle_len;
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n_cycles; ++c) {
    for (int i = 0; i < cycle_len; ++i) {
      labels.push_back("c" + std::to_string(c) + "n" + std::to_string(i));
    }
  }
  Matrix w = Matrix::Zero(n, n);
  for (int c = 0; c < n_cycles; ++c) {
    const int base = c * cycle_len;
    for (int i = 0; i < cycle_len; ++i) w(base + i, base + (i + 1) % cycle_len) += 1.0;
    w(base, ((c + 1) % n_cycles) * cycle_len) += 1.0;
  }
  return DiGraph(std::move(labels), std::move(w));
}

DiGraph flip_edge(const DiGraph& g, const std::string& source, const std::string& target) {
  const auto i = g.index_of(source);
  const auto j = g.index_of(target);
  if (i < 0 || j < 0 || !(g.weight(i, j) > 0.0)) {
    throw InputError("cannot flip missing edge " + source + "->" + target);
  }
  if (i == j) throw InputError("cannot flip self-loop on " + source);
  if (g.weight(j, i) > 0.0) {
    throw InputError("cannot flip " + source + "->" + target + ": reverse edge exists");
  }
  Matrix w = g.weights();
  w(j, i) = w(i, j);
  w(i, j) = 0.0;
  return DiGraph(g.labels(), std::move(w));
}

FlipTriple cycle_of_cycles_flips(int n_cycles, int cycle_len) {
  if (n_cycles < 3 || cycle_len < 3) {
    throw InputError("flip experiment needs n_cycles >= 3 and cycle_len >= 3");
  }
  FlipTriple t{cycle_of_cycles(n_cycles, cycle_len), {}, {}};
  t.local_flip = flip_edge(t.original, "c0n1", "c0n2");
  t.global_flip = flip_edge(t.original, "c0n0", "c1n0");
  return t;
}

void DsbmSpec::validate() const {
  if (block_sizes.size() < 2) throw InputError("block_sizes: at least 2 blocks required");
  for (int b : block_sizes) {
    if (b < 1) throw InputError("block_sizes: sizes must be positive");
  }
  auto prob = [](double x, const char* field) {
    if (!(x >= 0.0 && x <= 1.0)) throw InputError(std::string(field) + ": must lie in [0, 1]");
  };
  prob(p_intra, "p_intra");
  prob(p_inter, "p_inter");
  if (!(direction_bias >= 0.5 && direction_bias <= 1.0)) {
    throw InputError("direction_bias: must lie in [0.5, 1]");
  }
  if (weights.kind == WeightDistribution::Kind::kUniform &&
      !(weights.low > 0.0 && weights.high >= weights.low && std::isfinite(weights.high))) {
    throw InputError("weights: uniform bounds need 0 < low <= high");
  }
}

int DsbmSpec::node_count() const {
  int n = 0;
  for (int b : block_sizes) n += b;
  return n;
}

DiGraph dsbm_graph(const DsbmSpec& spec, std::uint64_t stream) {
  spec.validate();
  const int n = spec.node_count();
  std::vector<int> block;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b) {
    block.insert(block.end(), static_cast<std::size_t>(spec.block_sizes[b]), static_cast<int>(b));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  Rng rng(seq);
  auto draw_weight = [&] {
    if (spec.weights.kind == WeightDistribution::Kind::kUnit) return 1.0;
    return spec.weights.low + (spec.weights.high - spec.weights.low) * uniform01(rng);
  };
  Matrix w = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (block[i] == block[j]) {
        if (uniform01(rng) < spec.p_intra) w(i, j) = draw_weight();
      } else if (i < j) {
        if (uniform01(rng) < spec.p_inter) {
          const bool forward = uniform01(rng) < spec.direction_bias;
          // i sits in the lower block because blocks are laid out in order.
          if (forward) {
            w(i, j) = draw_weight();
          } else {
            w(j, i) = draw_weight();
          }
        }
      }
    }
  }
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels.push_back("n" + std::to_string(i));
  return DiGraph(std::move(labels), std::move(w));
}

LabeledEnsemble dsbm_ensemble(const std::vector<std::pair<DsbmSpec, int>>& specs) {
  if (specs.empty()) throw InputError("dsbm ensemble needs at least one spec");
  LabeledEnsemble out;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& [spec, count] = specs[s];
    if (count < 0) throw InputError("count must be nonnegative");
    for (int i = 0; i < count; ++i) {
      out.graphs.push_back(dsbm_graph(spec, static_cast<std::uint64_t>(i)));
      out.labels.push_back(static_cast<int>(s));
    }
  }
  return out;
}

}  // namespace dgot
