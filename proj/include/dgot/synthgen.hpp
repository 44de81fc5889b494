#pragma once

#include "dgot/graph.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dgot {

/// n_cycles directed cycles of cycle_len unit edges; node 0 of cycle c links
/// to node 0 of cycle (c + 1) mod n_cycles. Labels are "c<cycle>n<node>".
DiGraph cycle_of_cycles(int n_cycles = 4, int cycle_len = 4);

/// Moves the weight of source -> target onto target -> source. Rejects a
/// missing edge or an occupied reverse edge.
DiGraph flip_edge(const DiGraph& g, const std::string& source, const std::string& target);

struct FlipTriple {
  DiGraph original;
  DiGraph local_flip;   ///< c0n1 -> c0n2 reversed
  DiGraph global_flip;  ///< c0n0 -> c1n0 reversed
};

/// The original graph and its two single-edge perturbations. Needs
/// n_cycles >= 3 and cycle_len >= 3 so that both reversed edges are free.
FlipTriple cycle_of_cycles_flips(int n_cycles = 4, int cycle_len = 4);

struct WeightDistribution {
  enum class Kind { kUnit, kUniform } kind = Kind::kUnit;
  double low = 1.0;
  double high = 1.0;
};

/// Directed stochastic block model. Ordered intra-block pairs carry an edge
/// with probability p_intra. Each unordered inter-block pair carries one
/// edge with probability p_inter, pointing from the lower to the higher
/// block with probability direction_bias.
struct DsbmSpec {
  std::vector<int> block_sizes;
  double p_intra = 0.0;
  double p_inter = 0.0;
  double direction_bias = 0.5;
  WeightDistribution weights;
  std::uint64_t seed = 0;

  /// Throws InputError naming the offending field.
  void validate() const;
  int node_count() const;
};

/// One DSBM draw. Nodes are labelled "n0".."n{N-1}" for every spec with the
/// same node count, so ensembles share a label vocabulary.
DiGraph dsbm_graph(const DsbmSpec& spec, std::uint64_t stream);

struct LabeledEnsemble {
  std::vector<DiGraph> graphs;
  std::vector<int> labels;
};

/// count graphs per spec, labelled by spec index. Graph i of spec s uses
/// random stream i of the spec's seed.
LabeledEnsemble dsbm_ensemble(const std::vector<std::pair<DsbmSpec, int>>& specs);

}  // namespace dgot
