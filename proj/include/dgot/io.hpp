#pragma once

#include "dgot/graph.hpp"
#include "dgot/node_metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dgot::io {

/// Parses `source,target,weight` CSV. A header line is required; blank lines
/// and lines starting with '#' are skipped. Errors name the line number.
std::vector<EdgeRow> parse_edge_list(std::istream& in, const std::string& origin = "<stream>");
DiGraph read_edge_list(const std::filesystem::path& path);

/// Writes g so that reading it back reproduces labels (in order) and weights
/// bit-exactly. Nodes not yet introduced by an edge row are declared with a
/// self-loop row carrying their (possibly zero) self-loop weight.
void write_edge_list(std::ostream& out, const DiGraph& g);
void write_edge_list(const std::filesystem::path& path, const DiGraph& g);

struct ManifestEntry {
  std::string id;
  std::filesystem::path path;  ///< resolved against the manifest directory
  std::optional<std::string> label;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

struct LabeledMatrix {
  std::vector<std::string> ids;
  Matrix values;
};

/// Square matrix CSV: header `id,<ids...>`, then one row per id.
void write_matrix_csv(std::ostream& out, const std::vector<std::string>& ids, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                      const Matrix& m);
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

/// Rectangular CSV for transport plans: header `,<col ids>`.
void write_plan_csv(const std::filesystem::path& path, const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids, const Matrix& gamma);

/// Node distance matrix CSV plus `<stem>.json` sidecar with metric_kind,
/// beta and alpha.
void write_distance_matrix(const std::filesystem::path& csv_path, const DistanceMatrix& d);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Sidecar path for a CSV output: same stem, ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace dgot::io
