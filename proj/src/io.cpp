#include "dgot/io.hpp"

#include "dgot/error.hpp"

#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dgot::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  // Subnormals set ERANGE but still parse exactly.
  return errno == 0 || (errno == ERANGE && std::abs(out) < 1.0);
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

fs::path sidecar_path(const fs::path& csv_path) {
  fs::path p = csv_path;
  return p.replace_extension(".json");
}

std::vector<EdgeRow> parse_edge_list(std::istream& in, const std::string& origin) {
  std::vector<EdgeRow> rows;
  std::string line;
  bool header_seen = false;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_csv(t);
    const std::string where = origin + ":" + std::to_string(lineno);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"source", "target", "weight"}) {
        throw InputError(where + ": expected header 'source,target,weight'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw InputError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    double w = 0.0;
    if (!parse_double(fields[2], w) || !std::isfinite(w)) {
      throw InputError(where + ": unparseable weight '" + fields[2] + "'");
    }
    if (w < 0.0) throw InputError(where + ": negative weight " + fields[2]);
    if (fields[0].empty() || fields[1].empty()) throw InputError(where + ": empty node label");
    rows.push_back({fields[0], fields[1], w});
  }
  if (!header_seen) throw InputError(origin + ": missing header 'source,target,weight'");
  return rows;
}

DiGraph read_edge_list(const fs::path& path) {
  auto in = open_in(path);
  const auto rows = parse_edge_list(in, path.string());
  if (rows.empty()) throw InputError(path.string() + ": empty graph");
  return from_edge_list(rows);
}

void write_edge_list(std::ostream& out, const DiGraph& g) {
  out << "source,target,weight\n";
  const std::size_t n = g.size();
  const auto& labels = g.labels();
  std::vector<bool> loop_written(n, false);
  std::size_t seen = 0;  // labels [0, seen) have appeared, in order
  auto declare_through = [&](std::size_t upto) {
    for (; seen <= upto && seen < n; ++seen) {
      out << labels[seen] << ',' << labels[seen] << ',' << format_double(g.weight(seen, seen))
          << '\n';
      loop_written[seen] = true;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!(g.weight(i, j) > 0.0) || (i == j && loop_written[i])) continue;
      // The row introduces i, then j; both must be the next labels in order.
      const bool in_order = i < seen ? j <= seen
                                     : i == seen && (j < seen || j == i || j == seen + 1);
      if (!in_order) {
        declare_through(std::max(i, j));
        if (i == j) continue;
      }
      out << labels[i] << ',' << labels[j] << ',' << format_double(g.weight(i, j)) << '\n';
      if (i == j) loop_written[i] = true;
      if (i == seen) ++seen;
      if (j == seen) ++seen;
    }
  }
  if (n > 0) declare_through(n - 1);
}

void write_edge_list(const fs::path& path, const DiGraph& g) {
  auto out = open_out(path);
  write_edge_list(out, g);
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  auto in = open_in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("graphs") || !doc["graphs"].is_array()) {
    throw InputError(path.string() + ": manifest must be an object with a 'graphs' array");
  }
  std::vector<ManifestEntry> entries;
  const fs::path base = path.parent_path();
  for (std::size_t i = 0; i < doc["graphs"].size(); ++i) {
    const auto& g = doc["graphs"][i];
    const std::string where = path.string() + ": graphs[" + std::to_string(i) + "]";
    if (!g.is_object() || !g.contains("id") || !g["id"].is_string() || !g.contains("path") ||
        !g["path"].is_string()) {
      throw InputError(where + " needs string fields 'id' and 'path'");
    }
    ManifestEntry e;
    e.id = g["id"].get<std::string>();
    fs::path p = g["path"].get<std::string>();
    e.path = p.is_absolute() ? p : base / p;
    if (g.contains("label") && !g["label"].is_null()) {
      if (g["label"].is_string()) {
        e.label = g["label"].get<std::string>();
      } else if (g["label"].is_number_integer()) {
        e.label = std::to_string(g["label"].get<long long>());
      } else {
        throw InputError(where + ": 'label' must be a string");
      }
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const fs::path& path, const std::vector<ManifestEntry>& entries) {
  json graphs = json::array();
  for (const auto& e : entries) {
    json g = {{"id", e.id}, {"path", e.path.generic_string()}};
    if (e.label) g["label"] = *e.label;
    graphs.push_back(std::move(g));
  }
  auto out = open_out(path);
  out << json{{"graphs", graphs}}.dump(2) << '\n';
}

void write_matrix_csv(std::ostream& out, const std::vector<std::string>& ids, const Matrix& m) {
  out << "id";
  for (const auto& id : ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
}

void write_matrix_csv(const fs::path& path, const std::vector<std::string>& ids,
                      const Matrix& m) {
  auto out = open_out(path);
  write_matrix_csv(out, ids, m);
}

LabeledMatrix read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  LabeledMatrix out;
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv(t);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (out.ids.empty()) {
      if (fields.size() < 2) throw InputError(where + ": header needs at least one id");
      out.ids.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != out.ids.size() + 1) {
      throw InputError(where + ": expected " + std::to_string(out.ids.size() + 1) + " fields");
    }
    if (fields[0] != out.ids[rows.size()]) {
      throw InputError(where + ": row id '" + fields[0] + "' does not match header order");
    }
    std::vector<double> row;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      double x = 0.0;
      if (!parse_double(fields[j], x)) {
        throw InputError(where + ": unparseable value '" + fields[j] + "'");
      }
      row.push_back(x);
    }
    rows.push_back(std::move(row));
    if (rows.size() > out.ids.size()) throw InputError(where + ": too many rows");
  }
  if (out.ids.empty() || rows.size() != out.ids.size()) {
    throw InputError(path.string() + ": matrix must be square with a header row");
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.values.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out.values(i, j) = rows[i][j];
  }
  return out;
}

void write_plan_csv(const fs::path& path, const std::vector<std::string>& row_ids,
                    const std::vector<std::string>& col_ids, const Matrix& gamma) {
  auto out = open_out(path);
  for (const auto& id : col_ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index i = 0; i < gamma.rows(); ++i) {
    out << row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < gamma.cols(); ++j) out << ',' << format_double(gamma(i, j));
    out << '\n';
  }
}

void write_distance_matrix(const fs::path& csv_path, const DistanceMatrix& d) {
  write_matrix_csv(csv_path, d.labels, d.values);
  json meta = {
      {"metric_kind", d.metric.kind == MetricKind::kGrd ? "GRD" : "HTD"},
      {"beta", d.metric.kind == MetricKind::kHtd ? json(d.metric.beta) : json(nullptr)},
      {"alpha", d.alpha ? json(*d.alpha) : json(nullptr)},
      {"negative_entries", d.negative_entries},
      {"warnings", d.warnings},
  };
  auto out = open_out(sidecar_path(csv_path));
  out << meta.dump(2) << '\n';
}

}  // namespace dgot::io
