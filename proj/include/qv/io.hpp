#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"
#include "qv/duplex.hpp"

namespace qv {

/* Malformed input: bad JSON, unknown names, shape mismatches.  Scalar
 * parse failures are rethrown with the field path prepended so the
 * position annotation survives. */
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

using json = nlohmann::json;

/* Graph plus the vertex names of the file it came from.  Names are kept
 * in listed order; all in-memory indices refer to that order. */
struct NamedGraph {
  Graph graph;
  std::vector<std::string> names;

  int vertex_index(const std::string& name) const;  // throws IoError
  std::string arrow_id(int h) const;                // "k:src->tgt"
  int arrow_index(const std::string& id) const;     // accepts "k:src->tgt" or "k"
};

/* {"vertices": [names], "edges": [[a, b], ...], "orientation": {"k": +-1}}.
 * Loops are listed as [a, a]; the optional orientation map overrides the
 * default sign of the forward arrow of edge k. */
NamedGraph quiver_from_json(const json& j);
json quiver_to_json(const NamedGraph& g);

/* Point file: {"quiver": inline or path, "conductor": m (default 4),
 * "v": {...}, "w": {...}, "zeta_c": {...}, "zeta_r": {...},
 * "B": {"arrow-id": rows}, "i": {...}, "j": {...}}.  Per-vertex maps take
 * vertex names; omitted entries are zero.  Matrices are arrays of rows of
 * scalar literals; B_h has shape v_target x v_source, i_a is v_a x w_a,
 * j_a is w_a x v_a. */
struct NamedPoint {
  NamedGraph quiver;
  int conductor = 4;
  Point point;
};

// base_dir resolves a relative "quiver" path reference
NamedPoint point_from_json(const json& j, const std::string& base_dir = "");
json point_to_json(const NamedPoint& p);

// parse errors carry the byte offset reported by the JSON parser
json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

std::uint64_t fnv1a(std::uint64_t seed, const std::string& bytes);
std::string digest_hex(const std::string& bytes);

/* Verification report envelope shared by the CLI subcommands. */
struct ReportCheck {
  std::string id;
  bool pass = false;
  json payload;  // residuals, witnesses, or a detail string
};

struct Report {
  std::string tool = "qv";
  std::string version;  // filled from kToolVersion by default
  std::map<std::string, std::string> inputs;  // label -> content digest
  std::vector<ReportCheck> checks;

  bool overall() const;
  void add(const std::string& id, bool pass, json payload = json::object());
};

inline constexpr const char* kToolVersion = "0.1.0";

json report_to_json(const Report& r);

}  // namespace qv
