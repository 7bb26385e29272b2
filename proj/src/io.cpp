#include "qv/io.hpp"

#include <fstream>
#include <sstream>

#include "qv/scalar_parse.hpp"

namespace qv {

int NamedGraph::vertex_index(const std::string& name) const {
  for (size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return static_cast<int>(k);
  throw IoError("unknown vertex name \"" + name + "\"");
}

std::string NamedGraph::arrow_id(int h) const {
  return std::to_string(h / 2) + ":" + names[graph.source(h)] + "->" +
         names[graph.target(h)];
}

int NamedGraph::arrow_index(const std::string& id) const {
  auto bad = [&]() -> IoError { return IoError("bad arrow id \"" + id + "\""); };
  size_t colon = id.find(':');
  std::string kpart = id.substr(0, colon == std::string::npos ? id.size() : colon);
  if (kpart.empty() || kpart.find_first_not_of("0123456789") != std::string::npos)
    throw bad();
  if (colon == std::string::npos) {
    // bare arrow index
    int h = std::stoi(kpart);
    if (h < 0 || h >= graph.arrows()) throw bad();
    return h;
  }
  int k = std::stoi(kpart);
  if (k < 0 || k >= graph.edge_count()) throw bad();
  size_t sep = id.find("->", colon + 1);
  if (sep == std::string::npos) throw bad();
  std::string src = id.substr(colon + 1, sep - colon - 1);
  std::string tgt = id.substr(sep + 2);
  auto [ea, eb] = graph.edges()[k];
  if (src == names[ea] && tgt == names[eb]) return 2 * k;
  if (src == names[eb] && tgt == names[ea]) return 2 * k + 1;
  throw bad();
}

static std::string name_of(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  throw IoError("vertex names must be strings");
}

NamedGraph quiver_from_json(const json& j) {
  if (!j.is_object()) throw IoError("quiver must be a JSON object");
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw IoError("quiver needs a \"vertices\" array");
  NamedGraph g;
  for (const auto& v : j["vertices"]) g.names.push_back(name_of(v));
  if (g.names.empty()) throw IoError("quiver needs at least one vertex");
  for (size_t a = 0; a < g.names.size(); ++a)
    for (size_t b = a + 1; b < g.names.size(); ++b)
      if (g.names[a] == g.names[b])
        throw IoError("duplicate vertex name \"" + g.names[a] + "\"");

  std::vector<std::pair<int, int>> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw IoError("\"edges\" must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2)
        throw IoError("each edge must be a pair of vertex names");
      edges.emplace_back(g.vertex_index(name_of(e[0])), g.vertex_index(name_of(e[1])));
    }
  }

  std::vector<int> orientation;
  orientation.reserve(edges.size());
  for (auto& [a, b] : edges) orientation.push_back(a <= b ? 1 : -1);
  if (j.contains("orientation")) {
    if (!j["orientation"].is_object())
      throw IoError("\"orientation\" must map edge indices to +-1");
    for (auto it = j["orientation"].begin(); it != j["orientation"].end(); ++it) {
      const std::string& key = it.key();
      if (key.empty() || key.find_first_not_of("0123456789") != std::string::npos)
        throw IoError("orientation key \"" + key + "\" is not an edge index");
      size_t k = std::stoul(key);
      if (k >= edges.size())
        throw IoError("orientation key \"" + key + "\" is out of range");
      if (!it.value().is_number_integer())
        throw IoError("orientation values must be +1 or -1");
      int s = it.value().get<int>();
      if (s != 1 && s != -1) throw IoError("orientation values must be +1 or -1");
      orientation[k] = s;
    }
  }

  try {
    g.graph = Graph::make(static_cast<int>(g.names.size()), std::move(edges),
                          std::move(orientation));
  } catch (const QuiverError& e) {
    throw IoError(std::string("bad quiver: ") + e.what());
  }
  return g;
}

json quiver_to_json(const NamedGraph& g) {
  json j;
  j["vertices"] = g.names;
  json edges = json::array();
  for (auto& [a, b] : g.graph.edges())
    edges.push_back(json::array({g.names[a], g.names[b]}));
  j["edges"] = edges;
  json orient = json::object();
  for (int k = 0; k < g.graph.edge_count(); ++k) {
    auto [a, b] = g.graph.edges()[k];
    int dflt = a <= b ? 1 : -1;
    if (g.graph.eps(2 * k) != dflt) orient[std::to_string(k)] = g.graph.eps(2 * k);
  }
  if (!orient.empty()) j["orientation"] = orient;
  return j;
}

/* ------------------------------------------------------------------ */

static RatFunc parse_field(const json& v, int conductor, const std::string& where) {
  std::string text;
  if (v.is_string())
    text = v.get<std::string>();
  else if (v.is_number_integer())
    text = std::to_string(v.get<long>());
  else
    throw IoError(where + ": scalars must be literal strings");
  try {
    return parse_scalar(text, conductor);
  } catch (const ParseError& e) {
    throw IoError(where + ": " + e.what());
  }
}

static FMatrix parse_matrix(const json& v, int rows, int cols, int conductor,
                            const std::string& where) {
  if (!v.is_array())
    throw IoError(where + ": expected an array of rows");
  if (static_cast<int>(v.size()) != rows)
    throw IoError(where + ": expected " + std::to_string(rows) + " rows, found " +
                  std::to_string(v.size()));
  FMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw IoError(where + " row " + std::to_string(r) + ": expected " +
                    std::to_string(cols) + " entries");
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = parse_field(row[c], conductor,
                               where + "[" + std::to_string(r) + "][" +
                                   std::to_string(c) + "]");
  }
  return m;
}

static json dump_matrix(const FMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c).str());
    rows.push_back(row);
  }
  return rows;
}

static std::vector<long> per_vertex_dims(const json& j, const char* field,
                                         const NamedGraph& g) {
  std::vector<long> out(g.names.size(), 0);
  if (!j.contains(field)) return out;
  const json& v = j[field];
  if (!v.is_object())
    throw IoError(std::string("\"") + field + "\" must map vertex names to sizes");
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_number_integer() || it.value().get<long>() < 0)
      throw IoError(std::string(field) + "[\"" + it.key() +
                    "\"]: dimensions are nonnegative integers");
    out[g.vertex_index(it.key())] = it.value().get<long>();
  }
  return out;
}

static std::vector<RatFunc> per_vertex_scalars(const json& j, const char* field,
                                               const NamedGraph& g, int conductor) {
  std::vector<RatFunc> out(g.names.size());
  if (!j.contains(field)) return out;
  const json& v = j[field];
  if (!v.is_object())
    throw IoError(std::string("\"") + field + "\" must map vertex names to scalars");
  for (auto it = v.begin(); it != v.end(); ++it)
    out[g.vertex_index(it.key())] =
        parse_field(it.value(), conductor,
                    std::string(field) + "[\"" + it.key() + "\"]");
  return out;
}

NamedPoint point_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw IoError("point must be a JSON object");
  if (!j.contains("quiver")) throw IoError("point needs a \"quiver\" field");
  NamedPoint p;
  if (j["quiver"].is_string()) {
    std::string path = j["quiver"].get<std::string>();
    if (!base_dir.empty() && !path.empty() && path[0] != '/')
      path = base_dir + "/" + path;
    p.quiver = quiver_from_json(load_json_file(path));
  } else {
    p.quiver = quiver_from_json(j["quiver"]);
  }
  if (j.contains("conductor")) {
    if (!j["conductor"].is_number_integer() || j["conductor"].get<int>() < 1)
      throw IoError("\"conductor\" must be a positive integer");
    p.conductor = j["conductor"].get<int>();
  }

  const Graph& g = p.quiver.graph;
  Point& pt = p.point;
  pt.graph = g;
  pt.v = per_vertex_dims(j, "v", p.quiver);
  pt.w = per_vertex_dims(j, "w", p.quiver);
  pt.zeta_c = per_vertex_scalars(j, "zeta_c", p.quiver, p.conductor);
  pt.zeta_r = per_vertex_scalars(j, "zeta_r", p.quiver, p.conductor);

  pt.B.reserve(g.arrows());
  for (int h = 0; h < g.arrows(); ++h)
    pt.B.emplace_back(static_cast<int>(pt.v[g.target(h)]),
                      static_cast<int>(pt.v[g.source(h)]));
  if (j.contains("B")) {
    if (!j["B"].is_object()) throw IoError("\"B\" must map arrow ids to matrices");
    for (auto it = j["B"].begin(); it != j["B"].end(); ++it) {
      int h = p.quiver.arrow_index(it.key());
      pt.B[h] = parse_matrix(it.value(), pt.B[h].rows(), pt.B[h].cols(), p.conductor,
                             "B[\"" + it.key() + "\"]");
    }
  }

  for (size_t a = 0; a < p.quiver.names.size(); ++a) {
    pt.i_.emplace_back(static_cast<int>(pt.v[a]), static_cast<int>(pt.w[a]));
    pt.j_.emplace_back(static_cast<int>(pt.w[a]), static_cast<int>(pt.v[a]));
  }
  for (const char* field : {"i", "j"}) {
    if (!j.contains(field)) continue;
    const json& v = j[field];
    if (!v.is_object())
      throw IoError(std::string("\"") + field + "\" must map vertex names to matrices");
    for (auto it = v.begin(); it != v.end(); ++it) {
      int a = p.quiver.vertex_index(it.key());
      FMatrix& dst = field[0] == 'i' ? pt.i_[a] : pt.j_[a];
      dst = parse_matrix(it.value(), dst.rows(), dst.cols(), p.conductor,
                         std::string(field) + "[\"" + it.key() + "\"]");
    }
  }

  try {
    pt.validate();
  } catch (const std::exception& e) {
    throw IoError(std::string("inconsistent point data: ") + e.what());
  }
  return p;
}

json point_to_json(const NamedPoint& p) {
  const Graph& g = p.quiver.graph;
  json j;
  j["quiver"] = quiver_to_json(p.quiver);
  j["conductor"] = p.conductor;
  json v = json::object(), w = json::object();
  json zc = json::object(), zr = json::object();
  json im = json::object(), jm = json::object();
  for (size_t a = 0; a < p.quiver.names.size(); ++a) {
    const std::string& nm = p.quiver.names[a];
    v[nm] = p.point.v[a];
    w[nm] = p.point.w[a];
    zc[nm] = p.point.zeta_c.empty() ? "0" : p.point.zeta_c[a].str();
    zr[nm] = p.point.zeta_r.empty() ? "0" : p.point.zeta_r[a].str();
    if (p.point.i_[a].rows() > 0 && p.point.i_[a].cols() > 0)
      im[nm] = dump_matrix(p.point.i_[a]);
    if (p.point.j_[a].rows() > 0 && p.point.j_[a].cols() > 0)
      jm[nm] = dump_matrix(p.point.j_[a]);
  }
  j["v"] = v;
  j["w"] = w;
  j["zeta_c"] = zc;
  j["zeta_r"] = zr;
  json B = json::object();
  for (int h = 0; h < g.arrows(); ++h)
    if (p.point.B[h].rows() > 0 && p.point.B[h].cols() > 0)
      B[p.quiver.arrow_id(h)] = dump_matrix(p.point.B[h]);
  if (!B.empty()) j["B"] = B;
  if (!im.empty()) j["i"] = im;
  if (!jm.empty()) j["j"] = jm;
  return j;
}

/* ------------------------------------------------------------------ */

json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::uint64_t fnv1a(std::uint64_t seed, const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = fnv1a(0, bytes);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

/* ------------------------------------------------------------------ */

bool Report::overall() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

void Report::add(const std::string& id, bool pass, json payload) {
  checks.push_back({id, pass, std::move(payload)});
}

json report_to_json(const Report& r) {
  json j;
  j["tool"] = r.tool;
  j["version"] = r.version.empty() ? kToolVersion : r.version;
  j["inputs"] = json::object();
  for (const auto& [k, v] : r.inputs) j["inputs"][k] = v;
  json checks = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["id"] = c.id;
    e["verdict"] = c.pass ? "pass" : "fail";
    e["payload"] = c.payload;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["overall"] = r.overall() ? "pass" : "fail";
  return j;
}

}  // namespace qv
