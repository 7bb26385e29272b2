#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "qv/harness.hpp"
#include "qv/io.hpp"
#include "qv/mckay.hpp"
#include "qv/scalar_parse.hpp"

using namespace qv;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kBadInput = 2;

std::string dims_str(const std::vector<long>& v) {
  std::string s = "(";
  for (size_t k = 0; k < v.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(v[k]);
  }
  return s + ")";
}

std::string params_str(const std::vector<RatFunc>& z) {
  std::string s = "(";
  for (size_t k = 0; k < z.size(); ++k) {
    if (k) s += ", ";
    s += z[k].str();
  }
  return s + ")";
}

// per-vertex residual verdicts, both printed and collected for the report
bool residual_block(const NamedGraph& ng, const std::vector<FMatrix>& res,
                    const std::string& label, Report& rep) {
  bool all = true;
  json payload = json::object();
  for (size_t a = 0; a < res.size(); ++a) {
    bool zero = res[a].is_zero();
    all = all && zero;
    std::cout << label << "[" << ng.names[a] << "] = " << (zero ? "0" : res[a].str())
              << "\n";
    payload[ng.names[a]] = zero ? "0" : res[a].str();
  }
  rep.add(label, all, payload);
  return all;
}

void write_report(const Report& rep, const std::string& out_path) {
  if (!out_path.empty()) write_json_file(out_path, report_to_json(rep));
}

// the file's own directory resolves a relative quiver reference
NamedPoint load_point(const std::string& path, json& raw) {
  raw = load_json_file(path);
  auto slash = path.rfind('/');
  return point_from_json(raw, slash == std::string::npos ? "" : path.substr(0, slash));
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string convention = "centerm";

  Convention conv() const {
    return convention == "mu" ? Convention::Mu : Convention::Centerm;
  }
};

int cmd_algebra(const GlobalOpts& g, const std::string& quiver_path, bool verify) {
  json qj = load_json_file(quiver_path);
  NamedGraph ng = quiver_from_json(qj);
  ZigzagAlgebra A(ng.graph);

  std::cout << "dim=" << A.dim() << "\n";
  std::string basis;
  for (int k = 0; k < A.dim(); ++k) {
    if (k) basis += " ";
    basis += A.basis_name(k);
  }
  std::cout << "basis= " << basis << "\n";

  Report rep;
  rep.inputs["quiver"] = digest_hex(qj.dump());
  rep.add("dimension", A.dim() == 2 * (ng.graph.vertices() + ng.graph.edge_count()));
  bool all = rep.checks.back().pass;

  if (verify) {
    bool assoc = true;
    for (int x = 0; x < A.dim() && assoc; ++x)
      for (int y = 0; y < A.dim() && assoc; ++y)
        for (int z = 0; z < A.dim() && assoc; ++z)
          assoc = A.mul(A.mul(A.basis(x), A.basis(y)), A.basis(z)) ==
                  A.mul(A.basis(x), A.mul(A.basis(y), A.basis(z)));
    rep.add("associativity", assoc);

    AlgElem one = A.zero();
    for (int a = 0; a < A.vertices(); ++a) one[a] = RatFunc(1);
    bool unit = true;
    for (int k = 0; k < A.dim() && unit; ++k)
      unit = A.mul(one, A.basis(k)) == A.basis(k) && A.mul(A.basis(k), one) == A.basis(k);
    rep.add("unit", unit);

    bool central = true;
    for (int a = 0; a < A.vertices() && central; ++a)
      for (int k = 0; k < A.dim() && central; ++k)
        central = A.mul(A.basis(A.socle(a)), A.basis(k)) ==
                  A.mul(A.basis(k), A.basis(A.socle(a)));
    rep.add("socle-centrality", central);

    rep.add("trace-form-rank", A.gram().rank() == A.dim());

    for (const auto& c : rep.checks)
      if (c.id != "dimension") {
        std::cout << c.id << ": " << (c.pass ? "ok" : "FAIL") << "\n";
        all = all && c.pass;
      }
  }

  write_report(rep, g.out);
  return all ? kPass : kFail;
}

int cmd_check(const GlobalOpts& g, const std::string& point_path, bool real,
              bool stability) {
  json pj;
  NamedPoint np = load_point(point_path, pj);

  Report rep;
  rep.inputs["point"] = digest_hex(pj.dump());

  bool all = residual_block(np.quiver, moment_residual(np.point, g.conv()), "moment", rep);
  if (real)
    all = residual_block(np.quiver, real_moment_residual(np.point), "real-moment", rep) && all;
  if (stability) {
    StabilityReport sr = stability_check(np.point);
    std::cout << "stability: " << (sr.stable ? "stable" : "unstable");
    json payload = json{{"sub_dims", sr.sub_dims}};
    if (!sr.stable) {
      std::cout << " sub_dims=" << dims_str(sr.sub_dims) << " witness at "
                << np.quiver.names[sr.witness_vertex];
      payload["witness_vertex"] = np.quiver.names[sr.witness_vertex];
      payload["witness"] = sr.witness.str();
    }
    std::cout << "\n";
    rep.add("stability", sr.stable, payload);
    all = all && sr.stable;
  }

  write_report(rep, g.out);
  return all ? kPass : kFail;
}

int cmd_reflect(const GlobalOpts& g, const std::string& point_path,
                const std::string& vertex, const std::string& method) {
  json pj;
  NamedPoint np = load_point(point_path, pj);
  int a = np.quiver.vertex_index(vertex);
  ZigzagAlgebra A(np.quiver.graph);

  bool ok = true;
  Point out;
  if (method == "tensor") {
    out = reflect_tensor(A, np.point, a, g.conv());
  } else if (method == "direct") {
    out = reflect_direct(A, np.point, a, g.conv());
  } else {
    out = reflect_tensor(A, np.point, a, g.conv());
    Point alt = reflect_direct(A, np.point, a, g.conv());
    bool same_shape = out.v == alt.v && out.w == alt.w && out.zeta_c == alt.zeta_c;
    bool iso = same_shape && framed_iso(out, alt).exists;
    std::cout << "cross-validation: " << (iso ? "ok" : "FAIL") << "\n";
    ok = ok && iso;
  }

  bool dims = out.v == weyl_reflect_dim(np.quiver.graph, a, np.point.v, np.point.w);
  bool params = out.zeta_c == weyl_reflect_param(np.quiver.graph, a, np.point.zeta_c);
  bool moment = true;
  for (const auto& m : moment_residual(out, g.conv())) moment = moment && m.is_zero();
  std::cout << "v' = " << dims_str(out.v) << (dims ? "" : "  (off the reflected dims)")
            << "\n";
  std::cout << "zeta_c' = " << params_str(out.zeta_c)
            << (params ? "" : "  (off the reflected parameters)") << "\n";
  std::cout << "moment residual: " << (moment ? "0" : "nonzero") << "\n";
  ok = ok && dims && params && moment;

  if (!g.out.empty()) {
    NamedPoint res;
    res.quiver = np.quiver;
    res.conductor = np.conductor;
    res.point = out;
    write_json_file(g.out, point_to_json(res));
  }
  return ok ? kPass : kFail;
}

int cmd_orbit(const GlobalOpts& g, const std::string& point_path, const std::string& word) {
  json pj;
  NamedPoint np = load_point(point_path, pj);

  std::vector<int> letters;
  std::istringstream in(word);
  for (std::string tok; in >> tok;) letters.push_back(np.quiver.vertex_index(tok));
  if (letters.empty()) throw IoError("the orbit word is empty");

  ZigzagAlgebra A(np.quiver.graph);
  OrbitResult res = orbit(A, np.point, letters, g.conv(), true);

  Report rep;
  rep.inputs["point"] = digest_hex(pj.dump());
  rep.inputs["word"] = digest_hex(word);
  for (size_t k = 0; k < res.steps.size(); ++k) {
    const OrbitStep& s = res.steps[k];
    bool pass = s.dims_match && s.params_match && s.moment_zero && s.generic_kept &&
                s.methods_agree;
    std::cout << "step " << (k + 1) << " at " << np.quiver.names[s.vertex] << ": v="
              << dims_str(s.v) << (pass ? "" : "  FAIL") << "\n";
    rep.add("step-" + std::to_string(k + 1),
            pass,
            json{{"vertex", np.quiver.names[s.vertex]},
                 {"dims", s.dims_match},
                 {"params", s.params_match},
                 {"moment", s.moment_zero},
                 {"generic", s.generic_kept},
                 {"methods", s.methods_agree}});
  }
  if (!res.detail.empty()) std::cout << "detail: " << res.detail << "\n";
  std::cout << "end: v=" << dims_str(res.end.v) << " zeta_c=" << params_str(res.end.zeta_c)
            << "\n";

  write_report(rep, g.out);
  return res.ok ? kPass : kFail;
}

int cmd_verify_braid(const GlobalOpts& g, const std::string& quiver_path,
                     const std::vector<std::string>& vertices, bool symbolic) {
  json qj = load_json_file(quiver_path);
  NamedGraph ng = quiver_from_json(qj);
  int a = ng.vertex_index(vertices[0]);
  int b = ng.vertex_index(vertices[1]);
  if (a == b) throw IoError("braid vertices must differ");
  ZigzagAlgebra A(ng.graph);

  RatFunc x = symbolic ? parse_scalar("t", 4) : parse_scalar("2", 4);
  RatFunc y = symbolic ? parse_scalar("t^2", 4) : parse_scalar("3", 4);
  CheckResult res = verify_braid(A, a, b, x, y);
  std::cout << "braid(" << vertices[0] << ", " << vertices[1] << "; x=" << x.str()
            << ", y=" << y.str() << "): " << (res.ok ? "ok" : "FAIL") << "\n";
  if (!res.detail.empty()) std::cout << "detail: " << res.detail << "\n";

  Report rep;
  rep.inputs["quiver"] = digest_hex(qj.dump());
  rep.add("braid", res.ok,
          res.detail.empty() ? json::object() : json{{"detail", res.detail}});
  write_report(rep, g.out);
  return res.ok ? kPass : kFail;
}

int cmd_mckay(const GlobalOpts& g, int order, bool morita, const std::string& point_path) {
  McKayData md = mckay_graph(order);
  ZigzagAlgebra A(md.graph);

  std::cout << "group: cyclic of order " << order << " in SL(2)\n";
  std::cout << "vertices: " << md.graph.vertices() << "  edges:";
  for (const auto& [x, y] : md.graph.edges()) std::cout << " (" << x << "-" << y << ")";
  std::cout << "\n";
  std::cout << "dim=" << A.dim() << "\n";

  Report rep;
  rep.inputs["order"] = digest_hex(std::to_string(order));
  rep.add("dimension", A.dim() == 4 * order);
  bool all = rep.checks.back().pass;

  if (morita) {
    MoritaReport mr = morita_check(order);
    std::cout << "morita: end_dim=" << mr.end_dim << " " << (mr.ok ? "ok" : "FAIL")
              << "\n";
    if (!mr.detail.empty()) std::cout << "detail: " << mr.detail << "\n";
    rep.add("morita", mr.ok,
            json{{"end_dim", mr.end_dim},
                 {"detail", mr.detail.empty() ? "" : mr.detail}});
    all = all && mr.ok;
  }

  if (!point_path.empty()) {
    json pj;
    NamedPoint np = load_point(point_path, pj);
    rep.inputs["point"] = digest_hex(pj.dump());

    EquivariantModule M = equivariant_assemble(md, np.point);
    EquivariantReport er = equivariant_verify(M);
    std::cout << "curvature: " << (er.curvature ? "ok" : "FAIL") << "\n";
    std::cout << "equivariance: " << (er.equivariant ? "ok" : "FAIL") << "\n";
    std::cout << "anticommutation: " << (er.anticommute ? "ok" : "FAIL") << "\n";
    std::cout << "arrow twist: " << (er.twist ? "ok" : "FAIL") << "\n";
    if (!er.detail.empty()) std::cout << "detail: " << er.detail << "\n";
    rep.add("equivariant", er.ok(),
            json{{"curvature", er.curvature},
                 {"equivariant", er.equivariant},
                 {"anticommute", er.anticommute},
                 {"twist", er.twist}});
    all = all && er.ok();

    EquivariantStability eq = equivariant_stability(md, np.point);
    StabilityReport lin = stability_check(np.point);
    bool agree = eq.stable == lin.stable && eq.sub_dims == lin.sub_dims;
    std::cout << "stability: " << (eq.stable ? "stable" : "unstable")
              << " (group and linear sides " << (agree ? "agree" : "DISAGREE") << ")\n";
    rep.add("stability-agreement", agree,
            json{{"stable", eq.stable}, {"sub_dims", eq.sub_dims}});
    all = all && agree;
  }

  write_report(rep, g.out);
  return all ? kPass : kFail;
}

int cmd_suite(const GlobalOpts& g, const std::string& config_path, bool seed_given,
              bool jobs_given) {
  std::uint64_t seed = g.seed;
  int jobs = g.jobs;
  std::vector<std::string> only;
  json cfg;
  if (!config_path.empty()) {
    cfg = load_json_file(config_path);
    if (!cfg.is_object()) throw IoError("suite config must be a JSON object");
    for (const auto& [key, val] : cfg.items()) {
      if (key == "seed") {
        if (!val.is_number_unsigned()) throw IoError("config seed must be unsigned");
        if (!seed_given) seed = val.get<std::uint64_t>();
      } else if (key == "jobs") {
        if (!val.is_number_integer()) throw IoError("config jobs must be an integer");
        if (!jobs_given) jobs = val.get<int>();
      } else if (key == "items") {
        if (!val.is_array()) throw IoError("config items must be an array of ids");
        for (const auto& it : val) only.push_back(it.get<std::string>());
      } else {
        throw IoError("unknown suite config key: " + key);
      }
    }
  }

  SuiteReport sr = run_suite(seed, jobs, only);

  Report rep;
  rep.inputs["seed"] = std::to_string(seed);
  if (!config_path.empty()) rep.inputs["config"] = digest_hex(cfg.dump());
  int failures = 0;
  for (const auto& item : sr.items) {
    rep.add(item.id, item.ok,
            item.detail.empty() ? json::object() : json{{"detail", item.detail}});
    if (item.ok) {
      std::cout << "ok   " << item.id << "\n";
    } else {
      std::cout << "FAIL " << item.id << ": " << item.detail << "\n";
      ++failures;
    }
  }
  std::cout << "items=" << sr.items.size() << " failures=" << failures << "\n";

  write_report(rep, g.out);
  return sr.ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification of framed graph representations and their reflections"};
  app.require_subcommand(1);

  GlobalOpts g;
  auto* seed_opt = app.add_option("--seed", g.seed, "random seed for generated instances");
  auto* jobs_opt = app.add_option("--jobs", g.jobs, "parallel workers for the suite")
                       ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "write the JSON report (or point file, for reflect) here");
  app.add_option("--convention", g.convention, "sign convention of the moment identity")
      ->check(CLI::IsMember({"centerm", "mu"}));

  std::string quiver_path, point_path, vertex, word, config_path;
  std::string method = "both";
  std::vector<std::string> braid_vertices;
  bool verify = false, real = false, stability = false, symbolic = false, morita = false;
  int order = 0;

  auto* algebra = app.add_subcommand("algebra", "build the graph algebra and print its shape");
  algebra->add_option("--quiver", quiver_path, "graph file")->required();
  algebra->add_flag("--verify", verify, "run the structural identity checks");

  auto* check = app.add_subcommand("check", "evaluate moment residuals of a point file");
  check->add_option("--point", point_path, "point file")->required();
  check->add_flag("--real", real, "also check the real moment identity");
  check->add_flag("--stability", stability, "also run the stability criterion");

  auto* reflect = app.add_subcommand("reflect", "apply one reflection to a point file");
  reflect->add_option("--point", point_path, "point file")->required();
  reflect->add_option("--vertex", vertex, "vertex name")->required();
  reflect->add_option("--method", method, "tensor, direct, or both (cross-validated)")
      ->check(CLI::IsMember({"tensor", "direct", "both"}));

  auto* orbit_cmd = app.add_subcommand("orbit", "apply a word of reflections with per-step checks");
  orbit_cmd->add_option("--point", point_path, "point file")->required();
  orbit_cmd->add_option("--word", word, "space-separated vertex names")->required();

  auto* braid = app.add_subcommand("verify-braid", "check the braid relation at two vertices");
  braid->add_option("--quiver", quiver_path, "graph file")->required();
  braid->add_option("--vertices", braid_vertices, "two vertex names")
      ->required()
      ->expected(2);
  braid->add_flag("--symbolic", symbolic, "use symbolic weights instead of rationals");

  auto* mckay = app.add_subcommand("mckay", "cyclic-group side: graph, commutant, equivariant checks");
  mckay->add_option("--cyclic", order, "order of the cyclic subgroup")->required();
  mckay->add_flag("--morita", morita, "verify the right-action commutant");
  mckay->add_option("--point", point_path, "point file to verify equivariantly");

  auto* suite = app.add_subcommand("suite", "run the deterministic invariant catalog");
  suite->add_option("--config", config_path, "optional config: seed, jobs, items");

  for (auto* sub : {algebra, check, reflect, orbit_cmd, braid, mckay, suite})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  try {
    if (app.got_subcommand(algebra)) return cmd_algebra(g, quiver_path, verify);
    if (app.got_subcommand(check)) return cmd_check(g, point_path, real, stability);
    if (app.got_subcommand(reflect)) return cmd_reflect(g, point_path, vertex, method);
    if (app.got_subcommand(orbit_cmd)) return cmd_orbit(g, point_path, word);
    if (app.got_subcommand(braid)) return cmd_verify_braid(g, quiver_path, braid_vertices, symbolic);
    if (app.got_subcommand(mckay)) return cmd_mckay(g, order, morita, point_path);
    if (app.got_subcommand(suite))
      return cmd_suite(g, config_path, seed_opt->count() > 0, jobs_opt->count() > 0);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const QuiverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const DuplexError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const McKayError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
