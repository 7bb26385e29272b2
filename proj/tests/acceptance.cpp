// Acceptance gate: one line per criterion, exit 0 only when every line passes.
// Each criterion carries a hard runtime cap; exceeding it is a failure even
// when the mathematics checks out.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qv/algebra.hpp"
#include "qv/bimodule.hpp"
#include "qv/duplex.hpp"
#include "qv/harness.hpp"
#include "qv/matrix.hpp"
#include "qv/mckay.hpp"
#include "qv/quiver.hpp"
#include "qv/ratfunc.hpp"

namespace {

using namespace qv;
using Clock = std::chrono::steady_clock;

struct Crit {
  bool ok = true;
  std::string detail;
  void check(bool c, const std::string& what) {
    if (!c && ok) {
      ok = false;
      detail = what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool all_zero(const std::vector<FMatrix>& mats) {
  for (const auto& m : mats)
    if (!m.is_zero()) return false;
  return true;
}

bool same_duplex(LabeledDuplex l, LabeledDuplex r) {
  l.d.prune();
  r.d.prune();
  return l.parts == r.parts && l.d.blocks == r.d.blocks;
}

RatFunc one() { return RatFunc(CycRat(1)); }

FMatrix ones1() {
  FMatrix m(1, 1);
  m.at(0, 0) = one();
  return m;
}

/* Point with explicit zero blocks everywhere; tests fill in single entries. */
Point blank_point(const Graph& g, std::vector<long> v, std::vector<long> w) {
  Point p;
  p.graph = g;
  p.v = std::move(v);
  p.w = std::move(w);
  for (int h = 0; h < g.arrows(); ++h)
    p.B.emplace_back(p.v[static_cast<size_t>(g.target(h))],
                     p.v[static_cast<size_t>(g.source(h))]);
  for (int a = 0; a < g.vertices(); ++a) {
    size_t ua = static_cast<size_t>(a);
    p.i_.emplace_back(p.v[ua], p.w[ua]);
    p.j_.emplace_back(p.w[ua], p.v[ua]);
    p.zeta_c.push_back(RatFunc());
    p.zeta_r.push_back(RatFunc());
  }
  return p;
}

/* ---- criterion 1: algebra structure across a spread of graphs ---- */

void crit_algebra(Crit& c) {
  struct Case {
    const char* name;
    Graph g;
  };
  std::vector<Case> cases = {
      {"point", Graph::make(1, {})},
      {"loop", Graph::make(1, {{0, 0}})},
      {"chain2", Graph::make(2, {{0, 1}})},
      {"chain3", Graph::make(3, {{0, 1}, {1, 2}})},
      {"chain5", Graph::make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}})},
      {"double-edge", Graph::make(2, {{0, 1}, {0, 1}})},
      {"triple-edge", Graph::make(2, {{0, 1}, {0, 1}, {0, 1}})},
      {"cycle3", Graph::make(3, {{0, 1}, {1, 2}, {2, 0}})},
      {"cycle4", Graph::make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}})},
      {"star", Graph::make(4, {{0, 1}, {0, 2}, {0, 3}})},
      {"loop-edge", Graph::make(2, {{0, 0}, {0, 1}})},
  };
  for (const auto& cs : cases) {
    auto t0 = Clock::now();
    ZigzagAlgebra A(cs.g);
    int D = A.dim();
    c.check(D == 2 * (cs.g.vertices() + cs.g.edge_count()),
            std::string(cs.name) + ": wrong dimension");

    // structure constants once, then pure integer work
    std::vector<std::vector<std::pair<int, int>>> tab(
        static_cast<size_t>(D), std::vector<std::pair<int, int>>(static_cast<size_t>(D)));
    for (int x = 0; x < D; ++x)
      for (int y = 0; y < D; ++y) tab[static_cast<size_t>(x)][static_cast<size_t>(y)] = A.mul_basis(x, y);
    auto mul3 = [&](std::pair<int, int> xy, int z) -> std::pair<int, int> {
      if (xy.first == 0 || xy.second < 0) return {0, -1};
      auto r = tab[static_cast<size_t>(xy.second)][static_cast<size_t>(z)];
      if (r.first == 0) return {0, -1};
      return {xy.first * r.first, r.second};
    };
    bool assoc = true;
    for (int x = 0; x < D && assoc; ++x)
      for (int y = 0; y < D && assoc; ++y)
        for (int z = 0; z < D && assoc; ++z) {
          auto lhs = mul3(tab[static_cast<size_t>(x)][static_cast<size_t>(y)], z);
          auto r = tab[static_cast<size_t>(y)][static_cast<size_t>(z)];
          std::pair<int, int> rhs{0, -1};
          if (r.first != 0) {
            auto s = tab[static_cast<size_t>(x)][static_cast<size_t>(r.second)];
            if (s.first != 0) rhs = {r.first * s.first, s.second};
          }
          assoc = lhs == rhs;
        }
    c.check(assoc, std::string(cs.name) + ": associativity fails");

    bool central = true;
    for (int a = 0; a < cs.g.vertices() && central; ++a) {
      int s = A.socle(a);
      for (int k = 0; k < D && central; ++k)
        central = tab[static_cast<size_t>(s)][static_cast<size_t>(k)] ==
                  tab[static_cast<size_t>(k)][static_cast<size_t>(s)];
    }
    c.check(central, std::string(cs.name) + ": socle generator not central");

    c.check(A.gram().rank() == D, std::string(cs.name) + ": degenerate trace form");

    double dt = seconds_since(t0);
    c.check(dt <= 1.0, std::string(cs.name) + ": over the per-graph time cap");
  }
}

/* ---- criterion 2: d^2 = central action exactly when the residual vanishes ---- */

void crit_curvature(Crit& c) {
  std::mt19937_64 rng(0xACCE0002ULL);
  std::vector<Graph> graphs = {Graph::make(2, {{0, 1}}), Graph::make(2, {{0, 1}, {0, 1}}),
                               Graph::make(1, {{0, 0}})};
  std::uniform_int_distribution<int> d03(0, 3);
  for (const Graph& g : graphs) {
    ZigzagAlgebra A(g);
    std::vector<RatFunc> zeta = catalog_params(g);
    for (int k = 0; k < 50; ++k) {
      Point p;
      if (k % 3 == 0) {
        p = balanced_point(g, (k / 3) % 3 + 1, zeta, rng);
      } else {
        std::vector<long> v(static_cast<size_t>(g.vertices())),
            w(static_cast<size_t>(g.vertices()));
        for (auto& x : v) x = d03(rng);
        for (auto& x : w) x = d03(rng);
        p = random_point(g, v, w, zeta, rng);
      }
      bool resid = all_zero(moment_residual(p, Convention::Centerm));
      LabeledDuplex M = assemble(A, p, Convention::Centerm);
      FMatrix Dm = materialize(A, M.parts, M.parts, M.d);
      FMatrix Cm = materialize(A, M.parts, M.parts, central_action(A, M.parts, p.zeta_c));
      bool curv = (Dm * Dm == Cm);
      c.check(curv == resid, "curvature/residual mismatch on point " + std::to_string(k));
    }
  }
}

/* ---- criterion 3: the reflection bimodule squares to its stated curvature ---- */

void crit_bimodule_square(Crit& c) {
  RatFunc x = RatFunc::t();
  for (const Graph& g : {Graph::make(2, {{0, 1}}), Graph::make(2, {{0, 1}, {0, 1}})}) {
    ZigzagAlgebra A(g);
    for (int a = 0; a < g.vertices(); ++a) {
      BimoduleDuplex N = reflection_bimodule(A, a, x);
      CheckResult vb = verify_bimodule(N);
      c.check(vb.ok, "bimodule check: " + vb.detail);

      FMatrix Dm = bim_materialize(N);
      FMatrix want = bim_left_mult(N, A.socle(a)).scale(x);
      for (int h = 0; h < g.arrows(); ++h)
        if (g.source(h) == a)
          want = want - bim_left_mult(N, A.socle(g.target(h))).scale(x);
      want = want + bim_right_mult(N, A.socle(a)).scale(x);
      c.check(Dm * Dm == want, "square of d differs from the curvature formula");

      for (int b = 0; b < g.vertices(); ++b) {
        if (b == a) continue;
        c.check(bim_left_mult(N, A.socle(b)) == bim_right_mult(N, A.socle(b)),
                "socle actions differ away from the reflection vertex");
      }
    }
  }
}

/* ---- criterion 4: opposite-weight bimodules compose to the identity ---- */

void crit_inverse(Crit& c) {
  RatFunc x = RatFunc::t();
  for (const Graph& g : {Graph::make(2, {{0, 1}}), Graph::make(3, {{0, 1}, {1, 2}}),
                         Graph::make(2, {{0, 1}, {0, 1}})}) {
    ZigzagAlgebra A(g);
    for (int a = 0; a < g.vertices(); ++a) {
      CheckResult r = verify_inverse_pair(A, a, x);
      c.check(r.ok, "vertex " + std::to_string(a) + ": " + r.detail);
    }
  }
}

/* ---- criterion 5: braid relations, adjacent and commuting ---- */

void crit_braid(Crit& c) {
  RatFunc x = RatFunc::t();
  RatFunc y = x * x;
  {
    ZigzagAlgebra A(Graph::make(2, {{0, 1}}));
    CheckResult r = verify_braid(A, 0, 1, x, y);
    c.check(r.ok, "adjacent pair: " + r.detail);
  }
  {
    ZigzagAlgebra A(Graph::make(3, {{0, 1}, {1, 2}}));
    CheckResult r = verify_braid(A, 0, 2, x, y);
    c.check(r.ok, "commuting pair: " + r.detail);
  }
}

/* ---- criterion 6: intermediate stage equals the closed-form block pattern ---- */

void crit_stage(Crit& c) {
  std::mt19937_64 rng(0xACCE0006ULL);
  for (const Graph& g : {Graph::make(2, {{0, 1}}), Graph::make(2, {{0, 1}, {0, 1}})}) {
    ZigzagAlgebra A(g);
    std::vector<RatFunc> zeta = catalog_params(g);
    for (int rep = 0; rep < 3; ++rep) {
      for (auto dims : {std::pair<std::vector<long>, std::vector<long>>{{2, 1}, {1, 2}},
                        {{1, 2}, {2, 1}},
                        {{0, 2}, {1, 1}}}) {
        Point p = random_point(g, dims.first, dims.second, zeta, rng);
        for (int a = 0; a < g.vertices(); ++a) {
          LabeledDuplex got = reflection_stage(A, p, a);
          LabeledDuplex want = reflection_stage_expected(A, p, a);
          c.check(same_duplex(got, want),
                  "stage differs from the block pattern at vertex " + std::to_string(a));
        }
      }
    }
  }
}

/* ---- criterion 7: tensor and direct reflection agree point by point ---- */

void crit_cross_validate(Crit& c) {
  std::mt19937_64 rng(0xACCE0007ULL);
  for (const Graph& g : {Graph::make(2, {{0, 1}}), Graph::make(2, {{0, 1}, {0, 1}}),
                         Graph::make(3, {{0, 1}, {1, 2}})}) {
    ZigzagAlgebra A(g);
    std::vector<RatFunc> zeta = catalog_params(g);
    for (int k = 0; k < 20; ++k) {
      Convention conv = (k % 5 == 4) ? Convention::Mu : Convention::Centerm;
      Point p = balanced_point(g, 1 + k % 2, zeta, rng, conv);
      int a = k % g.vertices();
      Point rt = reflect_tensor(A, p, a, conv);
      Point rd = reflect_direct(A, p, a, conv);
      c.check(rt.v == rd.v && rt.w == rd.w, "methods disagree on dimensions");
      c.check(rt.v == weyl_reflect_dim(g, a, p.v, p.w), "dimensions off the reflection rule");
      std::vector<RatFunc> sz = weyl_reflect_param(g, a, p.zeta_c);
      c.check(rt.zeta_c == sz && rd.zeta_c == sz, "parameters off the reflection rule");
      c.check(framed_iso(rt, rd).exists, "no framed isomorphism between the methods");
      c.check(all_zero(moment_residual(rt, conv)), "reflected point violates the moment identity");
    }
  }
}

/* ---- criterion 8: involution and word independence along orbits ---- */

void crit_orbit(Crit& c) {
  std::mt19937_64 rng(0xACCE0008ULL);
  auto steps_ok = [](const OrbitResult& r) {
    for (const auto& s : r.steps)
      if (!(s.dims_match && s.params_match && s.moment_zero && s.generic_kept &&
            s.methods_agree))
        return false;
    return true;
  };
  for (const Graph& g : {Graph::make(2, {{0, 1}}), Graph::make(2, {{0, 1}, {0, 1}}),
                         Graph::make(3, {{0, 1}, {1, 2}})}) {
    ZigzagAlgebra A(g);
    std::vector<RatFunc> zeta = catalog_params(g);
    std::vector<long> w(static_cast<size_t>(g.vertices()), 1);
    for (int a = 0; a < g.vertices(); ++a) {
      for (const Point& start : {seed_point(g, w, zeta), balanced_point(g, 1, zeta, rng)}) {
        OrbitResult r = orbit(A, start, {a, a}, Convention::Centerm, true);
        c.check(r.ok && steps_ok(r), "involution word failed: " + r.detail);
        c.check(framed_iso(start, r.end).exists, "involution end not isomorphic to start");
      }
    }
  }
  struct Pair {
    Graph g;
    int a, b;
    bool adjacent;  // adjacent: compare aba/bab; commuting: ab/ba
  };
  std::vector<Pair> pairs = {{Graph::make(2, {{0, 1}}), 0, 1, true},
                             {Graph::make(3, {{0, 1}, {1, 2}}), 0, 1, true},
                             {Graph::make(3, {{0, 1}, {1, 2}}), 1, 2, true},
                             {Graph::make(3, {{0, 1}, {1, 2}}), 0, 2, false}};
  for (const auto& pr : pairs) {
    ZigzagAlgebra A(pr.g);
    std::vector<RatFunc> zeta = catalog_params(pr.g);
    Point start = balanced_point(pr.g, 1, zeta, rng);
    std::vector<int> wa = pr.adjacent ? std::vector<int>{pr.a, pr.b, pr.a}
                                      : std::vector<int>{pr.a, pr.b};
    std::vector<int> wb = pr.adjacent ? std::vector<int>{pr.b, pr.a, pr.b}
                                      : std::vector<int>{pr.b, pr.a};
    OrbitResult ra = orbit(A, start, wa, Convention::Centerm, true);
    OrbitResult rb = orbit(A, start, wb, Convention::Centerm, true);
    c.check(ra.ok && steps_ok(ra), "first word failed: " + ra.detail);
    c.check(rb.ok && steps_ok(rb), "second word failed: " + rb.detail);
    c.check(framed_iso(ra.end, rb.end).exists, "word endpoints not isomorphic");
  }
}

/* ---- criterion 9: cyclic-group side matches the cycle graphs ---- */

void crit_mckay(Crit& c) {
  std::mt19937_64 rng(0xACCE0009ULL);
  for (int n = 2; n <= 6; ++n) {
    McKayData mk = mckay_graph(n);
    c.check(mk.graph.vertices() == n && mk.graph.edge_count() == n,
            "order " + std::to_string(n) + ": wrong graph shape");
    if (n == 2) {
      c.check(mk.graph.edges() == std::vector<std::pair<int, int>>{{0, 1}, {0, 1}},
              "order 2: expected the doubled edge");
    } else {
      bool cyc = true;
      for (int k = 0; k < n; ++k)
        cyc = cyc && mk.graph.edges()[static_cast<size_t>(k)] ==
                         std::make_pair(k, (k + 1) % n);
      c.check(cyc, "order " + std::to_string(n) + ": edges are not the cycle");
    }
    ZigzagAlgebra A(mk.graph);
    c.check(A.dim() == 4 * n, "order " + std::to_string(n) + ": graph algebra dimension");
    SmashAlgebra S(mk.group);
    c.check(S.dim() == 4 * n, "order " + std::to_string(n) + ": smash algebra dimension");
  }

  for (int n : {2, 4}) {
    MoritaReport m = morita_check(n);
    c.check(m.ok, "order " + std::to_string(n) + ": " + m.detail);
    c.check(m.end_dim == 4 * n, "order " + std::to_string(n) + ": commutant dimension");
  }

  McKayData mk = mckay_graph(2);
  ZigzagAlgebra A(mk.graph);
  std::vector<RatFunc> zeta = catalog_params(mk.graph);
  Point p0 = balanced_point(mk.graph, 1, zeta, rng);
  Point p1 = reflect_tensor(A, p0, 0, Convention::Centerm);
  Point p2 = reflect_tensor(A, p1, 1, Convention::Centerm);
  Point q0 = balanced_point(mk.graph, 2, zeta, rng);
  Point q1 = reflect_tensor(A, q0, 1, Convention::Centerm);
  for (const Point* p : {&p0, &p1, &p2, &q0, &q1}) {
    bool resid = all_zero(moment_residual(*p, Convention::Centerm));
    c.check(resid, "transported point lost the moment identity");
    EquivariantReport er = equivariant_verify(equivariant_assemble(mk, *p));
    c.check(er.ok(), "equivariant checks failed: " + er.detail);
    c.check(er.curvature == resid, "curvature does not track the residual");
  }
  Point bad = p0;
  bad.zeta_c[0] = bad.zeta_c[0] + one();
  c.check(!all_zero(moment_residual(bad, Convention::Centerm)),
          "perturbed point should violate the moment identity");
  EquivariantReport eb = equivariant_verify(equivariant_assemble(mk, bad));
  c.check(!eb.curvature && eb.equivariant && eb.anticommute && eb.twist,
          "perturbation must break curvature and nothing else");
  std::uniform_int_distribution<int> d02(0, 2);
  for (int k = 0; k < 4; ++k) {
    std::vector<long> v = {d02(rng), d02(rng)}, w = {d02(rng) + 1, d02(rng)};
    Point r = random_point(mk.graph, v, w, zeta, rng);
    bool resid = all_zero(moment_residual(r, Convention::Centerm));
    EquivariantReport er = equivariant_verify(equivariant_assemble(mk, r));
    c.check(er.curvature == resid, "curvature/residual biconditional failed");
  }

  for (int a = 0; a < 2; ++a) {
    EquivariantC ec = build_equivariant_C(mk, a, RatFunc::t());
    c.check(ec.total_dim == 24, "equivariant summand has the wrong dimension");
    c.check(ec.blocks_match && ec.curvature_ok && ec.ok(),
            "vertex " + std::to_string(a) + ": " + ec.detail);
  }
}

/* ---- criterion 10: the two stability checks agree, witnesses included ---- */

void crit_stability(Crit& c) {
  std::mt19937_64 rng(0xACCE0010ULL);
  McKayData mk = mckay_graph(2);
  ZigzagAlgebra A(mk.graph);
  std::vector<RatFunc> zeta = catalog_params(mk.graph);

  std::vector<Point> pts;
  Point p0 = balanced_point(mk.graph, 1, zeta, rng);
  pts.push_back(p0);
  pts.push_back(reflect_tensor(A, p0, 0, Convention::Centerm));
  pts.push_back(reflect_tensor(A, pts.back(), 1, Convention::Centerm));
  Point q0 = balanced_point(mk.graph, 2, zeta, rng);
  pts.push_back(q0);
  pts.push_back(reflect_tensor(A, q0, 1, Convention::Centerm));
  pts.push_back(seed_point(mk.graph, {1, 1}, zeta));
  for (int k = 0; k < 4; ++k) {
    std::vector<long> v = {1 + k % 2, 2 - k % 2}, w = {1 + k / 2, 1 + k % 2};
    pts.push_back(random_point(mk.graph, v, w, zeta, rng));
  }
  for (size_t k = 0; k < pts.size(); ++k) {
    StabilityReport lin = stability_check(pts[k]);
    EquivariantStability eq = equivariant_stability(mk, pts[k]);
    c.check(eq.stable == lin.stable && eq.sub_dims == lin.sub_dims,
            "checks disagree on instance " + std::to_string(k));
  }

  // framing only: nothing to destabilize
  Point w1 = blank_point(mk.graph, {0, 0}, {1, 1});
  StabilityReport s1 = stability_check(w1);
  c.check(s1.stable && s1.sub_dims == std::vector<long>({0, 0}),
          "framing-only witness misjudged");

  // no j: all of V is invariant and unseen
  Point w2 = blank_point(mk.graph, {1, 1}, {1, 1});
  w2.B[0] = ones1();
  StabilityReport s2 = stability_check(w2);
  c.check(!s2.stable && s2.sub_dims == w2.v, "j = 0 witness misjudged");

  // j sees vertex 1 and the arrow feeds vertex 0 into it
  Point w3 = blank_point(mk.graph, {1, 1}, {1, 1});
  w3.B[0] = ones1();
  w3.j_[1] = ones1();
  StabilityReport s3 = stability_check(w3);
  c.check(s3.stable && s3.sub_dims == std::vector<long>({0, 0}), "fed witness misjudged");
  for (const Point* wp : {&w1, &w2, &w3}) {
    StabilityReport lin = stability_check(*wp);
    EquivariantStability eq = equivariant_stability(mk, *wp);
    c.check(eq.stable == lin.stable && eq.sub_dims == lin.sub_dims,
            "checks disagree on a witness");
  }
}

/* ---- criterion 11: the batch runner is byte-deterministic ---- */

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void crit_determinism(Crit& c) {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "qv-acceptance";
  fs::create_directories(dir);
  std::string cli = QV_CLI_PATH;
  for (int k = 1; k <= 2; ++k) {
    fs::path rep = dir / ("report" + std::to_string(k) + ".json");
    fs::path out = dir / ("stdout" + std::to_string(k) + ".txt");
    std::string cmd = "\"" + cli + "\" suite --seed 12345 --out \"" + rep.string() +
                      "\" > \"" + out.string() + "\" 2>&1";
    int rc = std::system(cmd.c_str());
    c.check(rc == 0, "run " + std::to_string(k) + " exited nonzero");
  }
  std::string r1 = slurp(dir / "report1.json");
  std::string r2 = slurp(dir / "report2.json");
  std::string o1 = slurp(dir / "stdout1.txt");
  std::string o2 = slurp(dir / "stdout2.txt");
  c.check(!r1.empty(), "first report is empty");
  c.check(r1 == r2, "reports differ between runs");
  c.check(!o1.empty() && o1 == o2, "printed output differs between runs");
}

}  // namespace

int main() {
  struct Entry {
    int num;
    double cap;
    std::function<void(Crit&)> fn;
  };
  // criterion 1 enforces its own 1 s per-graph cap; the outer bound is slack
  std::vector<Entry> entries = {
      {1, 12.0, crit_algebra},        {2, 10.0, crit_curvature},
      {3, 1.0, crit_bimodule_square}, {4, 30.0, crit_inverse},
      {5, 60.0, crit_braid},          {6, 5.0, crit_stage},
      {7, 60.0, crit_cross_validate}, {8, 120.0, crit_orbit},
      {9, 120.0, crit_mckay},         {10, 5.0, crit_stability},
      {11, 120.0, crit_determinism},
  };
  bool all = true;
  for (const auto& e : entries) {
    Crit c;
    auto t0 = Clock::now();
    try {
      e.fn(c);
    } catch (const std::exception& ex) {
      c.check(false, std::string("exception: ") + ex.what());
    }
    double dt = seconds_since(t0);
    if (dt > e.cap) c.check(false, "runtime cap exceeded");
    if (c.ok) {
      std::printf("criterion %d: pass (%.2fs)\n", e.num, dt);
    } else {
      std::printf("criterion %d: FAIL %s (%.2fs)\n", e.num, c.detail.c_str(), dt);
      all = false;
    }
  }
  std::printf("%s\n", all ? "acceptance: all criteria pass" : "acceptance: FAILURES");
  return all ? 0 : 1;
}
