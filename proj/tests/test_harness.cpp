#include <doctest.h>

#include "qv/harness.hpp"
#include "qv/io.hpp"
#include "qv/scalar_parse.hpp"

using namespace qv;

namespace {

RatFunc sc(const std::string& s) { return parse_scalar(s, 4); }

bool all_zero(const std::vector<FMatrix>& ms) {
  for (const auto& m : ms)
    if (!m.is_zero()) return false;
  return true;
}

}  // namespace

TEST_CASE("seeding at zero dimension") {
  Graph g = Graph::make(2, {{0, 1}});
  Point s = seed_point(g, {1, 0}, {sc("t"), sc("t^2")});
  CHECK(s.v == std::vector<long>({0, 0}));
  CHECK(s.w == std::vector<long>({1, 0}));
  CHECK(all_zero(moment_residual(s, Convention::Centerm)));
  CHECK(all_zero(moment_residual(s, Convention::Mu)));
  CHECK(stability_check(s).stable);

  Point empty = seed_point(g, {0, 0}, {sc("t"), sc("t^2")});
  CHECK(empty.w == std::vector<long>({0, 0}));
  ZigzagAlgebra A(g);
  CHECK(assemble(A, empty, Convention::Centerm).total_dim() == 0);

  CHECK_THROWS_AS(seed_point(g, {1}, {sc("t"), sc("t^2")}), DuplexError);
}

TEST_CASE("a single orbit step lands on the reflected dims") {
  Graph g = Graph::make(2, {{0, 1}});
  ZigzagAlgebra A(g);
  Point s = seed_point(g, {1, 0}, {sc("t"), sc("t^2")});
  OrbitResult r = orbit(A, s, {0});
  REQUIRE(r.ok);
  CHECK(r.end.v == std::vector<long>({1, 0}));
  CHECK(r.end.zeta_c == std::vector<RatFunc>({sc("-t"), sc("t^2 + t")}));
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].vertex == 0);
  CHECK(r.steps[0].dims_match);
  CHECK(r.steps[0].params_match);
  CHECK(r.steps[0].moment_zero);
  CHECK(r.steps[0].generic_kept);
  CHECK(r.steps[0].methods_agree);
}

TEST_CASE("a repeated letter cancels up to gauge") {
  Graph g = Graph::make(2, {{0, 1}});
  ZigzagAlgebra A(g);
  Point s = seed_point(g, {1, 1}, {sc("t"), sc("t^2")});
  Point p = orbit(A, s, {0}, Convention::Centerm, false).end;
  OrbitResult r = orbit(A, p, {1, 1});
  REQUIRE(r.ok);
  CHECK(r.end.v == p.v);
  CHECK(r.end.zeta_c == p.zeta_c);
  CHECK(framed_iso(r.end, p).exists);
}

TEST_CASE("braid words from the seed agree up to gauge") {
  Graph g = Graph::make(3, {{0, 1}, {1, 2}});
  ZigzagAlgebra A(g);
  Point s = seed_point(g, {1, 1, 1}, {sc("t"), sc("t^2"), sc("t^3")});
  OrbitResult left = orbit(A, s, {1, 2, 1});
  OrbitResult right = orbit(A, s, {2, 1, 2});
  REQUIRE(left.ok);
  REQUIRE(right.ok);
  CHECK(left.end.v == right.end.v);
  CHECK(left.end.zeta_c == right.end.zeta_c);
  CHECK(framed_iso(left.end, right.end).exists);
}

TEST_CASE("orbit preconditions propagate") {
  Graph g = Graph::make(2, {{0, 1}});
  ZigzagAlgebra A(g);
  Point s = seed_point(g, {1, 1}, {RatFunc(), sc("t")});
  CHECK_THROWS_WITH_AS(orbit(A, s, {0}),
                       "reflection requires a nonzero complex parameter at the vertex",
                       DuplexError);

  Graph loop = Graph::make(1, {{0, 0}});
  ZigzagAlgebra AL(loop);
  Point ls = seed_point(loop, {1}, {sc("t")});
  CHECK_THROWS_WITH_AS(orbit(AL, ls, {0}), "reflection vertex carries a loop",
                       DuplexError);
}

TEST_CASE("the catalog words are valid from their seeds") {
  for (const auto& e : suite_catalog()) {
    CAPTURE(e.name);
    ZigzagAlgebra A(e.graph);
    auto zc = catalog_params(e.graph);
    REQUIRE(is_generic(zc).generic);
    Point s = seed_point(e.graph, e.w, zc);
    OrbitResult r = orbit(A, s, e.word, Convention::Centerm, false);
    CHECK(r.ok);
    CHECK(r.steps.size() == e.word.size());
  }
  CHECK(suite_catalog().size() >= 10);
}

TEST_CASE("random points respect requested shapes") {
  Graph g = Graph::make(2, {{0, 1}, {1, 1}});
  std::mt19937_64 rng(5);
  Point p = random_point(g, {2, 1}, {0, 3}, catalog_params(g), rng);
  CHECK(p.B[0].rows() == 1);
  CHECK(p.B[0].cols() == 2);
  CHECK(p.B[2].rows() == 1);  // loop arrow
  CHECK(p.B[2].cols() == 1);
  CHECK(p.i_[1].rows() == 1);
  CHECK(p.i_[1].cols() == 3);

  Point b = balanced_point(g, 2, catalog_params(g), rng);
  CHECK(all_zero(moment_residual(b, Convention::Centerm)));
  Point bm = balanced_point(g, 2, catalog_params(g), rng, Convention::Mu);
  CHECK(all_zero(moment_residual(bm, Convention::Mu)));
}

TEST_CASE("the suite is deterministic and independent of parallelism") {
  SuiteReport a = run_suite(42, 1);
  SuiteReport b = run_suite(42, 3);
  REQUIRE(a.items.size() == b.items.size());
  for (size_t k = 0; k < a.items.size(); ++k) {
    CAPTURE(a.items[k].id);
    CHECK(a.items[k].id == b.items[k].id);
    CHECK(a.items[k].ok == b.items[k].ok);
    CHECK(a.items[k].detail == b.items[k].detail);
    CHECK(a.items[k].ok);
    if (!a.items[k].ok) MESSAGE(a.items[k].detail);
  }
  CHECK(a.ok);
  for (size_t k = 1; k < a.items.size(); ++k) CHECK(a.items[k - 1].id < a.items[k].id);
}

TEST_CASE("point and quiver files round-trip") {
  Graph g = Graph::make(2, {{0, 1}});
  NamedPoint np;
  np.quiver.graph = g;
  np.quiver.names = {"a", "b"};
  std::mt19937_64 rng(11);
  np.point = balanced_point(g, 2, catalog_params(g), rng);
  np.point.zeta_r = {sc("1 + i"), sc("(t)/(t + 1)")};

  json j = point_to_json(np);
  NamedPoint back = point_from_json(j);
  CHECK(back.quiver.names == np.quiver.names);
  CHECK(back.point.v == np.point.v);
  CHECK(back.point.w == np.point.w);
  CHECK(back.point.B == np.point.B);
  CHECK(back.point.i_ == np.point.i_);
  CHECK(back.point.j_ == np.point.j_);
  CHECK(back.point.zeta_c == np.point.zeta_c);
  CHECK(back.point.zeta_r == np.point.zeta_r);

  // omitted blocks are zero
  NamedPoint sparse = point_from_json(json::parse(R"({
    "quiver": {"vertices": ["a", "b"], "edges": [["a", "b"]]},
    "v": {"a": 1}, "w": {"b": 2}})"));
  CHECK(sparse.point.v == std::vector<long>({1, 0}));
  CHECK(sparse.point.w == std::vector<long>({0, 2}));
  CHECK(sparse.point.B[0].rows() == 0);
  CHECK(sparse.point.zeta_c[0].is_zero());

  CHECK_THROWS_AS(point_from_json(json::parse(R"({"quiver": {"vertices": ["a"]},
    "v": {"zzz": 1}})")),
                  IoError);
  CHECK_THROWS_AS(point_from_json(json::parse(R"({"quiver": {"vertices": ["a"]},
    "zeta_c": {"a": "t + * 2"}})")),
                  IoError);
}

TEST_CASE("arrow ids name edges with their direction") {
  NamedGraph ng;
  ng.graph = Graph::make(2, {{0, 1}, {0, 1}});
  ng.names = {"x", "y"};
  CHECK(ng.arrow_id(0) == "0:x->y");
  CHECK(ng.arrow_id(1) == "0:y->x");
  CHECK(ng.arrow_id(2) == "1:x->y");
  CHECK(ng.arrow_index("1:y->x") == 3);
  CHECK(ng.arrow_index("2") == 2);
  CHECK_THROWS_AS(ng.arrow_index("2:x->y"), IoError);
  CHECK_THROWS_AS(ng.arrow_index("0:x->x"), IoError);
}

TEST_CASE("reports serialize deterministically") {
  Report r;
  r.inputs["point"] = digest_hex("body");
  r.add("check-a", true, json{{"residual", "0"}});
  r.add("check-b", false);
  json j = report_to_json(r);
  CHECK(j["overall"] == "fail");
  CHECK(j["checks"][0]["id"] == "check-a");
  CHECK(j["checks"][0]["verdict"] == "pass");
  CHECK(j["checks"][1]["verdict"] == "fail");
  CHECK(j["version"] == kToolVersion);
  CHECK(report_to_json(r).dump() == j.dump());
}
