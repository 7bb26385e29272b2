#include <doctest.h>

#include "qv/quiver.hpp"
#include "qv/scalar_parse.hpp"

using namespace qv;

namespace {
RatFunc sc(const std::string& s) { return parse_scalar(s, 4); }
}

TEST_CASE("double and sign function") {
  Graph g = Graph::make(3, {{0, 1}, {2, 1}, {2, 2}});
  CHECK(g.arrows() == 6);
  for (int h = 0; h < g.arrows(); ++h) {
    CHECK(g.bar(g.bar(h)) == h);
    CHECK(g.source(g.bar(h)) == g.target(h));
    CHECK(g.eps(h) + g.eps(g.bar(h)) == 0);
  }
  // default orientation: smaller endpoint is the source of the +1 arrow
  CHECK(g.eps(0) == 1);   // 0 -> 1
  CHECK(g.eps(2) == -1);  // 2 -> 1 listed, but 1 < 2
  CHECK(g.eps(3) == 1);
  CHECK(g.eps(4) == 1);  // loop: as-listed copy positive
  CHECK(g.source(2) == 2);
  CHECK(g.target(2) == 1);
  CHECK(g.source(4) == 2);
  CHECK(g.target(4) == 2);

  Graph o = Graph::make(2, {{0, 1}}, {-1});
  CHECK(o.eps(0) == -1);
  CHECK(o.eps(1) == 1);

  CHECK_THROWS_AS(Graph::make(2, {{0, 2}}), QuiverError);
  CHECK_THROWS_AS(Graph::make(2, {{0, 1}}, {2}), QuiverError);
  CHECK_THROWS_AS(Graph::make(2, {{0, 1}}, {1, 1}), QuiverError);
}

TEST_CASE("borcherds form") {
  Graph a2 = Graph::make(2, {{0, 1}});
  auto c = a2.cartan();
  CHECK(c == std::vector<std::vector<long>>{{2, -1}, {-1, 2}});

  Graph loop = Graph::make(1, {{0, 0}});
  CHECK(loop.cartan() == std::vector<std::vector<long>>{{0}});

  Graph kron = Graph::make(2, {{0, 1}, {0, 1}});
  CHECK(kron.cartan() == std::vector<std::vector<long>>{{2, -2}, {-2, 2}});

  Graph loop_edge = Graph::make(2, {{0, 0}, {0, 1}});
  CHECK(loop_edge.cartan() == std::vector<std::vector<long>>{{0, -1}, {-1, 2}});
}

TEST_CASE("dimension reflection") {
  Graph a2 = Graph::make(2, {{0, 1}});
  CHECK(weyl_reflect_dim(a2, 0, {0, 0}, {1, 0}) == std::vector<long>{1, 0});
  CHECK(weyl_reflect_dim(a2, 1, {1, 0}, {1, 0}) == std::vector<long>{1, 1});

  Graph kron = Graph::make(2, {{0, 1}, {0, 1}});
  CHECK(weyl_reflect_dim(kron, 0, {1, 1}, {2, 0}) == std::vector<long>{3, 1});

  // involution: reflecting twice restores the dimension vector
  Graph d = Graph::make(3, {{0, 1}, {1, 2}});
  std::vector<long> v{2, 3, 1}, w{1, 0, 2};
  for (int a = 0; a < 3; ++a)
    CHECK(weyl_reflect_dim(d, a, weyl_reflect_dim(d, a, v, w), w) == v);
}

TEST_CASE("parameter reflection") {
  Graph a2 = Graph::make(2, {{0, 1}});
  std::vector<RatFunc> zeta{sc("t"), sc("t^2")};
  auto r = weyl_reflect_param(a2, 0, zeta);
  CHECK(r[0] == sc("-t"));
  CHECK(r[1] == sc("t^2 + t"));
  // involution
  auto rr = weyl_reflect_param(a2, 0, r);
  CHECK(rr[0] == zeta[0]);
  CHECK(rr[1] == zeta[1]);
}

TEST_CASE("genericity over the rationals") {
  // zeta_c = 0, zeta_r = (1,2): violated by nu = (2,-1)
  std::vector<RatFunc> zc{RatFunc(), RatFunc()};
  std::vector<RatFunc> zr{RatFunc(1), RatFunc(2)};
  auto g = is_generic_pair(zc, zr);
  CHECK_FALSE(g.generic);
  REQUIRE(g.certificate.size() == 2);
  CHECK(g.certificate[0] == 2);
  CHECK(g.certificate[1] == -1);

  // (t, t^2) has a trivial Q-kernel
  CHECK(is_generic({sc("t"), sc("t^2")}).generic);
  // (t, 2t) does not
  auto h = is_generic({sc("t"), sc("2*t")});
  CHECK_FALSE(h.generic);
  CHECK(h.certificate == std::vector<mpz_class>{mpz_class(2), mpz_class(-1)});
  // the real part can rescue a degenerate complex part
  CHECK(is_generic_pair({sc("t"), sc("2*t")}, {RatFunc(1), RatFunc(1)}).generic);
  // cyclotomic coordinates count separately
  CHECK(is_generic({sc("1"), sc("i")}).generic);
  CHECK_FALSE(is_generic({sc("i"), sc("2*i")}).generic);
  // denominators are cleared before expansion
  CHECK(is_generic({sc("1/(t+1)"), sc("1/(t+2)")}).generic);
}
