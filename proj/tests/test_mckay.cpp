#include <doctest.h>

#include <numeric>

#include "qv/harness.hpp"
#include "qv/mckay.hpp"
#include "qv/scalar_parse.hpp"

using namespace qv;

namespace {

RatFunc sc(const std::string& s) { return parse_scalar(s, 4); }

bool all_zero(const std::vector<FMatrix>& ms) {
  for (const auto& m : ms)
    if (!m.is_zero()) return false;
  return true;
}

FMatrix ones1() {
  FMatrix m(1, 1);
  m.at(0, 0) = RatFunc(1);
  return m;
}

// point on the order-two graph with explicit one-dimensional blocks
Point tiny_point(const Graph& g, std::vector<long> v, std::vector<long> w) {
  Point p;
  p.graph = g;
  p.v = std::move(v);
  p.w = std::move(w);
  for (int h = 0; h < g.arrows(); ++h)
    p.B.emplace_back(p.v[g.target(h)], p.v[g.source(h)]);
  for (int a = 0; a < g.vertices(); ++a) {
    p.i_.emplace_back(p.v[a], p.w[a]);
    p.j_.emplace_back(p.w[a], p.v[a]);
    p.zeta_c.push_back(sc("1"));
    p.zeta_r.push_back(sc("0"));
  }
  return p;
}

}  // namespace

TEST_CASE("group data for small cyclic subgroups") {
  for (int n = 2; n <= 6; ++n) {
    GroupData gd = group_data(n);
    CHECK(gd.n == n);
    CHECK(gd.has_minus_one == (n % 2 == 0));
    CHECK(gd.zeta_pow[0] == CycRat(1));
    // the listed powers really are powers of one primitive root
    for (int k = 0; k + 1 < n; ++k) CHECK(gd.zeta_pow[static_cast<size_t>(k)] * gd.zeta() ==
                                          gd.zeta_pow[static_cast<size_t>(k + 1)]);
    CHECK(gd.zeta_pow[static_cast<size_t>(n - 1)] * gd.zeta() == CycRat(1));
    CHECK(gd.character(2, 3) == gd.zeta_pow[static_cast<size_t>((2 * 3) % n)]);
  }
  CHECK(group_data(2).conductor == 4);
  CHECK(group_data(3).conductor == 12);
  CHECK(group_data(4).conductor == 4);
  CHECK(group_data(5).conductor == 20);
  CHECK(group_data(6).conductor == 12);
  CHECK_THROWS_AS(group_data(1), McKayError);
}

TEST_CASE("graphs of cyclic subgroups are the affine cycles") {
  for (int n = 2; n <= 6; ++n) {
    McKayData md = mckay_graph(n);
    const Graph& g = md.graph;
    CHECK(g.vertices() == n);
    CHECK(g.edge_count() == n);
    CHECK(g.arrows() == 2 * n);
    CHECK(ZigzagAlgebra(g).dim() == 4 * n);

    // tensor decomposition: two summands, placed symmetrically
    for (int a = 0; a < n; ++a) {
      long row = std::accumulate(md.tensor_mult[static_cast<size_t>(a)].begin(),
                                 md.tensor_mult[static_cast<size_t>(a)].end(), 0L);
      CHECK(row == 2);
      for (int b = 0; b < n; ++b)
        CHECK(md.tensor_mult[static_cast<size_t>(a)][static_cast<size_t>(b)] ==
              md.tensor_mult[static_cast<size_t>(b)][static_cast<size_t>(a)]);
    }

    // each arrow pair carries both weight vectors, and the sign tracks them
    for (int h = 0; h < g.arrows(); ++h) {
      CHECK((md.arrow_gen[static_cast<size_t>(h)] == 1 || md.arrow_gen[static_cast<size_t>(h)] == 2));
      CHECK(md.arrow_gen[static_cast<size_t>(h)] != md.arrow_gen[static_cast<size_t>(g.bar(h))]);
      CHECK(g.eps(h) == (md.arrow_gen[static_cast<size_t>(h)] == 1 ? -1 : 1));
      CHECK(g.eps(h) + g.eps(g.bar(h)) == 0);
    }

    // affine Cartan matrix: rank n - 1, kernel spanned by (1, ..., 1)
    auto cart = g.cartan();
    FMatrix C(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        C.at(r, c) = RatFunc(CycRat(cart[static_cast<size_t>(r)][static_cast<size_t>(c)]));
    CHECK(C.rank() == n - 1);
    FMatrix delta(n, 1);
    for (int r = 0; r < n; ++r) delta.at(r, 0) = RatFunc(1);
    CHECK((C * delta).is_zero());
  }
  CHECK(mckay_graph(2).graph.edges() == std::vector<std::pair<int, int>>{{0, 1}, {0, 1}});
  CHECK(mckay_graph(4).graph.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

TEST_CASE("smash product multiplication") {
  for (int n : {2, 3}) {
    SmashAlgebra S(group_data(n));
    const int D = S.dim();
    CHECK(D == 4 * n);

    SmashAlgebra::Elem one = S.basis(S.index(0, 0));
    for (int k = 0; k < D; ++k) {
      CHECK(S.mul(one, S.basis(k)) == S.basis(k));
      CHECK(S.mul(S.basis(k), one) == S.basis(k));
    }

    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        for (int c = 0; c < D; ++c)
          CHECK(S.mul(S.mul(S.basis(a), S.basis(b)), S.basis(c)) ==
                S.mul(S.basis(a), S.mul(S.basis(b), S.basis(c))));

    // orthogonal idempotent decomposition
    SmashAlgebra::Elem sum = S.zero();
    for (int a = 0; a < n; ++a) {
      SmashAlgebra::Elem pa = S.idempotent(a);
      for (int b = 0; b < n; ++b) {
        SmashAlgebra::Elem prod = S.mul(pa, S.idempotent(b));
        CHECK(prod == (a == b ? pa : S.zero()));
      }
      for (int t = 0; t < D; ++t) sum[static_cast<size_t>(t)] = sum[static_cast<size_t>(t)] + pa[static_cast<size_t>(t)];
    }
    CHECK(sum == one);

    // defining relation gamma x = zeta x gamma and its inverse for y
    SmashAlgebra::Elem gam = S.basis(S.index(0, 1 % n));
    SmashAlgebra::Elem x = S.basis(S.index(1, 0));
    SmashAlgebra::Elem y = S.basis(S.index(2, 0));
    SmashAlgebra::Elem lhs = S.mul(gam, x);
    SmashAlgebra::Elem rhs = S.mul(x, gam);
    for (int t = 0; t < D; ++t) rhs[static_cast<size_t>(t)] = S.group().zeta() * rhs[static_cast<size_t>(t)];
    CHECK(lhs == rhs);
    lhs = S.mul(x, S.mul(gam, y));
    rhs = S.mul(x, S.mul(y, gam));
    for (int t = 0; t < D; ++t) rhs[static_cast<size_t>(t)] =
        S.group().character(1, n - 1) * rhs[static_cast<size_t>(t)];
    CHECK(lhs == rhs);
  }
}

TEST_CASE("central elements and the center dimension") {
  for (int n : {2, 3}) {
    SmashAlgebra S(group_data(n));
    const int D = S.dim();
    for (int a = 0; a < n; ++a) {
      SmashAlgebra::Elem ca = S.central(a);
      for (int k = 0; k < D; ++k) CHECK(S.mul(ca, S.basis(k)) == S.mul(S.basis(k), ca));
    }
    // z central iff (L_k - R_k) z = 0 for every basis element
    FMatrix E(D * D, D);
    for (int k = 0; k < D; ++k)
      for (int c = 0; c < D; ++c) {
        SmashAlgebra::Elem l = S.mul(S.basis(k), S.basis(c));
        SmashAlgebra::Elem r = S.mul(S.basis(c), S.basis(k));
        for (int t = 0; t < D; ++t)
          E.at(k * D + t, c) = RatFunc(l[static_cast<size_t>(t)] - r[static_cast<size_t>(t)]);
      }
    CHECK(D - E.rank() == n + 1);
  }
}

TEST_CASE("symmetrizing trace for even orders") {
  for (int n : {2, 4}) {
    SmashAlgebra S(group_data(n));
    const int D = S.dim();
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        CHECK(S.trace(S.mul(S.basis(a), S.basis(b))) == S.trace(S.mul(S.basis(b), S.basis(a))));
    CHECK(S.gram().rank() == D);
  }
  SmashAlgebra odd(group_data(3));
  CHECK_THROWS_AS(odd.trace(odd.basis(0)), McKayError);
}

TEST_CASE("the right-action commutant is the graph algebra") {
  for (int n : {2, 3, 4}) {
    MoritaReport rep = morita_check(n);
    CHECK(rep.ok);
    CHECK(rep.end_dim == 4 * n);
    CHECK(rep.detail.empty());
  }
}

TEST_CASE("equivariant curvature matches the moment identity") {
  McKayData md = mckay_graph(2);
  std::mt19937_64 rng(20260817);

  // points transported onto the moment fiber verify all four identities
  for (long dim : {1L, 2L}) {
    Point p = balanced_point(md.graph, dim, {sc("1+t"), sc("-2")}, rng);
    REQUIRE(all_zero(moment_residual(p, Convention::Centerm)));
    EquivariantReport rep = equivariant_verify(equivariant_assemble(md, p));
    CHECK(rep.ok());
    CHECK(rep.detail.empty());

    // perturbing one parameter breaks exactly the curvature identity
    p.zeta_c[0] = p.zeta_c[0] + sc("1");
    EquivariantReport bad = equivariant_verify(equivariant_assemble(md, p));
    CHECK_FALSE(bad.curvature);
    CHECK(bad.equivariant);
    CHECK(bad.anticommute);
    CHECK(bad.twist);
  }

  // without the moment identity the two sides still agree, both ways
  for (int trial = 0; trial < 6; ++trial) {
    Point p = random_point(md.graph, {2, 1}, {1, 1}, {sc("t"), sc("3")}, rng);
    bool onfiber = all_zero(moment_residual(p, Convention::Centerm));
    EquivariantReport rep = equivariant_verify(equivariant_assemble(md, p));
    CHECK(rep.curvature == onfiber);
    CHECK(rep.equivariant);
    CHECK(rep.anticommute);
    CHECK(rep.twist);
  }

  // zero V: the differential closes on the frame alone
  Point z = seed_point(md.graph, {1, 1}, {sc("t"), sc("-t")});
  CHECK(equivariant_verify(equivariant_assemble(md, z)).ok());

  // a larger group, rational point entries only
  McKayData md3 = mckay_graph(3);
  Point p3 = balanced_point(md3.graph, 1, {sc("1"), sc("2"), sc("-3")}, rng);
  CHECK(equivariant_verify(equivariant_assemble(md3, p3)).ok());
}

TEST_CASE("equivariant stability agrees with the linear criterion") {
  McKayData md = mckay_graph(2);
  std::mt19937_64 rng(7);

  // frame only: nothing to destabilize
  Point only_frame = tiny_point(md.graph, {0, 0}, {1, 1});
  EquivariantStability s0 = equivariant_stability(md, only_frame);
  CHECK(s0.stable);
  CHECK(s0.sub_dims == std::vector<long>({0, 0}));

  // no j at all: the whole of V is invariant and killed
  Point no_j = tiny_point(md.graph, {1, 1}, {1, 1});
  no_j.B[0] = ones1();
  EquivariantStability s1 = equivariant_stability(md, no_j);
  CHECK_FALSE(s1.stable);
  CHECK(s1.sub_dims == no_j.v);

  // j sees vertex 1 only, but the arrow feeds vertex 0 into it
  Point fed = tiny_point(md.graph, {1, 1}, {1, 1});
  fed.B[0] = ones1();
  fed.j_[1] = ones1();
  EquivariantStability s2 = equivariant_stability(md, fed);
  CHECK(s2.stable);
  CHECK(s2.sub_dims == std::vector<long>({0, 0}));
  // cutting the arrow strands vertex 0
  fed.B[0] = FMatrix(1, 1);
  EquivariantStability s3 = equivariant_stability(md, fed);
  CHECK_FALSE(s3.stable);
  CHECK(s3.sub_dims == std::vector<long>({1, 0}));

  // agreement with the plain linear check on assorted points
  for (int trial = 0; trial < 8; ++trial) {
    Point p = trial % 2 ? random_point(md.graph, {2, 1}, {1, 1}, {sc("t"), sc("3")}, rng)
                        : balanced_point(md.graph, 2, {sc("1+t"), sc("-1")}, rng);
    StabilityReport lin = stability_check(p);
    EquivariantStability eq = equivariant_stability(md, p);
    CHECK(eq.stable == lin.stable);
    CHECK(eq.sub_dims == lin.sub_dims);
  }
}

TEST_CASE("reflection summand matches the reflection bimodule") {
  for (int n : {2, 3}) {
    McKayData md = mckay_graph(n);
    for (int a = 0; a < n; ++a) {
      EquivariantC rep = build_equivariant_C(md, a, RatFunc::t());
      CHECK(rep.total_dim == 4 * n + 16);
      CHECK(rep.blocks_match);
      CHECK(rep.curvature_ok);
      CHECK(rep.detail.empty());
      CHECK_FALSE(rep.d.is_zero());
    }
  }
  CHECK_THROWS_AS(build_equivariant_C(mckay_graph(2), 2, RatFunc::t()), McKayError);
}
