#include "qv/harness.hpp"

#include <algorithm>
#include <functional>
#include <future>
#include <sstream>

#include "qv/io.hpp"
#include "qv/mckay.hpp"

namespace qv {

Point seed_point(const Graph& g, const std::vector<long>& w,
                 const std::vector<RatFunc>& zeta_c,
                 const std::vector<RatFunc>& zeta_r) {
  int n = g.vertices();
  if (static_cast<int>(w.size()) != n) throw DuplexError("framing dims length");
  if (static_cast<int>(zeta_c.size()) != n) throw DuplexError("parameter length");
  Point p;
  p.graph = g;
  p.v.assign(n, 0);
  p.w = w;
  for (int h = 0; h < g.arrows(); ++h) p.B.emplace_back(0, 0);
  for (int a = 0; a < n; ++a) {
    p.i_.emplace_back(0, static_cast<int>(w[a]));
    p.j_.emplace_back(static_cast<int>(w[a]), 0);
  }
  p.zeta_c = zeta_c;
  p.zeta_r = zeta_r.empty() ? std::vector<RatFunc>(n) : zeta_r;
  p.validate();
  return p;
}

/* Entries are small integers or +-t: integer relations among the entries
 * stay visible and degrees stay low under reflection. */
static RatFunc rnd_scalar(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 9);
  int k = pick(rng);
  if (k < 7) return RatFunc(k - 3);  // -3 .. 3
  RatFunc t = RatFunc::t();
  return k == 7 ? t : (k == 8 ? -t : t * RatFunc(2));
}

static FMatrix rnd_matrix(int rows, int cols, std::mt19937_64& rng) {
  FMatrix m(rows, cols);
  std::uniform_int_distribution<int> small(-2, 2);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m.at(r, c) = RatFunc(small(rng));
  return m;
}

Point random_point(const Graph& g, const std::vector<long>& v,
                   const std::vector<long>& w, const std::vector<RatFunc>& zeta_c,
                   std::mt19937_64& rng) {
  int n = g.vertices();
  Point p;
  p.graph = g;
  p.v = v;
  p.w = w;
  for (int h = 0; h < g.arrows(); ++h)
    p.B.push_back(rnd_matrix(static_cast<int>(v[g.target(h)]),
                             static_cast<int>(v[g.source(h)]), rng));
  for (int a = 0; a < n; ++a) {
    p.i_.push_back(rnd_matrix(static_cast<int>(v[a]), static_cast<int>(w[a]), rng));
    p.j_.push_back(rnd_matrix(static_cast<int>(w[a]), static_cast<int>(v[a]), rng));
  }
  p.zeta_c = zeta_c;
  p.zeta_r.assign(n, RatFunc());
  p.validate();
  return p;
}

Point balanced_point(const Graph& g, long dim, const std::vector<RatFunc>& zeta_c,
                     std::mt19937_64& rng, Convention conv) {
  int n = g.vertices();
  int d = static_cast<int>(dim);
  Point p;
  p.graph = g;
  p.v.assign(n, dim);
  p.w.assign(n, dim);
  for (int h = 0; h < g.arrows(); ++h) p.B.push_back(rnd_matrix(d, d, rng));
  for (int a = 0; a < n; ++a) {
    p.i_.push_back(FMatrix::identity(d));
    // j_a = c_a - sum over arrows out of a of the weighted round trip
    FMatrix j = FMatrix::identity(d).scale(zeta_c[a]);
    for (int h : g.arrows_from(a)) {
      int s = conv == Convention::Centerm ? g.eps(g.bar(h)) : g.eps(h);
      FMatrix term = p.B[g.bar(h)] * p.B[h];
      j = s > 0 ? j - term : j + term;
    }
    p.j_.push_back(j);
  }
  p.zeta_c = zeta_c;
  p.zeta_r.assign(n, RatFunc());
  p.validate();
  return p;
}

static bool all_zero(const std::vector<FMatrix>& ms) {
  for (const auto& m : ms)
    if (!m.is_zero()) return false;
  return true;
}

OrbitResult orbit(const ZigzagAlgebra& A, const Point& start,
                  const std::vector<int>& word, Convention conv, bool cross_check) {
  const Graph& g = A.graph();
  OrbitResult R;
  R.ok = true;
  Point cur = start;
  bool generic0 = is_generic(cur.zeta_c).generic;
  for (size_t step = 0; step < word.size(); ++step) {
    int a = word[step];
    Point next = reflect_tensor(A, cur, a, conv);
    OrbitStep st;
    st.vertex = a;
    st.v = next.v;
    st.dims_match = next.v == weyl_reflect_dim(g, a, cur.v, cur.w) && next.w == cur.w;
    st.params_match = next.zeta_c == weyl_reflect_param(g, a, cur.zeta_c) &&
                      next.zeta_r == weyl_reflect_param(g, a, cur.zeta_r);
    st.moment_zero = all_zero(moment_residual(next, conv));
    bool generic1 = is_generic(next.zeta_c).generic;
    st.generic_kept = generic0 == generic1;
    if (cross_check) {
      Point alt = reflect_direct(A, cur, a, conv);
      st.methods_agree = alt.v == next.v && alt.w == next.w &&
                         alt.zeta_c == next.zeta_c && alt.zeta_r == next.zeta_r &&
                         framed_iso(next, alt).exists;
    }
    if (R.ok && !(st.dims_match && st.params_match && st.moment_zero &&
                  st.generic_kept && st.methods_agree)) {
      R.ok = false;
      std::ostringstream os;
      os << "step " << step << " at vertex " << a << ":";
      if (!st.dims_match) os << " dims";
      if (!st.params_match) os << " params";
      if (!st.moment_zero) os << " moment";
      if (!st.generic_kept) os << " genericity";
      if (!st.methods_agree) os << " methods";
      R.detail = os.str();
    }
    R.steps.push_back(std::move(st));
    cur = std::move(next);
    generic0 = generic1;
  }
  R.end = std::move(cur);
  return R;
}

/* ------------------------------------------------------------------ */

static RatFunc tpow(int k) {
  RatFunc r(1);
  for (int i = 0; i < k; ++i) r *= RatFunc::t();
  return r;
}

std::vector<RatFunc> catalog_params(const Graph& g) {
  std::vector<RatFunc> z;
  for (int a = 0; a < g.vertices(); ++a) z.push_back(tpow(a + 1));
  return z;
}

const std::vector<CatalogEntry>& suite_catalog() {
  static const std::vector<CatalogEntry> cat = [] {
    std::vector<CatalogEntry> c;
    c.push_back({"a1", Graph::make(1, {}), {1}, {0, 0}});
    c.push_back({"loop", Graph::make(1, {{0, 0}}), {1}, {}});
    c.push_back({"a2", Graph::make(2, {{0, 1}}), {1, 1}, {0, 1, 0}});
    c.push_back({"a3", Graph::make(3, {{0, 1}, {1, 2}}), {1, 1, 1}, {1, 0, 2, 1}});
    c.push_back({"a4", Graph::make(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}),
                 {1, 0, 0, 0, 1},
                 {0, 1, 2, 3}});
    c.push_back({"d4", Graph::make(4, {{0, 1}, {0, 2}, {0, 3}}), {0, 1, 1, 1},
                 {1, 2, 3, 0}});
    c.push_back({"hat_a1", Graph::make(2, {{0, 1}, {0, 1}}), {1, 1}, {0, 1}});
    c.push_back({"hat_a3", Graph::make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}),
                 {1, 0, 1, 0},
                 {0, 2, 1}});
    c.push_back({"triple", Graph::make(2, {{0, 1}, {0, 1}, {0, 1}}), {1, 1}, {0, 1}});
    c.push_back({"loop_edge", Graph::make(2, {{0, 1}, {1, 1}}), {1, 1}, {0}});
    return c;
  }();
  return cat;
}

/* ------------------------------------------------------------------ */

namespace {

struct ItemCtx {
  std::mt19937_64 rng;
  bool ok = true;
  std::string detail;

  void check(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

using ItemFn = std::function<void(ItemCtx&)>;

struct ItemDef {
  std::string id;
  ItemFn fn;
};

int edges_between(const Graph& g, int a, int b) {
  int k = 0;
  for (auto& [x, y] : g.edges())
    if ((x == a && y == b) || (x == b && y == a)) ++k;
  return k;
}

std::vector<int> loopless_vertices(const Graph& g) {
  std::vector<int> out;
  for (int a = 0; a < g.vertices(); ++a)
    if (g.loops_at(a) == 0) out.push_back(a);
  return out;
}

int local_index(const ZigzagAlgebra& A, int vertex, int k) {
  const auto& pb = A.proj_basis(vertex);
  for (size_t i = 0; i < pb.size(); ++i)
    if (pb[i] == k) return static_cast<int>(i);
  return -1;
}

// dense left action of basis element x, rows flattened as (part, copy, local)
FMatrix module_action(const ZigzagAlgebra& A, const std::vector<Summand>& parts,
                      int x) {
  int total = 0;
  for (const auto& s : parts)
    total += s.mult * (s.kind == SumKind::Proj
                           ? static_cast<int>(A.proj_basis(s.vertex).size())
                           : 1);
  FMatrix out(total, total);
  int start = 0;
  for (const auto& s : parts) {
    int loc = s.kind == SumKind::Proj
                  ? static_cast<int>(A.proj_basis(s.vertex).size())
                  : 1;
    for (int j = 0; j < s.mult; ++j) {
      if (s.kind == SumKind::Proj) {
        for (int lu = 0; lu < loc; ++lu) {
          auto [c, xu] = A.mul_basis(x, A.proj_basis(s.vertex)[lu]);
          if (c == 0) continue;
          out.at(start + j * loc + local_index(A, s.vertex, xu),
                 start + j * loc + lu) += RatFunc(c);
        }
      } else if (x == A.idem(s.vertex)) {
        out.at(start + j, start + j) += RatFunc(1);
      }
    }
    start += loc * s.mult;
  }
  return out;
}

std::vector<long> rnd_dims(int n, std::mt19937_64& rng, int hi) {
  std::uniform_int_distribution<int> d(0, hi);
  std::vector<long> v;
  for (int a = 0; a < n; ++a) v.push_back(d(rng));
  return v;
}

std::vector<RatFunc> rnd_params(int n, std::mt19937_64& rng) {
  std::vector<RatFunc> z;
  for (int a = 0; a < n; ++a) z.push_back(rnd_scalar(rng));
  return z;
}

bool word_valid(const Graph& g, std::vector<RatFunc> zeta,
                const std::vector<int>& word) {
  for (int a : word) {
    if (a < 0 || a >= g.vertices() || g.loops_at(a) > 0) return false;
    if (zeta[a].is_zero()) return false;
    zeta = weyl_reflect_param(g, a, zeta);
  }
  return true;
}

/* One rewrite by a defining relation of the Weyl group: insert or cancel
 * a repeated letter, swap a commuting pair, or flip a braid triple. */
std::vector<int> rewrite_word(const Graph& g, const std::vector<int>& w,
                              std::mt19937_64& rng) {
  std::vector<int> free = loopless_vertices(g);
  std::uniform_int_distribution<int> kind(0, 3);
  for (int tries = 0; tries < 40; ++tries) {
    int k = kind(rng);
    if (k == 0 && !free.empty()) {
      int a = free[rng() % free.size()];
      size_t pos = rng() % (w.size() + 1);
      std::vector<int> out(w.begin(), w.begin() + pos);
      out.push_back(a);
      out.push_back(a);
      out.insert(out.end(), w.begin() + pos, w.end());
      return out;
    }
    if (k == 1) {
      std::vector<size_t> hits;
      for (size_t p = 0; p + 1 < w.size(); ++p)
        if (w[p] == w[p + 1]) hits.push_back(p);
      if (hits.empty()) continue;
      size_t p = hits[rng() % hits.size()];
      std::vector<int> out(w.begin(), w.begin() + p);
      out.insert(out.end(), w.begin() + p + 2, w.end());
      return out;
    }
    if (k == 2) {
      std::vector<size_t> hits;
      for (size_t p = 0; p + 1 < w.size(); ++p)
        if (w[p] != w[p + 1] && edges_between(g, w[p], w[p + 1]) == 0)
          hits.push_back(p);
      if (hits.empty()) continue;
      size_t p = hits[rng() % hits.size()];
      std::vector<int> out = w;
      std::swap(out[p], out[p + 1]);
      return out;
    }
    if (k == 3) {
      std::vector<size_t> hits;
      for (size_t p = 0; p + 2 < w.size(); ++p)
        if (w[p] == w[p + 2] && w[p] != w[p + 1] &&
            edges_between(g, w[p], w[p + 1]) == 1)
          hits.push_back(p);
      if (hits.empty()) continue;
      size_t p = hits[rng() % hits.size()];
      std::vector<int> out = w;
      out[p] = w[p + 1];
      out[p + 1] = w[p];
      out[p + 2] = w[p + 1];
      return out;
    }
  }
  return w;
}

std::string fmt_word(const std::vector<int>& w) {
  std::string s = "[";
  for (size_t k = 0; k < w.size(); ++k)
    s += (k ? " " : "") + std::to_string(w[k]);
  return s + "]";
}

/* ----------------------------- items ----------------------------- */

void item_scalars_linear_algebra(ItemCtx& c) {
  std::uniform_int_distribution<int> dim(1, 4);
  for (int rep = 0; rep < 12 && c.ok; ++rep) {
    int r = dim(c.rng), n = dim(c.rng);
    FMatrix A(r, n);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n; ++j) A.at(i, j) = rnd_scalar(c.rng);
    FMatrix K = A.kernel_basis();
    c.check((A * K).is_zero(), "kernel columns are not annihilated");
    c.check(A.rank() + K.cols() == n, "rank plus kernel dimension is off");
    FMatrix x0(n, 1);
    for (int j = 0; j < n; ++j) x0.at(j, 0) = rnd_scalar(c.rng);
    FMatrix b = A * x0;
    auto sol = A.solve(b);
    c.check(sol.has_value(), "consistent system reported unsolvable");
    if (sol) c.check((A * *sol) == b, "solve does not reproduce the right side");
    FMatrix pi = A.cokernel_projection();
    c.check((pi * A).is_zero(), "cokernel projection does not kill the image");
    c.check(pi.rows() == r - A.rank(), "cokernel projection has the wrong height");
    c.check(pi.rank() == pi.rows(), "cokernel projection is not full rank");
    if (r == n && A.rank() == n)
      c.check(A * A.inverse() == FMatrix::identity(n), "inverse is wrong");
  }
}

void item_scalars_conj(ItemCtx& c) {
  RatFunc t = RatFunc::t();
  c.check(t.conj() == t, "conjugation moves t");
  RatFunc i(CycRat::imag_unit(4));
  c.check(i.conj() == -i, "conjugate of i is not -i");
  RatFunc z(CycRat::zeta(12));
  c.check((z.conj() * z).is_one(), "conjugate of a root of unity is not its inverse");
  for (int rep = 0; rep < 10 && c.ok; ++rep) {
    RatFunc x = rnd_scalar(c.rng) + i * rnd_scalar(c.rng);
    RatFunc y = rnd_scalar(c.rng) * t + i;
    c.check(x.conj().conj() == x, "conjugation is not an involution");
    c.check((x + y).conj() == x.conj() + y.conj(), "conjugation is not additive");
    c.check((x * y).conj() == x.conj() * y.conj(), "conjugation is not multiplicative");
  }
}

void item_algebra_dimension(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    int expect = 2 * (e.graph.vertices() + e.graph.edge_count());
    c.check(A.dim() == expect, e.name + ": dimension is not 2(|I|+|E|)");
    for (int k = 0; k < A.dim() && c.ok; ++k) {
      int left = 0, right = 0;
      for (int a = 0; a < A.vertices(); ++a) {
        auto [cl, kl] = A.mul_basis(A.idem(a), k);
        auto [cr, kr] = A.mul_basis(k, A.idem(a));
        if (cl != 0) {
          left++;
          c.check(cl == 1 && kl == k, e.name + ": left unit law fails");
        }
        if (cr != 0) {
          right++;
          c.check(cr == 1 && kr == k, e.name + ": right unit law fails");
        }
      }
      c.check(left == 1 && right == 1, e.name + ": unit decomposition fails");
    }
  }
}

void item_algebra_associativity(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    int d = A.dim();
    for (int x = 0; x < d; ++x)
      for (int y = 0; y < d; ++y) {
        auto [cxy, kxy] = A.mul_basis(x, y);
        for (int z = 0; z < d; ++z) {
          auto [cyz, kyz] = A.mul_basis(y, z);
          int lhs_c = 0, lhs_k = -1, rhs_c = 0, rhs_k = -1;
          if (cxy != 0) {
            auto [c2, k2] = A.mul_basis(kxy, z);
            lhs_c = cxy * c2;
            lhs_k = c2 ? k2 : -1;
          }
          if (cyz != 0) {
            auto [c2, k2] = A.mul_basis(x, kyz);
            rhs_c = cyz * c2;
            rhs_k = c2 ? k2 : -1;
          }
          if (lhs_c == 0 && rhs_c == 0) continue;
          if (!(lhs_c == rhs_c && lhs_k == rhs_k)) {
            c.check(false, e.name + ": associativity fails at (" + A.basis_name(x) +
                               ", " + A.basis_name(y) + ", " + A.basis_name(z) + ")");
            return;
          }
        }
      }
  }
}

void item_algebra_center(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    int n = A.vertices(), d = A.dim();
    // commutators of a degree-2 candidate sum lambda_a X_a with every basis
    // element, as a linear system in lambda; the kernel must be everything
    FMatrix sys(d * d, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < d; ++b) {
        auto [cl, kl] = A.mul_basis(A.socle(a), b);
        auto [cr, kr] = A.mul_basis(b, A.socle(a));
        if (cl != 0) sys.at(b * d + kl, a) += RatFunc(cl);
        if (cr != 0) sys.at(b * d + kr, a) -= RatFunc(cr);
      }
    c.check(sys.kernel_basis().cols() == n,
            e.name + ": the degree-two center is smaller than the socle span");
  }
}

void item_algebra_module_action(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    int d = A.dim();
    for (int a = 0; a < A.vertices() && c.ok; ++a) {
      std::vector<Summand> proj = {{SumKind::Proj, a, 0, 1}};
      std::vector<FMatrix> rho;
      for (int x = 0; x < d; ++x) rho.push_back(module_action(A, proj, x));
      for (int x = 0; x < d && c.ok; ++x)
        for (int y = 0; y < d && c.ok; ++y) {
          auto [cf, k] = A.mul_basis(x, y);
          FMatrix want = cf == 0 ? FMatrix(rho[x].rows(), rho[x].cols())
                                 : (cf > 0 ? rho[k] : -rho[k]);
          c.check(rho[x] * rho[y] == want,
                  e.name + ": projective action is not multiplicative at (" +
                      A.basis_name(x) + ", " + A.basis_name(y) + ")");
        }
    }
  }
}

void item_algebra_trace_form(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    FMatrix G = A.gram();
    c.check(G.rank() == A.dim(), e.name + ": trace pairing is degenerate");
    for (int x = 0; x < A.dim() && c.ok; ++x)
      for (int y = 0; y < A.dim(); ++y) {
        RatFunc want =
            (A.parity(x) && A.parity(y)) ? -G.at(y, x) : G.at(y, x);
        if (!(G.at(x, y) == want)) {
          c.check(false, e.name + ": trace pairing is not graded symmetric");
          break;
        }
      }
  }
}

void item_quiver_involution(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    const Graph& g = e.graph;
    for (int rep = 0; rep < 4; ++rep) {
      auto v = rnd_dims(g.vertices(), c.rng, 3);
      auto w = rnd_dims(g.vertices(), c.rng, 3);
      auto z = rnd_params(g.vertices(), c.rng);
      for (int a : loopless_vertices(g)) {
        auto v2 = weyl_reflect_dim(g, a, weyl_reflect_dim(g, a, v, w), w);
        c.check(v2 == v, e.name + ": dim reflection is not an involution");
        auto z2 = weyl_reflect_param(g, a, weyl_reflect_param(g, a, z));
        c.check(z2 == z, e.name + ": parameter reflection is not an involution");
      }
    }
  }
}

void item_quiver_braid(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    const Graph& g = e.graph;
    auto free = loopless_vertices(g);
    for (int rep = 0; rep < 4; ++rep) {
      auto v = rnd_dims(g.vertices(), c.rng, 3);
      auto w = rnd_dims(g.vertices(), c.rng, 3);
      auto z = rnd_params(g.vertices(), c.rng);
      auto dim_word = [&](const std::vector<int>& word) {
        auto cur = v;
        for (int a : word) cur = weyl_reflect_dim(g, a, cur, w);
        return cur;
      };
      auto par_word = [&](const std::vector<int>& word) {
        auto cur = z;
        for (int a : word) cur = weyl_reflect_param(g, a, cur);
        return cur;
      };
      for (int a : free)
        for (int b : free) {
          if (a >= b) continue;
          int k = edges_between(g, a, b);
          if (k == 1) {
            c.check(dim_word({a, b, a}) == dim_word({b, a, b}),
                    e.name + ": braid identity fails on dims");
            c.check(par_word({a, b, a}) == par_word({b, a, b}),
                    e.name + ": braid identity fails on parameters");
          } else if (k == 0) {
            c.check(dim_word({a, b}) == dim_word({b, a}),
                    e.name + ": distant reflections do not commute on dims");
            c.check(par_word({a, b}) == par_word({b, a}),
                    e.name + ": distant reflections do not commute on parameters");
          }
        }
    }
  }
}

void item_quiver_central_compat(ItemCtx& c) {
  // reflecting the parameter vector equals the central substitution
  // c -> c + c_a (sum of neighbours - 2 X_a) in socle coordinates
  for (const auto& e : suite_catalog()) {
    const Graph& g = e.graph;
    for (int rep = 0; rep < 4; ++rep) {
      auto z = rnd_params(g.vertices(), c.rng);
      for (int a : loopless_vertices(g)) {
        std::vector<RatFunc> shifted = z;
        for (int h : g.arrows_from(a)) shifted[g.target(h)] += z[a];
        shifted[a] -= z[a] * RatFunc(2);
        c.check(shifted == weyl_reflect_param(g, a, z),
                e.name + ": central substitution disagrees with the reflection");
      }
    }
  }
}

void item_duplex_supercommutation(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    for (Convention conv : {Convention::Centerm, Convention::Mu}) {
      auto v = rnd_dims(e.graph.vertices(), c.rng, 2);
      auto w = rnd_dims(e.graph.vertices(), c.rng, 2);
      Point p = random_point(e.graph, v, w, catalog_params(e.graph), c.rng);
      LabeledDuplex M = assemble(A, p, conv);
      FMatrix D = materialize(A, M.parts, M.parts, M.d);
      for (int x = 0; x < A.dim() && c.ok; ++x) {
        FMatrix P = module_action(A, M.parts, x);
        FMatrix lhs = D * P;
        FMatrix rhs = A.parity(x) ? -(P * D) : P * D;
        c.check(lhs == rhs,
                e.name + ": differential does not supercommute with " +
                    A.basis_name(x));
      }
    }
  }
}

void item_duplex_curvature(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    auto zc = catalog_params(e.graph);
    int moment_true = 0, moment_false = 0;
    for (int rep = 0; rep < 50 && c.ok; ++rep) {
      Point p;
      if (rep % 5 == 0) {
        p = balanced_point(e.graph, 1 + rep % 2, zc, c.rng);
      } else {
        auto v = rnd_dims(e.graph.vertices(), c.rng, 3);
        auto w = rnd_dims(e.graph.vertices(), c.rng, 3);
        p = random_point(e.graph, v, w, zc, c.rng);
      }
      bool zero = all_zero(moment_residual(p, Convention::Centerm));
      bool squares = verify_duplex(assemble(A, p, Convention::Centerm), zc).ok;
      (zero ? moment_true : moment_false)++;
      c.check(zero == squares,
              e.name + ": moment residual and curvature identity disagree");
    }
    c.check(moment_true > 0, e.name + ": no moment-exact samples exercised");
    if (e.graph.edge_count() > 0)
      c.check(moment_false > 0, e.name + ": no violating samples exercised");
  }
}

void item_duplex_stability(ItemCtx& c) {
  const Graph& g = suite_catalog()[2].graph;  // a2
  auto zc = catalog_params(g);
  Point s = seed_point(g, {1, 1}, zc);
  c.check(stability_check(s).stable, "the framed seed is not stable");

  // no framing: all of V is invariant inside ker j
  Point p = balanced_point(g, 2, zc, c.rng);
  for (int a = 0; a < 2; ++a) {
    p.w[a] = 0;
    p.i_[a] = FMatrix(2, 0);
    p.j_[a] = FMatrix(0, 2);
  }
  StabilityReport r = stability_check(p);
  c.check(!r.stable, "unframed point reported stable");
  c.check(r.sub_dims == p.v, "invariant subspace does not fill V");
  c.check(r.witness_vertex >= 0 && !r.witness.is_zero(),
          "unstable point lacks a witness");
  if (r.witness_vertex >= 0)
    c.check((p.j_[r.witness_vertex] * r.witness).is_zero(),
            "witness escapes the kernel of j");

  for (int rep = 0; rep < 8 && c.ok; ++rep) {
    auto v = rnd_dims(2, c.rng, 3);
    auto w = rnd_dims(2, c.rng, 3);
    Point q = random_point(g, v, w, zc, c.rng);
    StabilityReport rr = stability_check(q);
    bool all0 = true;
    for (int a = 0; a < 2; ++a) {
      all0 = all0 && rr.sub_dims[a] == 0;
      c.check(rr.sub_dims[a] >= 0 && rr.sub_dims[a] <= v[a],
              "invariant subspace exceeds V");
    }
    c.check(rr.stable == all0, "verdict disagrees with the subspace dims");
    if (!rr.stable) {
      c.check(rr.witness_vertex >= 0 && !rr.witness.is_zero(),
              "unstable point lacks a witness");
      c.check((q.j_[rr.witness_vertex] * rr.witness).is_zero(),
              "witness escapes the kernel of j");
    }
  }
}

void item_duplex_framed_iso(ItemCtx& c) {
  const Graph& g = suite_catalog()[2].graph;  // a2
  auto zc = catalog_params(g);
  auto gauge = [&](const Point& p, const std::vector<FMatrix>& gm) {
    Point q = p;
    for (int h = 0; h < g.arrows(); ++h)
      q.B[h] = gm[g.target(h)] * p.B[h] * gm[g.source(h)].inverse();
    for (int a = 0; a < g.vertices(); ++a) {
      q.i_[a] = gm[a] * p.i_[a];
      q.j_[a] = p.j_[a] * gm[a].inverse();
    }
    return q;
  };
  auto rnd_invertible = [&](int n) {
    for (;;) {
      FMatrix m = rnd_matrix(n, n, c.rng);
      if (m.rank() == n) return m;
    }
  };
  for (int rep = 0; rep < 3 && c.ok; ++rep) {
    Point p = balanced_point(g, 2, zc, c.rng);
    c.check(framed_iso(p, p).exists, "a point is not isomorphic to itself");
    std::vector<FMatrix> g1 = {rnd_invertible(2), rnd_invertible(2)};
    std::vector<FMatrix> g2 = {rnd_invertible(2), rnd_invertible(2)};
    Point q = gauge(p, g1);
    Point r = gauge(q, g2);
    c.check(framed_iso(p, q).exists, "gauge transform not detected");
    c.check(framed_iso(q, p).exists, "isomorphism is not symmetric");
    c.check(framed_iso(p, r).exists, "isomorphism is not transitive");
    FramedIso wit = framed_iso(p, q);
    if (wit.exists) {
      for (int h = 0; h < g.arrows(); ++h)
        c.check(wit.g[g.target(h)] * p.B[h] == q.B[h] * wit.g[g.source(h)],
                "witness does not intertwine the arrows");
      for (int a = 0; a < g.vertices(); ++a) {
        c.check(wit.g[a] * p.i_[a] == q.i_[a], "witness does not match i");
        c.check(q.j_[a] * wit.g[a] == p.j_[a], "witness does not match j");
      }
    }
    Point far = p;
    far.i_[0] = far.i_[0] + FMatrix::identity(2);
    far.B[0] = far.B[0] + FMatrix::identity(2).scale(RatFunc::t());
    c.check(!framed_iso(p, far).exists || all_zero(moment_residual(far, Convention::Centerm)),
            "distinct data matched too eagerly");
  }
}

void item_bimodule_square(ItemCtx& c) {
  RatFunc x = RatFunc::t();
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    for (int a : loopless_vertices(e.graph)) {
      BimoduleDuplex C = reflection_bimodule(A, a, x);
      CheckResult r = verify_bimodule(C);
      c.check(r.ok, e.name + ": reflection bimodule fails its identity: " + r.detail);
      for (int b = 0; b < A.vertices(); ++b) {
        if (b == a) continue;
        c.check(bim_left_mult(C, A.socle(b)) == bim_right_mult(C, A.socle(b)),
                e.name + ": a socle away from the vertex acts differently on the two sides");
      }
      if (!c.ok) return;
    }
    for (int a = 0; a < e.graph.vertices(); ++a) {
      if (e.graph.loops_at(a) == 0) continue;
      bool threw = false;
      try {
        reflection_bimodule(A, a, x);
      } catch (const DuplexError&) {
        threw = true;
      }
      c.check(threw, e.name + ": loop vertex accepted by the reflection bimodule");
    }
  }
}

void item_bimodule_tensor_curvature(ItemCtx& c) {
  for (const char* name : {"a2", "a3", "hat_a1"}) {
    const CatalogEntry* e = nullptr;
    for (const auto& k : suite_catalog())
      if (k.name == name) e = &k;
    ZigzagAlgebra A(e->graph);
    auto zc = catalog_params(e->graph);
    Point p = balanced_point(e->graph, 1, zc, c.rng);
    LabeledDuplex M = assemble(A, p, Convention::Centerm);
    for (int a : loopless_vertices(e->graph)) {
      BimoduleDuplex C = reflection_bimodule(A, a, -zc[a]);
      ModuleTensor T = tensor_with_module(C, M, zc);
      c.check(T.curvature == weyl_reflect_param(e->graph, a, zc),
              std::string(name) + ": tensor curvature is not the reflected parameter");
      CheckResult r = verify_duplex(T.module, T.curvature);
      c.check(r.ok, std::string(name) + ": tensor square fails: " + r.detail);
    }
  }
}

void item_bimodule_inverse_pair(ItemCtx& c) {
  RatFunc x = RatFunc::t();
  for (const char* name : {"a2", "a3", "hat_a1", "d4"}) {
    for (const auto& e : suite_catalog()) {
      if (e.name != name) continue;
      ZigzagAlgebra A(e.graph);
      for (int a : loopless_vertices(e.graph)) {
        CheckResult r = verify_inverse_pair(A, a, x);
        c.check(r.ok, e.name + ": opposite reflections do not cancel: " + r.detail);
        if (!c.ok) return;
      }
    }
  }
}

void item_bimodule_braid(ItemCtx& c) {
  RatFunc x = RatFunc::t(), y = RatFunc::t() * RatFunc::t();
  for (const auto& e : suite_catalog()) {
    auto free = loopless_vertices(e.graph);
    ZigzagAlgebra A(e.graph);
    for (int a : free)
      for (int b : free) {
        if (a >= b) continue;
        int k = edges_between(e.graph, a, b);
        CheckResult r = verify_braid(A, a, b, x, y);
        if (k <= 1) {
          c.check(r.ok, e.name + ": braid check fails at (" + std::to_string(a) +
                            ", " + std::to_string(b) + "): " + r.detail);
        } else {
          c.check(!r.ok, e.name + ": multi-edge pair unexpectedly accepted");
        }
        if (!c.ok) return;
      }
  }
}

void item_bimodule_stage_closed_form(ItemCtx& c) {
  for (const char* name : {"a2", "hat_a1"}) {
    for (const auto& e : suite_catalog()) {
      if (e.name != name) continue;
      ZigzagAlgebra A(e.graph);
      auto zc = catalog_params(e.graph);
      for (int rep = 0; rep < 2; ++rep) {
        auto v = rnd_dims(e.graph.vertices(), c.rng, 2);
        auto w = rnd_dims(e.graph.vertices(), c.rng, 2);
        Point p = random_point(e.graph, v, w, zc, c.rng);
        for (int a : loopless_vertices(e.graph)) {
          LabeledDuplex got = reflection_stage(A, p, a);
          LabeledDuplex want = reflection_stage_expected(A, p, a);
          bool same = got.parts == want.parts;
          got.d.prune();
          want.d.prune();
          same = same && got.d.blocks == want.d.blocks;
          c.check(same, e.name + ": intermediate stage differs from the closed form");
        }
      }
    }
  }
}

void item_bimodule_reduce_confluence(ItemCtx& c) {
  for (const char* name : {"a2", "a3"}) {
    const CatalogEntry* e = nullptr;
    for (const auto& k : suite_catalog())
      if (k.name == name) e = &k;
    ZigzagAlgebra A(e->graph);
    auto zc = catalog_params(e->graph);
    Point start = seed_point(e->graph, e->w, zc);
    Point p = orbit(A, start, {e->word[0]}, Convention::Centerm, false).end;
    int a = e->word[1];

    auto cancellable = [&](const LabeledDuplex& M) {
      std::vector<std::pair<int, int>> out;
      for (auto& [key, paths] : M.d.blocks) {
        auto [s, t] = key;
        const Summand& S = M.parts[s];
        const Summand& T = M.parts[t];
        if (S.kind != T.kind || S.vertex != T.vertex || S.mult != T.mult ||
            S.mult == 0)
          continue;
        int want = S.kind == SumKind::Proj ? A.idem(S.vertex) : kPathIds;
        auto it = paths.find(want);
        if (it == paths.end()) continue;
        if (it->second.rank() == S.mult) out.push_back({s, t});
      }
      return out;
    };

    std::vector<Point> results;
    for (int schedule = 0; schedule < 3; ++schedule) {
      LabeledDuplex M = reflection_stage(A, p, a);
      int round = 0;
      for (;;) {
        auto pairs = cancellable(M);
        if (pairs.empty()) break;
        size_t pick = schedule == 0 ? 0
                      : schedule == 1 ? pairs.size() - 1
                                      : (round % pairs.size());
        cancel_pair(M, pairs[pick].first, pairs[pick].second);
        ++round;
      }
      merge_summands(M);
      results.push_back(extract(M, weyl_reflect_param(e->graph, a, p.zeta_c),
                                weyl_reflect_param(e->graph, a, p.zeta_r),
                                Convention::Centerm));
    }
    Point ref = reflect_tensor(A, p, a);
    for (size_t k = 0; k < results.size() && c.ok; ++k) {
      c.check(results[k].v == ref.v,
              std::string(name) + ": schedule changes the reduced dims");
      c.check(framed_iso(results[k], ref).exists,
              std::string(name) + ": schedule " + std::to_string(k) +
                  " lands on a different point");
      if (k > 0)
        c.check(framed_iso(results[k - 1], results[k]).exists,
                std::string(name) + ": two schedules disagree");
    }
  }
}

void item_harness_seed(ItemCtx& c) {
  const Graph& g = suite_catalog()[2].graph;  // a2
  std::vector<RatFunc> zc = {RatFunc::t(), RatFunc::t() * RatFunc::t()};
  Point s = seed_point(g, {1, 0}, zc);
  c.check(all_zero(moment_residual(s, Convention::Centerm)),
          "seed violates the moment identity");
  c.check(stability_check(s).stable, "seed is not stable");
  Point empty = seed_point(g, {0, 0}, zc);
  c.check(empty.v == std::vector<long>({0, 0}) && empty.w == empty.v,
          "empty seed has content");
  ZigzagAlgebra A(g);
  OrbitResult r = orbit(A, s, {0});
  c.check(r.ok, "one-step orbit failed: " + r.detail);
  c.check(r.end.v == std::vector<long>({1, 0}),
          "reflecting the framed seed misses the expected dims");
}

void item_harness_orbit_transport(ItemCtx& c) {
  for (const auto& e : suite_catalog()) {
    ZigzagAlgebra A(e.graph);
    auto zc = catalog_params(e.graph);
    Point s = seed_point(e.graph, e.w, zc);
    OrbitResult r = orbit(A, s, e.word, Convention::Centerm, true);
    c.check(r.ok, e.name + ": " + r.detail);
    if (!c.ok) return;
  }
  // the gauged convention transports the same way
  for (const char* name : {"a2", "hat_a1"}) {
    for (const auto& e : suite_catalog()) {
      if (e.name != name) continue;
      ZigzagAlgebra A(e.graph);
      Point s = seed_point(e.graph, e.w, catalog_params(e.graph));
      OrbitResult r = orbit(A, s, e.word, Convention::Mu, true);
      c.check(r.ok, e.name + " (gauged): " + r.detail);
    }
  }
}

void item_harness_involution(ItemCtx& c) {
  for (const char* name : {"a2", "a3", "hat_a1"}) {
    for (const auto& e : suite_catalog()) {
      if (e.name != name) continue;
      ZigzagAlgebra A(e.graph);
      auto zc = catalog_params(e.graph);
      Point s = seed_point(e.graph, e.w, zc);
      Point p = orbit(A, s, {e.word[0]}, Convention::Centerm, false).end;
      for (int a : loopless_vertices(e.graph)) {
        if (p.zeta_c[a].is_zero()) continue;
        OrbitResult r = orbit(A, p, {a, a}, Convention::Centerm, false);
        c.check(r.ok, e.name + ": double reflection orbit failed: " + r.detail);
        c.check(r.end.v == p.v, e.name + ": double reflection moves the dims");
        c.check(framed_iso(r.end, p).exists,
                e.name + ": double reflection is not the identity up to gauge");
        if (!c.ok) return;
      }
    }
  }
}

void item_harness_braid_words(ItemCtx& c) {
  struct Case {
    const char* name;
    int a, b;
  };
  for (Case k : {Case{"a2", 0, 1}, Case{"a3", 0, 1}, Case{"a3", 1, 2}}) {
    for (const auto& e : suite_catalog()) {
      if (e.name != k.name) continue;
      ZigzagAlgebra A(e.graph);
      Point s = seed_point(e.graph, e.w, catalog_params(e.graph));
      OrbitResult left = orbit(A, s, {k.a, k.b, k.a});
      OrbitResult right = orbit(A, s, {k.b, k.a, k.b});
      c.check(left.ok, e.name + ": left braid word failed: " + left.detail);
      c.check(right.ok, e.name + ": right braid word failed: " + right.detail);
      c.check(left.end.v == right.end.v && left.end.zeta_c == right.end.zeta_c,
              e.name + ": braid words disagree on dims or parameters");
      c.check(framed_iso(left.end, right.end).exists,
              e.name + ": braid words land on non-isomorphic points");
      if (!c.ok) return;
    }
  }
}

void item_harness_word_independence(ItemCtx& c) {
  for (const char* name : {"a2", "a3"}) {
    const CatalogEntry* e = nullptr;
    for (const auto& k : suite_catalog())
      if (k.name == name) e = &k;
    ZigzagAlgebra A(e->graph);
    auto zc = catalog_params(e->graph);
    auto free = loopless_vertices(e->graph);
    Point s = seed_point(e->graph, e->w, zc);
    for (int rep = 0; rep < 3 && c.ok; ++rep) {
      std::vector<int> w1;
      do {
        w1.clear();
        std::uniform_int_distribution<int> len(1, 3);
        int L = len(c.rng);
        for (int k = 0; k < L; ++k) w1.push_back(free[c.rng() % free.size()]);
      } while (!word_valid(e->graph, zc, w1));
      std::vector<int> w2 = w1;
      for (int k = 0; k < 2; ++k) {
        auto cand = rewrite_word(e->graph, w2, c.rng);
        if (word_valid(e->graph, zc, cand)) w2 = cand;
      }
      OrbitResult r1 = orbit(A, s, w1, Convention::Centerm, false);
      OrbitResult r2 = orbit(A, s, w2, Convention::Centerm, false);
      c.check(r1.ok && r2.ok, std::string(name) + ": orbit failed on " +
                                  fmt_word(w1) + " / " + fmt_word(w2));
      if (w1 == w2) continue;
      c.check(r1.end.v == r2.end.v && r1.end.zeta_c == r2.end.zeta_c,
              std::string(name) + ": equal words " + fmt_word(w1) + " and " +
                  fmt_word(w2) + " disagree on dims or parameters");
      c.check(framed_iso(r1.end, r2.end).exists,
              std::string(name) + ": equal words " + fmt_word(w1) + " and " +
                  fmt_word(w2) + " land on non-isomorphic points");
    }
  }
}

void item_harness_genericity(ItemCtx& c) {
  // generic inputs stay generic along every catalog orbit
  for (const auto& e : suite_catalog()) {
    auto zc = catalog_params(e.graph);
    c.check(is_generic(zc).generic, e.name + ": catalog parameters are degenerate");
    auto z = zc;
    for (int a : e.word) {
      z = weyl_reflect_param(e.graph, a, z);
      c.check(is_generic(z).generic, e.name + ": genericity lost along the orbit");
    }
  }
  c.check(is_generic_pair({RatFunc::t(), RatFunc::t() * RatFunc::t()},
                          {RatFunc(), RatFunc()})
              .generic,
          "generic pair misreported");
  c.check(!is_generic_pair({RatFunc::t(), RatFunc::t()}, {RatFunc(1), RatFunc(1)})
               .generic,
          "degenerate pair misreported");

  // a violated relation transports by the reflection of its certificate
  const Graph& g = suite_catalog()[3].graph;  // a3
  std::vector<RatFunc> z = {RatFunc::t(), RatFunc::t(),
                            RatFunc::t() * RatFunc::t()};
  Genericity before = is_generic(z);
  c.check(!before.generic && !before.certificate.empty(),
          "degenerate parameters passed as generic");
  auto cart = g.cartan();
  for (int a : loopless_vertices(g)) {
    auto z2 = weyl_reflect_param(g, a, z);
    Genericity after = is_generic(z2);
    c.check(!after.generic, "reflection repaired a degenerate parameter");
    if (before.certificate.empty()) continue;
    std::vector<mpz_class> nu = before.certificate;
    mpz_class na = -nu[a];
    for (int b = 0; b < g.vertices(); ++b)
      if (b != a) na -= cart[a][b] * nu[b];
    nu[a] = na;
    RatFunc dot;
    for (int b = 0; b < g.vertices(); ++b)
      dot += z2[b] * RatFunc(mpq_class(nu[b]));
    c.check(dot.is_zero(), "certificate does not transport by the reflection");
  }
}

void item_harness_preconditions(ItemCtx& c) {
  const Graph& a2 = suite_catalog()[2].graph;
  ZigzagAlgebra A(a2);
  Point s = seed_point(a2, {1, 1}, {RatFunc(), RatFunc::t()});
  bool threw = false;
  std::string msg;
  try {
    orbit(A, s, {0});
  } catch (const DuplexError& e) {
    threw = true;
    msg = e.what();
  }
  c.check(threw, "zero parameter at the vertex was not rejected");
  c.check(msg.find("nonzero") != std::string::npos,
          "rejection does not explain the zero parameter");

  const Graph& loop = suite_catalog()[1].graph;
  ZigzagAlgebra AL(loop);
  Point ls = seed_point(loop, {1}, {RatFunc::t()});
  threw = false;
  try {
    orbit(AL, ls, {0});
  } catch (const DuplexError&) {
    threw = true;
  }
  c.check(threw, "loop vertex was not rejected");
}

void item_harness_convention_mismatch(ItemCtx& c) {
  // a point exact for one sign convention must fail the other
  const Graph& g = suite_catalog()[2].graph;  // a2
  auto zc = catalog_params(g);
  Point p = balanced_point(g, 1, zc, c.rng);
  p.B[0].at(0, 0) = RatFunc(1);  // keep the round trip nonzero
  p.B[1].at(0, 0) = RatFunc(1);
  for (int a = 0; a < 2; ++a) {
    FMatrix j = FMatrix::identity(1).scale(zc[a]);
    for (int h : g.arrows_from(a)) {
      FMatrix term = p.B[g.bar(h)] * p.B[h];
      j = g.eps(g.bar(h)) > 0 ? j - term : j + term;
    }
    p.j_[a] = j;
  }
  c.check(all_zero(moment_residual(p, Convention::Centerm)),
          "constructed point is not exact");
  c.check(!all_zero(moment_residual(p, Convention::Mu)),
          "sign mismatch went undetected");
  ZigzagAlgebra A(g);
  c.check(!verify_duplex(assemble(A, p, Convention::Mu), zc).ok,
          "gauged assembly hides the sign mismatch");
}

void item_cli_round_trip(ItemCtx& c) {
  // point files over the default field
  const Graph& g = suite_catalog()[2].graph;
  NamedPoint np;
  np.quiver.graph = g;
  np.quiver.names = {"a", "b"};
  np.conductor = 4;
  np.point = balanced_point(g, 2, catalog_params(g), c.rng);
  RatFunc i(CycRat::imag_unit(4));
  np.point.zeta_r = {i + RatFunc(1), -i};
  json j = point_to_json(np);
  NamedPoint back = point_from_json(j);
  c.check(back.quiver.names == np.quiver.names, "vertex names changed");
  c.check(back.conductor == np.conductor, "conductor changed");
  c.check(back.point.v == np.point.v && back.point.w == np.point.w,
          "dims changed across the round trip");
  c.check(back.point.zeta_c == np.point.zeta_c &&
              back.point.zeta_r == np.point.zeta_r,
          "parameters changed across the round trip");
  c.check(back.point.B == np.point.B, "arrow matrices changed");
  c.check(back.point.i_ == np.point.i_ && back.point.j_ == np.point.j_,
          "framing matrices changed");

  // a non-default conductor
  NamedPoint hex = np;
  hex.conductor = 12;
  hex.point.zeta_r = {RatFunc(CycRat::zeta(12)), RatFunc(1)};
  NamedPoint hex2 = point_from_json(point_to_json(hex));
  c.check(hex2.point.zeta_r == hex.point.zeta_r, "roots of unity changed");

  // quiver files keep orientation overrides
  NamedGraph ng;
  ng.graph = Graph::make(2, {{1, 0}, {0, 1}}, {1, -1});
  ng.names = {"x", "y"};
  NamedGraph ng2 = quiver_from_json(quiver_to_json(ng));
  c.check(ng2.names == ng.names, "quiver names changed");
  c.check(ng2.graph.edges() == ng.graph.edges(), "edges changed");
  for (int h = 0; h < ng.graph.arrows(); ++h)
    c.check(ng2.graph.eps(h) == ng.graph.eps(h), "orientation changed");

  bool threw = false;
  try {
    point_from_json(json::parse(R"({"quiver": {"vertices": ["a"]},
                                    "zeta_c": {"a": "t +"}})"));
  } catch (const IoError& e) {
    threw = std::string(e.what()).find("position") != std::string::npos;
  }
  c.check(threw, "scalar error lost its position annotation");
}

void item_cli_determinism(ItemCtx& c) {
  Report r;
  r.inputs["quiver"] = digest_hex("content");
  r.add("alpha", true, json{{"residual", "0"}});
  r.add("beta", false, json{{"witness", json::array({"1", "-1"})}});
  std::string once = report_to_json(r).dump(2);
  std::string twice = report_to_json(r).dump(2);
  c.check(once == twice, "identical reports serialize differently");
  Report r2;
  r2.inputs["quiver"] = digest_hex("content");
  r2.add("alpha", true, json{{"residual", "0"}});
  r2.add("beta", false, json{{"witness", json::array({"1", "-1"})}});
  c.check(report_to_json(r2).dump(2) == once,
          "rebuilt report serializes differently");
  c.check(digest_hex("") == "cbf29ce484222325", "empty digest drifted");
  c.check(!r.overall() , "a failing check did not fail the report");

  const Graph& g = suite_catalog()[2].graph;
  NamedPoint np;
  np.quiver.graph = g;
  np.quiver.names = {"a", "b"};
  np.point = balanced_point(g, 1, catalog_params(g), c.rng);
  c.check(point_to_json(np).dump(2) == point_to_json(np).dump(2),
          "point files serialize differently across calls");
}

/* ------------------------------------------------------------------ */

void item_mckay_graph_shape(ItemCtx& c) {
  for (int n = 2; n <= 6 && c.ok; ++n) {
    McKayData md = mckay_graph(n);
    const Graph& g = md.graph;
    c.check(g.vertices() == n && g.edge_count() == n,
            "group graph of order " + std::to_string(n) + " is not a cycle");
    c.check(ZigzagAlgebra(g).dim() == 4 * n, "graph algebra dimension is off");
    for (int h = 0; h < g.arrows() && c.ok; ++h) {
      c.check(md.arrow_gen[h] != md.arrow_gen[g.bar(h)],
              "an edge repeats a weight vector");
      c.check(g.eps(h) == (md.arrow_gen[h] == 1 ? -1 : 1),
              "sign does not track the weight vector");
    }
    for (int a = 0; a < n && c.ok; ++a) {
      long row = 0;
      for (long m : md.tensor_mult[a]) row += m;
      c.check(row == 2, "plane tensor row sum is not two");
    }
  }
}

void item_mckay_smash(ItemCtx& c) {
  for (int n : {2, 3}) {
    SmashAlgebra S(group_data(n));
    std::uniform_int_distribution<int> pick(0, S.dim() - 1);
    for (int t = 0; t < 40 && c.ok; ++t) {
      int a = pick(c.rng), b = pick(c.rng), d = pick(c.rng);
      c.check(S.mul(S.mul(S.basis(a), S.basis(b)), S.basis(d)) ==
                  S.mul(S.basis(a), S.mul(S.basis(b), S.basis(d))),
              "smash multiplication is not associative");
    }
    for (int a = 0; a < n && c.ok; ++a) {
      for (int b = 0; b < n; ++b)
        c.check(S.mul(S.idempotent(a), S.idempotent(b)) ==
                    (a == b ? S.idempotent(a) : S.zero()),
                "isotype projections are not orthogonal idempotents");
      for (int t = 0; t < 8; ++t) {
        int k = pick(c.rng);
        c.check(S.mul(S.central(a), S.basis(k)) == S.mul(S.basis(k), S.central(a)),
                "central element fails to commute");
      }
    }
  }
}

void item_mckay_trace(ItemCtx& c) {
  for (int n : {2, 4}) {
    SmashAlgebra S(group_data(n));
    std::uniform_int_distribution<int> pick(0, S.dim() - 1);
    for (int t = 0; t < 60 && c.ok; ++t) {
      int a = pick(c.rng), b = pick(c.rng);
      c.check(S.trace(S.mul(S.basis(a), S.basis(b))) ==
                  S.trace(S.mul(S.basis(b), S.basis(a))),
              "trace is not symmetric");
    }
    c.check(S.gram().rank() == S.dim(), "trace pairing is degenerate");
  }
}

void item_mckay_morita(ItemCtx& c) {
  for (int n : {2, 3, 4}) {
    MoritaReport rep = morita_check(n);
    c.check(rep.ok, "order " + std::to_string(n) + ": " + rep.detail);
    c.check(rep.end_dim == 4 * n, "commutant dimension drifted");
  }
}

void item_mckay_equivariant_curvature(ItemCtx& c) {
  McKayData md = mckay_graph(2);
  auto zc = catalog_params(md.graph);
  for (long dim : {1L, 2L}) {
    Point p = balanced_point(md.graph, dim, zc, c.rng);
    EquivariantReport rep = equivariant_verify(equivariant_assemble(md, p));
    c.check(rep.ok(), "transported point: " + rep.detail);
    p.zeta_c[0] = p.zeta_c[0] + RatFunc(1);
    EquivariantReport bad = equivariant_verify(equivariant_assemble(md, p));
    c.check(!bad.curvature && bad.equivariant && bad.anticommute && bad.twist,
            "perturbed parameter kept the curvature identity");
  }
  for (int t = 0; t < 4 && c.ok; ++t) {
    Point p = random_point(md.graph, rnd_dims(2, c.rng, 2), rnd_dims(2, c.rng, 2),
                           zc, c.rng);
    bool onfiber = true;
    for (const auto& m : moment_residual(p, Convention::Centerm))
      onfiber = onfiber && m.is_zero();
    EquivariantReport rep = equivariant_verify(equivariant_assemble(md, p));
    c.check(rep.curvature == onfiber, "curvature flag disagrees with the residual");
    c.check(rep.equivariant && rep.anticommute && rep.twist, rep.detail);
  }
}

void item_mckay_equivariant_stability(ItemCtx& c) {
  McKayData md = mckay_graph(2);
  auto zc = catalog_params(md.graph);
  Point s = seed_point(md.graph, {1, 1}, zc);
  c.check(equivariant_stability(md, s).stable, "frame-only point reported unstable");
  for (int t = 0; t < 6 && c.ok; ++t) {
    Point p = t % 2 ? random_point(md.graph, rnd_dims(2, c.rng, 2),
                                   rnd_dims(2, c.rng, 2), zc, c.rng)
                    : balanced_point(md.graph, 2, zc, c.rng);
    StabilityReport lin = stability_check(p);
    EquivariantStability eq = equivariant_stability(md, p);
    c.check(eq.stable == lin.stable && eq.sub_dims == lin.sub_dims,
            "group-side and linear stability disagree");
  }
}

void item_mckay_reflection_blocks(ItemCtx& c) {
  for (int n : {2, 3}) {
    McKayData md = mckay_graph(n);
    for (int a = 0; a < n && c.ok; ++a) {
      EquivariantC rep = build_equivariant_C(md, a, RatFunc::t());
      c.check(rep.blocks_match && rep.curvature_ok,
              "order " + std::to_string(n) + " vertex " + std::to_string(a) +
                  ": " + rep.detail);
    }
  }
}

std::vector<ItemDef> base_items() {
  return {
      {"algebra/associativity", item_algebra_associativity},
      {"algebra/degree-two-center", item_algebra_center},
      {"algebra/dimension-and-unit", item_algebra_dimension},
      {"algebra/module-action", item_algebra_module_action},
      {"algebra/trace-form", item_algebra_trace_form},
      {"bimodule/braid", item_bimodule_braid},
      {"bimodule/inverse-pair", item_bimodule_inverse_pair},
      {"bimodule/reduce-confluence", item_bimodule_reduce_confluence},
      {"bimodule/reflection-square", item_bimodule_square},
      {"bimodule/stage-closed-form", item_bimodule_stage_closed_form},
      {"bimodule/tensor-curvature", item_bimodule_tensor_curvature},
      {"cli/determinism", item_cli_determinism},
      {"cli/round-trip", item_cli_round_trip},
      {"duplex/curvature-equivalence", item_duplex_curvature},
      {"duplex/framed-iso-equivalence", item_duplex_framed_iso},
      {"duplex/stability", item_duplex_stability},
      {"duplex/supercommutation", item_duplex_supercommutation},
      {"harness/braid-words", item_harness_braid_words},
      {"harness/convention-mismatch", item_harness_convention_mismatch},
      {"harness/genericity-transport", item_harness_genericity},
      {"harness/involution", item_harness_involution},
      {"harness/orbit-transport", item_harness_orbit_transport},
      {"harness/precondition-surfaced", item_harness_preconditions},
      {"harness/seed-and-orbit", item_harness_seed},
      {"harness/word-independence", item_harness_word_independence},
      {"mckay/equivariant-curvature", item_mckay_equivariant_curvature},
      {"mckay/equivariant-stability", item_mckay_equivariant_stability},
      {"mckay/graph-shape", item_mckay_graph_shape},
      {"mckay/morita", item_mckay_morita},
      {"mckay/reflection-blocks", item_mckay_reflection_blocks},
      {"mckay/smash-structure", item_mckay_smash},
      {"mckay/symmetric-trace", item_mckay_trace},
      {"quiver/braid-dims-params", item_quiver_braid},
      {"quiver/central-action-compat", item_quiver_central_compat},
      {"quiver/reflection-involution", item_quiver_involution},
      {"scalars/conj-involution", item_scalars_conj},
      {"scalars/linear-algebra", item_scalars_linear_algebra},
  };
}

}  // namespace

SuiteReport run_suite(std::uint64_t seed, int jobs,
                      const std::vector<std::string>& only) {
  std::vector<ItemDef> defs = base_items();
  if (!only.empty()) {
    for (const auto& id : only) {
      bool known = false;
      for (const auto& def : defs) known = known || def.id == id;
      if (!known) throw DuplexError("unknown suite item: " + id);
    }
    std::erase_if(defs, [&](const ItemDef& def) {
      return std::find(only.begin(), only.end(), def.id) == only.end();
    });
  }
  std::sort(defs.begin(), defs.end(),
            [](const ItemDef& a, const ItemDef& b) { return a.id < b.id; });

  auto run_one = [&](const ItemDef& def) {
    ItemCtx ctx;
    ctx.rng.seed(fnv1a(seed, def.id));
    SuiteItem item;
    item.id = def.id;
    try {
      def.fn(ctx);
      item.ok = ctx.ok;
      item.detail = ctx.detail;
    } catch (const std::exception& e) {
      item.ok = false;
      item.detail = std::string("unexpected error: ") + e.what();
    }
    return item;
  };

  SuiteReport report;
  report.seed = seed;
  report.items.resize(defs.size());
  if (jobs <= 1) {
    for (size_t k = 0; k < defs.size(); ++k) report.items[k] = run_one(defs[k]);
  } else {
    std::vector<std::future<SuiteItem>> futs(defs.size());
    size_t next = 0;
    while (next < defs.size()) {
      size_t batch = std::min(defs.size() - next, static_cast<size_t>(jobs));
      for (size_t k = 0; k < batch; ++k)
        futs[next + k] = std::async(std::launch::async, run_one,
                                    std::cref(defs[next + k]));
      for (size_t k = 0; k < batch; ++k) report.items[next + k] = futs[next + k].get();
      next += batch;
    }
  }
  report.ok = true;
  for (const auto& item : report.items) report.ok = report.ok && item.ok;
  return report;
}

}  // namespace qv
