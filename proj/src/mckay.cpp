#include "qv/mckay.hpp"

#include <numeric>
#include <sstream>

namespace qv {

namespace {

// wedge of basis monomials 1, x, y, x^y; returns the sign, 0 when it dies
int wedge(int m1, int m2, int& out) {
  if (m1 == 0) {
    out = m2;
    return 1;
  }
  if (m2 == 0) {
    out = m1;
    return 1;
  }
  if (m1 == 1 && m2 == 2) {
    out = 3;
    return 1;
  }
  if (m1 == 2 && m2 == 1) {
    out = 3;
    return -1;
  }
  out = -1;
  return 0;
}

int mono_weight(int m) { return m == 1 ? 1 : (m == 2 ? -1 : 0); }

FMatrix kron(const FMatrix& a, const FMatrix& b) {
  FMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int ra = 0; ra < a.rows(); ++ra)
    for (int ca = 0; ca < a.cols(); ++ca) {
      if (a.at(ra, ca).is_zero()) continue;
      for (int rb = 0; rb < b.rows(); ++rb)
        for (int cb = 0; cb < b.cols(); ++cb)
          out.at(ra * b.rows() + rb, ca * b.cols() + cb) = a.at(ra, ca) * b.at(rb, cb);
    }
  return out;
}

// basis of e_b A, ascending; mirrors the pair layout of the bimodule side
std::vector<int> left_basis_of(const ZigzagAlgebra& A, int b) {
  std::vector<int> out;
  for (int k = 0; k < A.dim(); ++k)
    if (A.left_vertex(k) == b) out.push_back(k);
  return out;
}

FMatrix elem_col(const SmashAlgebra::Elem& e) {
  FMatrix c(static_cast<int>(e.size()), 1);
  for (int r = 0; r < c.rows(); ++r) c.at(r, 0) = RatFunc(e[r]);
  return c;
}

FMatrix left_mult_mat(const SmashAlgebra& S, const SmashAlgebra::Elem& g) {
  FMatrix out(S.dim(), S.dim());
  for (int c = 0; c < S.dim(); ++c) {
    SmashAlgebra::Elem img = S.mul(g, S.basis(c));
    for (int r = 0; r < S.dim(); ++r) out.at(r, c) = RatFunc(img[r]);
  }
  return out;
}

FMatrix right_mult_mat(const SmashAlgebra& S, const SmashAlgebra::Elem& g) {
  FMatrix out(S.dim(), S.dim());
  for (int c = 0; c < S.dim(); ++c) {
    SmashAlgebra::Elem img = S.mul(S.basis(c), g);
    for (int r = 0; r < S.dim(); ++r) out.at(r, c) = RatFunc(img[r]);
  }
  return out;
}

bool graphs_match(const Graph& g1, const Graph& g2) {
  if (g1.vertices() != g2.vertices() || g1.edges() != g2.edges()) return false;
  for (int h = 0; h < g1.arrows(); ++h)
    if (g1.eps(h) != g2.eps(h)) return false;
  return true;
}

// images of the graph-algebra basis inside the smash product:
// e_a -> p_a, arrow h -> gen(bar h) p_{target(h)}, X_a -> c_a
std::vector<SmashAlgebra::Elem> transported_basis(const McKayData& md,
                                                  const ZigzagAlgebra& A,
                                                  const SmashAlgebra& S) {
  const Graph& g = md.graph;
  std::vector<SmashAlgebra::Elem> out(A.dim(), S.zero());
  for (int a = 0; a < g.vertices(); ++a) out[A.idem(a)] = S.idempotent(a);
  for (int h = 0; h < g.arrows(); ++h)
    out[A.arrow_elem(h)] =
        S.mul(S.basis(S.index(md.arrow_gen[g.bar(h)], 0)), S.idempotent(g.target(h)));
  for (int a = 0; a < g.vertices(); ++a) out[A.socle(a)] = S.central(a);
  return out;
}

}  // namespace

/* ---------------- group data ---------------- */

const CycRat& GroupData::character(int rep, int power) const {
  long r = (static_cast<long>(rep) * power) % n;
  if (r < 0) r += n;
  return zeta_pow[static_cast<size_t>(r)];
}

GroupData group_data(int n) {
  if (n < 2) throw McKayError("cyclic group order must be at least 2");
  GroupData gd;
  gd.n = n;
  gd.conductor = std::lcm(4, n);
  gd.has_minus_one = (n % 2 == 0);
  CycRat root = CycRat::zeta(gd.conductor);
  CycRat zn(1);
  for (int k = 0; k < gd.conductor / n; ++k) zn = zn * root;
  CycRat acc(1);
  gd.zeta_pow.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    gd.zeta_pow.push_back(acc);
    acc = acc * zn;
  }
  return gd;
}

/* ---------------- smash product ---------------- */

SmashAlgebra::SmashAlgebra(GroupData gd) : gd_(std::move(gd)) {}

int SmashAlgebra::degree(int k) const {
  int m = mono(k);
  return m == 0 ? 0 : (m == 3 ? 2 : 1);
}

std::string SmashAlgebra::basis_name(int k) const {
  static const char* lead[4] = {"1", "x", "y", "x^y"};
  std::ostringstream os;
  os << lead[mono(k)] << "*g^" << power(k);
  return os.str();
}

std::pair<CycRat, int> SmashAlgebra::mul_basis(int x, int y) const {
  int m1 = mono(x), j = power(x);
  int m2 = mono(y), k = power(y);
  int m3 = -1;
  int s = wedge(m1, m2, m3);
  if (s == 0) return {CycRat(0), -1};
  // gamma^j slides past the second monomial, twisting by its weight
  CycRat c = gd_.character(mono_weight(m2), j);
  if (s < 0) c = -c;
  return {c, index(m3, (j + k) % gd_.n)};
}

SmashAlgebra::Elem SmashAlgebra::basis(int k) const {
  Elem e(dim());
  e[static_cast<size_t>(k)] = CycRat(1);
  return e;
}

SmashAlgebra::Elem SmashAlgebra::mul(const Elem& a, const Elem& b) const {
  Elem out(dim());
  for (int i = 0; i < dim(); ++i) {
    if (a[static_cast<size_t>(i)].is_zero()) continue;
    for (int j = 0; j < dim(); ++j) {
      if (b[static_cast<size_t>(j)].is_zero()) continue;
      auto [c, k] = mul_basis(i, j);
      if (k < 0) continue;
      out[static_cast<size_t>(k)] =
          out[static_cast<size_t>(k)] + a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)] * c;
    }
  }
  return out;
}

SmashAlgebra::Elem SmashAlgebra::idempotent(int a) const {
  Elem e(dim());
  CycRat invn(mpq_class(1, gd_.n));
  for (int j = 0; j < gd_.n; ++j)
    e[static_cast<size_t>(index(0, j))] = gd_.character(-a, j) * invn;
  return e;
}

SmashAlgebra::Elem SmashAlgebra::central(int a) const {
  return mul(basis(index(3, 0)), idempotent(a));
}

CycRat SmashAlgebra::trace(const Elem& a) const {
  if (!gd_.has_minus_one)
    throw McKayError("the symmetrizing trace needs -1 in the group");
  return a[static_cast<size_t>(index(3, gd_.n / 2))];
}

FMatrix SmashAlgebra::gram() const {
  int soc = index(3, gd_.n / 2);
  FMatrix g(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j) {
      auto [c, k] = mul_basis(i, j);
      if (k == soc) g.at(i, j) = RatFunc(c);
    }
  return g;
}

/* ---------------- graph of the group ---------------- */

McKayData mckay_graph(int n) {
  McKayData md;
  md.group = group_data(n);

  // decompose plane (x) rho_a by characters; entries land in Z
  md.tensor_mult.assign(static_cast<size_t>(n), std::vector<long>(static_cast<size_t>(n), 0));
  CycRat invn(mpq_class(1, n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      CycRat acc(0);
      for (int j = 0; j < n; ++j) {
        CycRat plane = md.group.character(1, j) + md.group.character(-1, j);
        acc = acc + plane * md.group.character(a - b, j);
      }
      acc = acc * invn;
      if (!acc.is_rational()) throw McKayError("internal: tensor multiplicity is irrational");
      mpq_class q = acc.to_rational();
      if (q.get_den() != 1) throw McKayError("internal: tensor multiplicity is fractional");
      md.tensor_mult[static_cast<size_t>(a)][static_cast<size_t>(b)] = q.get_num().get_si();
    }

  /* Arrow generators: gen(h) realizes rho_{target} inside plane (x) rho_{source},
   * so its weight is target - source.  Order 2 admits both x and y on each
   * arrow; the two edge copies take them crossed so that round trips along
   * either copy survive.  eps(h) = [gen(bar h) ^ gen(h)]. */
  std::vector<std::pair<int, int>> edges;
  std::vector<int> orient;
  if (n == 2) {
    edges = {{0, 1}, {0, 1}};
    orient = {-1, 1};
    md.arrow_gen = {1, 2, 2, 1};
  } else {
    for (int a = 0; a < n; ++a) edges.push_back({a, (a + 1) % n});
    orient.assign(static_cast<size_t>(n), -1);
    md.arrow_gen.assign(static_cast<size_t>(2 * n), 0);
    for (int k = 0; k < n; ++k) {
      md.arrow_gen[static_cast<size_t>(2 * k)] = 1;      // ascending arrows carry x
      md.arrow_gen[static_cast<size_t>(2 * k + 1)] = 2;  // descending carry y
    }
  }
  md.graph = Graph::make(n, edges, orient);

  for (int a = 0; a < n; ++a) {
    if (md.tensor_mult[static_cast<size_t>(a)][static_cast<size_t>(a)] != 0)
      throw McKayError("internal: unexpected loop in the group graph");
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      long cnt = 0;
      for (auto& e : md.graph.edges())
        if ((e.first == a && e.second == b) || (e.first == b && e.second == a)) ++cnt;
      if (cnt != md.tensor_mult[static_cast<size_t>(a)][static_cast<size_t>(b)])
        throw McKayError("internal: edge multiplicity disagrees with the character count");
    }
  }
  for (int h = 0; h < md.graph.arrows(); ++h) {
    int m3 = -1;
    int s = wedge(md.arrow_gen[static_cast<size_t>(md.graph.bar(h))],
                  md.arrow_gen[static_cast<size_t>(h)], m3);
    if (m3 != 3 || s != md.graph.eps(h))
      throw McKayError("internal: arrow sign does not match the wedge convention");
  }
  return md;
}

/* ---------------- Morita comparison ---------------- */

MoritaReport morita_check(int n) {
  MoritaReport rep;
  McKayData md = mckay_graph(n);
  SmashAlgebra S(md.group);
  ZigzagAlgebra A(md.graph);
  const int D = S.dim();

  std::vector<SmashAlgebra::Elem> phi = transported_basis(md, A, S);
  FMatrix W(D, A.dim());
  for (int k = 0; k < A.dim(); ++k)
    for (int r = 0; r < D; ++r) W.at(r, k) = RatFunc(phi[static_cast<size_t>(k)][static_cast<size_t>(r)]);
  if (W.rank() != A.dim()) {
    rep.detail = "transported basis is not linearly independent";
    return rep;
  }

  // every structure constant of the graph algebra must transport
  for (int u = 0; u < A.dim(); ++u)
    for (int v = 0; v < A.dim(); ++v) {
      auto [c, w] = A.mul_basis(u, v);
      SmashAlgebra::Elem lhs = S.mul(phi[static_cast<size_t>(u)], phi[static_cast<size_t>(v)]);
      SmashAlgebra::Elem rhs = S.zero();
      if (w >= 0)
        for (int r = 0; r < D; ++r)
          rhs[static_cast<size_t>(r)] = phi[static_cast<size_t>(w)][static_cast<size_t>(r)] * CycRat(c);
      if (lhs != rhs) {
        rep.detail = "structure constants disagree at " + A.basis_name(u) + " * " + A.basis_name(v);
        return rep;
      }
    }

  /* Endomorphisms of P = (+)_a p_a A commute with right multiplication by
   * gamma, hence preserve its eigenspaces U_b = {w (x) p_b}; in that basis
   * they are block diagonal with 4 x 4 blocks M_b tied together by the
   * right actions of x (shifting U_b to U_{b-1}) and y (to U_{b+1}). */
  FMatrix Q(D, D);
  for (int b = 0; b < n; ++b)
    for (int m = 0; m < 4; ++m) {
      SmashAlgebra::Elem u = S.mul(S.basis(S.index(m, 0)), S.idempotent(b));
      for (int r = 0; r < D; ++r) Q.at(r, 4 * b + m) = RatFunc(u[static_cast<size_t>(r)]);
    }
  FMatrix Qinv = Q.inverse();
  FMatrix Rx = Qinv * right_mult_mat(S, S.basis(S.index(1, 0))) * Q;
  FMatrix Ry = Qinv * right_mult_mat(S, S.basis(S.index(2, 0))) * Q;
  FMatrix Rg = Qinv * right_mult_mat(S, S.basis(S.index(0, 1 % n))) * Q;
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      bool gdiag = (b == c);
      bool shift_x = (b == ((c - 1) % n + n) % n);
      bool shift_y = (b == (c + 1) % n);
      FMatrix bg = Rg.submatrix(4 * b, 4 * c, 4, 4);
      FMatrix bx = Rx.submatrix(4 * b, 4 * c, 4, 4);
      FMatrix by = Ry.submatrix(4 * b, 4 * c, 4, 4);
      FMatrix ident = FMatrix::identity(4).scale(RatFunc(md.group.character(c, 1)));
      if ((gdiag && bg != ident) || (!gdiag && !bg.is_zero()) ||
          (!shift_x && !bx.is_zero()) || (!shift_y && !by.is_zero())) {
        rep.detail = "internal: right action does not respect the eigenspace grading";
        return rep;
      }
    }

  // unknowns: entries of the blocks M_b; equations M_{b+off} X_b = X_b M_b
  auto unknown = [&](int b, int r, int c) { return 16 * b + 4 * r + c; };
  FMatrix E(2 * n * 16, 16 * n);
  int row = 0;
  for (int off : {-1, +1}) {
    const FMatrix& R = (off < 0) ? Rx : Ry;
    for (int b = 0; b < n; ++b) {
      int bt = ((b + off) % n + n) % n;
      FMatrix X = R.submatrix(4 * bt, 4 * b, 4, 4);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          for (int k = 0; k < 4; ++k) {
            E.at(row, unknown(bt, r, k)) = E.at(row, unknown(bt, r, k)) + X.at(k, c);
            E.at(row, unknown(b, k, c)) = E.at(row, unknown(b, k, c)) - X.at(r, k);
          }
          ++row;
        }
    }
  }
  rep.end_dim = 16 * n - E.rank();
  if (rep.end_dim != 4 * n) {
    rep.detail = "commutant dimension is " + std::to_string(rep.end_dim);
    return rep;
  }

  // left multiplications land in the commutant and fill it out
  FMatrix span(16 * n, A.dim());
  for (int k = 0; k < A.dim(); ++k) {
    FMatrix L = Qinv * left_mult_mat(S, phi[static_cast<size_t>(k)]) * Q;
    if (!(L * Rx == Rx * L) || !(L * Ry == Ry * L) || !(L * Rg == Rg * L)) {
      rep.detail = "left multiplication by " + A.basis_name(k) + " misses the commutant";
      return rep;
    }
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        FMatrix blk = L.submatrix(4 * b, 4 * c, 4, 4);
        if (b != c && !blk.is_zero()) {
          rep.detail = "left multiplication by " + A.basis_name(k) + " is not block diagonal";
          return rep;
        }
        if (b == c)
          for (int r = 0; r < 4; ++r)
            for (int cc = 0; cc < 4; ++cc) span.at(unknown(b, r, cc), k) = blk.at(r, cc);
      }
  }
  if (span.rank() != A.dim()) {
    rep.detail = "left multiplications do not span the commutant";
    return rep;
  }
  rep.ok = true;
  return rep;
}

/* ---------------- equivariant module of a point ---------------- */

int EquivariantModule::vertex_block(int mono, int a) const {
  long vt = 0;
  for (long x : v) vt += x;
  long off = static_cast<long>(mono) * vt;
  for (int b = 0; b < a; ++b) off += v[static_cast<size_t>(b)];
  return static_cast<int>(off);
}

int EquivariantModule::frame_block(int a) const {
  long vt = 0;
  for (long x : v) vt += x;
  long off = 4 * vt;
  for (int b = 0; b < a; ++b) off += w[static_cast<size_t>(b)];
  return static_cast<int>(off);
}

FMatrix EquivariantModule::central_mult(int a) const {
  FMatrix C(total_dim, total_dim);
  int src = vertex_block(0, a), dst = vertex_block(3, a);
  for (long k = 0; k < v[static_cast<size_t>(a)]; ++k)
    C.at(dst + static_cast<int>(k), src + static_cast<int>(k)) = RatFunc(1);
  return C;
}

EquivariantModule equivariant_assemble(const McKayData& mk, const Point& pt) {
  if (!graphs_match(mk.graph, pt.graph))
    throw McKayError("point graph does not match the group graph");
  pt.validate();
  const Graph& g = mk.graph;
  const int n = g.vertices();

  EquivariantModule M;
  M.mk = mk;
  M.v = pt.v;
  M.w = pt.w;
  M.zeta = pt.zeta_c;
  long vt = 0, wt = 0;
  for (long x : pt.v) vt += x;
  for (long x : pt.w) wt += x;
  M.total_dim = static_cast<int>(4 * vt + wt);

  FMatrix d(M.total_dim, M.total_dim);
  auto add_block = [&](int r0, int c0, const FMatrix& blk, int sign) {
    for (int r = 0; r < blk.rows(); ++r)
      for (int c = 0; c < blk.cols(); ++c) {
        RatFunc t = sign < 0 ? -blk.at(r, c) : blk.at(r, c);
        d.at(r0 + r, c0 + c) = d.at(r0 + r, c0 + c) + t;
      }
  };
  for (int h = 0; h < g.arrows(); ++h) {
    int a = g.source(h), b = g.target(h);
    int gb = mk.arrow_gen[static_cast<size_t>(g.bar(h))];
    int gh = mk.arrow_gen[static_cast<size_t>(h)];
    // scalar layer wedges gen(bar h) in; the gen(h) slot closes to the top
    add_block(M.vertex_block(gb, b), M.vertex_block(0, a), pt.B[static_cast<size_t>(h)], 1);
    add_block(M.vertex_block(3, b), M.vertex_block(gh, a), pt.B[static_cast<size_t>(h)], g.eps(h));
  }
  for (int a = 0; a < n; ++a) {
    add_block(M.frame_block(a), M.vertex_block(0, a), pt.j_[static_cast<size_t>(a)], 1);
    add_block(M.vertex_block(3, a), M.frame_block(a), pt.i_[static_cast<size_t>(a)], 1);
  }
  M.d = d;

  FMatrix gamma(M.total_dim, M.total_dim);
  FMatrix ax(M.total_dim, M.total_dim);
  FMatrix ay(M.total_dim, M.total_dim);
  for (int a = 0; a < n; ++a) {
    for (int m = 0; m < 4; ++m) {
      RatFunc ev{mk.group.character(mono_weight(m) + a, 1)};
      int off = M.vertex_block(m, a);
      for (long k = 0; k < pt.v[static_cast<size_t>(a)]; ++k)
        gamma.at(off + static_cast<int>(k), off + static_cast<int>(k)) = ev;
      for (int gen = 1; gen <= 2; ++gen) {
        int m3 = -1;
        int s = wedge(gen, m, m3);
        if (s == 0) continue;
        FMatrix& tgt = gen == 1 ? ax : ay;
        int dst = M.vertex_block(m3, a);
        for (long k = 0; k < pt.v[static_cast<size_t>(a)]; ++k)
          tgt.at(dst + static_cast<int>(k), off + static_cast<int>(k)) = RatFunc(s);
      }
    }
    RatFunc ev{mk.group.character(a, 1)};
    int off = M.frame_block(a);
    for (long k = 0; k < pt.w[static_cast<size_t>(a)]; ++k)
      gamma.at(off + static_cast<int>(k), off + static_cast<int>(k)) = ev;
  }
  M.gamma = gamma;
  M.act_x = ax;
  M.act_y = ay;
  return M;
}

EquivariantReport equivariant_verify(const EquivariantModule& M) {
  EquivariantReport rep;
  std::ostringstream os;

  FMatrix cur(M.total_dim, M.total_dim);
  for (int a = 0; a < M.mk.graph.vertices(); ++a)
    cur = cur + M.central_mult(a).scale(M.zeta[static_cast<size_t>(a)]);
  rep.curvature = (M.d * M.d == cur);
  if (!rep.curvature) os << "d^2 differs from the central action; ";

  rep.equivariant = (M.gamma * M.d == M.d * M.gamma);
  if (!rep.equivariant) os << "gamma does not commute with d; ";

  rep.anticommute = (M.act_x * M.d + M.d * M.act_x).is_zero() &&
                    (M.act_y * M.d + M.d * M.act_y).is_zero();
  if (!rep.anticommute) os << "the plane action does not anticommute with d; ";

  rep.twist = true;
  const Graph& g = M.mk.graph;
  for (int h = 0; h < g.arrows() && rep.twist; ++h) {
    int a = g.source(h), b = g.target(h);
    int va = static_cast<int>(M.v[static_cast<size_t>(a)]);
    int vb = static_cast<int>(M.v[static_cast<size_t>(b)]);
    int gb = M.mk.arrow_gen[static_cast<size_t>(g.bar(h))];
    int gh = M.mk.arrow_gen[static_cast<size_t>(h)];
    FMatrix first = M.d.submatrix(M.vertex_block(gb, b), M.vertex_block(0, a), vb, va);
    FMatrix top = M.d.submatrix(M.vertex_block(3, b), M.vertex_block(gh, a), vb, va);
    if (top != first.scale(RatFunc(g.eps(h)))) {
      rep.twist = false;
      os << "top layer of arrow " << h << " is not eps times the scalar layer; ";
    }
  }
  rep.detail = os.str();
  if (!rep.detail.empty()) rep.detail.resize(rep.detail.size() - 2);
  return rep;
}

EquivariantStability equivariant_stability(const McKayData& mk, const Point& pt) {
  if (!graphs_match(mk.graph, pt.graph))
    throw McKayError("point graph does not match the group graph");
  pt.validate();
  const Graph& g = mk.graph;
  const int n = g.vertices();

  // largest subspace inside ker j closed under every arrow map
  std::vector<FMatrix> U(static_cast<size_t>(n));
  for (int a = 0; a < n; ++a) U[static_cast<size_t>(a)] = pt.j_[static_cast<size_t>(a)].kernel_basis();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int h = 0; h < g.arrows(); ++h) {
      int a = g.source(h), b = g.target(h);
      FMatrix& Ua = U[static_cast<size_t>(a)];
      if (Ua.cols() == 0) continue;
      const FMatrix& Ub = U[static_cast<size_t>(b)];
      FMatrix pi = Ub.cols() == 0 ? FMatrix::identity(Ub.rows())
                                  : Ub.cokernel_projection();
      if (pi.rows() == 0) continue;  // U_b already fills V_b
      FMatrix cons = pi * pt.B[static_cast<size_t>(h)] * Ua;
      FMatrix ker = cons.kernel_basis();
      if (ker.cols() == Ua.cols()) continue;
      Ua = Ua * ker;
      changed = true;
    }
  }
  EquivariantStability out;
  out.sub_dims.assign(static_cast<size_t>(n), 0);
  for (int a = 0; a < n; ++a) {
    out.sub_dims[static_cast<size_t>(a)] = U[static_cast<size_t>(a)].cols();
    if (U[static_cast<size_t>(a)].cols() != 0) out.stable = false;
  }
  return out;
}

/* ---------------- two-term equivariant summand ---------------- */

EquivariantC build_equivariant_C(const McKayData& mk, int vertex, const RatFunc& weight) {
  const Graph& g = mk.graph;
  if (vertex < 0 || vertex >= g.vertices()) throw McKayError("reflection vertex out of range");

  ZigzagAlgebra A(g);
  SmashAlgebra S(mk.group);
  const int D = S.dim();
  BimoduleDuplex N = reflection_bimodule(A, vertex, weight);
  FMatrix Dref = bim_materialize(N);

  EquivariantC rep;
  rep.vertex = vertex;
  rep.weight = weight;
  rep.total_dim = D + 16;

  std::vector<SmashAlgebra::Elem> phi = transported_basis(mk, A, S);
  FMatrix W(D, D);
  for (int k = 0; k < D; ++k)
    for (int r = 0; r < D; ++r) W.at(r, k) = RatFunc(phi[static_cast<size_t>(k)][static_cast<size_t>(r)]);
  FMatrix Winv = W.inverse();

  const std::vector<int>& pb = A.proj_basis(vertex);
  std::vector<int> lb = left_basis_of(A, vertex);
  if (pb.size() != 4 || lb.size() != 4)
    throw McKayError("internal: projective slot is not four dimensional");
  FMatrix Wp(D, 4), Wq(D, 4);
  for (int i = 0; i < 4; ++i)
    for (int r = 0; r < D; ++r) {
      Wp.at(r, i) = RatFunc(phi[static_cast<size_t>(pb[static_cast<size_t>(i)])][static_cast<size_t>(r)]);
      Wq.at(r, i) = RatFunc(phi[static_cast<size_t>(lb[static_cast<size_t>(i)])][static_cast<size_t>(r)]);
    }

  // weighted multiplication out of the pair slot; the odd map slides past
  // the left leg with the parity of that leg
  FMatrix D1(D, 16);
  for (int pi = 0; pi < 4; ++pi)
    for (int qi = 0; qi < 4; ++qi) {
      SmashAlgebra::Elem prod = S.mul(phi[static_cast<size_t>(pb[static_cast<size_t>(pi)])],
                                      phi[static_cast<size_t>(lb[static_cast<size_t>(qi)])]);
      FMatrix col = Winv * elem_col(prod);
      RatFunc scale = (A.degree(pb[static_cast<size_t>(pi)]) & 1) ? -weight : weight;
      for (int r = 0; r < D; ++r) D1.at(r, 4 * pi + qi) = col.at(r, 0) * scale;
    }

  /* Comultiplication: the wedge factor carries the top-coefficient pairing
   * lam(w, w') = top coefficient of w ^ w', which is supersymmetric; the
   * relative Casimir sum_s w_s (x) w^s built from its right duals is
   * super-central, so u |-> (-1)^|u| u . Casimir is an odd bimodule map.
   * Middle projection u (x) w -> (u p_a) (x) (p_a w) lands in the pair slot. */
  SmashAlgebra::Elem pa = S.idempotent(vertex);
  FMatrix lam(4, 4);
  lam.at(0, 3) = RatFunc(1);
  lam.at(1, 2) = RatFunc(1);
  lam.at(2, 1) = RatFunc(-1);
  lam.at(3, 0) = RatFunc(1);
  FMatrix dual = lam.inverse().transpose();  // dual.at(s, r): coefficient of w_r in w^s
  std::vector<SmashAlgebra::Elem> cas_left, cas_right;
  for (int s = 0; s < 4; ++s) {
    cas_left.push_back(S.mul(S.basis(S.index(s, 0)), pa));
    SmashAlgebra::Elem rl = S.zero();
    for (int r = 0; r < 4; ++r) {
      if (dual.at(s, r).is_zero()) continue;
      CycRat c0 = dual.at(s, r).to_cyc();
      SmashAlgebra::Elem term = S.mul(pa, S.basis(S.index(r, 0)));
      for (int t = 0; t < D; ++t)
        rl[static_cast<size_t>(t)] = rl[static_cast<size_t>(t)] + c0 * term[static_cast<size_t>(t)];
    }
    cas_right.push_back(rl);
  }
  FMatrix rhs(D * D, D);
  for (int k = 0; k < D; ++k) {
    bool odd = (A.degree(k) & 1) != 0;
    for (int s = 0; s < 4; ++s) {
      SmashAlgebra::Elem l = S.mul(phi[static_cast<size_t>(k)], cas_left[static_cast<size_t>(s)]);
      const SmashAlgebra::Elem& rr = cas_right[static_cast<size_t>(s)];
      for (int r1 = 0; r1 < D; ++r1) {
        if (l[static_cast<size_t>(r1)].is_zero()) continue;
        CycRat f1 = odd ? -l[static_cast<size_t>(r1)] : l[static_cast<size_t>(r1)];
        for (int r2 = 0; r2 < D; ++r2) {
          if (rr[static_cast<size_t>(r2)].is_zero()) continue;
          rhs.at(r1 * D + r2, k) = rhs.at(r1 * D + r2, k) + RatFunc(f1 * rr[static_cast<size_t>(r2)]);
        }
      }
    }
  }
  FMatrix K = kron(Wp, Wq);
  auto D2 = K.solve(rhs);
  if (!D2) {
    rep.detail = "internal: comultiplication left the pair span";
    return rep;
  }

  FMatrix DC(rep.total_dim, rep.total_dim);
  DC.set_block(0, D, D1);
  DC.set_block(D, 0, *D2);
  rep.d = DC;

  rep.blocks_match = (DC == Dref);
  if (!rep.blocks_match) {
    auto slot = [&](int idx) {
      if (idx < D) return "A:" + A.basis_name(idx);
      int loc = idx - D;
      return "P:(" + A.basis_name(pb[static_cast<size_t>(loc / 4)]) + "," +
             A.basis_name(lb[static_cast<size_t>(loc % 4)]) + ")";
    };
    for (int r = 0; r < rep.total_dim && rep.detail.empty(); ++r)
      for (int c = 0; c < rep.total_dim; ++c)
        if (DC.at(r, c) != Dref.at(r, c)) {
          rep.detail = "first mismatch at " + slot(r) + " <- " + slot(c) + ": " +
                       DC.at(r, c).str() + " vs " + Dref.at(r, c).str();
          break;
        }
  }

  // curvature assembled from smash-side multiplication operators
  FMatrix cur(rep.total_dim, rep.total_dim);
  FMatrix I4 = FMatrix::identity(4);
  for (int b = 0; b < g.vertices(); ++b) {
    SmashAlgebra::Elem cb = S.central(b);
    if (!N.c0[static_cast<size_t>(b)].is_zero()) {
      FMatrix L = left_mult_mat(S, cb);
      FMatrix op(rep.total_dim, rep.total_dim);
      op.set_block(0, 0, Winv * L * W);
      auto Lp = Wp.solve(L * Wp);
      if (!Lp) throw McKayError("internal: central action left the pair span");
      op.set_block(D, D, kron(*Lp, I4));
      cur = cur + op.scale(N.c0[static_cast<size_t>(b)]);
    }
    if (!N.c1[static_cast<size_t>(b)].is_zero()) {
      FMatrix R = right_mult_mat(S, cb);
      FMatrix op(rep.total_dim, rep.total_dim);
      op.set_block(0, 0, Winv * R * W);
      auto Rq = Wq.solve(R * Wq);
      if (!Rq) throw McKayError("internal: central action left the pair span");
      op.set_block(D, D, kron(I4, *Rq));
      cur = cur + op.scale(N.c1[static_cast<size_t>(b)]);
    }
  }
  rep.curvature_ok = (DC * DC == cur);
  if (!rep.curvature_ok && rep.detail.empty())
    rep.detail = "d^2 differs from the smash-side curvature";
  return rep;
}

}  // namespace qv
