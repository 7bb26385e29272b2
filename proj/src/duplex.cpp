#include "qv/duplex.hpp"

#include <algorithm>
#include <tuple>

namespace qv {

namespace {

bool same_graph(const Graph& a, const Graph& b) {
  if (a.vertices() != b.vertices() || a.edges() != b.edges()) return false;
  for (int h = 0; h < a.arrows(); ++h)
    if (a.eps(h) != b.eps(h)) return false;
  return true;
}

}  // namespace

void Point::validate() const {
  int n = graph.vertices();
  if (static_cast<int>(v.size()) != n || static_cast<int>(w.size()) != n)
    throw DuplexError("dimension vector length mismatch");
  if (static_cast<int>(B.size()) != graph.arrows())
    throw DuplexError("arrow map count mismatch");
  for (int h = 0; h < graph.arrows(); ++h)
    if (B[h].rows() != v[graph.target(h)] || B[h].cols() != v[graph.source(h)])
      throw DuplexError("arrow map " + std::to_string(h) + " has wrong shape");
  if (static_cast<int>(i_.size()) != n || static_cast<int>(j_.size()) != n)
    throw DuplexError("framing map count mismatch");
  for (int a = 0; a < n; ++a) {
    if (i_[a].rows() != v[a] || i_[a].cols() != w[a])
      throw DuplexError("framing map i at vertex " + std::to_string(a) + " has wrong shape");
    if (j_[a].rows() != w[a] || j_[a].cols() != v[a])
      throw DuplexError("framing map j at vertex " + std::to_string(a) + " has wrong shape");
  }
  if (static_cast<int>(zeta_c.size()) != n || static_cast<int>(zeta_r.size()) != n)
    throw DuplexError("parameter vector length mismatch");
}

std::vector<FMatrix> moment_residual(const Point& p, Convention conv) {
  p.validate();
  const Graph& g = p.graph;
  std::vector<FMatrix> res;
  res.reserve(g.vertices());
  for (int a = 0; a < g.vertices(); ++a) {
    FMatrix m(p.v[a], p.v[a]);
    for (int h : g.arrows_from(a)) {
      int sign = (conv == Convention::Centerm) ? g.eps(g.bar(h)) : g.eps(h);
      FMatrix term = p.B[g.bar(h)] * p.B[h];
      m = (sign > 0) ? m + term : m - term;
    }
    m = m + p.i_[a] * p.j_[a];
    for (int k = 0; k < p.v[a]; ++k) m.at(k, k) -= p.zeta_c[a];
    res.push_back(std::move(m));
  }
  return res;
}

std::vector<FMatrix> real_moment_residual(const Point& p) {
  p.validate();
  const Graph& g = p.graph;
  std::vector<FMatrix> res;
  res.reserve(g.vertices());
  for (int a = 0; a < g.vertices(); ++a) {
    FMatrix m(p.v[a], p.v[a]);
    for (int h : g.arrows_from(a)) {
      const FMatrix& bh = p.B[h];
      const FMatrix& bhb = p.B[g.bar(h)];
      m = m + bhb * bhb.conj_transpose() - bh.conj_transpose() * bh;
    }
    m = m + p.i_[a] * p.i_[a].conj_transpose() - p.j_[a].conj_transpose() * p.j_[a];
    for (int k = 0; k < p.v[a]; ++k) m.at(k, k) -= p.zeta_r[a];
    res.push_back(std::move(m));
  }
  return res;
}

Point real_dual_data(const Point& p) {
  p.validate();
  Point d = p;
  const Graph& g = p.graph;
  for (int h = 0; h < g.arrows(); ++h) {
    FMatrix m = p.B[g.bar(h)].conj_transpose();
    d.B[h] = g.eps(g.bar(h)) > 0 ? m : -m;
  }
  for (int a = 0; a < g.vertices(); ++a) {
    d.i_[a] = -p.j_[a].conj_transpose();
    d.j_[a] = p.i_[a].conj_transpose();
  }
  return d;
}

/* ------------------------------------------------------------------ */

void BlockMap::add(int src, int dst, int path, const FMatrix& coeff) {
  if (coeff.is_zero()) return;
  auto& paths = blocks[{src, dst}];
  auto it = paths.find(path);
  if (it == paths.end())
    paths.emplace(path, coeff);
  else
    it->second = it->second + coeff;
}

const FMatrix* BlockMap::find(int src, int dst, int path) const {
  auto b = blocks.find({src, dst});
  if (b == blocks.end()) return nullptr;
  auto p = b->second.find(path);
  return p == b->second.end() ? nullptr : &p->second;
}

void BlockMap::prune() {
  for (auto it = blocks.begin(); it != blocks.end();) {
    for (auto jt = it->second.begin(); jt != it->second.end();)
      jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
    it = it->second.empty() ? blocks.erase(it) : std::next(it);
  }
}

bool BlockMap::empty() const {
  for (auto& [k, paths] : blocks)
    for (auto& [p, c] : paths)
      if (!c.is_zero()) return false;
  return true;
}

int LabeledDuplex::local_dim(int part) const {
  const Summand& s = parts[part];
  return s.kind == SumKind::Proj ? static_cast<int>(alg->proj_basis(s.vertex).size()) : 1;
}

int LabeledDuplex::total_dim() const {
  int d = 0;
  for (size_t k = 0; k < parts.size(); ++k)
    d += parts[k].mult * local_dim(static_cast<int>(k));
  return d;
}

int path_degree(const ZigzagAlgebra& A, int p) {
  if (p >= 0) return A.degree(p);
  return p == kPathSoc ? 2 : 0;
}

namespace {

// composite of p: s -> m, then q: m -> t; coefficient is 0 or +-1
std::pair<int, int> path_compose(const ZigzagAlgebra& A, SumKind sk, SumKind mk,
                                 SumKind tk, int mvertex, int p, int q) {
  if (sk == SumKind::Proj && mk == SumKind::Proj) {
    if (tk == SumKind::Proj) return A.mul_basis(p, q);
    // q = HAT: survives only on the idempotent component
    return A.is_idem(p) ? std::make_pair(1, kPathHat) : std::make_pair(0, -1);
  }
  if (sk == SumKind::Proj && mk == SumKind::Simple) {
    if (tk == SumKind::Proj) return {1, A.socle(mvertex)};  // HAT then SOC
    return {1, kPathHat};                                   // HAT then IDS
  }
  if (sk == SumKind::Simple && mk == SumKind::Proj) {
    if (tk == SumKind::Proj)
      return A.is_idem(q) ? std::make_pair(1, kPathSoc) : std::make_pair(0, -1);
    return {0, -1};  // SOC then HAT: X_a dies in the simple
  }
  // sk Simple, mk Simple
  if (tk == SumKind::Proj) return {1, kPathSoc};
  return {1, kPathIds};
}

}  // namespace

BlockMap compose(const ZigzagAlgebra& A, const std::vector<Summand>& X,
                 const std::vector<Summand>& Y, const std::vector<Summand>& Z,
                 const BlockMap& g, const BlockMap& f) {
  (void)X;
  (void)Z;
  BlockMap out;
  out.kappa = (f.kappa + g.kappa) & 1;
  for (auto& [fk, fpaths] : f.blocks) {
    auto [s, m] = fk;
    for (auto& [gk, gpaths] : g.blocks) {
      if (gk.first != m) continue;
      int t = gk.second;
      for (auto& [p, cf] : fpaths)
        for (auto& [q, cg] : gpaths) {
          auto [c, r] = path_compose(A, X[s].kind, Y[m].kind, Z[t].kind,
                                     Y[m].vertex, p, q);
          if (c == 0) continue;
          if (g.kappa && (path_degree(A, p) & 1)) c = -c;
          FMatrix prod = cg * cf;
          out.add(s, t, r, c > 0 ? prod : -prod);
        }
    }
  }
  out.prune();
  return out;
}

BlockMap central_action(const ZigzagAlgebra& A, const std::vector<Summand>& parts,
                        const std::vector<RatFunc>& c) {
  BlockMap out;
  out.kappa = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const Summand& s = parts[k];
    if (s.kind != SumKind::Proj || c[s.vertex].is_zero()) continue;
    out.add(static_cast<int>(k), static_cast<int>(k), A.socle(s.vertex),
            FMatrix::identity(s.mult).scale(c[s.vertex]));
  }
  return out;
}

namespace {

struct Layout {
  std::vector<int> start;  // per part
  int total = 0;
};

Layout layout_of(const ZigzagAlgebra& A, const std::vector<Summand>& parts) {
  Layout l;
  for (auto& s : parts) {
    l.start.push_back(l.total);
    int loc = s.kind == SumKind::Proj
                  ? static_cast<int>(A.proj_basis(s.vertex).size())
                  : 1;
    l.total += s.mult * loc;
  }
  return l;
}

int local_index(const ZigzagAlgebra& A, int vertex, int basis_elem) {
  const auto& pb = A.proj_basis(vertex);
  for (size_t k = 0; k < pb.size(); ++k)
    if (pb[k] == basis_elem) return static_cast<int>(k);
  throw DuplexError("basis element outside projective");
}

}  // namespace

FMatrix materialize(const ZigzagAlgebra& A, const std::vector<Summand>& src,
                    const std::vector<Summand>& dst, const BlockMap& f) {
  Layout ls = layout_of(A, src), ld = layout_of(A, dst);
  FMatrix out(ld.total, ls.total);
  for (auto& [key, paths] : f.blocks) {
    auto [si, di] = key;
    const Summand& s = src[si];
    const Summand& t = dst[di];
    int sloc = s.kind == SumKind::Proj ? static_cast<int>(A.proj_basis(s.vertex).size()) : 1;
    int tloc = t.kind == SumKind::Proj ? static_cast<int>(A.proj_basis(t.vertex).size()) : 1;
    for (auto& [p, coeff] : paths) {
      auto put = [&](int lu, int lv, int sign) {
        for (int j = 0; j < s.mult; ++j)
          for (int j2 = 0; j2 < t.mult; ++j2) {
            const RatFunc& c = coeff.at(j2, j);
            if (c.is_zero()) continue;
            RatFunc val = sign > 0 ? c : -c;
            out.at(ld.start[di] + j2 * tloc + lv, ls.start[si] + j * sloc + lu) += val;
          }
      };
      if (s.kind == SumKind::Proj && t.kind == SumKind::Proj) {
        for (int lu = 0; lu < sloc; ++lu) {
          int u = A.proj_basis(s.vertex)[lu];
          auto [cu, up] = A.mul_basis(u, p);
          if (cu == 0) continue;
          int sign = (f.kappa && (A.degree(u) & 1)) ? -cu : cu;
          put(lu, local_index(A, t.vertex, up), sign);
        }
      } else if (s.kind == SumKind::Proj) {  // HAT
        put(local_index(A, s.vertex, A.idem(s.vertex)), 0, 1);
      } else if (t.kind == SumKind::Proj) {  // SOC
        put(0, local_index(A, t.vertex, A.socle(t.vertex)), 1);
      } else {  // IDS
        put(0, 0, 1);
      }
    }
  }
  return out;
}

CheckResult verify_duplex(const LabeledDuplex& M, const std::vector<RatFunc>& c) {
  const ZigzagAlgebra& A = *M.alg;
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    const Summand& s = M.parts[si];
    const Summand& t = M.parts[di];
    for (auto& [p, coeff] : paths) {
      if (coeff.rows() != t.mult || coeff.cols() != s.mult)
        return {false, "coefficient shape mismatch on block " + std::to_string(si) +
                           " -> " + std::to_string(di)};
      if ((path_degree(A, p) + t.shift - s.shift) % 2 == 0)
        return {false, "even component in the differential on block " +
                           std::to_string(si) + " -> " + std::to_string(di)};
      // path endpoints must match the summand labels
      if (p >= 0) {
        if (s.kind != SumKind::Proj || t.kind != SumKind::Proj ||
            A.left_vertex(p) != s.vertex || A.right_vertex(p) != t.vertex)
          return {false, "path endpoints do not match summands"};
      } else if (s.vertex != t.vertex) {
        return {false, "special path between different vertices"};
      }
    }
  }
  BlockMap sq = compose(A, M.parts, M.parts, M.parts, M.d, M.d);
  BlockMap act = central_action(A, M.parts, c);
  for (auto& [key, paths] : act.blocks)
    for (auto& [p, coeff] : paths) sq.add(key.first, key.second, p, -coeff);
  sq.prune();
  if (!sq.empty()) {
    auto& [key, paths] = *sq.blocks.begin();
    return {false, "d^2 differs from the parameter action on block " +
                       std::to_string(key.first) + " -> " + std::to_string(key.second)};
  }
  return {true, ""};
}

/* ------------------------------------------------------------------ */

LabeledDuplex assemble(const ZigzagAlgebra& A, const Point& p, Convention conv) {
  p.validate();
  if (!same_graph(A.graph(), p.graph))
    throw DuplexError("point and algebra are over different graphs");
  const Graph& g = p.graph;
  int n = g.vertices();
  LabeledDuplex M;
  M.alg = &A;
  std::vector<int> pidx(n, -1), sidx(n, -1);
  for (int a = 0; a < n; ++a)
    if (p.v[a] > 0) {
      pidx[a] = static_cast<int>(M.parts.size());
      M.parts.push_back({SumKind::Proj, a, 0, static_cast<int>(p.v[a])});
    }
  for (int a = 0; a < n; ++a)
    if (p.w[a] > 0) {
      sidx[a] = static_cast<int>(M.parts.size());
      M.parts.push_back({SumKind::Simple, a, 1, static_cast<int>(p.w[a])});
    }
  for (int h = 0; h < g.arrows(); ++h) {
    int a = g.source(h), b = g.target(h);
    if (pidx[a] < 0 || pidx[b] < 0) continue;
    FMatrix coeff = (conv == Convention::Mu && g.eps(h) < 0) ? -p.B[h] : p.B[h];
    M.d.add(pidx[a], pidx[b], A.arrow_elem(h), coeff);
  }
  for (int a = 0; a < n; ++a) {
    if (pidx[a] >= 0 && sidx[a] >= 0) {
      M.d.add(pidx[a], sidx[a], kPathHat, p.j_[a]);
      M.d.add(sidx[a], pidx[a], kPathSoc, p.i_[a]);
    }
  }
  M.d.prune();
  return M;
}

Point extract(const LabeledDuplex& M, const std::vector<RatFunc>& zeta_c,
              const std::vector<RatFunc>& zeta_r, Convention conv) {
  const ZigzagAlgebra& A = *M.alg;
  const Graph& g = A.graph();
  int n = g.vertices();
  // concatenation offsets per vertex, in part order
  std::vector<long> v(n, 0), w(n, 0);
  std::vector<std::vector<std::pair<int, int>>> poff(n), soff(n);  // (part, offset)
  for (size_t k = 0; k < M.parts.size(); ++k) {
    const Summand& s = M.parts[k];
    if (s.mult == 0) continue;
    if (s.kind == SumKind::Proj) {
      if ((s.shift % 2 + 2) % 2 != 0)
        throw DuplexError("projective summand at odd shift: not in assembled form");
      poff[s.vertex].push_back({static_cast<int>(k), static_cast<int>(v[s.vertex])});
      v[s.vertex] += s.mult;
    } else {
      if ((s.shift % 2 + 2) % 2 != 1)
        throw DuplexError("simple summand at even shift: not in assembled form");
      soff[s.vertex].push_back({static_cast<int>(k), static_cast<int>(w[s.vertex])});
      w[s.vertex] += s.mult;
    }
  }
  std::vector<int> part_off(M.parts.size(), -1);
  for (int a = 0; a < n; ++a) {
    for (auto& [k, off] : poff[a]) part_off[k] = off;
    for (auto& [k, off] : soff[a]) part_off[k] = off;
  }
  Point p;
  p.graph = g;
  p.v = v;
  p.w = w;
  for (int h = 0; h < g.arrows(); ++h)
    p.B.push_back(FMatrix(static_cast<int>(v[g.target(h)]),
                          static_cast<int>(v[g.source(h)])));
  for (int a = 0; a < n; ++a) {
    p.i_.push_back(FMatrix(static_cast<int>(v[a]), static_cast<int>(w[a])));
    p.j_.push_back(FMatrix(static_cast<int>(w[a]), static_cast<int>(v[a])));
  }
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    const Summand& s = M.parts[si];
    const Summand& t = M.parts[di];
    for (auto& [path, coeff] : paths) {
      if (coeff.is_zero()) continue;
      if (path >= 0) {
        if (!A.is_arrow(path))
          throw DuplexError("differential carries a non-arrow path: not in assembled form");
        p.B[A.arrow_of(path)].set_block(part_off[di], part_off[si], coeff);
      } else if (path == kPathHat) {
        p.j_[s.vertex].set_block(part_off[di], part_off[si], coeff);
      } else if (path == kPathSoc) {
        p.i_[t.vertex].set_block(part_off[di], part_off[si], coeff);
      } else {
        throw DuplexError("differential carries a simple-to-simple component");
      }
    }
  }
  if (conv == Convention::Mu)
    for (int h = 0; h < g.arrows(); ++h)
      if (g.eps(h) < 0) p.B[h] = -p.B[h];
  p.zeta_c = zeta_c;
  p.zeta_r = zeta_r;
  p.validate();
  return p;
}

/* ------------------------------------------------------------------ */

namespace {

// conjugate d by the even automorphism "R on the copy space of `part`"
void even_transform(LabeledDuplex& M, int part, const FMatrix& r) {
  FMatrix rinv = r.inverse();
  BlockMap nd;
  nd.kappa = M.d.kappa;
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    for (auto& [p, coeff] : paths) {
      FMatrix c = coeff;
      if (di == part) c = r * c;
      if (si == part) c = c * rinv;
      nd.add(si, di, p, c);
    }
  }
  nd.prune();
  M.d = std::move(nd);
}

// split `part` into copies [0, r) and [r, mult); the tail becomes part+1
void split_summand(LabeledDuplex& M, int part, int r) {
  int m = M.parts[part].mult;
  Summand tail = M.parts[part];
  tail.mult = m - r;
  M.parts[part].mult = r;
  M.parts.insert(M.parts.begin() + part + 1, tail);
  auto remap = [&](int k) { return k > part ? k + 1 : k; };
  BlockMap nd;
  nd.kappa = M.d.kappa;
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    for (auto& [p, coeff] : paths) {
      bool ssplit = (si == part), dsplit = (di == part);
      int rows = coeff.rows(), cols = coeff.cols();
      int rcut = dsplit ? r : rows, ccut = ssplit ? r : cols;
      if (rcut > 0 && ccut > 0)
        nd.add(remap(si), remap(di), p, coeff.submatrix(0, 0, rcut, ccut));
      if (ssplit && ccut < cols && rcut > 0)
        nd.add(part + 1, remap(di), p, coeff.submatrix(0, ccut, rcut, cols - ccut));
      if (dsplit && rcut < rows && ccut > 0)
        nd.add(remap(si), part + 1, p, coeff.submatrix(rcut, 0, rows - rcut, ccut));
      if (ssplit && dsplit && rcut < rows && ccut < cols)
        nd.add(part + 1, part + 1, p,
               coeff.submatrix(rcut, ccut, rows - rcut, cols - ccut));
    }
  }
  nd.prune();
  M.d = std::move(nd);
}

void drop_parts(LabeledDuplex& M, int a, int b) {
  if (a > b) std::swap(a, b);
  auto remap = [&](int k) { return k - (k > a) - (k > b); };
  BlockMap nd;
  nd.kappa = M.d.kappa;
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    if (si == a || si == b || di == a || di == b) continue;
    for (auto& [p, coeff] : paths) nd.add(remap(si), remap(di), p, coeff);
  }
  M.parts.erase(M.parts.begin() + b);
  M.parts.erase(M.parts.begin() + a);
  M.d = std::move(nd);
}

int degree_zero_path(const LabeledDuplex& M, int src) {
  const Summand& s = M.parts[src];
  return s.kind == SumKind::Proj ? M.alg->idem(s.vertex) : kPathIds;
}

}  // namespace

void cancel_pair(LabeledDuplex& M, int src, int dst) {
  const ZigzagAlgebra& A = *M.alg;
  const Summand& s = M.parts[src];
  const Summand& t = M.parts[dst];
  if (s.kind != t.kind || s.vertex != t.vertex || ((t.shift - s.shift) % 2 + 2) % 2 != 1)
    throw DuplexError("pair labels do not admit cancellation");
  if (s.mult != t.mult) throw DuplexError("pair multiplicities differ");
  const FMatrix* kptr = M.d.find(src, dst, degree_zero_path(M, src));
  if (!kptr) throw DuplexError("pair has no degree-zero component");
  FMatrix k = *kptr;
  FMatrix kinv = k.inverse();  // throws if singular
  // phi^{-1}: dst -> src as an odd map
  BlockMap phi_inv;
  phi_inv.kappa = 1;
  phi_inv.add(dst, src, degree_zero_path(M, src), kinv);
  if (s.kind == SumKind::Proj) {
    const FMatrix* lptr = M.d.find(src, dst, A.socle(s.vertex));
    if (lptr) phi_inv.add(dst, src, A.socle(s.vertex), -(kinv * *lptr * kinv));
  }
  // correction d_{. <- src} . phi^{-1} . d_{dst <- .} on the remaining parts
  BlockMap into_dst, from_src;
  into_dst.kappa = 1;
  from_src.kappa = 1;
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    if (di == dst && si != src && si != dst)
      for (auto& [p, c] : paths) into_dst.add(si, di, p, c);
    if (si == src && di != src && di != dst)
      for (auto& [p, c] : paths) from_src.add(si, di, p, c);
  }
  BlockMap half = compose(A, M.parts, M.parts, M.parts, phi_inv, into_dst);
  BlockMap corr = compose(A, M.parts, M.parts, M.parts, from_src, half);
  for (auto& [key, paths] : corr.blocks)
    for (auto& [p, c] : paths) M.d.add(key.first, key.second, p, -c);
  M.d.prune();
  drop_parts(M, src, dst);
}

namespace {

/* Reduce the degree-zero coefficient of the (src, dst) block to
 * [[I_r, 0], [0, 0]] by even transforms, split off the rank-r corners,
 * cancel them.  Returns r. */
int cancel_rank(LabeledDuplex& M, int src, int dst) {
  const FMatrix* kptr = M.d.find(src, dst, degree_zero_path(M, src));
  if (!kptr) return 0;
  FMatrix k = *kptr;
  int mt = k.rows(), ms = k.cols();
  // row reduce: rows_t * k = rref; bring pivot rows first
  FMatrix kt = k;  // working copy for rank data
  // use kernel/rank machinery: build U from the row echelon of k
  // U = P . T where T*k is reduced and P lifts pivot rows to the top
  FMatrix id_t = FMatrix::identity(mt);
  // compute echelon through the public interface: solve tricks are clumsy,
  // so do a small local elimination here
  std::vector<std::pair<int, int>> piv;
  FMatrix w = k, T = id_t;
  {
    std::vector<char> rowu(mt, 0), colu(ms, 0);
    while (true) {
      int br = -1, bc = -1, best = -1;
      for (int i = 0; i < mt; ++i) {
        if (rowu[i]) continue;
        for (int j = 0; j < ms; ++j) {
          if (colu[j] || w.at(i, j).is_zero()) continue;
          int cx = w.at(i, j).complexity();
          if (best < 0 || cx < best) best = cx, br = i, bc = j;
        }
      }
      if (br < 0) break;
      RatFunc pinv = w.at(br, bc).inv();
      for (int j = 0; j < ms; ++j) w.at(br, j) *= pinv;
      for (int j = 0; j < mt; ++j) T.at(br, j) *= pinv;
      for (int i = 0; i < mt; ++i) {
        if (i == br) continue;
        RatFunc f = w.at(i, bc);
        if (f.is_zero()) continue;
        for (int j = 0; j < ms; ++j)
          if (!w.at(br, j).is_zero()) w.at(i, j) -= f * w.at(br, j);
        for (int j = 0; j < mt; ++j)
          if (!T.at(br, j).is_zero()) T.at(i, j) -= f * T.at(br, j);
      }
      rowu[br] = 1;
      colu[bc] = 1;
      piv.emplace_back(br, bc);
    }
  }
  int r = static_cast<int>(piv.size());
  if (r == 0) return 0;
  std::sort(piv.begin(), piv.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  // U: permute pivot rows to the top of T
  FMatrix u(mt, mt);
  {
    std::vector<char> used(mt, 0);
    for (int x = 0; x < r; ++x) {
      for (int j = 0; j < mt; ++j) u.at(x, j) = T.at(piv[x].first, j);
      used[piv[x].first] = 1;
    }
    int row = r;
    for (int i = 0; i < mt; ++i)
      if (!used[i]) {
        for (int j = 0; j < mt; ++j) u.at(row, j) = T.at(i, j);
        ++row;
      }
  }
  // V: pivot columns first, then clear the rest of the top rows
  FMatrix uk = u * k;
  FMatrix pcol(ms, ms);
  {
    std::vector<char> used(ms, 0);
    for (int x = 0; x < r; ++x) {
      pcol.at(piv[x].second, x) = RatFunc(1);
      used[piv[x].second] = 1;
    }
    int col = r;
    for (int j = 0; j < ms; ++j)
      if (!used[j]) pcol.at(j, col++) = RatFunc(1);
  }
  FMatrix ukp = uk * pcol;
  FMatrix clear = FMatrix::identity(ms);
  for (int x = 0; x < r; ++x)
    for (int j = r; j < ms; ++j) clear.at(x, j) = -ukp.at(x, j);
  FMatrix vtot = pcol * clear;
  even_transform(M, dst, u);
  even_transform(M, src, vtot.inverse());
  int s2 = src, t2 = dst;
  if (r < mt) {
    split_summand(M, dst, r);
    if (s2 > dst) ++s2;
  }
  if (r < ms) {
    split_summand(M, s2, r);
    if (t2 > s2) ++t2;
  }
  cancel_pair(M, s2, t2);
  return r;
}

}  // namespace

void reduce(LabeledDuplex& M) {
  while (true) {
    bool progress = false;
    for (auto& [key, paths] : M.d.blocks) {
      auto [si, di] = key;
      const Summand& s = M.parts[si];
      const Summand& t = M.parts[di];
      if (s.kind != t.kind || s.vertex != t.vertex) continue;
      if (((t.shift - s.shift) % 2 + 2) % 2 != 1) continue;
      auto it = paths.find(degree_zero_path(M, si));
      if (it == paths.end() || it->second.is_zero()) continue;
      cancel_rank(M, si, di);
      progress = true;
      break;  // indices changed; rescan
    }
    if (!progress) break;
  }
  // drop summands of multiplicity zero
  for (int k = static_cast<int>(M.parts.size()) - 1; k >= 0; --k) {
    if (M.parts[k].mult > 0) continue;
    auto remap = [&](int x) { return x > k ? x - 1 : x; };
    BlockMap nd;
    nd.kappa = M.d.kappa;
    for (auto& [key, paths] : M.d.blocks) {
      auto [si, di] = key;
      if (si == k || di == k) continue;
      for (auto& [p, c] : paths) nd.add(remap(si), remap(di), p, c);
    }
    M.parts.erase(M.parts.begin() + k);
    M.d = std::move(nd);
  }
}

void merge_summands(LabeledDuplex& M) {
  // group by (kind, vertex, shift parity); order: projectives first, then
  // simples, by vertex, then by parity
  struct Key {
    int kind, vertex, par;
    bool operator<(const Key& o) const {
      return std::tie(kind, vertex, par) < std::tie(o.kind, o.vertex, o.par);
    }
  };
  std::map<Key, std::vector<int>> groups;
  for (size_t k = 0; k < M.parts.size(); ++k) {
    const Summand& s = M.parts[k];
    if (s.mult == 0) continue;
    groups[{s.kind == SumKind::Proj ? 0 : 1, s.vertex, ((s.shift % 2) + 2) % 2}]
        .push_back(static_cast<int>(k));
  }
  std::vector<Summand> nparts;
  std::vector<int> part_of(M.parts.size(), -1), off_of(M.parts.size(), 0);
  for (auto& [key, members] : groups) {
    int total = 0;
    for (int k : members) {
      part_of[k] = static_cast<int>(nparts.size());
      off_of[k] = total;
      total += M.parts[k].mult;
    }
    nparts.push_back({key.kind == 0 ? SumKind::Proj : SumKind::Simple, key.vertex,
                      key.par, total});
  }
  BlockMap nd;
  nd.kappa = M.d.kappa;
  for (auto& [key, paths] : M.d.blocks) {
    auto [si, di] = key;
    if (part_of[si] < 0 || part_of[di] < 0) continue;
    for (auto& [p, c] : paths) {
      FMatrix big(nparts[part_of[di]].mult, nparts[part_of[si]].mult);
      big.set_block(off_of[di], off_of[si], c);
      nd.add(part_of[si], part_of[di], p, big);
    }
  }
  nd.prune();
  M.parts = std::move(nparts);
  M.d = std::move(nd);
}

/* ------------------------------------------------------------------ */

StabilityReport stability_check(const Point& p) {
  p.validate();
  const Graph& g = p.graph;
  int n = g.vertices();
  std::vector<FMatrix> sub(n);
  for (int a = 0; a < n; ++a) sub[a] = p.j_[a].kernel_basis();
  while (true) {
    bool changed = false;
    for (int a = 0; a < n; ++a) {
      if (sub[a].cols() == 0) continue;
      FMatrix constraints = sub[a].cokernel_projection();
      for (int h : g.arrows_from(a)) {
        FMatrix pi = sub[g.target(h)].cokernel_projection();
        constraints = FMatrix::vstack(constraints, pi * p.B[h]);
      }
      FMatrix next = constraints.kernel_basis();
      if (next.cols() != sub[a].cols()) {
        sub[a] = next;
        changed = true;
      }
    }
    if (!changed) break;
  }
  StabilityReport rep;
  rep.sub_dims.resize(n);
  for (int a = 0; a < n; ++a) {
    rep.sub_dims[a] = sub[a].cols();
    if (sub[a].cols() > 0 && rep.stable) {
      rep.stable = false;
      rep.witness_vertex = a;
      rep.witness = sub[a].submatrix(0, 0, sub[a].rows(), 1);
    }
  }
  return rep;
}

FramedIso framed_iso(const Point& p, const Point& q) {
  p.validate();
  q.validate();
  if (!same_graph(p.graph, q.graph))
    throw DuplexError("points live over different graphs");
  FramedIso out;
  if (p.v != q.v || p.w != q.w) return out;
  const Graph& g = p.graph;
  int n = g.vertices();
  // unknowns: entries of g_a, a-major then row-major
  std::vector<int> var_off(n + 1, 0);
  for (int a = 0; a < n; ++a)
    var_off[a + 1] = var_off[a] + static_cast<int>(p.v[a] * p.v[a]);
  int nvars = var_off[n];
  std::vector<std::vector<RatFunc>> rows;
  std::vector<RatFunc> rhs;
  auto var = [&](int a, int r, int c) {
    return var_off[a] + r * static_cast<int>(p.v[a]) + c;
  };
  auto new_row = [&]() -> std::vector<RatFunc>& {
    rows.emplace_back(nvars);
    rhs.emplace_back();
    return rows.back();
  };
  for (int h = 0; h < g.arrows(); ++h) {
    int a = g.source(h), b = g.target(h);
    for (int r = 0; r < p.v[b]; ++r)
      for (int c = 0; c < p.v[a]; ++c) {
        auto& row = new_row();
        for (int k = 0; k < p.v[b]; ++k)
          if (!p.B[h].at(k, c).is_zero()) row[var(b, r, k)] += p.B[h].at(k, c);
        for (int k = 0; k < p.v[a]; ++k)
          if (!q.B[h].at(r, k).is_zero()) row[var(a, k, c)] -= q.B[h].at(r, k);
      }
  }
  for (int a = 0; a < n; ++a) {
    for (int r = 0; r < p.v[a]; ++r)
      for (int c = 0; c < p.w[a]; ++c) {
        auto& row = new_row();
        for (int k = 0; k < p.v[a]; ++k)
          if (!p.i_[a].at(k, c).is_zero()) row[var(a, r, k)] += p.i_[a].at(k, c);
        rhs.back() = q.i_[a].at(r, c);
      }
    for (int r = 0; r < p.w[a]; ++r)
      for (int c = 0; c < p.v[a]; ++c) {
        auto& row = new_row();
        for (int k = 0; k < p.v[a]; ++k)
          if (!q.j_[a].at(r, k).is_zero()) row[var(a, k, c)] += q.j_[a].at(r, k);
        rhs.back() = p.j_[a].at(r, c);
      }
  }
  FMatrix m(static_cast<int>(rows.size()), nvars), b(static_cast<int>(rows.size()), 1);
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < nvars; ++j) m.at(static_cast<int>(i), j) = rows[i][j];
    b.at(static_cast<int>(i), 0) = rhs[i];
  }
  auto x0 = m.solve(b);
  if (!x0.has_value()) return out;
  FMatrix ker = m.kernel_basis();
  int rk = ker.cols();
  long total_v = 0;
  for (int a = 0; a < n; ++a) total_v += p.v[a];
  if (total_v == 0) {
    out.exists = true;
    for (int a = 0; a < n; ++a) out.g.push_back(FMatrix(0, 0));
    return out;
  }
  /* det(g) has degree <= total_v in each grid variable, so the grid
   * {0..total_v}^rk certifies emptiness. */
  long grid = total_v + 1;
  double space = 1;
  for (int k = 0; k < rk; ++k) space *= static_cast<double>(grid);
  if (space > 2e5) throw DuplexError("isomorphism search space too large");
  std::vector<long> lambda(rk, 0);
  while (true) {
    FMatrix x = *x0;
    for (int k = 0; k < rk; ++k) {
      if (lambda[k] == 0) continue;
      for (int i = 0; i < nvars; ++i)
        if (!ker.at(i, k).is_zero())
          x.at(i, 0) += ker.at(i, k) * RatFunc(lambda[k]);
    }
    bool ok = true;
    std::vector<FMatrix> gs;
    for (int a = 0; a < n && ok; ++a) {
      FMatrix ga(static_cast<int>(p.v[a]), static_cast<int>(p.v[a]));
      for (int r = 0; r < p.v[a]; ++r)
        for (int c = 0; c < p.v[a]; ++c) ga.at(r, c) = x.at(var(a, r, c), 0);
      if (ga.rank() < p.v[a]) ok = false;
      gs.push_back(std::move(ga));
    }
    if (ok) {
      out.exists = true;
      out.g = std::move(gs);
      return out;
    }
    // next grid point
    int k = 0;
    while (k < rk && lambda[k] == grid - 1) lambda[k++] = 0;
    if (k == rk) break;
    ++lambda[k];
  }
  return out;
}

}  // namespace qv
