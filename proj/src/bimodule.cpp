#include "qv/bimodule.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace qv {

namespace {

FMatrix kron(const FMatrix& a, const FMatrix& b) {
  FMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) {
      if (a.at(r, c).is_zero()) continue;
      for (int r2 = 0; r2 < b.rows(); ++r2)
        for (int c2 = 0; c2 < b.cols(); ++c2)
          out.at(r * b.rows() + r2, c * b.cols() + c2) = a.at(r, c) * b.at(r2, c2);
    }
  return out;
}

// basis of e_b A: all elements with left vertex b, ascending
std::vector<int> left_basis(const ZigzagAlgebra& A, int b) {
  std::vector<int> out;
  for (int k = 0; k < A.dim(); ++k)
    if (A.left_vertex(k) == b) out.push_back(k);
  return out;
}

int position_in(const std::vector<int>& v, int x) {
  for (size_t k = 0; k < v.size(); ++k)
    if (v[k] == x) return static_cast<int>(k);
  return -1;
}

std::string part_name(const ZigzagAlgebra& A, const BimSummand& s) {
  std::ostringstream os;
  if (s.reg)
    os << "A";
  else
    os << "P(" << s.a << "," << s.b << ")";
  os << "[" << s.shift << "]^" << s.mult;
  (void)A;
  return os.str();
}

}  // namespace

/* ------------------------------------------------------------------ */

void BimBlockMap::add(int src, int dst, std::pair<int, int> key, const FMatrix& coeff) {
  if (coeff.is_zero()) return;
  auto& val = blocks[{src, dst}];
  auto it = val.find(key);
  if (it == val.end())
    val.emplace(key, coeff);
  else
    it->second = it->second + coeff;
}

const BimValue* BimBlockMap::find(int src, int dst) const {
  auto it = blocks.find({src, dst});
  return it == blocks.end() ? nullptr : &it->second;
}

void BimBlockMap::prune() {
  for (auto it = blocks.begin(); it != blocks.end();) {
    for (auto jt = it->second.begin(); jt != it->second.end();)
      jt = jt->second.is_zero() ? it->second.erase(jt) : std::next(jt);
    it = it->second.empty() ? blocks.erase(it) : std::next(it);
  }
}

bool BimBlockMap::empty() const {
  for (auto& [key, val] : blocks)
    for (auto& [k, coeff] : val)
      if (!coeff.is_zero()) return false;
  return true;
}

int BimoduleDuplex::local_dim(int part) const {
  const BimSummand& s = parts[part];
  if (s.reg) return alg->dim();
  return static_cast<int>(alg->proj_basis(s.a).size() * left_basis(*alg, s.b).size());
}

int BimoduleDuplex::total_dim() const {
  int t = 0;
  for (size_t k = 0; k < parts.size(); ++k)
    t += parts[k].mult * local_dim(static_cast<int>(k));
  return t;
}

/* ------------------------------------------------------------------ */

BimoduleDuplex regular_bimodule(const ZigzagAlgebra& A) {
  BimoduleDuplex N;
  N.alg = &A;
  N.parts.push_back({true, 0, 0, 0, 1});
  N.c0.assign(A.vertices(), RatFunc());
  N.c1.assign(A.vertices(), RatFunc());
  return N;
}

BimoduleDuplex reflection_bimodule(const ZigzagAlgebra& A, int a, const RatFunc& x) {
  const Graph& g = A.graph();
  if (a < 0 || a >= g.vertices()) throw DuplexError("reflection vertex out of range");
  if (g.loops_at(a) > 0) throw DuplexError("reflection vertex carries a loop");
  BimoduleDuplex N;
  N.alg = &A;
  N.parts.push_back({true, 0, 0, 0, 1});        // A
  N.parts.push_back({false, a, a, 1, 1});       // P(a,a)[1]
  FMatrix one = FMatrix::identity(1);
  // comultiplication at a; the arrow terms carry eps(bar h) so the value
  // supercommutes with the left action
  N.d.add(0, 1, {A.socle(a), A.idem(a)}, one);
  N.d.add(0, 1, {A.idem(a), A.socle(a)}, one);
  for (int h : g.arrows_from(a))
    N.d.add(0, 1, {A.arrow_elem(g.bar(h)), A.arrow_elem(h)},
            one.scale(RatFunc(g.eps(g.bar(h)))));
  N.d.add(1, 0, {A.idem(a), -1}, one.scale(x));
  N.c0.assign(g.vertices(), RatFunc());
  N.c1.assign(g.vertices(), RatFunc());
  N.c0[a] = N.c0[a] + x;
  for (int h : g.arrows_from(a)) N.c0[g.target(h)] = N.c0[g.target(h)] - x;
  N.c1[a] = x;
  return N;
}

/* ------------------------------------------------------------------ */

namespace {

struct BimLayout {
  std::vector<int> start, loc;
  int total = 0;
};

BimLayout layout_of(const BimoduleDuplex& N) {
  BimLayout L;
  for (size_t k = 0; k < N.parts.size(); ++k) {
    L.start.push_back(L.total);
    int l = N.local_dim(static_cast<int>(k));
    L.loc.push_back(l);
    L.total += l * N.parts[k].mult;
  }
  return L;
}

}  // namespace

FMatrix bim_materialize(const BimoduleDuplex& N) {
  const ZigzagAlgebra& A = *N.alg;
  BimLayout L = layout_of(N);
  FMatrix D(L.total, L.total);
  for (auto& [key, val] : N.d.blocks) {
    auto [si, di] = key;
    const BimSummand& S = N.parts[si];
    const BimSummand& T = N.parts[di];
    std::vector<int> slb, spb, tlb, tpb;
    if (!S.reg) {
      spb = A.proj_basis(S.a);
      slb = left_basis(A, S.b);
    }
    if (!T.reg) {
      tpb = A.proj_basis(T.a);
      tlb = left_basis(A, T.b);
    }
    auto emit = [&](int sloc, int tloc, const RatFunc& c, const FMatrix& coeff) {
      if (c.is_zero()) return;
      for (int sc = 0; sc < S.mult; ++sc)
        for (int tc = 0; tc < T.mult; ++tc) {
          const RatFunc& m = coeff.at(tc, sc);
          if (m.is_zero()) continue;
          D.at(L.start[di] + tc * L.loc[di] + tloc, L.start[si] + sc * L.loc[si] + sloc) =
              D.at(L.start[di] + tc * L.loc[di] + tloc,
                   L.start[si] + sc * L.loc[si] + sloc) +
              c * m;
        }
    };
    for (auto& [pk, coeff] : val) {
      auto [p, q] = pk;
      if (S.reg) {
        for (int u = 0; u < A.dim(); ++u) {
          RatFunc sign((N.d.kappa && (A.degree(u) & 1)) ? -1 : 1);
          if (T.reg) {
            auto [c1, m1] = A.mul_basis(u, p);
            if (m1 < 0) continue;
            emit(u, m1, sign * RatFunc(c1), coeff);
          } else {
            auto [c1, m1] = A.mul_basis(u, p);
            if (m1 < 0) continue;
            int rp = position_in(tpb, m1), rq = position_in(tlb, q);
            if (rp < 0 || rq < 0) continue;
            emit(u, rp * static_cast<int>(tlb.size()) + rq, sign * RatFunc(c1), coeff);
          }
        }
      } else {
        for (size_t pi = 0; pi < spb.size(); ++pi)
          for (size_t qi = 0; qi < slb.size(); ++qi) {
            int pu = spb[pi], qu = slb[qi];
            int sloc = static_cast<int>(pi * slb.size() + qi);
            RatFunc sign((N.d.kappa && (A.degree(pu) & 1)) ? -1 : 1);
            if (T.reg) {
              auto [c1, m1] = A.mul_basis(pu, p);
              if (m1 < 0) continue;
              auto [c2, m2] = A.mul_basis(m1, qu);
              if (m2 < 0) continue;
              emit(sloc, m2, sign * RatFunc(c1 * c2), coeff);
            } else {
              auto [c1, m1] = A.mul_basis(pu, p);
              auto [c2, m2] = A.mul_basis(q, qu);
              if (m1 < 0 || m2 < 0) continue;
              int rp = position_in(tpb, m1), rq = position_in(tlb, m2);
              if (rp < 0 || rq < 0) continue;
              emit(sloc, rp * static_cast<int>(tlb.size()) + rq,
                   sign * RatFunc(c1 * c2), coeff);
            }
          }
      }
    }
  }
  return D;
}

namespace {

FMatrix bim_mult(const BimoduleDuplex& N, int g, bool left) {
  const ZigzagAlgebra& A = *N.alg;
  BimLayout L = layout_of(N);
  FMatrix M(L.total, L.total);
  for (size_t k = 0; k < N.parts.size(); ++k) {
    const BimSummand& S = N.parts[k];
    auto emit = [&](int sloc, int tloc, const RatFunc& c) {
      if (c.is_zero()) return;
      for (int cp = 0; cp < S.mult; ++cp)
        M.at(L.start[k] + cp * L.loc[k] + tloc, L.start[k] + cp * L.loc[k] + sloc) = c;
    };
    if (S.reg) {
      for (int u = 0; u < A.dim(); ++u) {
        auto [c, m] = left ? A.mul_basis(g, u) : A.mul_basis(u, g);
        if (m >= 0) emit(u, m, RatFunc(c));
      }
    } else {
      auto pb = A.proj_basis(S.a);
      auto lb = left_basis(A, S.b);
      for (size_t pi = 0; pi < pb.size(); ++pi)
        for (size_t qi = 0; qi < lb.size(); ++qi) {
          int sloc = static_cast<int>(pi * lb.size() + qi);
          if (left) {
            auto [c, m] = A.mul_basis(g, pb[pi]);
            if (m < 0) continue;
            int rp = position_in(pb, m);
            if (rp < 0) continue;
            emit(sloc, static_cast<int>(rp * lb.size() + qi), RatFunc(c));
          } else {
            auto [c, m] = A.mul_basis(lb[qi], g);
            if (m < 0) continue;
            int rq = position_in(lb, m);
            if (rq < 0) continue;
            emit(sloc, static_cast<int>(pi * lb.size() + rq), RatFunc(c));
          }
        }
    }
  }
  return M;
}

}  // namespace

FMatrix bim_left_mult(const BimoduleDuplex& N, int g) { return bim_mult(N, g, true); }
FMatrix bim_right_mult(const BimoduleDuplex& N, int g) { return bim_mult(N, g, false); }

CheckResult verify_bimodule(const BimoduleDuplex& N) {
  const ZigzagAlgebra& A = *N.alg;
  int n = A.vertices();
  if (static_cast<int>(N.c0.size()) != n || static_cast<int>(N.c1.size()) != n)
    return {false, "curvature vectors have the wrong length"};
  for (auto& [key, val] : N.d.blocks) {
    auto [si, di] = key;
    if (si < 0 || di < 0 || si >= static_cast<int>(N.parts.size()) ||
        di >= static_cast<int>(N.parts.size()))
      return {false, "block outside the summand list"};
    const BimSummand& S = N.parts[si];
    const BimSummand& T = N.parts[di];
    for (auto& [pk, coeff] : val) {
      auto [p, q] = pk;
      if (coeff.rows() != T.mult || coeff.cols() != S.mult)
        return {false, "coefficient of the wrong shape on " + part_name(A, S) + " -> " +
                           part_name(A, T)};
      int deg = A.degree(p) + (q >= 0 ? A.degree(q) : 0);
      int par = (((T.shift + deg - S.shift - 1) % 2) + 2) % 2;
      if (par != 0)
        return {false, "component of even parity on " + part_name(A, S) + " -> " +
                           part_name(A, T)};
      if (T.reg) {
        if (q != -1) return {false, "pair component mapping into a regular summand"};
      } else {
        if (q < 0 || A.right_vertex(p) != T.a || A.left_vertex(q) != T.b)
          return {false, "component outside P(a,b) on " + part_name(A, S) + " -> " +
                             part_name(A, T)};
      }
      if (!S.reg) {
        if (T.reg) {
          if (A.left_vertex(p) != S.a || A.right_vertex(p) != S.b)
            return {false, "value does not match the source supports"};
        } else {
          if (A.left_vertex(p) != S.a || (q >= 0 && A.right_vertex(q) != S.b))
            return {false, "value does not match the source supports"};
        }
      }
    }
  }
  FMatrix D = bim_materialize(N);
  for (int g = 0; g < A.dim(); ++g) {
    FMatrix Lg = bim_left_mult(N, g), Rg = bim_right_mult(N, g);
    FMatrix lhs = Lg * D;
    FMatrix rhs = D * Lg;
    if (A.degree(g) & 1) rhs = -rhs;
    if (lhs != rhs)
      return {false, "d does not supercommute with the left action of " + A.basis_name(g)};
    if (Rg * D != D * Rg)
      return {false, "d does not commute with the right action of " + A.basis_name(g)};
  }
  FMatrix rhs(D.rows(), D.cols());
  for (int a = 0; a < n; ++a) {
    if (!N.c0[a].is_zero())
      rhs = rhs + bim_left_mult(N, A.socle(a)).scale(N.c0[a]);
    if (!N.c1[a].is_zero())
      rhs = rhs + bim_right_mult(N, A.socle(a)).scale(N.c1[a]);
  }
  if (D * D != rhs) return {false, "d^2 differs from the two-sided curvature"};
  return {true, ""};
}

/* ------------------------------------------------------------------ */

BimBlockMap compose_bim(const BimoduleDuplex& X, const BimoduleDuplex& Y,
                        const BimoduleDuplex& Z, const BimBlockMap& g,
                        const BimBlockMap& f) {
  (void)X;
  (void)Z;
  const ZigzagAlgebra& A = *Y.alg;
  BimBlockMap out;
  out.kappa = (f.kappa + g.kappa) & 1;
  for (auto& [fk, fval] : f.blocks) {
    auto [s, m] = fk;
    for (auto& [gk, gval] : g.blocks) {
      if (gk.first != m) continue;
      int t = gk.second;
      bool mid_reg = Y.parts[m].reg;
      for (auto& [fpk, fc] : fval) {
        auto [fp, fq] = fpk;
        RatFunc sign((g.kappa && (A.degree(fp) & 1)) ? -1 : 1);
        for (auto& [gpk, gc] : gval) {
          auto [gp, gq] = gpk;
          FMatrix prod = (gc * fc).scale(sign);
          if (prod.is_zero()) continue;
          if (mid_reg) {
            // f lands in w-components; g acts on each by its value
            int w = fp;
            if (gq == -1) {
              auto [c1, m1] = A.mul_basis(w, gp);
              if (m1 < 0) continue;
              out.add(s, t, {m1, -1}, prod.scale(RatFunc(c1)));
            } else {
              auto [c1, m1] = A.mul_basis(w, gp);
              if (m1 < 0) continue;
              out.add(s, t, {m1, gq}, prod.scale(RatFunc(c1)));
            }
          } else {
            // f lands in pairs (p, q); g sends the generator to its value
            if (gq == -1) {
              auto [c1, m1] = A.mul_basis(fp, gp);
              if (m1 < 0) continue;
              auto [c2, m2] = A.mul_basis(m1, fq);
              if (m2 < 0) continue;
              out.add(s, t, {m2, -1}, prod.scale(RatFunc(c1 * c2)));
            } else {
              auto [c1, m1] = A.mul_basis(fp, gp);
              if (m1 < 0) continue;
              auto [c2, m2] = A.mul_basis(gq, fq);
              if (m2 < 0) continue;
              out.add(s, t, {m1, m2}, prod.scale(RatFunc(c1 * c2)));
            }
          }
        }
      }
    }
  }
  out.prune();
  return out;
}

/* ------------------------------------------------------------------ */

namespace {

// l_{X_e} = r_{X_e} on every summand of N
bool movable(const BimoduleDuplex& N, int e) {
  for (auto& s : N.parts)
    if (!s.reg && (s.a == e || s.b == e)) return false;
  return true;
}

}  // namespace

BimoduleDuplex tensor_bimodules(const BimoduleDuplex& N1, const BimoduleDuplex& N2) {
  if (N1.alg != N2.alg) throw DuplexError("tensor factors over different algebras");
  const ZigzagAlgebra& A = *N1.alg;
  int n = A.vertices();
  BimoduleDuplex out;
  out.alg = &A;

  // part indices: oi[i1][i2] maps slot w (or -1) to the output part
  std::vector<std::vector<std::map<int, int>>> oi(
      N1.parts.size(), std::vector<std::map<int, int>>(N2.parts.size()));
  for (size_t i1 = 0; i1 < N1.parts.size(); ++i1) {
    const BimSummand& s1 = N1.parts[i1];
    for (size_t i2 = 0; i2 < N2.parts.size(); ++i2) {
      const BimSummand& s2 = N2.parts[i2];
      int mult = s1.mult * s2.mult;
      int sh = s1.shift + s2.shift;
      if (s1.reg && s2.reg) {
        oi[i1][i2][-1] = static_cast<int>(out.parts.size());
        out.parts.push_back({true, 0, 0, sh, mult});
      } else if (s1.reg) {
        oi[i1][i2][-1] = static_cast<int>(out.parts.size());
        out.parts.push_back({false, s2.a, s2.b, sh, mult});
      } else if (s2.reg) {
        oi[i1][i2][-1] = static_cast<int>(out.parts.size());
        out.parts.push_back({false, s1.a, s1.b, sh, mult});
      } else {
        for (int w : A.hom_basis(s1.b, s2.a)) {
          oi[i1][i2][w] = static_cast<int>(out.parts.size());
          out.parts.push_back({false, s1.a, s2.b, sh + A.degree(w), mult});
        }
      }
    }
  }

  // d1 (x) 1
  for (auto& [key, val] : N1.d.blocks) {
    auto [u1, u1p] = key;
    const BimSummand& src1 = N1.parts[u1];
    const BimSummand& dst1 = N1.parts[u1p];
    for (size_t i2 = 0; i2 < N2.parts.size(); ++i2) {
      const BimSummand& s2 = N2.parts[i2];
      FMatrix id2 = FMatrix::identity(s2.mult);
      std::vector<int> ws;
      if (!src1.reg && !s2.reg)
        ws = A.hom_basis(src1.b, s2.a);
      else
        ws = {-1};
      for (int w : ws) {
        int sp = oi[u1][i2].at(w);
        for (auto& [pk, coeff] : val) {
          auto [P, Q] = pk;
          FMatrix kc = kron(coeff, id2);
          if (s2.reg) {
            out.d.add(sp, oi[u1p][i2].at(-1), pk, kc);
            continue;
          }
          int ed = A.idem(s2.b);
          if (dst1.reg) {
            // value components P pass through the middle contraction
            if (w == -1) {
              if (A.right_vertex(P) != s2.a) continue;
              out.d.add(sp, oi[u1p][i2].at(-1), {P, ed}, kc);
            } else {
              auto [c1, m1] = A.mul_basis(P, w);
              if (m1 < 0) continue;
              out.d.add(sp, oi[u1p][i2].at(-1), {m1, ed}, kc.scale(RatFunc(c1)));
            }
          } else {
            if (w == -1) {
              if (A.right_vertex(Q) != s2.a) continue;
              out.d.add(sp, oi[u1p][i2].at(Q), {P, ed}, kc);
            } else {
              auto [c1, m1] = A.mul_basis(Q, w);
              if (m1 < 0) continue;
              out.d.add(sp, oi[u1p][i2].at(m1), {P, ed}, kc.scale(RatFunc(c1)));
            }
          }
        }
      }
    }
  }

  // 1 (x) d2, with the parity of the left tensor leg
  for (auto& [key, val] : N2.d.blocks) {
    auto [u2, u2p] = key;
    const BimSummand& src2 = N2.parts[u2];
    for (size_t i1 = 0; i1 < N1.parts.size(); ++i1) {
      const BimSummand& s1 = N1.parts[i1];
      FMatrix id1 = FMatrix::identity(s1.mult);
      std::vector<int> ws;
      if (!s1.reg && !src2.reg)
        ws = A.hom_basis(s1.b, src2.a);
      else
        ws = {-1};
      for (int w : ws) {
        int sp = oi[i1][u2].at(w);
        int lpar = s1.shift + (w >= 0 ? A.degree(w) : 0);
        RatFunc sign((lpar & 1) ? -1 : 1);
        for (auto& [pk, coeff] : val) {
          auto [P, Q] = pk;
          FMatrix kc = kron(id1, coeff).scale(sign);
          if (s1.reg) {
            out.d.add(sp, oi[i1][u2p].at(-1), pk, kc);
            continue;
          }
          int ia = A.idem(s1.a);
          if (Q == -1) {
            // into a regular summand of N2
            if (w == -1) {
              if (A.left_vertex(P) != s1.b) continue;
              out.d.add(sp, oi[i1][u2p].at(-1), {ia, P}, kc);
            } else {
              auto [c1, m1] = A.mul_basis(w, P);
              if (m1 < 0) continue;
              out.d.add(sp, oi[i1][u2p].at(-1), {ia, m1}, kc.scale(RatFunc(c1)));
            }
          } else {
            if (w == -1) {
              if (A.left_vertex(P) != s1.b) continue;
              out.d.add(sp, oi[i1][u2p].at(P), {ia, Q}, kc);
            } else {
              auto [c1, m1] = A.mul_basis(w, P);
              if (m1 < 0) continue;
              out.d.add(sp, oi[i1][u2p].at(m1), {ia, Q}, kc.scale(RatFunc(c1)));
            }
          }
        }
      }
    }
  }
  out.d.prune();

  // middle curvature moves to whichever side acts centrally on it
  out.c0 = N1.c0;
  out.c1 = N2.c1;
  for (int e = 0; e < n; ++e) {
    RatFunc mid = N1.c1[e] + N2.c0[e];
    if (mid.is_zero()) continue;
    if (movable(N1, e))
      out.c0[e] = out.c0[e] + mid;
    else if (movable(N2, e))
      out.c1[e] = out.c1[e] + mid;
    else
      throw DuplexError("curvature mismatch at vertex " + std::to_string(e));
  }
  return out;
}

/* ------------------------------------------------------------------ */

ModuleTensor tensor_with_module(const BimoduleDuplex& N, const LabeledDuplex& M,
                                const std::vector<RatFunc>& c) {
  const ZigzagAlgebra& A = *N.alg;
  if (M.alg != &A) throw DuplexError("tensor factors over different algebras");
  int n = A.vertices();
  if (static_cast<int>(c.size()) != n) throw DuplexError("curvature vector length");

  ModuleTensor out;
  out.module.alg = &A;

  // output parts with origins; oi[i1][i2] keyed by slot
  std::vector<std::vector<std::map<int, int>>> oi(
      N.parts.size(), std::vector<std::map<int, int>>(M.parts.size()));
  for (size_t i1 = 0; i1 < N.parts.size(); ++i1) {
    const BimSummand& s1 = N.parts[i1];
    for (size_t i2 = 0; i2 < M.parts.size(); ++i2) {
      const Summand& L = M.parts[i2];
      int mult = s1.mult * L.mult;
      if (s1.reg) {
        oi[i1][i2][kSlotNone] = static_cast<int>(out.module.parts.size());
        out.module.parts.push_back({L.kind, L.vertex, L.shift + s1.shift, mult});
        out.origins.push_back({static_cast<int>(i1), static_cast<int>(i2), kSlotNone});
      } else if (L.kind == SumKind::Proj) {
        for (int mu : A.hom_basis(s1.b, L.vertex)) {
          oi[i1][i2][mu] = static_cast<int>(out.module.parts.size());
          out.module.parts.push_back(
              {SumKind::Proj, s1.a, L.shift + s1.shift + A.degree(mu), mult});
          out.origins.push_back({static_cast<int>(i1), static_cast<int>(i2), mu});
        }
      } else if (L.vertex == s1.b) {
        oi[i1][i2][kSlotSimple] = static_cast<int>(out.module.parts.size());
        out.module.parts.push_back({SumKind::Proj, s1.a, L.shift + s1.shift, mult});
        out.origins.push_back({static_cast<int>(i1), static_cast<int>(i2), kSlotSimple});
      }
    }
  }

  // 1 (x) d_M
  for (auto& [key, paths] : M.d.blocks) {
    auto [m_s, m_t] = key;
    const Summand& Ls = M.parts[m_s];
    const Summand& Lt = M.parts[m_t];
    for (size_t i1 = 0; i1 < N.parts.size(); ++i1) {
      const BimSummand& s1 = N.parts[i1];
      FMatrix id1 = FMatrix::identity(s1.mult);
      if (s1.reg) {
        RatFunc sign((s1.shift & 1) ? -1 : 1);
        for (auto& [p, coeff] : paths)
          out.module.d.add(oi[i1][m_s].at(kSlotNone), oi[i1][m_t].at(kSlotNone), p,
                           kron(id1, coeff).scale(sign));
        continue;
      }
      int ia = A.idem(s1.a);
      int b = s1.b;
      for (auto& [p, coeff] : paths) {
        if (p >= 0) {
          // arrow or idempotent path between projective summands
          for (int mu : A.hom_basis(b, Ls.vertex)) {
            auto [c1, nu] = A.mul_basis(mu, p);
            if (nu < 0) continue;
            RatFunc sign(((s1.shift + A.degree(mu)) & 1) ? -1 : 1);
            out.module.d.add(oi[i1][m_s].at(mu), oi[i1][m_t].at(nu), ia,
                             kron(id1, coeff).scale(sign * RatFunc(c1)));
          }
        } else if (p == kPathHat) {
          if (Ls.vertex != b) continue;
          RatFunc sign((s1.shift & 1) ? -1 : 1);
          out.module.d.add(oi[i1][m_s].at(A.idem(b)), oi[i1][m_t].at(kSlotSimple), ia,
                           kron(id1, coeff).scale(sign));
        } else if (p == kPathSoc) {
          if (Lt.vertex != b) continue;
          RatFunc sign((s1.shift & 1) ? -1 : 1);
          out.module.d.add(oi[i1][m_s].at(kSlotSimple), oi[i1][m_t].at(A.socle(b)), ia,
                           kron(id1, coeff).scale(sign));
        } else {  // simple-to-simple component
          if (Ls.vertex != b || Lt.vertex != b) continue;
          RatFunc sign((s1.shift & 1) ? -1 : 1);
          out.module.d.add(oi[i1][m_s].at(kSlotSimple), oi[i1][m_t].at(kSlotSimple), ia,
                           kron(id1, coeff).scale(sign));
        }
      }
    }
  }

  // d_N (x) 1
  for (auto& [key, val] : N.d.blocks) {
    auto [u1, u1p] = key;
    const BimSummand& src1 = N.parts[u1];
    const BimSummand& dst1 = N.parts[u1p];
    for (size_t i2 = 0; i2 < M.parts.size(); ++i2) {
      const Summand& L = M.parts[i2];
      FMatrix idm = FMatrix::identity(L.mult);
      for (auto& [pk, coeff] : val) {
        auto [P, Q] = pk;
        FMatrix kc = kron(coeff, idm);
        if (src1.reg && dst1.reg) {
          if (L.kind == SumKind::Proj) {
            if (A.right_vertex(P) != L.vertex) continue;
            if (A.left_vertex(P) != L.vertex)
              throw DuplexError("tensor value is not vertex-diagonal");
            out.module.d.add(oi[u1][i2].at(kSlotNone), oi[u1p][i2].at(kSlotNone), P, kc);
          } else {
            if (P == A.idem(L.vertex))
              out.module.d.add(oi[u1][i2].at(kSlotNone), oi[u1p][i2].at(kSlotNone),
                               kPathIds, kc);
          }
        } else if (src1.reg) {
          // into P(alpha, beta): components (P, Q)
          if (L.kind == SumKind::Proj) {
            if (A.right_vertex(Q) != L.vertex) continue;
            out.module.d.add(oi[u1][i2].at(kSlotNone), oi[u1p][i2].at(Q), P, kc);
          } else {
            if (Q != A.idem(L.vertex)) continue;
            if (P != A.socle(L.vertex) || dst1.a != L.vertex)
              throw DuplexError("tensor value does not restrict to the simple summand");
            out.module.d.add(oi[u1][i2].at(kSlotNone), oi[u1p][i2].at(kSlotSimple),
                             kPathSoc, kc);
          }
        } else if (dst1.reg) {
          if (L.kind == SumKind::Proj) {
            for (int mu : A.hom_basis(src1.b, L.vertex)) {
              auto [c1, m1] = A.mul_basis(P, mu);
              if (m1 < 0) continue;
              out.module.d.add(oi[u1][i2].at(mu), oi[u1p][i2].at(kSlotNone), m1,
                               kc.scale(RatFunc(c1)));
            }
          } else {
            if (L.vertex != src1.b) continue;
            if (P == A.idem(src1.b))
              out.module.d.add(oi[u1][i2].at(kSlotSimple), oi[u1p][i2].at(kSlotNone),
                               kPathHat, kc);
          }
        } else {
          if (L.kind == SumKind::Proj) {
            for (int mu : A.hom_basis(src1.b, L.vertex)) {
              auto [c1, nu] = A.mul_basis(Q, mu);
              if (nu < 0) continue;
              out.module.d.add(oi[u1][i2].at(mu), oi[u1p][i2].at(nu), P,
                               kc.scale(RatFunc(c1)));
            }
          } else {
            if (L.vertex != src1.b || Q != A.idem(src1.b)) continue;
            out.module.d.add(oi[u1][i2].at(kSlotSimple), oi[u1p][i2].at(kSlotSimple), P,
                             kc);
          }
        }
      }
    }
  }
  out.module.d.prune();

  // curvature: the middle terms must act centrally on N
  out.curvature = N.c0;
  for (int e = 0; e < n; ++e) {
    RatFunc mid = N.c1[e] + c[e];
    if (mid.is_zero()) continue;
    if (!movable(N, e))
      throw DuplexError("curvature obstruction at vertex " + std::to_string(e));
    out.curvature[e] = out.curvature[e] + mid;
  }
  return out;
}

/* ------------------------------------------------------------------ */

namespace {

bool same_label(const BimSummand& s, const BimSummand& t) {
  return s.reg == t.reg && (s.reg || (s.a == t.a && s.b == t.b));
}

// degree-zero part of a block value between same-label summands
BimValue degree_zero_part(const ZigzagAlgebra& A, const BimSummand& s, const BimValue& val) {
  BimValue out;
  for (auto& [pk, coeff] : val) {
    int deg = A.degree(pk.first) + (pk.second >= 0 ? A.degree(pk.second) : 0);
    if (deg == 0) out.emplace(pk, coeff);
  }
  (void)s;
  return out;
}

// invert the degree-zero part, if possible
std::optional<BimValue> invert_phi0(const ZigzagAlgebra& A, const BimSummand& s,
                                    const BimValue& phi0) {
  BimValue inv;
  if (s.reg) {
    for (int k = 0; k < A.vertices(); ++k) {
      auto it = phi0.find({A.idem(k), -1});
      if (it == phi0.end()) return std::nullopt;
      if (it->second.rank() != it->second.rows() || it->second.rows() != it->second.cols())
        return std::nullopt;
      inv.emplace(std::make_pair(A.idem(k), -1), it->second.inverse());
    }
  } else {
    auto it = phi0.find({A.idem(s.a), A.idem(s.b)});
    if (it == phi0.end()) return std::nullopt;
    if (it->second.rank() != it->second.rows() || it->second.rows() != it->second.cols())
      return std::nullopt;
    inv.emplace(std::make_pair(A.idem(s.a), A.idem(s.b)), it->second.inverse());
  }
  return inv;
}

void drop_bim_parts(BimoduleDuplex& N, int a, int b) {
  if (a > b) std::swap(a, b);
  auto shift = [&](int k) { return k - (k > a ? 1 : 0) - (k > b ? 1 : 0); };
  BimBlockMap nd;
  nd.kappa = N.d.kappa;
  for (auto& [key, val] : N.d.blocks) {
    auto [s, t] = key;
    if (s == a || s == b || t == a || t == b) continue;
    for (auto& [pk, coeff] : val) nd.add(shift(s), shift(t), pk, coeff);
  }
  N.d = std::move(nd);
  std::vector<BimSummand> np;
  for (int k = 0; k < static_cast<int>(N.parts.size()); ++k)
    if (k != a && k != b) np.push_back(N.parts[k]);
  N.parts = std::move(np);
}

}  // namespace

void reduce_bimodule(BimoduleDuplex& N) {
  const ZigzagAlgebra& A = *N.alg;
  for (;;) {
    int src = -1, dst = -1;
    BimValue psi0;
    for (auto& [key, val] : N.d.blocks) {
      auto [s, t] = key;
      const BimSummand& S = N.parts[s];
      const BimSummand& T = N.parts[t];
      if (!same_label(S, T)) continue;
      if (((S.shift - T.shift) % 2 + 2) % 2 != 1) continue;
      if (S.mult != T.mult) continue;
      BimValue phi0 = degree_zero_part(A, S, val);
      auto inv = invert_phi0(A, S, phi0);
      if (!inv) continue;
      src = s;
      dst = t;
      psi0 = *inv;
      break;
    }
    if (src < 0) return;

    // phi and its inverse by a terminating Neumann series
    BimBlockMap phi;
    phi.kappa = 1;
    phi.blocks[{src, dst}] = N.d.blocks.at({src, dst});
    BimBlockMap phiplus = phi;
    for (auto& [pk, coeff] : phiplus.blocks[{src, dst}]) {
      int deg = A.degree(pk.first) + (pk.second >= 0 ? A.degree(pk.second) : 0);
      if (deg == 0) coeff = FMatrix(coeff.rows(), coeff.cols());
    }
    phiplus.prune();
    BimBlockMap psi0map;
    psi0map.kappa = 1;
    psi0map.blocks[{dst, src}] = psi0;
    BimBlockMap psi = psi0map;
    BimBlockMap term = psi0map;
    for (int guard = 0; !term.empty(); ++guard) {
      if (guard > 8) throw DuplexError("inverse series did not terminate");
      // term: dst -> src, then phiplus: src -> dst, then psi0: dst -> src
      BimBlockMap half = compose_bim(N, N, N, phiplus, term);
      BimBlockMap next = compose_bim(N, N, N, psi0map, half);
      for (auto& [key, val] : next.blocks)
        for (auto& [pk, coeff] : val) coeff = -coeff;
      next.prune();
      term = std::move(next);
      for (auto& [key, val] : term.blocks)
        for (auto& [pk, coeff] : val) psi.add(key.first, key.second, pk, coeff);
      psi.prune();
    }

    BimBlockMap into_t, out_s;
    into_t.kappa = 1;
    out_s.kappa = 1;
    for (auto& [key, val] : N.d.blocks) {
      auto [s, t] = key;
      if (t == dst && s != src) into_t.blocks[key] = val;
      if (s == src && t != dst) out_s.blocks[key] = val;
    }
    BimBlockMap corr = compose_bim(N, N, N, out_s, compose_bim(N, N, N, psi, into_t));
    for (auto& [key, val] : corr.blocks)
      for (auto& [pk, coeff] : val) N.d.add(key.first, key.second, pk, -coeff);
    N.d.prune();
    drop_bim_parts(N, src, dst);
  }
}

void sort_bimodule_parts(BimoduleDuplex& N) {
  std::vector<int> order(N.parts.size());
  for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
  auto keyof = [&](int k) {
    const BimSummand& s = N.parts[k];
    int par = ((s.shift % 2) + 2) % 2;
    return std::tuple<int, int, int, int>(s.reg ? 0 : 1, s.reg ? 0 : s.a,
                                          s.reg ? 0 : s.b, par);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return keyof(x) < keyof(y); });
  std::vector<int> pos(order.size());
  for (size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
  std::vector<BimSummand> np;
  for (size_t k = 0; k < order.size(); ++k) {
    BimSummand s = N.parts[order[k]];
    s.shift = ((s.shift % 2) + 2) % 2;
    np.push_back(s);
  }
  BimBlockMap nd;
  nd.kappa = N.d.kappa;
  for (auto& [key, val] : N.d.blocks)
    for (auto& [pk, coeff] : val) nd.add(pos[key.first], pos[key.second], pk, coeff);
  N.parts = std::move(np);
  N.d = std::move(nd);
}

/* ------------------------------------------------------------------ */

LabeledDuplex reflection_stage(const ZigzagAlgebra& A, const Point& p, int a) {
  const Graph& g = A.graph();
  if (a < 0 || a >= g.vertices()) throw DuplexError("reflection vertex out of range");
  if (g.loops_at(a) > 0) throw DuplexError("reflection vertex carries a loop");
  if (p.zeta_c[a].is_zero())
    throw DuplexError("reflection requires a nonzero complex parameter at the vertex");
  LabeledDuplex M = assemble(A, p, Convention::Centerm);
  BimoduleDuplex N = reflection_bimodule(A, a, -p.zeta_c[a]);
  ModuleTensor MT = tensor_with_module(N, M, p.zeta_c);
  int srcP = -1, xslot = -1;
  for (size_t k = 0; k < MT.origins.size(); ++k) {
    const auto& org = MT.origins[k];
    const Summand& L = M.parts[org.m_part];
    if (org.n_part == 0 && org.slot == kSlotNone && L.kind == SumKind::Proj &&
        L.vertex == a)
      srcP = static_cast<int>(k);
    if (org.n_part == 1 && org.slot == A.socle(a)) xslot = static_cast<int>(k);
  }
  if (srcP >= 0) {
    if (xslot < 0) throw DuplexError("socle slot missing");
    cancel_pair(MT.module, srcP, xslot);
  }
  return MT.module;
}

LabeledDuplex reflection_stage_expected(const ZigzagAlgebra& A, const Point& p, int a) {
  const Graph& g = A.graph();
  int n = g.vertices();
  RatFunc x = -p.zeta_c[a];
  LabeledDuplex M;
  M.alg = &A;

  // regular-factor copies of the module parts, minus P(a)
  std::vector<int> pidx(n, -1), sidx(n, -1);
  for (int k = 0; k < n; ++k)
    if (p.v[k] > 0 && k != a) {
      pidx[k] = static_cast<int>(M.parts.size());
      M.parts.push_back({SumKind::Proj, k, 0, static_cast<int>(p.v[k])});
    }
  for (int k = 0; k < n; ++k)
    if (p.w[k] > 0) {
      sidx[k] = static_cast<int>(M.parts.size());
      M.parts.push_back({SumKind::Simple, k, 1, static_cast<int>(p.w[k])});
    }
  // slot parts, in module order: P(k)-slots then the simple slot
  int eslot = -1, hat = -1;
  std::map<int, int> hslot;  // arrow h (o(h) = a) -> part
  for (int k = 0; k < n; ++k) {
    if (p.v[k] <= 0) continue;
    for (int mu : A.hom_basis(a, k)) {
      if (mu == A.socle(a)) continue;  // cancelled against P(a)
      int at = static_cast<int>(M.parts.size());
      if (mu == A.idem(a)) {
        eslot = at;
        M.parts.push_back({SumKind::Proj, a, 1, static_cast<int>(p.v[a])});
      } else {
        hslot[A.arrow_of(mu)] = at;
        M.parts.push_back({SumKind::Proj, a, 2, static_cast<int>(p.v[k])});
      }
    }
  }
  if (p.w[a] > 0) {
    hat = static_cast<int>(M.parts.size());
    M.parts.push_back({SumKind::Proj, a, 2, static_cast<int>(p.w[a])});
  }

  // module blocks untouched by the cancellation
  for (int h = 0; h < g.arrows(); ++h) {
    int s = g.source(h), t = g.target(h);
    if (s == a || t == a) continue;
    if (pidx[s] < 0 || pidx[t] < 0) continue;
    M.d.add(pidx[s], pidx[t], A.arrow_elem(h), p.B[h]);
  }
  for (int k = 0; k < n; ++k) {
    if (k == a || pidx[k] < 0 || sidx[k] < 0) continue;
    M.d.add(pidx[k], sidx[k], kPathHat, p.j_[k]);
    M.d.add(sidx[k], pidx[k], kPathSoc, p.i_[k]);
  }
  // comultiplication legs
  for (int h : g.arrows_from(a)) {
    if (pidx[g.target(h)] < 0) continue;
    FMatrix idv = FMatrix::identity(static_cast<int>(p.v[g.target(h)]));
    M.d.add(pidx[g.target(h)], hslot.at(h), A.arrow_elem(g.bar(h)),
            idv.scale(RatFunc(g.eps(g.bar(h)))));
  }
  if (sidx[a] >= 0 && hat >= 0)
    M.d.add(sidx[a], hat, kPathSoc, FMatrix::identity(static_cast<int>(p.w[a])));
  // multiplication legs
  if (eslot >= 0) {
    for (int h : g.arrows_from(a)) {
      if (hslot.count(h) == 0) continue;
      M.d.add(eslot, hslot.at(h), A.idem(a), -p.B[h]);
    }
    if (hat >= 0) M.d.add(eslot, hat, A.idem(a), -p.j_[a]);
  }
  // corrected blocks out of the arrow and simple slots
  for (int h : g.arrows_from(a)) {
    if (hslot.count(h) == 0) continue;
    int hb = g.bar(h);
    for (int gg : g.arrows_from(a)) {
      if (pidx[g.target(gg)] < 0) continue;
      FMatrix coeff = (-p.B[gg] * p.B[hb]).scale(RatFunc(g.eps(h)));
      if (gg == h)
        coeff = coeff + FMatrix::identity(static_cast<int>(p.v[g.target(h)])).scale(x);
      M.d.add(hslot.at(h), pidx[g.target(gg)], A.arrow_elem(gg), coeff);
    }
    if (sidx[a] >= 0)
      M.d.add(hslot.at(h), sidx[a], kPathHat, (-p.j_[a] * p.B[hb]).scale(RatFunc(g.eps(h))));
    if (eslot >= 0)
      M.d.add(hslot.at(h), eslot, A.socle(a), (-p.B[hb]).scale(RatFunc(g.eps(h))));
  }
  if (hat >= 0) {
    for (int gg : g.arrows_from(a)) {
      if (pidx[g.target(gg)] < 0) continue;
      M.d.add(hat, pidx[g.target(gg)], A.arrow_elem(gg), p.B[gg] * p.i_[a]);
    }
    if (sidx[a] >= 0) {
      FMatrix coeff = FMatrix::identity(static_cast<int>(p.w[a])).scale(x) +
                      p.j_[a] * p.i_[a];
      M.d.add(hat, sidx[a], kPathHat, coeff);
    }
    if (eslot >= 0) M.d.add(hat, eslot, A.socle(a), p.i_[a]);
  }
  M.d.prune();
  return M;
}

Point reflect_tensor(const ZigzagAlgebra& A, const Point& p, int a, Convention conv) {
  const Graph& g = A.graph();
  if (a < 0 || a >= g.vertices()) throw DuplexError("reflection vertex out of range");
  if (g.loops_at(a) > 0) throw DuplexError("reflection vertex carries a loop");
  if (p.zeta_c[a].is_zero())
    throw DuplexError("reflection requires a nonzero complex parameter at the vertex");
  LabeledDuplex M = assemble(A, p, conv);
  BimoduleDuplex N = reflection_bimodule(A, a, -p.zeta_c[a]);
  ModuleTensor MT = tensor_with_module(N, M, p.zeta_c);
  std::vector<RatFunc> zc = weyl_reflect_param(g, a, p.zeta_c);
  if (MT.curvature != zc) throw DuplexError("internal: curvature transport mismatch");
  int srcP = -1, xslot = -1;
  for (size_t k = 0; k < MT.origins.size(); ++k) {
    const auto& org = MT.origins[k];
    const Summand& L = M.parts[org.m_part];
    if (org.n_part == 0 && org.slot == kSlotNone && L.kind == SumKind::Proj &&
        L.vertex == a)
      srcP = static_cast<int>(k);
    if (org.n_part == 1 && org.slot == A.socle(a)) xslot = static_cast<int>(k);
  }
  LabeledDuplex& W = MT.module;
  if (srcP >= 0) {
    if (xslot < 0) throw DuplexError("socle slot missing");
    cancel_pair(W, srcP, xslot);
  }
  merge_summands(W);
  reduce(W);
  merge_summands(W);
  for (auto& s : W.parts) {
    int par = ((s.shift % 2) + 2) % 2;
    if (s.mult > 0 && ((s.kind == SumKind::Proj && par != 0) ||
                       (s.kind == SumKind::Simple && par != 1)))
      throw DuplexError(
          "reflection did not reduce to a point: the stacked map out of the "
          "vertex is not injective");
  }
  std::vector<RatFunc> zr = weyl_reflect_param(g, a, p.zeta_r);
  return extract(W, zc, zr, conv);
}

/* ------------------------------------------------------------------ */

Point reflect_direct(const ZigzagAlgebra& A, const Point& p, int a, Convention conv) {
  const Graph& g = A.graph();
  p.validate();
  if (a < 0 || a >= g.vertices()) throw DuplexError("reflection vertex out of range");
  if (g.loops_at(a) > 0) throw DuplexError("reflection vertex carries a loop");
  RatFunc ca = p.zeta_c[a];
  if (ca.is_zero())
    throw DuplexError("reflection requires a nonzero complex parameter at the vertex");
  const std::vector<int>& outA = g.arrows_from(a);
  int va = static_cast<int>(p.v[a]), wa = static_cast<int>(p.w[a]);
  int total = wa;
  for (int h : outA) total += static_cast<int>(p.v[g.target(h)]);

  // x_a stacks (j_a; B_h), y_a rows i_a and the sign-weighted B_{bar h}
  FMatrix xa(total, va), ya(va, total);
  {
    int row = 0;
    xa.set_block(row, 0, p.j_[a]);
    ya.set_block(0, row, p.i_[a]);
    row += wa;
    for (int h : outA) {
      int vt = static_cast<int>(p.v[g.target(h)]);
      xa.set_block(row, 0, p.B[h]);
      int alpha = (conv == Convention::Centerm) ? g.eps(g.bar(h)) : g.eps(h);
      ya.set_block(0, row, p.B[g.bar(h)].scale(RatFunc(alpha)));
      row += vt;
    }
  }
  if (xa.kernel_basis().cols() != 0)
    throw DuplexError("the stacked map out of the vertex is not injective");
  FMatrix pi = xa.cokernel_projection();  // rows span the left kernel
  int vnew = pi.rows();

  FMatrix rhs = xa * ya;
  for (int k = 0; k < total; ++k) rhs.at(k, k) = rhs.at(k, k) - ca;
  auto sol = pi.transpose().solve(rhs.transpose());
  if (!sol) throw DuplexError("internal: reflection completion is inconsistent");
  FMatrix xprime = sol->transpose();  // total x vnew

  Point q;
  q.graph = g;
  q.v = p.v;
  q.w = p.w;
  q.v[a] = vnew;
  q.B = p.B;
  q.i_ = p.i_;
  q.j_ = p.j_;
  {
    int row = 0;
    q.j_[a] = xprime.submatrix(row, 0, wa, vnew);
    q.i_[a] = pi.submatrix(0, row, vnew, wa);
    row += wa;
    for (int h : outA) {
      int vt = static_cast<int>(p.v[g.target(h)]);
      q.B[h] = xprime.submatrix(row, 0, vt, vnew);
      int alpha = (conv == Convention::Centerm) ? g.eps(g.bar(h)) : g.eps(h);
      q.B[g.bar(h)] = pi.submatrix(0, row, vnew, vt).scale(RatFunc(alpha));
      row += vt;
    }
  }
  q.zeta_c = weyl_reflect_param(g, a, p.zeta_c);
  q.zeta_r = weyl_reflect_param(g, a, p.zeta_r);
  q.validate();
  return q;
}

/* ------------------------------------------------------------------ */

CheckResult verify_inverse_pair(const ZigzagAlgebra& A, int a, const RatFunc& x) {
  if (x.is_zero()) return {false, "the weight must be nonzero"};
  BimoduleDuplex N =
      tensor_bimodules(reflection_bimodule(A, a, -x), reflection_bimodule(A, a, x));
  reduce_bimodule(N);
  sort_bimodule_parts(N);
  if (N.parts.size() != 1 || !N.parts[0].reg || N.parts[0].mult != 1 ||
      N.parts[0].shift != 0)
    return {false, "did not reduce to the regular bimodule"};
  if (!N.d.empty()) return {false, "reduced differential is nonzero"};
  for (int e = 0; e < A.vertices(); ++e)
    if (!(N.c0[e] + N.c1[e]).is_zero())
      return {false, "residual curvature acts nontrivially"};
  return {true, ""};
}

namespace {

// match N against E by per-summand units; parts must already be sorted
std::optional<std::vector<RatFunc>> match_units(const BimoduleDuplex& N,
                                                const BimoduleDuplex& E) {
  size_t np = N.parts.size();
  if (np != E.parts.size()) return std::nullopt;
  for (size_t k = 0; k < np; ++k)
    if (!(N.parts[k] == E.parts[k])) return std::nullopt;
  if (N.c0 != E.c0 || N.c1 != E.c1) return std::nullopt;

  // per-block ratios
  std::map<std::pair<int, int>, RatFunc> ratio;
  for (auto& [key, val] : N.d.blocks) {
    const BimValue* ev = E.d.find(key.first, key.second);
    if (!ev || ev->size() != val.size()) return std::nullopt;
    RatFunc r;
    bool have = false;
    for (auto& [pk, coeff] : val) {
      auto it = ev->find(pk);
      if (it == ev->end()) return std::nullopt;
      RatFunc q = coeff.at(0, 0) / it->second.at(0, 0);
      if (!have) {
        r = q;
        have = true;
      } else if (q != r)
        return std::nullopt;
    }
    ratio[key] = r;
  }
  for (auto& [key, val] : E.d.blocks)
    if (!N.d.find(key.first, key.second)) return std::nullopt;

  // propagate units across the block graph
  std::vector<RatFunc> u(np);
  std::vector<bool> known(np, false);
  u[0] = RatFunc(1);
  known[0] = true;
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto& [key, r] : ratio) {
      auto [s, t] = key;
      if (known[s] && !known[t]) {
        u[t] = r * u[s];
        known[t] = true;
        progress = true;
      } else if (known[t] && !known[s]) {
        u[s] = u[t] / r;
        known[s] = true;
        progress = true;
      }
    }
  }
  for (size_t k = 0; k < np; ++k)
    if (!known[k]) u[k] = RatFunc(1);
  for (auto& [key, r] : ratio) {
    auto [s, t] = key;
    if (u[t] != r * u[s]) return std::nullopt;
  }
  return u;
}

BimoduleDuplex braid_triple(const ZigzagAlgebra& A, int a, int b, const RatFunc& x,
                            const RatFunc& y) {
  BimoduleDuplex t =
      tensor_bimodules(reflection_bimodule(A, a, y), reflection_bimodule(A, b, x + y));
  return tensor_bimodules(t, reflection_bimodule(A, a, x));
}

BimoduleDuplex braid_expected(const ZigzagAlgebra& A, int a, int b, const RatFunc& x,
                              const RatFunc& y) {
  const Graph& g = A.graph();
  int h = -1;
  for (int k : g.arrows_from(a))
    if (g.target(k) == b) h = k;
  if (h < 0) throw DuplexError("vertices are not adjacent");
  int hb = g.bar(h);
  BimoduleDuplex E;
  E.alg = &A;
  E.parts.push_back({true, 0, 0, 0, 1});   // A
  E.parts.push_back({false, a, a, 1, 1});  // P(a,a)[1]
  E.parts.push_back({false, a, b, 1, 1});
  E.parts.push_back({false, b, a, 1, 1});
  E.parts.push_back({false, b, b, 1, 1});
  auto at = [&](int s, int t) {
    for (size_t k = 1; k < E.parts.size(); ++k)
      if (E.parts[k].a == s && E.parts[k].b == t) return static_cast<int>(k);
    throw DuplexError("internal: summand lookup");
  };
  int iaa = at(a, a), iab = at(a, b), iba = at(b, a), ibb = at(b, b);
  FMatrix one = FMatrix::identity(1);
  RatFunc eh(g.eps(h)), ehb(g.eps(hb));
  E.d.add(iaa, iab, {A.idem(a), A.arrow_elem(hb)}, one.scale(ehb * y));
  E.d.add(iaa, 0, {A.idem(a), -1}, one);
  E.d.add(iaa, iba, {A.arrow_elem(h), A.idem(a)}, one.scale(eh * x));
  E.d.add(ibb, iab, {A.arrow_elem(hb), A.idem(b)}, one.scale(eh * y));
  E.d.add(ibb, 0, {A.idem(b), -1}, -one);
  E.d.add(ibb, iba, {A.idem(b), A.arrow_elem(h)}, one.scale(ehb * x));
  E.d.add(iab, iaa, {A.idem(a), A.arrow_elem(h)}, one);
  E.d.add(iab, ibb, {A.arrow_elem(h), A.idem(b)}, -one);
  E.d.add(iba, iaa, {A.arrow_elem(hb), A.idem(a)}, one);
  E.d.add(iba, ibb, {A.idem(b), A.arrow_elem(hb)}, -one);
  RatFunc s = x + y;
  E.d.add(0, iaa, {A.socle(a), A.idem(a)}, one.scale(s));
  E.d.add(0, iaa, {A.idem(a), A.socle(a)}, one.scale(s));
  for (int k : g.arrows_from(a))
    E.d.add(0, iaa, {A.arrow_elem(g.bar(k)), A.arrow_elem(k)},
            one.scale(RatFunc(g.eps(g.bar(k))) * s));
  E.d.add(0, ibb, {A.socle(b), A.idem(b)}, one.scale(-s));
  E.d.add(0, ibb, {A.idem(b), A.socle(b)}, one.scale(-s));
  for (int k : g.arrows_from(b))
    E.d.add(0, ibb, {A.arrow_elem(g.bar(k)), A.arrow_elem(k)},
            one.scale(RatFunc(-g.eps(g.bar(k))) * s));
  E.c0.assign(g.vertices(), RatFunc());
  E.c1.assign(g.vertices(), RatFunc());
  E.c0[a] = y;
  E.c0[b] = x;
  E.c1[a] = x;
  E.c1[b] = y;
  // spectator vertices absorb the left-curvature legs of all three factors
  for (int v : {a, b})
    for (int k : g.arrows_from(v)) {
      int e = g.target(k);
      if (e != a && e != b) E.c0[e] = E.c0[e] - s;
    }
  return E;
}

bool literal_equal(const BimoduleDuplex& L, const BimoduleDuplex& R) {
  if (L.parts.size() != R.parts.size()) return false;
  for (size_t k = 0; k < L.parts.size(); ++k)
    if (!(L.parts[k] == R.parts[k])) return false;
  if (L.c0 != R.c0 || L.c1 != R.c1) return false;
  if (L.d.blocks.size() != R.d.blocks.size()) return false;
  for (auto& [key, val] : L.d.blocks) {
    const BimValue* rv = R.d.find(key.first, key.second);
    if (!rv || *rv != val) return false;
  }
  return true;
}

}  // namespace

CheckResult verify_braid(const ZigzagAlgebra& A, int a, int b, const RatFunc& x,
                         const RatFunc& y) {
  const Graph& g = A.graph();
  if (a == b) return {false, "the two vertices must differ"};
  if (g.loops_at(a) || g.loops_at(b)) return {false, "braid vertices must be loopless"};
  if (!g.adjacent(a, b)) {
    BimoduleDuplex L =
        tensor_bimodules(reflection_bimodule(A, a, x), reflection_bimodule(A, b, y));
    BimoduleDuplex R =
        tensor_bimodules(reflection_bimodule(A, b, y), reflection_bimodule(A, a, x));
    reduce_bimodule(L);
    reduce_bimodule(R);
    sort_bimodule_parts(L);
    sort_bimodule_parts(R);
    if (!literal_equal(L, R))
      return {false, "commuting reflections produced different bimodules"};
    return {true, ""};
  }
  int edges = 0;
  for (int k : g.arrows_from(a))
    if (g.target(k) == b) ++edges;
  if (edges != 1)
    return {false, "braid check requires exactly one edge between the vertices"};
  if (x.is_zero() || y.is_zero() || (x + y).is_zero())
    return {false, "weights x, y, x + y must be nonzero"};

  BimoduleDuplex L = braid_triple(A, a, b, x, y);
  BimoduleDuplex R = braid_triple(A, b, a, y, x);
  reduce_bimodule(L);
  reduce_bimodule(R);
  sort_bimodule_parts(L);
  sort_bimodule_parts(R);
  BimoduleDuplex E = braid_expected(A, a, b, x, y);
  sort_bimodule_parts(E);
  auto uL = match_units(L, E);
  if (!uL) return {false, "left-bracketed triple does not match the expected form"};
  auto uR = match_units(R, E);
  if (!uR) return {false, "right-bracketed triple does not match the expected form"};
  // explicit iso L -> R on the units, checked against both differentials
  for (auto& [key, val] : L.d.blocks) {
    const BimValue* rv = R.d.find(key.first, key.second);
    if (!rv) return {false, "block mismatch between the two triples"};
    RatFunc f = ((*uR)[key.second] / (*uL)[key.second]) *
                ((*uL)[key.first] / (*uR)[key.first]);
    for (auto& [pk, coeff] : val) {
      auto it = rv->find(pk);
      if (it == rv->end()) return {false, "component mismatch between the two triples"};
      if (coeff.at(0, 0) * f != it->second.at(0, 0))
        return {false, "the unit change does not intertwine the differentials"};
    }
  }
  return {true, ""};
}

}  // namespace qv
