#include "qv/cyclotomic.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace qv {

namespace {

using QPoly = std::vector<mpq_class>;  // dense, ascending powers

void qp_trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// exact division, remainder must vanish
QPoly qp_div_exact(QPoly num, const QPoly& den) {
  QPoly q(num.size() >= den.size() ? num.size() - den.size() + 1 : 0, mpq_class(0));
  while (num.size() >= den.size() && !num.empty()) {
    mpq_class f = num.back() / den.back();
    size_t shift = num.size() - den.size();
    q[shift] = f;
    for (size_t k = 0; k < den.size(); ++k) num[shift + k] -= f * den[k];
    qp_trim(num);
  }
  if (!num.empty()) throw ScalarError("cyclotomic polynomial division left a remainder");
  return q;
}

// Phi_m by dividing x^m - 1 by Phi_d for proper divisors d
QPoly cyclotomic_poly(int m, std::map<int, QPoly>& memo) {
  auto it = memo.find(m);
  if (it != memo.end()) return it->second;
  QPoly num(m + 1, mpq_class(0));
  num[0] = -1;
  num[m] = 1;
  for (int d = 1; d < m; ++d) {
    if (m % d != 0) continue;
    num = qp_div_exact(std::move(num), cyclotomic_poly(d, memo));
  }
  memo[m] = num;
  return num;
}

}  // namespace

CycCtx::CycCtx(int mm) : m(mm) {
  if (m < 1) throw ScalarError("conductor must be positive");
  std::map<int, QPoly> memo;
  phi = cyclotomic_poly(m, memo);
  deg = static_cast<int>(phi.size()) - 1;
  // z^k for k up to max(m, 2*deg-1): covers products and conjugation
  int top = std::max(m, 2 * deg - 1);
  zpow.resize(top + 1);
  QPoly cur(1, mpq_class(1));
  for (int k = 0; k <= top; ++k) {
    zpow[k] = cur;
    zpow[k].resize(deg, mpq_class(0));
    // multiply by z, reduce by phi
    cur.insert(cur.begin(), mpq_class(0));
    if (static_cast<int>(cur.size()) == deg + 1) {
      mpq_class lead = cur.back();
      cur.pop_back();
      if (lead != 0)
        for (int j = 0; j < deg; ++j) cur[j] -= lead * phi[j];
    }
    qp_trim(cur);
    if (cur.empty()) cur.push_back(mpq_class(0));
  }
}

const CycCtx& CycCtx::get(int m) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CycCtx>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[m];
  if (!slot) slot.reset(new CycCtx(m));
  return *slot;
}

CycRat CycRat::zeta(int m) {
  const CycCtx& ctx = CycCtx::get(m);
  if (ctx.deg == 1) {
    // phi(m) = 1: zeta is rational (m = 1 or 2)
    return CycRat(ctx.zpow[1][0]);
  }
  std::vector<mpq_class> c(ctx.deg, mpq_class(0));
  c[1] = 1;
  return CycRat(&ctx, std::move(c));
}

CycRat CycRat::imag_unit(int m) {
  if (m % 4 != 0) throw ScalarError("imaginary unit needs conductor divisible by 4");
  const CycCtx& ctx = CycCtx::get(m);
  CycRat z(&ctx, ctx.zpow[m / 4]);
  z.trim();
  return z;
}

CycRat CycRat::from_coeffs(int m, std::vector<mpq_class> coeffs) {
  const CycCtx& ctx = CycCtx::get(m);
  if (static_cast<int>(coeffs.size()) != ctx.deg)
    throw ScalarError("coefficient vector length does not match phi(m)");
  CycRat r(&ctx, std::move(coeffs));
  r.trim();
  return r;
}

bool CycRat::is_zero() const {
  for (const auto& q : c_)
    if (q != 0) return false;
  return true;
}

bool CycRat::is_rational() const {
  for (size_t k = 1; k < c_.size(); ++k)
    if (c_[k] != 0) return false;
  return true;
}

mpq_class CycRat::to_rational() const {
  if (!is_rational()) throw ScalarError("value is not rational");
  return c_[0];
}

void CycRat::trim() {
  // collapse to a plain rational when the z-part vanishes
  if (ctx_ && is_rational()) {
    mpq_class q = c_[0];
    ctx_ = nullptr;
    c_.assign(1, q);
  }
}

void CycRat::promote(const CycCtx* ctx) {
  if (ctx_ == ctx || ctx == nullptr) return;
  if (ctx_ != nullptr) throw ScalarError("cannot mix conductors " + std::to_string(ctx_->m) +
                                         " and " + std::to_string(ctx->m));
  mpq_class q = c_[0];
  ctx_ = ctx;
  c_.assign(ctx->deg, mpq_class(0));
  c_[0] = q;
}

void CycRat::unify(CycRat& a, CycRat& b) {
  a.promote(b.ctx_);
  b.promote(a.ctx_);
}

CycRat CycRat::operator-() const {
  CycRat r = *this;
  for (auto& q : r.c_) q = -q;
  return r;
}

CycRat CycRat::operator+(const CycRat& o) const {
  CycRat a = *this, b = o;
  unify(a, b);
  for (size_t k = 0; k < a.c_.size(); ++k) a.c_[k] += b.c_[k];
  a.trim();
  return a;
}

CycRat CycRat::operator-(const CycRat& o) const { return *this + (-o); }

CycRat CycRat::operator*(const CycRat& o) const {
  CycRat a = *this, b = o;
  unify(a, b);
  if (!a.ctx_) return CycRat(a.c_[0] * b.c_[0]);
  int deg = a.ctx_->deg;
  std::vector<mpq_class> conv(2 * deg - 1, mpq_class(0));
  for (int i = 0; i < deg; ++i) {
    if (a.c_[i] == 0) continue;
    for (int j = 0; j < deg; ++j) {
      if (b.c_[j] == 0) continue;
      conv[i + j] += a.c_[i] * b.c_[j];
    }
  }
  std::vector<mpq_class> out(deg, mpq_class(0));
  for (int k = 0; k < 2 * deg - 1; ++k) {
    if (conv[k] == 0) continue;
    if (k < deg) {
      out[k] += conv[k];
    } else {
      const auto& red = a.ctx_->zpow[k];
      for (int j = 0; j < deg; ++j) out[j] += conv[k] * red[j];
    }
  }
  CycRat r(a.ctx_, std::move(out));
  r.trim();
  return r;
}

CycRat CycRat::inv() const {
  if (is_zero()) throw ScalarError("division by zero");
  if (!ctx_) return CycRat(mpq_class(1) / c_[0]);
  // extended Euclid in Q[z] against phi (irreducible): u*this + v*phi = 1
  QPoly r0 = ctx_->phi;
  QPoly r1(c_.begin(), c_.end());
  qp_trim(r1);
  QPoly u0(1, mpq_class(0));  // coefficient of `this` alongside r0
  QPoly u1(1, mpq_class(1));
  while (true) {
    // r0 = q*r1 + rem
    QPoly rem = r0;
    QPoly q(rem.size() >= r1.size() ? rem.size() - r1.size() + 1 : 0, mpq_class(0));
    while (rem.size() >= r1.size() && !rem.empty()) {
      mpq_class f = rem.back() / r1.back();
      size_t shift = rem.size() - r1.size();
      q[shift] = f;
      for (size_t k = 0; k < r1.size(); ++k) rem[shift + k] -= f * r1[k];
      qp_trim(rem);
    }
    // u_next = u0 - q*u1
    QPoly un = u0;
    size_t need = q.size() + u1.size();
    if (un.size() < need) un.resize(need, mpq_class(0));
    for (size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      for (size_t j = 0; j < u1.size(); ++j) un[i + j] -= q[i] * u1[j];
    }
    qp_trim(un);
    if (rem.empty()) {
      // r1 is the gcd, a nonzero constant (phi irreducible, this != 0 mod phi)
      if (r1.size() != 1) throw ScalarError("element not invertible modulo phi");
      mpq_class scale = mpq_class(1) / r1[0];
      std::vector<mpq_class> out(ctx_->deg, mpq_class(0));
      for (size_t k = 0; k < u1.size() && k < out.size(); ++k) out[k] = u1[k] * scale;
      CycRat res(ctx_, std::move(out));
      res.trim();
      return res;
    }
    r0 = std::move(r1);
    r1 = std::move(rem);
    u0 = std::move(u1);
    u1 = std::move(un);
  }
}

CycRat CycRat::operator/(const CycRat& o) const { return *this * o.inv(); }

CycRat CycRat::conj() const {
  if (!ctx_) return *this;
  std::vector<mpq_class> out(ctx_->deg, mpq_class(0));
  for (int k = 0; k < ctx_->deg; ++k) {
    if (c_[k] == 0) continue;
    int e = (ctx_->m - k) % ctx_->m;  // z^k -> z^{m-k}
    const auto& red = ctx_->zpow[e];
    for (int j = 0; j < ctx_->deg; ++j) out[j] += c_[k] * red[j];
  }
  CycRat r(ctx_, std::move(out));
  r.trim();
  return r;
}

bool CycRat::operator==(const CycRat& o) const {
  CycRat a = *this, b = o;
  unify(a, b);
  return a.c_ == b.c_;
}

std::string CycRat::str() const {
  if (is_zero()) return "0";
  std::string out;
  bool first = true;
  bool use_i = ctx_ && ctx_->m == 4;
  for (size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] == 0) continue;
    mpq_class a = c_[k];
    bool neg = a < 0;
    if (neg) a = -a;
    std::string term;
    if (k == 0) {
      term = a.get_str();
    } else {
      std::string sym = use_i ? "i" : "z";
      if (k > 1) sym += "^" + std::to_string(k);
      term = (a == 1) ? sym : a.get_str() + "*" + sym;
    }
    if (first) {
      out = neg ? "-" + term : term;
      first = false;
    } else {
      out += neg ? " - " : " + ";
      out += term;
    }
  }
  return out;
}

}  // namespace qv
