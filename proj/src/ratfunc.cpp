#include "qv/ratfunc.hpp"

namespace qv {

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& c : r.c_) c = -c;
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r;
  r.c_.resize(std::max(c_.size(), o.c_.size()), CycRat(0));
  for (size_t k = 0; k < c_.size(); ++k) r.c_[k] = r.c_[k] + c_[k];
  for (size_t k = 0; k < o.c_.size(); ++k) r.c_[k] = r.c_[k] + o.c_[k];
  r.trim();
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  if (c_.empty() || o.c_.empty()) return Poly();
  Poly r;
  r.c_.assign(c_.size() + o.c_.size() - 1, CycRat(0));
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i].is_zero()) continue;
    for (size_t j = 0; j < o.c_.size(); ++j) {
      if (o.c_[j].is_zero()) continue;
      r.c_[i + j] = r.c_[i + j] + c_[i] * o.c_[j];
    }
  }
  r.trim();
  return r;
}

void Poly::divrem(const Poly& a, const Poly& b, Poly& q, Poly& r) {
  if (b.is_zero()) throw ScalarError("polynomial division by zero");
  r = a;
  q = Poly();
  if (a.degree() >= b.degree())
    q.c_.assign(a.degree() - b.degree() + 1, CycRat(0));
  CycRat binv = b.lead().inv();
  while (!r.is_zero() && r.degree() >= b.degree()) {
    CycRat f = r.lead() * binv;
    int shift = r.degree() - b.degree();
    q.c_[shift] = q.c_[shift] + f;
    for (int k = 0; k <= b.degree(); ++k)
      r.c_[shift + k] = r.c_[shift + k] - f * b.c_[k];
    r.trim();
  }
  q.trim();
}

Poly Poly::gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly q, r;
    divrem(a, b, q, r);
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

Poly Poly::monic() const {
  if (is_zero()) return *this;
  CycRat f = lead().inv();
  Poly r = *this;
  for (auto& c : r.c_) c = c * f;
  return r;
}

Poly Poly::conj() const {
  Poly r = *this;
  for (auto& c : r.c_) c = c.conj();
  return r;
}

std::string Poly::str() const {
  if (is_zero()) return "0";
  std::string out;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const CycRat& c = c_[k];
    if (c.is_zero()) continue;
    std::string cs = c.str();
    bool neg = false;
    if (cs[0] == '-' && cs.find(' ') == std::string::npos) {
      // single negative term: hoist the sign
      neg = true;
      cs = cs.substr(1);
    }
    bool composite = cs.find(' ') != std::string::npos;
    std::string term;
    if (k == 0) {
      term = composite ? "(" + cs + ")" : cs;
    } else {
      std::string tpart = (k == 1) ? "t" : "t^" + std::to_string(k);
      if (cs == "1")
        term = tpart;
      else if (composite)
        term = "(" + cs + ")*" + tpart;
      else
        term = cs + "*" + tpart;
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

RatFunc::RatFunc(Poly num, Poly den) {
  if (den.is_zero()) throw ScalarError("division by zero");
  if (num.is_zero()) {
    num_ = Poly();
    den_ = Poly(CycRat(1));
    return;
  }
  Poly g = Poly::gcd(num, den);
  if (g.degree() > 0) {
    Poly q, r;
    Poly::divrem(num, g, q, r);
    num = q;
    Poly::divrem(den, g, q, r);
    den = q;
  }
  CycRat lead = den.lead();
  if (!(lead == CycRat(1))) {
    CycRat f = lead.inv();
    std::vector<CycRat> nc = num.coeffs(), dc = den.coeffs();
    for (auto& c : nc) c = c * f;
    for (auto& c : dc) c = c * f;
    num = Poly::from_coeffs(std::move(nc));
    den = Poly::from_coeffs(std::move(dc));
  }
  num_ = std::move(num);
  den_ = std::move(den);
}

CycRat RatFunc::to_cyc() const {
  if (!is_constant()) throw ScalarError("value is not constant in t");
  return num_.coeff(0);
}

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

RatFunc RatFunc::operator+(const RatFunc& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  if (den_ == o.den_) return RatFunc(num_ + o.num_, den_);
  return RatFunc(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RatFunc RatFunc::operator-(const RatFunc& o) const { return *this + (-o); }

RatFunc RatFunc::operator*(const RatFunc& o) const {
  if (is_zero() || o.is_zero()) return RatFunc();
  if (is_one()) return o;
  if (o.is_one()) return *this;
  return RatFunc(num_ * o.num_, den_ * o.den_);
}

RatFunc RatFunc::operator/(const RatFunc& o) const {
  if (o.is_zero()) throw ScalarError("division by zero");
  if (is_zero()) return RatFunc();
  return RatFunc(num_ * o.den_, den_ * o.num_);
}

RatFunc RatFunc::inv() const {
  if (is_zero()) throw ScalarError("division by zero");
  return RatFunc(den_, num_);
}

RatFunc RatFunc::conj() const {
  RatFunc r;
  r.num_ = num_.conj();
  r.den_ = den_.conj();  // stays monic: conj(1) = 1
  return r;
}

std::string RatFunc::str() const {
  if (is_zero()) return "0";
  if (den_.degree() == 0) {
    if (num_.degree() == 0) return num_.coeff(0).str();
    return num_.str();
  }
  std::string n = num_.str();
  std::string d = den_.str();
  return "(" + n + ")/(" + d + ")";
}

}  // namespace qv
