#pragma once

#include "qv/cyclotomic.hpp"

namespace qv {

/* Univariate polynomials in t over Q(zeta_m), dense ascending, no trailing
 * zeros (zero polynomial = empty coefficient vector). */
class Poly {
 public:
  Poly() {}
  Poly(const CycRat& c) {
    if (!c.is_zero()) c_.push_back(c);
  }
  static Poly t() {
    Poly p;
    p.c_ = {CycRat(0), CycRat(1)};
    return p;
  }
  static Poly from_coeffs(std::vector<CycRat> c) {
    Poly p;
    p.c_ = std::move(c);
    p.trim();
    return p;
  }

  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  const std::vector<CycRat>& coeffs() const { return c_; }
  CycRat coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : CycRat(0);
  }
  CycRat lead() const { return c_.empty() ? CycRat(0) : c_.back(); }

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  // division with remainder; o must be nonzero
  static void divrem(const Poly& a, const Poly& b, Poly& q, Poly& r);
  // monic gcd
  static Poly gcd(Poly a, Poly b);
  Poly monic() const;
  Poly conj() const;  // coefficient-wise, fixes t
  bool operator==(const Poly& o) const { return c_ == o.c_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  std::string str() const;

 private:
  std::vector<CycRat> c_;
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
};

/* The field Q(zeta_m)(t): reduced fractions with monic denominator. */
class RatFunc {
 public:
  RatFunc() : num_(), den_(CycRat(1)) {}
  RatFunc(int v) : num_(CycRat(v)), den_(CycRat(1)) {}
  RatFunc(long v) : num_(CycRat(v)), den_(CycRat(1)) {}
  RatFunc(const mpq_class& q) : num_(CycRat(q)), den_(CycRat(1)) {}
  RatFunc(const CycRat& c) : num_(c), den_(CycRat(1)) {}
  RatFunc(const Poly& p) : num_(p), den_(CycRat(1)) {}
  RatFunc(Poly num, Poly den);  // reduces

  static RatFunc t() { return RatFunc(Poly::t()); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.degree() == 0 && num_ == den_; }
  bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }
  // throws unless constant
  CycRat to_cyc() const;
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  // pivot preference measure: deg num + deg den
  int complexity() const {
    return (num_.degree() < 0 ? 0 : num_.degree()) + den_.degree();
  }

  RatFunc operator-() const;
  RatFunc operator+(const RatFunc& o) const;
  RatFunc operator-(const RatFunc& o) const;
  RatFunc operator*(const RatFunc& o) const;
  RatFunc operator/(const RatFunc& o) const;
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
  RatFunc inv() const;
  RatFunc conj() const;
  bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }

  std::string str() const;

 private:
  Poly num_, den_;
};

}  // namespace qv
