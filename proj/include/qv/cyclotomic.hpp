#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace qv {

/* Q(zeta_m) in the power basis 1, z, ..., z^{phi(m)-1} modulo the m-th
 * cyclotomic polynomial.  Conductor 0 denotes a plain rational, which
 * combines with any conductor; two distinct nonzero conductors never mix. */

struct ScalarError : std::runtime_error {
  explicit ScalarError(const std::string& what) : std::runtime_error(what) {}
};

class CycCtx {
 public:
  int m = 0;
  int deg = 1;
  std::vector<mpq_class> phi;                // monic, length deg+1
  std::vector<std::vector<mpq_class>> zpow;  // z^k reduced, k = 0 .. max(m, 2*deg-1)

  // memoized per conductor; the returned reference lives forever
  static const CycCtx& get(int m);

 private:
  explicit CycCtx(int m);
};

class CycRat {
 public:
  CycRat() : ctx_(nullptr), c_(1, mpq_class(0)) {}
  CycRat(const mpq_class& q) : ctx_(nullptr), c_(1, q) {
    c_[0].canonicalize();  // tolerate non-canonical two-argument mpq inputs
  }
  CycRat(long v) : ctx_(nullptr), c_(1, mpq_class(v)) {}
  CycRat(int v) : ctx_(nullptr), c_(1, mpq_class(v)) {}

  // primitive m-th root of unity
  static CycRat zeta(int m);
  // sqrt(-1); requires 4 | m
  static CycRat imag_unit(int m);
  static CycRat from_coeffs(int m, std::vector<mpq_class> coeffs);

  int conductor() const { return ctx_ ? ctx_->m : 0; }
  bool is_zero() const;
  bool is_rational() const;
  // throws unless is_rational()
  mpq_class to_rational() const;
  const std::vector<mpq_class>& coeffs() const { return c_; }

  CycRat operator-() const;
  CycRat operator+(const CycRat& o) const;
  CycRat operator-(const CycRat& o) const;
  CycRat operator*(const CycRat& o) const;
  CycRat operator/(const CycRat& o) const;
  CycRat inv() const;
  CycRat conj() const;  // z -> z^{-1}, fixes rationals
  bool operator==(const CycRat& o) const;
  bool operator!=(const CycRat& o) const { return !(*this == o); }

  std::string str() const;

 private:
  const CycCtx* ctx_;        // nullptr: plain rational
  std::vector<mpq_class> c_;  // length 1 (rational) or ctx_->deg

  CycRat(const CycCtx* ctx, std::vector<mpq_class> c) : ctx_(ctx), c_(std::move(c)) {}
  void promote(const CycCtx* ctx);
  static void unify(CycRat& a, CycRat& b);
  void trim();
};

}  // namespace qv
