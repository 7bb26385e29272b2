#pragma once

#include <functional>
#include <optional>

#include "qv/ratfunc.hpp"

namespace qv {

/* Dense matrices over Q(zeta_m)(t).  All elimination is fraction-exact;
 * pivots prefer entries of lowest total degree, ties by (row, col). */
struct FEchelon;

class FMatrix {
 public:
  FMatrix() : rows_(0), cols_(0) {}
  FMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static FMatrix identity(int n);
  static FMatrix zero(int rows, int cols) { return FMatrix(rows, cols); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  RatFunc& at(int r, int c) { return a_[static_cast<size_t>(r) * cols_ + c]; }
  const RatFunc& at(int r, int c) const { return a_[static_cast<size_t>(r) * cols_ + c]; }

  bool is_zero() const;
  bool operator==(const FMatrix& o) const;
  bool operator!=(const FMatrix& o) const { return !(*this == o); }

  FMatrix operator-() const;
  FMatrix operator+(const FMatrix& o) const;
  FMatrix operator-(const FMatrix& o) const;
  FMatrix operator*(const FMatrix& o) const;
  FMatrix scale(const RatFunc& f) const;
  FMatrix transpose() const;
  FMatrix conj_transpose() const;

  FMatrix submatrix(int r0, int c0, int nrows, int ncols) const;
  void set_block(int r0, int c0, const FMatrix& b);
  static FMatrix hstack(const FMatrix& a, const FMatrix& b);
  static FMatrix vstack(const FMatrix& a, const FMatrix& b);

  int rank() const;
  // columns span the right kernel; echelonized, deterministic
  FMatrix kernel_basis() const;
  // least structured solve: all X with (*this) * X = b, returns one solution
  std::optional<FMatrix> solve(const FMatrix& b) const;
  FMatrix inverse() const;  // throws on singular input
  /* Projection onto a canonical complement of the column span: pi with
   * pi * (*this) = 0, pi of full row rank rows()-rank(). */
  FMatrix cokernel_projection() const;

  std::string str() const;

 private:
  int rows_, cols_;
  std::vector<RatFunc> a_;

  FEchelon echelon() const;
};

struct FEchelon {
  FMatrix w;                             // reduced form, T * A = w
  FMatrix t;                             // accumulated row transform
  std::vector<std::pair<int, int>> piv;  // (row, col), in elimination order
};

}  // namespace qv
