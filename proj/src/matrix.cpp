#include "qv/matrix.hpp"

#include <algorithm>

namespace qv {

FMatrix FMatrix::identity(int n) {
  FMatrix m(n, n);
  for (int k = 0; k < n; ++k) m.at(k, k) = RatFunc(1);
  return m;
}

bool FMatrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

bool FMatrix::operator==(const FMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

FMatrix FMatrix::operator-() const {
  FMatrix r = *this;
  for (auto& x : r.a_) x = -x;
  return r;
}

FMatrix FMatrix::operator+(const FMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ScalarError("matrix shape mismatch in +");
  FMatrix r = *this;
  for (size_t k = 0; k < a_.size(); ++k)
    if (!o.a_[k].is_zero()) r.a_[k] += o.a_[k];
  return r;
}

FMatrix FMatrix::operator-(const FMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ScalarError("matrix shape mismatch in -");
  FMatrix r = *this;
  for (size_t k = 0; k < a_.size(); ++k)
    if (!o.a_[k].is_zero()) r.a_[k] -= o.a_[k];
  return r;
}

FMatrix FMatrix::operator*(const FMatrix& o) const {
  if (cols_ != o.rows_) throw ScalarError("matrix shape mismatch in *");
  FMatrix r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const RatFunc& f = at(i, k);
      if (f.is_zero()) continue;
      for (int j = 0; j < o.cols_; ++j) {
        const RatFunc& g = o.at(k, j);
        if (g.is_zero()) continue;
        r.at(i, j) += f * g;
      }
    }
  return r;
}

FMatrix FMatrix::scale(const RatFunc& f) const {
  FMatrix r = *this;
  for (auto& x : r.a_)
    if (!x.is_zero()) x *= f;
  return r;
}

FMatrix FMatrix::transpose() const {
  FMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

FMatrix FMatrix::conj_transpose() const {
  FMatrix r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j).conj();
  return r;
}

FMatrix FMatrix::submatrix(int r0, int c0, int nrows, int ncols) const {
  FMatrix r(nrows, ncols);
  for (int i = 0; i < nrows; ++i)
    for (int j = 0; j < ncols; ++j) r.at(i, j) = at(r0 + i, c0 + j);
  return r;
}

void FMatrix::set_block(int r0, int c0, const FMatrix& b) {
  for (int i = 0; i < b.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) at(r0 + i, c0 + j) = b.at(i, j);
}

FMatrix FMatrix::hstack(const FMatrix& a, const FMatrix& b) {
  if (a.rows_ != b.rows_) throw ScalarError("matrix shape mismatch in hstack");
  FMatrix r(a.rows_, a.cols_ + b.cols_);
  r.set_block(0, 0, a);
  r.set_block(0, a.cols_, b);
  return r;
}

FMatrix FMatrix::vstack(const FMatrix& a, const FMatrix& b) {
  if (a.cols_ != b.cols_) throw ScalarError("matrix shape mismatch in vstack");
  FMatrix r(a.rows_ + b.rows_, a.cols_);
  r.set_block(0, 0, a);
  r.set_block(a.rows_, 0, b);
  return r;
}

FEchelon FMatrix::echelon() const {
  FEchelon e{*this, identity(rows_), {}};
  std::vector<char> row_used(rows_, 0), col_used(cols_, 0);
  while (true) {
    int br = -1, bc = -1, best = -1;
    for (int i = 0; i < rows_; ++i) {
      if (row_used[i]) continue;
      for (int j = 0; j < cols_; ++j) {
        if (col_used[j]) continue;
        const RatFunc& x = e.w.at(i, j);
        if (x.is_zero()) continue;
        int cx = x.complexity();
        if (best < 0 || cx < best) {
          best = cx;
          br = i;
          bc = j;
        }
      }
    }
    if (br < 0) break;
    RatFunc pinv = e.w.at(br, bc).inv();
    for (int j = 0; j < cols_; ++j)
      if (!e.w.at(br, j).is_zero()) e.w.at(br, j) *= pinv;
    for (int j = 0; j < rows_; ++j)
      if (!e.t.at(br, j).is_zero()) e.t.at(br, j) *= pinv;
    for (int i = 0; i < rows_; ++i) {
      if (i == br) continue;
      RatFunc f = e.w.at(i, bc);
      if (f.is_zero()) continue;
      for (int j = 0; j < cols_; ++j)
        if (!e.w.at(br, j).is_zero()) e.w.at(i, j) -= f * e.w.at(br, j);
      for (int j = 0; j < rows_; ++j)
        if (!e.t.at(br, j).is_zero()) e.t.at(i, j) -= f * e.t.at(br, j);
    }
    row_used[br] = 1;
    col_used[bc] = 1;
    e.piv.emplace_back(br, bc);
  }
  return e;
}

int FMatrix::rank() const { return static_cast<int>(echelon().piv.size()); }

FMatrix FMatrix::kernel_basis() const {
  FEchelon e = echelon();
  std::vector<int> pivot_row_of_col(cols_, -1);
  for (auto& [r, c] : e.piv) pivot_row_of_col[c] = r;
  std::vector<int> free_cols;
  for (int j = 0; j < cols_; ++j)
    if (pivot_row_of_col[j] < 0) free_cols.push_back(j);
  FMatrix k(cols_, static_cast<int>(free_cols.size()));
  for (size_t fi = 0; fi < free_cols.size(); ++fi) {
    int f = free_cols[fi];
    k.at(f, static_cast<int>(fi)) = RatFunc(1);
    for (int j = 0; j < cols_; ++j) {
      int pr = pivot_row_of_col[j];
      if (pr < 0) continue;
      k.at(j, static_cast<int>(fi)) = -e.w.at(pr, f);
    }
  }
  return k;
}

std::optional<FMatrix> FMatrix::solve(const FMatrix& b) const {
  if (b.rows() != rows_) throw ScalarError("matrix shape mismatch in solve");
  FEchelon e = echelon();
  FMatrix tb = e.t * b;
  std::vector<char> row_is_pivot(rows_, 0);
  for (auto& [r, c] : e.piv) row_is_pivot[r] = 1;
  for (int i = 0; i < rows_; ++i) {
    if (row_is_pivot[i]) continue;
    for (int j = 0; j < b.cols(); ++j)
      if (!tb.at(i, j).is_zero()) return std::nullopt;
  }
  FMatrix x(cols_, b.cols());
  for (auto& [r, c] : e.piv)
    for (int j = 0; j < b.cols(); ++j) x.at(c, j) = tb.at(r, j);
  return x;
}

FMatrix FMatrix::inverse() const {
  if (rows_ != cols_) throw ScalarError("inverse of a non-square matrix");
  FEchelon e = echelon();
  if (static_cast<int>(e.piv.size()) < rows_) throw ScalarError("matrix is singular");
  // w is a permutation matrix: w[r, c] = 1 at pivots; undo it on t
  FMatrix inv(rows_, rows_);
  for (auto& [r, c] : e.piv)
    for (int j = 0; j < rows_; ++j) inv.at(c, j) = e.t.at(r, j);
  return inv;
}

FMatrix FMatrix::cokernel_projection() const {
  // column space basis: reduce the transpose, read nonzero rows back as columns
  FEchelon e = transpose().echelon();
  int rk = static_cast<int>(e.piv.size());
  std::vector<std::pair<int, int>> piv = e.piv;  // (row in A^T ~ unused, col in A^T ~ row of A)
  // basis vectors: the pivot rows of w, as columns; pivot coordinate set P
  std::vector<int> pcoord;
  FMatrix basis(rows_, rk);
  {
    // order by pivot coordinate for determinism
    std::sort(piv.begin(), piv.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (int k = 0; k < rk; ++k) {
      auto [r, c] = piv[k];
      pcoord.push_back(c);
      for (int i = 0; i < rows_; ++i) basis.at(i, k) = e.w.at(r, i);
    }
  }
  std::vector<char> is_pivot(rows_, 0);
  for (int c : pcoord) is_pivot[c] = 1;
  FMatrix pi(rows_ - rk, rows_);
  int out = 0;
  for (int i = 0; i < rows_; ++i) {
    if (is_pivot[i]) continue;
    pi.at(out, i) = RatFunc(1);
    for (int k = 0; k < rk; ++k) {
      const RatFunc& coef = basis.at(i, k);
      if (!coef.is_zero()) pi.at(out, pcoord[k]) -= coef;
    }
    ++out;
  }
  return pi;
}

std::string FMatrix::str() const {
  std::string s = "[";
  for (int i = 0; i < rows_; ++i) {
    s += (i ? ", [" : "[");
    for (int j = 0; j < cols_; ++j) {
      if (j) s += ", ";
      s += at(i, j).str();
    }
    s += "]";
  }
  s += "]";
  return s;
}

}  // namespace qv
