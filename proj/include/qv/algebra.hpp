#pragma once

#include "qv/quiver.hpp"

namespace qv {

/* Finite-dimensional graded algebra attached to a graph: basis is the
 * vertex idempotents e_a (degree 0), the doubled arrows (degree 1), and one
 * socle element X_a per vertex (degree 2).  Arrows compose left to right:
 * h * h' needs target(h) = source(h'); the only nonzero length-2 products
 * are round trips along one edge, h * bar(h) = eps(h) X_{source(h)}.
 * The X_a are central and span the socle; trace(X_a) = 1 makes the pairing
 * (x, y) = trace(xy) nondegenerate and graded symmetric. */

using AlgElem = std::vector<RatFunc>;

class ZigzagAlgebra {
 public:
  explicit ZigzagAlgebra(Graph g);

  const Graph& graph() const { return g_; }
  int dim() const { return dim_; }
  int vertices() const { return n_; }

  int idem(int a) const { return a; }
  int arrow_elem(int h) const { return n_ + h; }
  int socle(int a) const { return n_ + 2 * e_ + a; }

  bool is_idem(int k) const { return k < n_; }
  bool is_arrow(int k) const { return k >= n_ && k < n_ + 2 * e_; }
  bool is_socle(int k) const { return k >= n_ + 2 * e_; }
  int arrow_of(int k) const { return k - n_; }

  int degree(int k) const;
  int parity(int k) const { return degree(k) & 1; }
  int left_vertex(int k) const;
  int right_vertex(int k) const;

  // structure constants are 0 or +-1: returns (coeff, basis index or -1)
  std::pair<int, int> mul_basis(int x, int y) const;

  AlgElem zero() const { return AlgElem(dim_); }
  AlgElem basis(int k) const;
  AlgElem mul(const AlgElem& x, const AlgElem& y) const;
  RatFunc trace(const AlgElem& x) const;
  FMatrix gram() const;  // (x_i, x_j) = trace(x_i x_j)

  // basis of e_a A e_b: paths from a to b
  const std::vector<int>& hom_basis(int a, int b) const { return hom_[a][b]; }
  // basis of the left projective A e_a
  const std::vector<int>& proj_basis(int a) const { return proj_[a]; }

  std::string basis_name(int k) const;

 private:
  Graph g_;
  int n_, e_, dim_;
  std::vector<std::vector<std::vector<int>>> hom_;
  std::vector<std::vector<int>> proj_;
};

}  // namespace qv
