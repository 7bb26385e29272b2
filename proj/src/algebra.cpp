#include "qv/algebra.hpp"

namespace qv {

ZigzagAlgebra::ZigzagAlgebra(Graph g) : g_(std::move(g)) {
  n_ = g_.vertices();
  e_ = g_.edge_count();
  dim_ = 2 * n_ + 2 * e_;
  hom_.assign(n_, std::vector<std::vector<int>>(n_));
  proj_.assign(n_, {});
  for (int k = 0; k < dim_; ++k) {
    hom_[left_vertex(k)][right_vertex(k)].push_back(k);
    proj_[right_vertex(k)].push_back(k);
  }
}

int ZigzagAlgebra::degree(int k) const {
  if (is_idem(k)) return 0;
  if (is_arrow(k)) return 1;
  return 2;
}

int ZigzagAlgebra::left_vertex(int k) const {
  if (is_idem(k)) return k;
  if (is_arrow(k)) return g_.source(arrow_of(k));
  return k - n_ - 2 * e_;
}

int ZigzagAlgebra::right_vertex(int k) const {
  if (is_idem(k)) return k;
  if (is_arrow(k)) return g_.target(arrow_of(k));
  return k - n_ - 2 * e_;
}

std::pair<int, int> ZigzagAlgebra::mul_basis(int x, int y) const {
  if (right_vertex(x) != left_vertex(y)) return {0, -1};
  int dx = degree(x), dy = degree(y);
  if (dx + dy > 2) return {0, -1};
  if (dx == 0) return {1, y};
  if (dy == 0) return {1, x};
  // two arrows: only a round trip along the same edge survives
  int h = arrow_of(x), k = arrow_of(y);
  if (k != g_.bar(h)) return {0, -1};
  return {g_.eps(h), socle(g_.source(h))};
}

AlgElem ZigzagAlgebra::basis(int k) const {
  AlgElem v(dim_);
  v[k] = RatFunc(1);
  return v;
}

AlgElem ZigzagAlgebra::mul(const AlgElem& x, const AlgElem& y) const {
  AlgElem out(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (x[i].is_zero()) continue;
    for (int j = 0; j < dim_; ++j) {
      if (y[j].is_zero()) continue;
      auto [c, k] = mul_basis(i, j);
      if (c == 0) continue;
      RatFunc term = x[i] * y[j];
      out[k] = (c > 0) ? out[k] + term : out[k] - term;
    }
  }
  return out;
}

RatFunc ZigzagAlgebra::trace(const AlgElem& x) const {
  RatFunc t;
  for (int a = 0; a < n_; ++a) t += x[socle(a)];
  return t;
}

FMatrix ZigzagAlgebra::gram() const {
  FMatrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      auto [c, k] = mul_basis(i, j);
      if (c != 0 && is_socle(k)) m.at(i, j) = RatFunc(c);
    }
  return m;
}

std::string ZigzagAlgebra::basis_name(int k) const {
  if (is_idem(k)) return "e" + std::to_string(k);
  if (is_arrow(k)) {
    int h = arrow_of(k);
    return "h" + std::to_string(h) + "(" + std::to_string(g_.source(h)) + "->" +
           std::to_string(g_.target(h)) + ")";
  }
  return "X" + std::to_string(k - n_ - 2 * e_);
}

}  // namespace qv
