#pragma once

#include "qv/matrix.hpp"

namespace qv {

/* Undirected graph with vertex set 0..n-1; loops and parallel edges allowed.
 * The double has arrows 0..2E-1: arrow 2k runs along edge k as listed,
 * arrow 2k+1 is its reverse, bar(h) = h^1.  The sign function eps satisfies
 * eps(h) + eps(bar h) = 0; the default orients edge k from the smaller
 * endpoint, with the as-listed direction positive for loops and ties. */
class Graph {
 public:
  static Graph make(int n, std::vector<std::pair<int, int>> edges,
                    std::vector<int> orientation = {});

  int vertices() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  int arrows() const { return 2 * edge_count(); }
  int source(int h) const {  // o(h)
    auto& e = edges_[h / 2];
    return (h & 1) ? e.second : e.first;
  }
  int target(int h) const {  // i(h)
    auto& e = edges_[h / 2];
    return (h & 1) ? e.first : e.second;
  }
  int bar(int h) const { return h ^ 1; }
  int eps(int h) const { return (h & 1) ? -eps_fwd_[h / 2] : eps_fwd_[h / 2]; }
  const std::vector<int>& arrows_from(int a) const { return out_[a]; }
  const std::vector<int>& arrows_into(int a) const { return in_[a]; }
  int loops_at(int a) const;
  bool adjacent(int a, int b) const;  // a != b, at least one edge

  // Borcherds form: c[i][j] = 2*delta_ij - #(arrows j -> i)
  std::vector<std::vector<long>> cartan() const;

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<int> eps_fwd_;
  std::vector<std::vector<int>> out_, in_;
};

struct QuiverError : std::runtime_error {
  explicit QuiverError(const std::string& what) : std::runtime_error(what) {}
};

/* Simple reflection at vertex a on dimension data: only v_a moves,
 * v'_a = v_a + w_a - sum_b c[a][b] v_b. */
std::vector<long> weyl_reflect_dim(const Graph& g, int a, const std::vector<long>& v,
                                   const std::vector<long>& w);

// parameter reflection: zeta'_b = zeta_b - c[a][b] * zeta_a
std::vector<RatFunc> weyl_reflect_param(const Graph& g, int a,
                                        const std::vector<RatFunc>& zeta);

/* Genericity of a parameter vector: no nonzero integer vector nu has
 * zeta . nu = 0.  Checked as a Q-linear kernel over the (t-degree,
 * cyclotomic-coordinate) expansion.  A failure is witnessed by a primitive
 * integer certificate whose first nonzero entry is positive. */
struct Genericity {
  bool generic = false;
  std::vector<mpz_class> certificate;  // empty when generic
};

Genericity is_generic(const std::vector<RatFunc>& zeta_c);
// pair version: nu must annihilate both vectors to violate genericity
Genericity is_generic_pair(const std::vector<RatFunc>& zeta_c,
                           const std::vector<RatFunc>& zeta_r);

}  // namespace qv
