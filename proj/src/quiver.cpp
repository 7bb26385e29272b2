#include "qv/quiver.hpp"

namespace qv {

Graph Graph::make(int n, std::vector<std::pair<int, int>> edges,
                  std::vector<int> orientation) {
  if (n < 1) throw QuiverError("graph needs at least one vertex");
  Graph g;
  g.n_ = n;
  g.edges_ = std::move(edges);
  for (auto& [a, b] : g.edges_)
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw QuiverError("edge endpoint out of range");
  if (!orientation.empty()) {
    if (orientation.size() != g.edges_.size())
      throw QuiverError("orientation length does not match edge count");
    for (int s : orientation)
      if (s != 1 && s != -1) throw QuiverError("orientation entries must be +1 or -1");
    g.eps_fwd_ = std::move(orientation);
  } else {
    g.eps_fwd_.reserve(g.edges_.size());
    for (auto& [a, b] : g.edges_) g.eps_fwd_.push_back(a <= b ? 1 : -1);
  }
  g.out_.resize(n);
  g.in_.resize(n);
  for (int h = 0; h < g.arrows(); ++h) {
    g.out_[g.source(h)].push_back(h);
    g.in_[g.target(h)].push_back(h);
  }
  return g;
}

int Graph::loops_at(int a) const {
  int k = 0;
  for (auto& [x, y] : edges_)
    if (x == a && y == a) ++k;
  return k;
}

bool Graph::adjacent(int a, int b) const {
  if (a == b) return false;
  for (auto& [x, y] : edges_)
    if ((x == a && y == b) || (x == b && y == a)) return true;
  return false;
}

std::vector<std::vector<long>> Graph::cartan() const {
  std::vector<std::vector<long>> c(n_, std::vector<long>(n_, 0));
  for (int i = 0; i < n_; ++i) c[i][i] = 2;
  for (int h = 0; h < arrows(); ++h) c[target(h)][source(h)] -= 1;
  return c;
}

std::vector<long> weyl_reflect_dim(const Graph& g, int a, const std::vector<long>& v,
                                   const std::vector<long>& w) {
  if (a < 0 || a >= g.vertices()) throw QuiverError("reflection vertex out of range");
  if (static_cast<int>(v.size()) != g.vertices() ||
      static_cast<int>(w.size()) != g.vertices())
    throw QuiverError("dimension vector length mismatch");
  auto c = g.cartan();
  std::vector<long> out = v;
  long s = 0;
  for (int b = 0; b < g.vertices(); ++b) s += c[a][b] * v[b];
  out[a] = v[a] + w[a] - s;
  return out;
}

std::vector<RatFunc> weyl_reflect_param(const Graph& g, int a,
                                        const std::vector<RatFunc>& zeta) {
  if (a < 0 || a >= g.vertices()) throw QuiverError("reflection vertex out of range");
  if (static_cast<int>(zeta.size()) != g.vertices())
    throw QuiverError("parameter vector length mismatch");
  auto c = g.cartan();
  std::vector<RatFunc> out = zeta;
  for (int b = 0; b < g.vertices(); ++b)
    out[b] = zeta[b] - RatFunc(static_cast<long>(c[a][b])) * zeta[a];
  return out;
}

namespace {

/* Rows of the Q-linear system "zeta . nu = 0" for one parameter vector:
 * clear denominators, then one row per (t-degree, z-coordinate). */
void append_rows(const std::vector<RatFunc>& zeta, std::vector<std::vector<mpq_class>>& rows) {
  int n = static_cast<int>(zeta.size());
  // common denominator: product of all denominators
  Poly common(CycRat(1));
  for (const auto& f : zeta) common = common * f.den();
  std::vector<Poly> cleared(n);
  int maxdeg = -1, conductor = 0;
  for (int a = 0; a < n; ++a) {
    Poly q, r;
    Poly::divrem(common, zeta[a].den(), q, r);
    cleared[a] = zeta[a].num() * q;
    maxdeg = std::max(maxdeg, cleared[a].degree());
    for (const auto& c : cleared[a].coeffs())
      if (c.conductor() != 0) conductor = c.conductor();
  }
  int zdim = conductor ? CycCtx::get(conductor).deg : 1;
  for (int k = 0; k <= maxdeg; ++k) {
    for (int j = 0; j < zdim; ++j) {
      std::vector<mpq_class> row(n, mpq_class(0));
      bool nonzero = false;
      for (int a = 0; a < n; ++a) {
        CycRat c = cleared[a].coeff(k);
        if (c.conductor() == 0) {
          if (j == 0) row[a] = c.to_rational();
        } else {
          row[a] = c.coeffs()[j];
        }
        if (row[a] != 0) nonzero = true;
      }
      if (nonzero) rows.push_back(std::move(row));
    }
  }
}

Genericity kernel_certificate(const std::vector<std::vector<mpq_class>>& rows, int n) {
  FMatrix m(static_cast<int>(rows.size()), n);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < n; ++j)
      if (rows[i][j] != 0) m.at(static_cast<int>(i), j) = RatFunc(rows[i][j]);
  FMatrix k = m.kernel_basis();
  Genericity res;
  if (k.cols() == 0) {
    res.generic = true;
    return res;
  }
  // first basis vector, cleared to a primitive integer vector
  std::vector<mpq_class> vec(n);
  mpz_class lcm_den(1);
  for (int i = 0; i < n; ++i) {
    vec[i] = k.at(i, 0).to_cyc().to_rational();
    mpz_class d = vec[i].get_den();
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), lcm_den.get_mpz_t(), d.get_mpz_t());
    lcm_den = lcm_den / g * d;
  }
  std::vector<mpz_class> cert(n);
  mpz_class content(0);
  for (int i = 0; i < n; ++i) {
    mpq_class scaled = vec[i] * lcm_den;
    cert[i] = scaled.get_num();
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), cert[i].get_mpz_t());
  }
  if (content > 1)
    for (auto& x : cert) x /= content;
  for (int i = 0; i < n; ++i) {
    if (cert[i] == 0) continue;
    if (cert[i] < 0)
      for (auto& x : cert) x = -x;
    break;
  }
  res.generic = false;
  res.certificate = std::move(cert);
  return res;
}

}  // namespace

Genericity is_generic(const std::vector<RatFunc>& zeta_c) {
  std::vector<std::vector<mpq_class>> rows;
  append_rows(zeta_c, rows);
  return kernel_certificate(rows, static_cast<int>(zeta_c.size()));
}

Genericity is_generic_pair(const std::vector<RatFunc>& zeta_c,
                           const std::vector<RatFunc>& zeta_r) {
  if (zeta_c.size() != zeta_r.size())
    throw QuiverError("parameter vectors differ in length");
  std::vector<std::vector<mpq_class>> rows;
  append_rows(zeta_c, rows);
  append_rows(zeta_r, rows);
  return kernel_certificate(rows, static_cast<int>(zeta_c.size()));
}

}  // namespace qv
