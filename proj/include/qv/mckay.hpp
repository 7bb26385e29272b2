#pragma once

#include "qv/bimodule.hpp"
#include "qv/duplex.hpp"

namespace qv {

struct McKayError : std::runtime_error {
  explicit McKayError(const std::string& what) : std::runtime_error(what) {}
};

/* Cyclic subgroup of SL(2) of order n: the generator acts on the plane as
 * diag(zeta_n, zeta_n^{-1}).  Every irreducible is one dimensional,
 * rho_a(gamma) = zeta_n^a with a mod n.  Scalars live in conductor
 * lcm(4, n) so the imaginary unit and zeta_n share one tower. */
struct GroupData {
  int n = 0;
  int conductor = 0;
  bool has_minus_one = false;      // -1 lies in the group iff n is even
  std::vector<CycRat> zeta_pow;    // zeta_n^0 .. zeta_n^{n-1}

  const CycRat& zeta() const { return zeta_pow[1 % n]; }
  // character of rho_rep at gamma^power
  const CycRat& character(int rep, int power) const;
};

GroupData group_data(int n);

/* Smash product of the exterior algebra of the plane with the group ring,
 * dimension 4n.  Basis mono * n + j: monomial (1, x, y, x^y) times gamma^j;
 * (w (x) gamma^j)(w' (x) gamma^k) = (w ^ gamma^j.w') (x) gamma^{j+k} with
 * gamma.x = zeta x and gamma.y = zeta^{-1} y. */
class SmashAlgebra {
 public:
  using Elem = std::vector<CycRat>;

  explicit SmashAlgebra(GroupData gd);

  const GroupData& group() const { return gd_; }
  int dim() const { return 4 * gd_.n; }
  int index(int mono, int power) const { return mono * gd_.n + power; }
  int mono(int k) const { return k / gd_.n; }
  int power(int k) const { return k % gd_.n; }
  int degree(int k) const;  // exterior degree of the monomial part
  std::string basis_name(int k) const;

  // structure constants: product of basis elements is coeff * basis(idx),
  // coeff a root of unity times a sign, idx = -1 when the wedge dies
  std::pair<CycRat, int> mul_basis(int x, int y) const;

  Elem zero() const { return Elem(dim()); }
  Elem basis(int k) const;
  Elem mul(const Elem& a, const Elem& b) const;

  Elem idempotent(int a) const;  // p_a, projection onto the rho_a isotype
  Elem central(int a) const;     // c_a = (x^y) p_a

  /* Symmetrizing trace: the coefficient of (x^y) (x) gamma^{n/2}.  It pairs
   * nondegenerately and needs -1 in the group, so n must be even. */
  CycRat trace(const Elem& a) const;
  FMatrix gram() const;  // trace(b_i b_j)

 private:
  GroupData gd_;
};

/* Graph of the group: vertices are the irreducibles, edge multiplicity from
 * decomposing plane (x) rho_a.  Each arrow h carries the weight vector
 * gen(h) in {x, y} that embeds rho_{target} into plane (x) rho_{source};
 * the arrow sign is the wedge coordinate eps(h) = [gen(bar h) ^ gen(h)].
 * Order 2 yields the double edge with the generators crossed between the
 * two copies; n >= 3 yields the n-cycle. */
struct McKayData {
  GroupData group;
  Graph graph;
  std::vector<int> arrow_gen;                  // per arrow: 1 = x, 2 = y
  std::vector<std::vector<long>> tensor_mult;  // rho_b-multiplicity in plane (x) rho_a
};

McKayData mckay_graph(int n);

/* End_{A_Gamma}(P) for the projective P = (+)_a p_a A_Gamma: the commutant
 * of right multiplication equals left multiplication by A_Gamma, and the
 * basis correspondence e_a -> p_a, h -> gen(bar h) p_{target(h)},
 * X_a -> c_a matches every structure constant of the graph algebra. */
struct MoritaReport {
  bool ok = false;
  int end_dim = 0;     // dimension of the commutant, expected 4n
  std::string detail;  // first mismatch, empty when ok
};

MoritaReport morita_check(int n);

/* Equivariant form of a framed point: the module Lambda (x) V [1] (+) W over
 * the smash product, with the odd differential
 *   d(w (x) v at a) = sum_{o(h)=a} (gen(bar h) ^ w) (x) B_h v  +  [w = 1] j_a v
 *   d(frame at a)   = (x^y) (x) i_a
 * Blocks are monomial-major: (1, a), (x, a), (y, a), (x^y, a), then W_a. */
struct EquivariantModule {
  McKayData mk;
  std::vector<long> v, w;
  std::vector<RatFunc> zeta;  // complex parameters of the point
  int total_dim = 0;
  FMatrix d, gamma, act_x, act_y;

  int vertex_block(int mono, int a) const;  // offset of the (monomial, vertex) slot
  int frame_block(int a) const;             // offset of W_a
  FMatrix central_mult(int a) const;        // multiplication by c_a
};

// the point's graph must coincide with the group graph, signs included
EquivariantModule equivariant_assemble(const McKayData& mk, const Point& pt);

struct EquivariantReport {
  bool curvature = false;    // d^2 = sum_a zeta_a c_a
  bool equivariant = false;  // d commutes with gamma
  bool anticommute = false;  // d anticommutes with x and y
  bool twist = false;        // second-layer arrow blocks are eps(h) times the first
  std::string detail;

  bool ok() const { return curvature && equivariant && anticommute && twist; }
};

EquivariantReport equivariant_verify(const EquivariantModule& M);

/* Largest subspace of V killed by j and preserved by every B_h, computed as
 * a shrinking fixpoint of arrow preimages; the module generates from the
 * frame exactly when the subspace is zero. */
struct EquivariantStability {
  bool stable = true;
  std::vector<long> sub_dims;
};

EquivariantStability equivariant_stability(const McKayData& mk, const Point& pt);

/* Two-term equivariant summand A_Gamma (+) (A_Gamma p_a (x) p_a A_Gamma)[1]
 * with d_1 = signed multiplication scaled by the weight and d_2 the signed
 * action on the wedge factor's Casimir element followed by the middle
 * projection.  Both maps are expressed in the transported basis of the graph
 * algebra and compared entry by entry against the reflection bimodule; the
 * square of d is checked against the curvature built from smash-side
 * multiplication operators. */
struct EquivariantC {
  int vertex = -1;
  RatFunc weight;
  int total_dim = 0;
  FMatrix d;
  bool blocks_match = false;
  bool curvature_ok = false;
  std::string detail;

  bool ok() const { return blocks_match && curvature_ok; }
};

EquivariantC build_equivariant_C(const McKayData& mk, int vertex, const RatFunc& weight);

}  // namespace qv
