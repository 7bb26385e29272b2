#pragma once

#include "qv/duplex.hpp"

#include <map>

namespace qv {

/* Bimodules over the zigzag algebra built from two kinds of summand:
 * the regular bimodule A itself, and the projective bimodules
 * P(a,b) = A e_a (x) e_b A.  Each summand carries a shift and a
 * multiplicity, like module-side summands do. */
struct BimSummand {
  bool reg = true;   // regular summand when true, else P(a,b)
  int a = 0, b = 0;  // ignored for the regular summand
  int shift = 0;
  int mult = 1;
  bool operator==(const BimSummand& o) const {
    return reg == o.reg && (reg || (a == o.a && b == o.b)) && shift == o.shift &&
           mult == o.mult;
  }
};

/* A bimodule map into P(a,b) is a sum of elementary tensors p (x) q with
 * p in A e_a and q in e_b A; a map into a regular summand is a sum of
 * algebra elements w.  Values are keyed by the basis pair (p, q), with
 * q = -1 encoding the regular case, and each key carries a mult x mult
 * coefficient matrix. */
using BimValue = std::map<std::pair<int, int>, FMatrix>;

struct BimBlockMap {
  int kappa = 1;  // parity of the map: odd maps pick up Koszul signs
  std::map<std::pair<int, int>, BimValue> blocks;

  void add(int src, int dst, std::pair<int, int> key, const FMatrix& coeff);
  const BimValue* find(int src, int dst) const;
  void prune();
  bool empty() const;
};

/* Formal bimodule with an odd endomorphism d whose square is the
 * two-sided curvature l_{c0} + r_{c1}, where c0 and c1 record the
 * coefficient of X_a per vertex. */
struct BimoduleDuplex {
  const ZigzagAlgebra* alg = nullptr;
  std::vector<BimSummand> parts;
  BimBlockMap d;
  std::vector<RatFunc> c0, c1;

  int local_dim(int part) const;  // per-copy dimension
  int total_dim() const;
};

// A itself: one regular summand, d = 0, flat.
BimoduleDuplex regular_bimodule(const ZigzagAlgebra& A);

/* Two-term bimodule {A -> P(a,a)[1]} whose tensor action implements the
 * reflection at a loopless vertex a.  The connecting maps are the
 * comultiplication into P(a,a) and x * multiplication back; the square of
 * d is the curvature pair
 *   c0 = x (X_a - sum_{o(h)=a} X_{i(h)}),   c1 = x X_a. */
BimoduleDuplex reflection_bimodule(const ZigzagAlgebra& A, int a, const RatFunc& x);

/* Dense realization for verification: the differential as one matrix over
 * the concatenated basis (regular summands use the algebra basis, P(a,b)
 * uses pairs (p, q) with p over Ae_a and q over e_b A, p-major; copies are
 * laid out copy-major).  Left/right multiplication operators by a basis
 * element are provided to state the bimodule axioms as matrix identities. */
FMatrix bim_materialize(const BimoduleDuplex& N);
FMatrix bim_left_mult(const BimoduleDuplex& N, int g);
FMatrix bim_right_mult(const BimoduleDuplex& N, int g);

/* Checks, in order: blocks respect shape and parity, d supercommutes with
 * the left action, commutes with the right action, and d^2 equals
 * l_{c0} + r_{c1} on the nose. */
CheckResult verify_bimodule(const BimoduleDuplex& N);

/* Tensor product over A.  Summands multiply by the usual rules; the middle
 * curvature c1 of N1 plus c0 of N2 is re-attributed outward, each vertex
 * term moving to whichever side acts centrally on every summand of the
 * corresponding factor.  A vertex term with no central side throws. */
BimoduleDuplex tensor_bimodules(const BimoduleDuplex& N1, const BimoduleDuplex& N2);

/* Tensor of a bimodule with a module-side duplex carrying curvature c
 * (d_M^2 = rho(c)).  Output parts are tracked by origin: which N-part and
 * M-part they came from, and for P(a,b)-summands which basis element of
 * e_b A spans the slot (kSlotNone for regular tensor factors, kSlotSimple
 * for the one-dimensional e_b S(b) slot). */
constexpr int kSlotNone = -1;
constexpr int kSlotSimple = -2;

struct ModuleTensor {
  LabeledDuplex module;
  std::vector<RatFunc> curvature;
  struct Origin {
    int n_part;
    int m_part;
    int slot;
  };
  std::vector<Origin> origins;
};

ModuleTensor tensor_with_module(const BimoduleDuplex& N, const LabeledDuplex& M,
                                const std::vector<RatFunc>& c);

/* Composition of bimodule block maps g after f through the parts of Y,
 * with the Koszul sign of g against the left tensor leg of f. */
BimBlockMap compose_bim(const BimoduleDuplex& X, const BimoduleDuplex& Y,
                        const BimoduleDuplex& Z, const BimBlockMap& g,
                        const BimBlockMap& f);

/* Gaussian reduction on the bimodule side: repeatedly cancels a pair of
 * equal-label summands in adjacent parity linked by a block whose
 * degree-zero coefficient is invertible.  The inverse of such a block is
 * computed by a terminating Neumann series.  Only whole summands cancel;
 * multiplicities must match. */
void reduce_bimodule(BimoduleDuplex& N);

// stable canonical order on parts (regular first, then (a, b), then parity)
void sort_bimodule_parts(BimoduleDuplex& N);

/* Reflection functor at vertex a by tensoring with the reflection
 * bimodule at x = -zeta_c[a], followed by reduction to a point shape.
 * Requires zeta_c[a] != 0 and, when v_a > 0, that the stacked map
 * (j_a; B_h)_{o(h)=a} out of V_a has full column rank; both failures
 * throw DuplexError.  Parameters transport by the simple reflection. */
Point reflect_tensor(const ZigzagAlgebra& A, const Point& p, int a,
                     Convention conv = Convention::Centerm);

/* The same functor one step in: tensor with the reflection bimodule and
 * cancel the P(a)-summand of the module against the socle slot.  This is
 * the intermediate form the closed formula below describes; exposed so the
 * two can be compared entry by entry. */
LabeledDuplex reflection_stage(const ZigzagAlgebra& A, const Point& p, int a);

/* Closed-form intermediate: same parts in the same order as
 * reflection_stage, with every block written directly in terms of
 * (B, i, j) and x = -zeta_c[a]. */
LabeledDuplex reflection_stage_expected(const ZigzagAlgebra& A, const Point& p, int a);

/* Reflection at vertex a by direct linear algebra on (B, i, j): the
 * stacked map x_a = (j_a; B_h) is completed to the new point via its
 * cokernel projection.  Same preconditions and parameter transport as
 * reflect_tensor. */
Point reflect_direct(const ZigzagAlgebra& A, const Point& p, int a,
                     Convention conv = Convention::Centerm);

/* Identity check: C_{a,-x} (x) C_{a,x} reduces to the regular bimodule
 * with zero differential and a curvature pair that acts by zero. */
CheckResult verify_inverse_pair(const ZigzagAlgebra& A, int a, const RatFunc& x);

/* Braid check at vertices a, b with weights x, y.  Both triple products
 * are reduced; for adjacent vertices the two sides are matched to a
 * closed-form five-summand duplex by per-summand units, for non-adjacent
 * vertices the double products must agree literally after sorting. */
CheckResult verify_braid(const ZigzagAlgebra& A, int a, int b, const RatFunc& x,
                         const RatFunc& y);

}  // namespace qv
