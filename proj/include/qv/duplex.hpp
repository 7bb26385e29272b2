#pragma once

#include <map>

#include "qv/algebra.hpp"

namespace qv {

/* Framed quiver data: per arrow h a map B_h: V_{source} -> V_{target},
 * per vertex maps i_a: W_a -> V_a and j_a: V_a -> W_a, and the deformation
 * parameters.  Matrices act on column vectors, so B_h is v_target x v_source. */
struct Point {
  Graph graph;
  std::vector<long> v, w;
  std::vector<FMatrix> B;   // per arrow
  std::vector<FMatrix> i_;  // per vertex, v_a x w_a
  std::vector<FMatrix> j_;  // per vertex, w_a x v_a
  std::vector<RatFunc> zeta_c;
  std::vector<RatFunc> zeta_r;

  void validate() const;  // shape checks
};

/* Two sign conventions for the complex moment identity at vertex a:
 *   Centerm: sum_{o(h)=a} eps(bar h) B_{bar h} B_h + i_a j_a = c_a
 *   Mu:      sum_{o(h)=a} eps(h)     B_{bar h} B_h + i_a j_a = c_a
 * They differ by the gauge B_h -> eps(h) B_h. */
enum class Convention { Centerm, Mu };

// left side minus c_a, one matrix per vertex
std::vector<FMatrix> moment_residual(const Point& p, Convention conv);

/* Real side: sum_{o(h)=a} (B_{bar h} B*_{bar h} - B*_h B_h) + i_a i*_a - j*_a j_a
 * minus zeta_r[a], where * is the conjugate transpose. */
std::vector<FMatrix> real_moment_residual(const Point& p);

/* Companion data of the adjoint differential: arrow slot eps(bar h) B*_{bar h},
 * framing slots i -> -j*, j -> i*.  Assembling it gives the odd map d* with
 * d d* + d* d acting on each projective by the real moment matrix. */
Point real_dual_data(const Point& p);

/* ------------------------------------------------------------------ */

/* A module with odd square-c differential, presented as labeled summands:
 * projectives P(a) and simples S(a), each with a parity shift and a
 * multiplicity.  Maps between summand groups are stored on generators:
 * a block from P(a) to P(b) assigns to each basis path p in e_a A e_b a
 * coefficient matrix (target mult x source mult); the remaining Hom spaces
 * are one-dimensional, with symbols HAT (P(a) -> S(a), generator to the
 * simple generator), SOC (S(a) -> P(a), generator to X_a) and IDS
 * (S(a) -> S(a)).  An odd map phi obeys phi(x m) = (-1)^{|x|} x phi(m);
 * shifts flip element parity but never twist the action. */

enum class SumKind { Proj, Simple };

struct Summand {
  SumKind kind;
  int vertex;
  int shift;  // parity is shift mod 2
  int mult;
  bool operator==(const Summand& o) const = default;
};

constexpr int kPathHat = -1;
constexpr int kPathSoc = -2;
constexpr int kPathIds = -3;

using PathCoeffs = std::map<int, FMatrix>;

struct BlockMap {
  int kappa = 1;  // 1: odd map with Koszul signs; 0: even map
  std::map<std::pair<int, int>, PathCoeffs> blocks;  // (src part, dst part)

  void add(int src, int dst, int path, const FMatrix& coeff);
  const FMatrix* find(int src, int dst, int path) const;
  void prune();  // drop zero coefficients
  bool empty() const;
};

struct LabeledDuplex {
  const ZigzagAlgebra* alg = nullptr;
  std::vector<Summand> parts;
  BlockMap d;  // odd, d^2 = action of the attached central parameter

  int local_dim(int part) const;
  int total_dim() const;
};

struct DuplexError : std::runtime_error {
  explicit DuplexError(const std::string& what) : std::runtime_error(what) {}
};

// algebra degree of a path symbol (HAT, IDS: 0; SOC: 2)
int path_degree(const ZigzagAlgebra& A, int p);

/* Composition g . f of block maps between the summand lists X -f-> Y -g-> Z;
 * Koszul signs from g.kappa act on the degree of the inner path. */
BlockMap compose(const ZigzagAlgebra& A, const std::vector<Summand>& X,
                 const std::vector<Summand>& Y, const std::vector<Summand>& Z,
                 const BlockMap& g, const BlockMap& f);

// the even block map "multiply by the central element sum_a c[a] X_a"
BlockMap central_action(const ZigzagAlgebra& A, const std::vector<Summand>& parts,
                        const std::vector<RatFunc>& c);

// dense matrix of a block map, rows flatten (part, copy, local basis)
FMatrix materialize(const ZigzagAlgebra& A, const std::vector<Summand>& src,
                    const std::vector<Summand>& dst, const BlockMap& f);

struct CheckResult {
  bool ok = true;
  std::string detail;
};

// parity sanity of d plus the identity d^2 = c at block level
CheckResult verify_duplex(const LabeledDuplex& M, const std::vector<RatFunc>& c);

/* ------------------------------------------------------------------ */

// the module of a point: P(a)[0]^{v_a} + S(a)[1]^{w_a} with d from (B, i, j)
LabeledDuplex assemble(const ZigzagAlgebra& A, const Point& p, Convention conv);

// inverse of assemble; requires the summand pattern of an assembled module
Point extract(const LabeledDuplex& M, const std::vector<RatFunc>& zeta_c,
              const std::vector<RatFunc>& zeta_r, Convention conv);

/* Gaussian cancellation of the contractible pair (src, dst): the degree-zero
 * coefficient between them must be square invertible (P-P pairs: the
 * idempotent path; S-S pairs: IDS).  Remaining blocks get the correction
 * d - d_{. <- src} phi^{-1} d_{dst <- .}. */
void cancel_pair(LabeledDuplex& M, int src, int dst);

// greedy reduction until no cancellable pair remains; deterministic order
void reduce(LabeledDuplex& M);

// merge summands with equal (kind, vertex, shift parity), deterministic order
void merge_summands(LabeledDuplex& M);

/* ------------------------------------------------------------------ */

struct StabilityReport {
  bool stable = true;
  std::vector<long> sub_dims;  // dimensions of the largest invariant subspace
  int witness_vertex = -1;
  FMatrix witness;  // a nonzero column of the offending subspace
};

/* Largest B-invariant subspace of V contained in ker j; stable iff zero.
 * Reaches the fixpoint in at most sum v_a shrinking steps. */
StabilityReport stability_check(const Point& p);

struct FramedIso {
  bool exists = false;
  std::vector<FMatrix> g;  // per vertex, invertible, intertwines the data
};

/* Vertex-wise invertible g with g B = B' g, g i = i', j' g = j.  The affine
 * solution space is scanned on an integer grid large enough to certify
 * emptiness exactly; throws DuplexError if that grid would be unreasonably
 * large. */
FramedIso framed_iso(const Point& p, const Point& q);

}  // namespace qv
