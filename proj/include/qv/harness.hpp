#pragma once

#include <cstdint>
#include <random>

#include "qv/bimodule.hpp"

namespace qv {

/* Starting point with V = 0: framing spaces only, all maps empty, d = 0.
 * Every parameter vector is admissible since the differential vanishes. */
Point seed_point(const Graph& g, const std::vector<long>& w,
                 const std::vector<RatFunc>& zeta_c,
                 const std::vector<RatFunc>& zeta_r = {});

/* Point with the given dimensions and small random integer entries.
 * The moment equation is NOT imposed. */
Point random_point(const Graph& g, const std::vector<long>& v,
                   const std::vector<long>& w, const std::vector<RatFunc>& zeta_c,
                   std::mt19937_64& rng);

/* Random point that satisfies the moment identity exactly: V = W, i = id,
 * B random, and j_a defined by the identity itself. */
Point balanced_point(const Graph& g, long dim, const std::vector<RatFunc>& zeta_c,
                     std::mt19937_64& rng, Convention conv = Convention::Centerm);

/* One reflection step with everything that must hold recorded. */
struct OrbitStep {
  int vertex = -1;
  std::vector<long> v;        // dimensions after the step
  bool dims_match = false;    // v agrees with the simple reflection on dims
  bool params_match = false;  // parameters agree with the simple reflection
  bool moment_zero = false;   // moment residual vanishes after the step
  bool generic_kept = false;  // genericity verdict carried across the step
  bool methods_agree = true;  // tensor route vs direct route (when checked)
};

struct OrbitResult {
  Point end;
  std::vector<OrbitStep> steps;
  bool ok = false;
  std::string detail;  // first failure; empty when ok
};

/* Apply reflections along the word (vertex indices, loopless, running
 * zeta_c nonzero at each letter).  Precondition violations propagate as
 * DuplexError; per-step verification failures are recorded, not thrown.
 * cross_check additionally runs the direct route at every step and
 * compares up to framed isomorphism. */
OrbitResult orbit(const ZigzagAlgebra& A, const Point& start,
                  const std::vector<int>& word, Convention conv = Convention::Centerm,
                  bool cross_check = true);

/* Fixed test bed: small graphs covering a single vertex, loops, chains,
 * cycles, a branch point, and multiple edges, each with framing dims and
 * an orbit word valid from the V = 0 seed. */
struct CatalogEntry {
  std::string name;
  Graph graph;
  std::vector<long> w;
  std::vector<int> word;
};

const std::vector<CatalogEntry>& suite_catalog();

// parameters used throughout the suite: zeta_c[a] = t^{a+1}
std::vector<RatFunc> catalog_params(const Graph& g);

/* Batch verification.  Items are independent and deterministic given the
 * seed: each derives its own generator from (seed, item id), so the jobs
 * count never changes the report.  The report is sorted by item id. */
struct SuiteItem {
  std::string id;
  bool ok = false;
  std::string detail;  // empty when ok
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<SuiteItem> items;
  bool ok = false;
};

/* only: when nonempty, keep exactly the listed item ids (unknown ids are
 * an error).  Item results never depend on jobs or on which other items
 * run; each derives its generator from (seed, id) alone. */
SuiteReport run_suite(std::uint64_t seed, int jobs = 1,
                      const std::vector<std::string>& only = {});

}  // namespace qv
