#ifndef YBX_GROEBNER_HPP
#define YBX_GROEBNER_HPP

#include <set>
#include <vector>

#include "ybx/linsolve.hpp"
#include "ybx/poly.hpp"

namespace ybx {

struct GroebnerConfig {
  int pair_budget = 20000;  // max S-pairs processed
  int64_t degree_cap = 12;  // max total degree admitted during reduction
  bool track_cofactors = false;
};

enum class BasisStatus { Complete, BudgetExceeded };

struct Basis {
  std::vector<Poly> gens; // interreduced, monic, sorted
  BasisStatus status = BasisStatus::Complete;
  // gens[i] == sum_j cofactors[i][j] * input[j]; filled when requested
  std::vector<std::vector<Poly>> cofactors;
};

// Buchberger's algorithm over the shared degrevlex order. Deterministic for
// a fixed config; the coprime-leading-term criterion prunes pairs. On budget
// exhaustion the partial basis is returned flagged BudgetExceeded.
Basis buchberger(const std::vector<Poly>& gens, const GroebnerConfig& cfg = {});

// True iff the basis contains a nonzero constant (unit ideal).
bool is_inconsistent(const Basis& b);

// Turns a Complete basis back into solver branches: generators linear in one
// unknown are solved, univariate quadratics with square discriminant split;
// whatever remains is passed back in extra_relations.
std::vector<Branch> triangular_extract(const Basis& b,
                                       const std::set<AtomKey>& unknowns,
                                       int branch_depth_cap = 6);

} // namespace ybx

#endif
