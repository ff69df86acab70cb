#ifndef YBX_LINSOLVE_HPP
#define YBX_LINSOLVE_HPP

#include <map>
#include <set>
#include <vector>

#include "ybx/poly.hpp"

namespace ybx {

// One solution branch of a (case-split) solve.
struct Branch {
  std::map<AtomKey, RatFunc> assignment;
  std::vector<Poly> side_conditions; // nonvanishing requirements
  std::vector<Poly> extra_relations; // constraints picked up along the branch
  bool inconsistent = false;         // branch reduced to nonzero constant = 0
};

// Fraction-free elimination of equations with total degree <= 1 in the
// designated unknowns. Every non-constant pivot spawns a complementary
// pivot = 0 branch, up to `branch_depth_cap` splits per path. Assignments
// are fully back-substituted rational functions.
std::vector<Branch> solve_linear(const std::vector<Poly>& eqs,
                                 const std::set<AtomKey>& unknowns,
                                 int branch_depth_cap = 6);

// True when every equation has total degree <= 1 in the unknowns.
bool is_linear_system(const std::vector<Poly>& eqs,
                      const std::set<AtomKey>& unknowns);

} // namespace ybx

#endif
