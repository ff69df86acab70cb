#ifndef YBX_CLOSEDFORM_HPP
#define YBX_CLOSEDFORM_HPP

#include "ybx/poly.hpp"

namespace ybx {

// Closed forms are rational functions whose denominators are free of the
// spectral variables: polynomials in u times exponential atoms plus free
// function symbols, over parameter/integration-constant coefficients.

struct UnsupportedOrder : std::runtime_error {
  UnsupportedOrder() : std::runtime_error("derivative of order >= 2") {}
};

// Re-canonicalizes an expression: exp atoms at UPV split through the
// addition law, exp at Zero and rate-0 exp atoms collapse to 1. Idempotent.
Poly normalize(const Poly& e, AtomTable& tab);
RatFunc normalize(const RatFunc& e, AtomTable& tab);

// d/du (var 0) or d/dv (var 1); function atoms pick up derivative atoms,
// exp atoms multiply by their rate.
RatFunc differentiate(const Poly& e, int var, AtomTable& tab);
RatFunc differentiate(const RatFunc& e, int var, AtomTable& tab);

// Moves every U-argument atom to `target` (u -> u+v, v, or 0; exp atoms are
// rewritten through the addition law; free functions are re-tagged).
Poly retag_from_u(const Poly& e, Arg target, AtomTable& tab);
RatFunc retag_from_u(const RatFunc& e, Arg target, AtomTable& tab);

// True when the expression contains no u, v, or U/V/UPV-argument atoms.
bool spectral_free(const Poly& e);

// Restricted linear ODE solver: given rhs already solved for x'(u),
//   x'(u) = alpha x(u) + sum_i beta_i u^{m_i} exp(gamma_i u),
// with alpha, beta_i, gamma_i free of u, returns the exact solution with
// x(0) = init, handling the resonance gamma_i = alpha. Returns
// supported=false when the right-hand side leaves the fragment.
struct OdeResult {
  bool supported = false;
  RatFunc solution;
  std::vector<Poly> side_conditions;
};
OdeResult ode_solve_linear(const RatFunc& rhs, AtomKey x, const RatFunc& init,
                           AtomTable& tab);

} // namespace ybx

#endif
