#ifndef YBX_VERIFIER_HPP
#define YBX_VERIFIER_HPP

#include <map>
#include <random>
#include <string>

#include "ybx/closedform.hpp"
#include "ybx/rmatrix.hpp"

namespace ybx {

struct VerificationResult {
  enum class Which { ConstantYBE, SpectralYBE };
  bool passed = false;
  Which checked = Which::ConstantYBE;
  int fail_row = -1, fail_col = -1; // residual position when failed
  std::string witness;              // serialized nonzero normal form
};

// Substitutes C into the constant YBE; exact entry-wise zero test.
VerificationResult verify_constant(const RMatrixSymbolic& c,
                                   const AtomTable& tab);

// Substitutes R(u) (entries over U-argument atoms) into the spectral YBE:
// builds R(u+v) and R(v) by argument re-tagging, rewrites exp atoms through
// the addition law, and tests all residual entries for identical vanishing
// under free-function independence.
VerificationResult verify_spectral(const RMatrixSymbolic& r_u, AtomTable& tab);

// Matrix rank at a generic parameter point via fraction-free elimination.
// Pivots (assumed nonzero) are appended to *pivots when given.
int symbolic_rank(const PolyMatrix& m, std::vector<Poly>* pivots = nullptr);

// Exact determinant (Bareiss).
Poly poly_det(const PolyMatrix& m);

// Adjugate matrix: m * adjugate(m) = det * I. Cofactor expansion.
PolyMatrix poly_adjugate(const PolyMatrix& m);

// Random rational evaluation consistent with the closed-form semantics:
// every non-root atom gets an independent positive rational; root constants
// are left symbolic (the result is a poly in them, zero iff empty).
std::map<AtomKey, Rational> random_valuation(const Poly& p, std::mt19937_64& rng);
bool random_zero_check(const Poly& p, std::mt19937_64& rng, int trials);

} // namespace ybx

#endif
