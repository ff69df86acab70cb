#ifndef YBX_RELATIONS_HPP
#define YBX_RELATIONS_HPP

#include <string>
#include <vector>

#include "ybx/rmatrix.hpp"

namespace ybx {

enum class SeedRank { Full, Rank3 };

struct SeedClass {
  std::string id;
  SeedRank rank = SeedRank::Full;
  RMatrixSymbolic tmpl;              // constant template at arg Zero
  std::vector<Poly> side_conditions; // nonvanishing parameter constraints
};

// The three relation families attached to a search vertex. A_u never holds
// derivative atoms; no zero polynomials are stored; every member is
// content-stripped and sign-normalized.
struct RelationSet {
  std::vector<Poly> A_u; // one-variable algebraic relations
  std::vector<Poly> D_u; // differential relations (entry derivatives)
  std::vector<Poly> D_0; // initial relations in R'(0)
};

// True when the polynomial carries any derivative atom.
bool has_derivative_atom(const Poly& p);

// Content-strip, sign-normalize, deduplicate, sort canonically, drop zeros.
std::vector<Poly> cleanup_relations(std::vector<Poly> rels,
                                    const AtomTable& tab);

// Scalar relations of a relation matrix, cleaned up.
std::vector<Poly> scalarize(const PolyMatrix& m, const AtomTable& tab);

// Builds A(u), D(u), D(0) for a seed; derivative-free members of the
// differential families are shifted into A(u).
RelationSet generate_relations(const SeedClass& seed, AtomTable& tab);

// The initial relations alone (the u -> 0 limit of the differentiated
// one-variable relations).
std::vector<Poly> generate_initial_relations(const SeedClass& seed,
                                             AtomTable& tab);

// True iff C satisfies the constant YBE identically.
bool constant_ybe_check(const RMatrixSymbolic& c);

// Loads and validates the seed catalog data file; throws on any template
// failing the constant YBE or on malformed input.
std::vector<SeedClass> load_catalog(const std::string& path, AtomTable& tab);
const SeedClass* find_seed(const std::vector<SeedClass>& cat,
                           const std::string& id);

} // namespace ybx

#endif
