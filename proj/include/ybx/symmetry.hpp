#ifndef YBX_SYMMETRY_HPP
#define YBX_SYMMETRY_HPP

#include <optional>
#include <string>
#include <vector>

#include "ybx/rmatrix.hpp"
#include "ybx/verifier.hpp"

namespace ybx {

// Matrix of rational functions (for similarity images and inverses).
struct RfMatrix {
  int dim_ = 0;
  std::vector<RatFunc> e;
  RfMatrix() = default;
  explicit RfMatrix(int d) : dim_(d), e(size_t(d) * d) {}
  int dim() const { return dim_; }
  RatFunc& at(int r, int c) { return e[size_t(r) * dim_ + c]; }
  const RatFunc& at(int r, int c) const { return e[size_t(r) * dim_ + c]; }
};

RfMatrix to_rf(const PolyMatrix& m);
// Multiplies every entry by the least common denominator; the scalar factor
// is irrelevant to the YBE. Denominator factors join side_conditions.
PolyMatrix clear_denominators(const RfMatrix& m,
                              std::vector<Poly>* side_conditions = nullptr);

struct Transform {
  enum class Kind { P, C, T, Similarity, Inversion };
  Kind kind = Kind::P;
  int shift = 1;                    // C: index increment
  RatFunc a, b, c, g;               // Similarity parameters
  std::string str() const;
};

struct SingularK : std::runtime_error {
  SingularK() : std::runtime_error("singular similarity matrix (a = 0)") {}
};
struct SingularMatrix : std::runtime_error {
  SingularMatrix() : std::runtime_error("matrix is symbolically singular") {}
};

// P: R_ij^kl -> R_kl^ij; C: all four indices increment mod N; T: R_ij^kl ->
// R_ji^lk. Entry permutations in the Hietarinta convention.
RMatrixSymbolic apply_pct(const RMatrixSymbolic& r, Transform::Kind kind,
                          int shift = 1);

// g (K x K) R (K x K)^{-1} with K = K(a,b,c) of determinant one.
RfMatrix apply_similarity(const RMatrixSymbolic& r, const RatFunc& a,
                          const RatFunc& b, const RatFunc& c, const RatFunc& g);

// Exact inverse; throws SingularMatrix when det == 0 identically.
RfMatrix invert_r(const RMatrixSymbolic& r);

// Applies t and re-runs the verifier (constant or spectral is chosen by the
// entries' spectral content).
bool ybe_preserved_under(const RMatrixSymbolic& r, const Transform& t,
                         AtomTable& tab);

// Canonical form: minimum over the group generated by {P, C, T} of the
// serialized matrix, after canonically renaming free functions /
// integration constants / leftover initial-derivative atoms (and optionally
// normalizing the scalar gauge by the first nonzero entry).
struct CanonicalForm {
  std::string key;
  std::vector<Transform> witness; // transform chain reaching the minimum
};
CanonicalForm canonicalize(const RMatrixSymbolic& r, AtomTable& tab,
                           bool gauge_normalize = false);

struct EquivalenceReport {
  enum class Verdict { Equivalent, Distinct, Unknown };
  Verdict verdict = Verdict::Unknown;
  std::string detail;              // invariant certificate or witness
  std::optional<Transform> witness;
};

// Invariant screen (rank; gauge-invariant trace ratios when ground), then a
// deterministic rational witness search over similarity parameters. Sound
// but incomplete: Unknown is a valid outcome.
EquivalenceReport equivalent_mod_similarity(const RMatrixSymbolic& r1,
                                            const RMatrixSymbolic& r2,
                                            AtomTable& tab);

// Groups verifier-passing solutions into equivalence classes under
// canonicalize, pairwise similarity, and inversion equivalence.
struct SolutionClass {
  std::vector<size_t> members;     // indices into the input list
  std::vector<std::string> notes;  // witness descriptions
};
std::vector<SolutionClass> dedup(const std::vector<RMatrixSymbolic>& sols,
                                 AtomTable& tab);

} // namespace ybx

#endif
