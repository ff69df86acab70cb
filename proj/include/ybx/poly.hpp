#ifndef YBX_POLY_HPP
#define YBX_POLY_HPP

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ybx/atoms.hpp"
#include "ybx/rational.hpp"

namespace ybx {

// ---------------------------------------------------------------------------
// Monomial: sparse exponent vector, entries sorted ascending by atom key.
// Exponents are nonzero; negative exponents are legal only for unit atoms
// (ExpAtom, RootConst).
// ---------------------------------------------------------------------------
struct Monomial {
  std::vector<std::pair<AtomKey, int32_t>> e;

  bool is_one() const { return e.empty(); }
  int64_t total_degree() const;
  int32_t degree_of(AtomKey k) const;
  bool contains(AtomKey k) const;

  bool operator==(const Monomial& o) const { return e == o.e; }
  bool operator<(const Monomial& o) const { return e < o.e; } // container order only
};

// Graded reverse lexicographic order; atom precedence descends with key.
bool mono_degrevlex_greater(const Monomial& a, const Monomial& b);
// a | b in the commutative sense; unit atoms are always divisible.
bool mono_divides(const Monomial& a, const Monomial& b);
Monomial mono_mul(const Monomial& a, const Monomial& b);
// Quotient b / a (requires mono_divides(a, b)).
Monomial mono_div(const Monomial& b, const Monomial& a);
Monomial mono_lcm(const Monomial& a, const Monomial& b);
bool mono_coprime(const Monomial& a, const Monomial& b);

struct Term {
  Monomial m;
  Rational c;
};

// ---------------------------------------------------------------------------
// Poly: exact multivariate polynomial over Rational. Terms are kept sorted
// descending in degrevlex, no zero coefficients, root-constant exponents
// folded into {0, 1}.
// ---------------------------------------------------------------------------
class Poly {
 public:
  Poly() = default;
  static Poly zero() { return Poly(); }
  static Poly constant(Rational c);
  static Poly atom(AtomKey k, int32_t exp = 1);
  static Poly from_terms(std::vector<Term> terms); // normalizes

  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
  // Constant value; only valid when is_constant().
  Rational constant_value() const { return t_.empty() ? Rational(0) : t_[0].c; }
  bool is_nonzero_constant() const { return t_.size() == 1 && t_[0].m.is_one(); }

  const Term& leading() const { return t_.front(); }
  size_t term_count() const { return t_.size(); }
  int64_t total_degree() const; // 0 for the zero polynomial

  // Degree in one atom / in a set of atoms.
  int32_t degree_in(AtomKey k) const;
  int64_t degree_in_class(const std::function<bool(AtomKey)>& pred) const;

  bool contains_atom(AtomKey k) const;
  bool contains_kind(AtomKind kind) const;
  void collect_atoms(std::set<AtomKey>& out) const;
  std::set<AtomKey> atoms() const;

  // Coefficients of powers of `k`, each free of `k`.
  std::map<int32_t, Poly> coeffs_in(AtomKey k) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
  friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }
  Poly mul_scalar(const Rational& c) const;
  Poly mul_term(const Term& t) const;
  Poly pow(uint32_t n) const;

  bool operator==(const Poly& o) const;
  bool operator!=(const Poly& o) const { return !(*this == o); }

  // Substitutes rational values for every atom the map covers; atoms not in
  // the map survive. Used by randomized oracles.
  Poly eval_partial(const std::map<AtomKey, Rational>& vals) const;

  // Substitutes atom -> polynomial.
  Poly subst(const std::map<AtomKey, Poly>& repl) const;

 private:
  std::vector<Term> t_;
  void normalize(); // sort, fold roots, drop zeros
  friend Poly poly_from_sorted(std::vector<Term>&& ts);
};

// content * monomial * primitive decomposition of a nonzero polynomial.
// primitive has unit rational content, no common monomial factor, and a
// positive leading coefficient (the sign goes into content).
struct ContentSplit {
  Rational content;
  Monomial mono;
  Poly primitive;
};
ContentSplit content_primitive(const Poly& f); // throws ZeroInput on 0

// Removes the rational content (sign-normalizing the leading coefficient)
// and common unit-atom factors, keeping ordinary monomial factors. This is
// the normal form for stored relations and side conditions.
Poly strip_content_and_units(const Poly& f);

// Multivariate division: normal form of f modulo G (every leading term of G
// fails to divide any term of the result). Optional cofactors q[i] with
// f = sum q[i] * G[i] + r.
Poly reduce_by_set(const Poly& f, const std::vector<Poly>& G,
                   std::vector<Poly>* cofactors = nullptr);

// Exact division f / g; nullopt if g does not divide f.
std::optional<Poly> divide_exact(const Poly& f, const Poly& g);

// Exact polynomial square root, if one exists (with +leading coefficient).
std::optional<Poly> poly_sqrt(const Poly& f);

// GCD via primitive PRS. Result is primitive with positive leading
// coefficient; gcd(0, g) = primitive part of g.
Poly poly_gcd(const Poly& a, const Poly& b);

// Attempted factor split: monomial content, then quadratic-in-one-variable
// with perfect-square discriminant. Returns {f's primitive} when nothing
// splits; re-multiplying the factors reproduces f up to rational content.
std::vector<Poly> try_split_product(const Poly& f);

// ---------------------------------------------------------------------------
// RatFunc: reduced fraction of polynomials. den is nonzero with positive
// leading coefficient; gcd(num, den) is constant.
// ---------------------------------------------------------------------------
struct RatFunc {
  Poly num;
  Poly den; // never zero; defaults to 1

  RatFunc() : den(Poly::constant(1)) {}
  explicit RatFunc(Poly n) : num(std::move(n)), den(Poly::constant(1)) {}
  RatFunc(Poly n, Poly d);

  bool is_zero() const { return num.is_zero(); }
  bool is_poly() const { return den.is_nonzero_constant() && den.constant_value() == 1; }
  bool operator==(const RatFunc& o) const { return num == o.num && den == o.den; }
  bool operator!=(const RatFunc& o) const { return !(*this == o); }
};

RatFunc rf_add(const RatFunc& a, const RatFunc& b);
RatFunc rf_sub(const RatFunc& a, const RatFunc& b);
RatFunc rf_mul(const RatFunc& a, const RatFunc& b);
RatFunc rf_div(const RatFunc& a, const RatFunc& b); // throws on zero divisor
RatFunc rf_neg(const RatFunc& a);

// Substitutes atoms by rational functions inside a polynomial.
RatFunc subst_ratfunc(const Poly& f, const std::map<AtomKey, RatFunc>& repl);

// ---------------------------------------------------------------------------
// AtomTable: the atom registry shared by all polynomials of one problem.
// Registration is idempotent; ids are dense and monotone.
// ---------------------------------------------------------------------------
struct AtomData {
  AtomKind kind;
  Arg arg = Arg::U;
  int a = 0;          // row (1-based) or function index or spectral index
  int b = 0;          // col (1-based)
  std::string name;   // SeedParam / RootConst spelling
  int rate = -1;      // ExpAtom: index into rates()
  AtomKey key = 0;
};

class AtomTable {
 public:
  AtomKey entry_func(int row, int col, Arg arg);
  AtomKey entry_deriv(int row, int col, Arg arg);
  AtomKey init_deriv(int row, int col);
  AtomKey free_func(int k, Arg arg);
  AtomKey free_func_deriv(int k, Arg arg);
  AtomKey spectral(int idx); // 0 = u, 1 = v
  AtomKey seed_param(const std::string& name);
  AtomKey integration_const(int k);
  AtomKey root_const(uint16_t tag); // kRootImag or kRootSqrt2

  // exp(rate * arg); rate must be free of spectral variables. Returns a
  // polynomial because the rewrite rules exp(0 * x) = 1, exp(r * 0) = 1 and
  // exp(r*(u+v)) = exp(r*u) exp(r*v) are applied on construction.
  Poly exp_atom(const RatFunc& rate, Arg arg);
  // The undecomposed atom for args U and V.
  AtomKey exp_atom_key(const RatFunc& rate, Arg arg);

  const AtomData& data(AtomKey k) const { return atoms_.at(key_id(k)); }
  const RatFunc& rate(int idx) const { return rates_.at(idx); }
  size_t size() const { return atoms_.size(); }
  const std::vector<AtomData>& all() const { return atoms_; }

  // Human/machine-readable atom spelling; parseable back by the io layer.
  std::string atom_name(AtomKey k) const;

 private:
  AtomKey intern(const std::string& tag, AtomKind kind, Arg arg, int a, int b,
                 const std::string& name, int rate_idx, uint16_t root_tag);
  int intern_rate(const RatFunc& r);

  std::vector<AtomData> atoms_;
  std::unordered_map<std::string, AtomKey> index_;
  std::vector<RatFunc> rates_;
  std::unordered_map<std::string, int> rate_index_;
};

// Canonical textual form of a polynomial (sorted term list, explicit
// rational coefficients). Bit-exact round-trip with parse_poly (io.hpp).
std::string poly_to_string(const Poly& f, const AtomTable& tab);
std::string ratfunc_to_string(const RatFunc& f, const AtomTable& tab);

struct ZeroInput : std::runtime_error {
  ZeroInput() : std::runtime_error("zero polynomial input") {}
};

} // namespace ybx

#endif
