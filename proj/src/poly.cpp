#include "ybx/poly.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace ybx {

std::string arg_suffix(Arg a) {
  switch (a) {
    case Arg::Zero: return "0";
    case Arg::U: return "u";
    case Arg::V: return "v";
    case Arg::UPV: return "u+v";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Monomial
// ---------------------------------------------------------------------------

int64_t Monomial::total_degree() const {
  int64_t d = 0;
  for (auto& [k, x] : e) d += x;
  return d;
}

int32_t Monomial::degree_of(AtomKey k) const {
  for (auto& [a, x] : e)
    if (a == k) return x;
  return 0;
}

bool Monomial::contains(AtomKey k) const { return degree_of(k) != 0; }

bool mono_degrevlex_greater(const Monomial& a, const Monomial& b) {
  int64_t da = a.total_degree(), db = b.total_degree();
  if (da != db) return da > db;
  // Reverse-lex tie break: scan from the least-significant atom (largest
  // key); the first exponent difference decides, smaller exponent wins.
  auto ia = a.e.rbegin(), ib = b.e.rbegin();
  while (ia != a.e.rend() || ib != b.e.rend()) {
    if (ia == a.e.rend()) {
      // a lacks b's atom (exponent 0 vs b's nonzero)
      return ib->second > 0;
    }
    if (ib == b.e.rend()) return ia->second < 0;
    if (ia->first > ib->first) {
      // a has the less significant atom; b's exponent there is 0
      return ia->second < 0;
    }
    if (ib->first > ia->first) return ib->second > 0;
    if (ia->second != ib->second) return ia->second < ib->second;
    ++ia; ++ib;
  }
  return false; // equal
}

bool mono_divides(const Monomial& a, const Monomial& b) {
  for (auto& [k, x] : a.e) {
    if (key_is_unit_atom(k)) continue;
    if (x > 0 && b.degree_of(k) < x) return false;
    // negative exponents only occur on unit atoms
  }
  return true;
}

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.e.reserve(a.e.size() + b.e.size());
  auto ia = a.e.begin(), ib = b.e.begin();
  while (ia != a.e.end() && ib != b.e.end()) {
    if (ia->first < ib->first) r.e.push_back(*ia++);
    else if (ib->first < ia->first) r.e.push_back(*ib++);
    else {
      int32_t x = ia->second + ib->second;
      if (x != 0) r.e.emplace_back(ia->first, x);
      ++ia; ++ib;
    }
  }
  r.e.insert(r.e.end(), ia, a.e.end());
  r.e.insert(r.e.end(), ib, b.e.end());
  return r;
}

Monomial mono_div(const Monomial& b, const Monomial& a) {
  Monomial inv;
  inv.e.reserve(a.e.size());
  for (auto& [k, x] : a.e) inv.e.emplace_back(k, -x);
  return mono_mul(b, inv);
}

Monomial mono_lcm(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto ia = a.e.begin(), ib = b.e.begin();
  while (ia != a.e.end() && ib != b.e.end()) {
    if (ia->first < ib->first) r.e.push_back(*ia++);
    else if (ib->first < ia->first) r.e.push_back(*ib++);
    else {
      r.e.emplace_back(ia->first, std::max(ia->second, ib->second));
      ++ia; ++ib;
    }
  }
  r.e.insert(r.e.end(), ia, a.e.end());
  r.e.insert(r.e.end(), ib, b.e.end());
  return r;
}

bool mono_coprime(const Monomial& a, const Monomial& b) {
  auto ia = a.e.begin(), ib = b.e.begin();
  while (ia != a.e.end() && ib != b.e.end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else return false;
  }
  return true;
}

// Folds root-constant exponents into {0,1}, multiplying the square value
// into the coefficient: I^2 -> -1, sqrt2^2 -> 2.
static void fold_roots(Monomial& m, Rational& c) {
  bool touched = false;
  for (auto& [k, x] : m.e) {
    uint16_t tag = key_root(k);
    if (tag == kRootNone || (x >= 0 && x <= 1)) continue;
    Rational sq = (tag == kRootImag) ? Rational(-1) : Rational(2);
    // x = 2q + r with r in {0,1}
    int32_t q = (x >= 0) ? x / 2 : (x - 1) / 2;
    int32_t r = x - 2 * q;
    if (q > 0) for (int i = 0; i < q; ++i) c *= sq;
    else for (int i = 0; i < -q; ++i) c /= sq;
    x = r;
    touched = true;
  }
  if (touched)
    m.e.erase(std::remove_if(m.e.begin(), m.e.end(),
                             [](auto& p) { return p.second == 0; }),
              m.e.end());
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

Poly Poly::constant(Rational c) {
  Poly p;
  if (c != 0) p.t_.push_back(Term{Monomial{}, std::move(c)});
  return p;
}

Poly Poly::atom(AtomKey k, int32_t exp) {
  if (exp == 0) return constant(1);
  Poly p;
  Monomial m;
  m.e.emplace_back(k, exp);
  Rational c(1);
  fold_roots(m, c);
  p.t_.push_back(Term{std::move(m), std::move(c)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  Poly p;
  p.t_ = std::move(terms);
  p.normalize();
  return p;
}

void Poly::normalize() {
  for (auto& t : t_) fold_roots(t.m, t.c);
  std::sort(t_.begin(), t_.end(), [](const Term& a, const Term& b) {
    return mono_degrevlex_greater(a.m, b.m);
  });
  std::vector<Term> out;
  out.reserve(t_.size());
  for (auto& t : t_) {
    if (!out.empty() && out.back().m == t.m) out.back().c += t.c;
    else out.push_back(std::move(t));
    if (!out.empty() && out.back().c == 0) out.pop_back();
  }
  t_ = std::move(out);
}

int64_t Poly::total_degree() const {
  int64_t d = 0;
  for (auto& t : t_) d = std::max(d, t.m.total_degree());
  return d;
}

int32_t Poly::degree_in(AtomKey k) const {
  int32_t d = 0;
  for (auto& t : t_) d = std::max(d, t.m.degree_of(k));
  return d;
}

int64_t Poly::degree_in_class(const std::function<bool(AtomKey)>& pred) const {
  int64_t d = 0;
  for (auto& t : t_) {
    int64_t s = 0;
    for (auto& [k, x] : t.m.e)
      if (pred(k)) s += x;
    d = std::max(d, s);
  }
  return d;
}

bool Poly::contains_atom(AtomKey k) const {
  for (auto& t : t_)
    if (t.m.contains(k)) return true;
  return false;
}

bool Poly::contains_kind(AtomKind kind) const {
  for (auto& t : t_)
    for (auto& [k, x] : t.m.e)
      if (key_kind(k) == kind) return true;
  return false;
}

void Poly::collect_atoms(std::set<AtomKey>& out) const {
  for (auto& t : t_)
    for (auto& [k, x] : t.m.e) out.insert(k);
}

std::set<AtomKey> Poly::atoms() const {
  std::set<AtomKey> s;
  collect_atoms(s);
  return s;
}

std::map<int32_t, Poly> Poly::coeffs_in(AtomKey k) const {
  std::map<int32_t, std::vector<Term>> buckets;
  for (auto& t : t_) {
    int32_t d = t.m.degree_of(k);
    Term r = t;
    if (d != 0) {
      r.m.e.erase(std::remove_if(r.m.e.begin(), r.m.e.end(),
                                 [&](auto& p) { return p.first == k; }),
                  r.m.e.end());
    }
    buckets[d].push_back(std::move(r));
  }
  std::map<int32_t, Poly> out;
  for (auto& [d, ts] : buckets) out[d] = Poly::from_terms(std::move(ts));
  return out;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.t_) t.c = -t.c;
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  // merge two sorted term lists
  std::vector<Term> out;
  out.reserve(t_.size() + o.t_.size());
  auto ia = t_.cbegin();
  auto ib = o.t_.cbegin();
  while (ia != t_.end() && ib != o.t_.end()) {
    if (ia->m == ib->m) {
      Rational c = ia->c + ib->c;
      if (c != 0) out.push_back(Term{ia->m, std::move(c)});
      ++ia; ++ib;
    } else if (mono_degrevlex_greater(ia->m, ib->m)) {
      out.push_back(*ia++);
    } else {
      out.push_back(*ib++);
    }
  }
  out.insert(out.end(), ia, t_.cend());
  out.insert(out.end(), ib, o.t_.cend());
  t_ = std::move(out);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  std::vector<Term> ts;
  ts.reserve(a.t_.size() * b.t_.size());
  for (auto& ta : a.t_)
    for (auto& tb : b.t_)
      ts.push_back(Term{mono_mul(ta.m, tb.m), ta.c * tb.c});
  return Poly::from_terms(std::move(ts));
}

Poly Poly::mul_scalar(const Rational& c) const {
  if (c == 0) return Poly();
  Poly r = *this;
  for (auto& t : r.t_) t.c *= c;
  return r;
}

Poly Poly::mul_term(const Term& t) const {
  if (t.c == 0) return Poly();
  std::vector<Term> ts;
  ts.reserve(t_.size());
  for (auto& a : t_) ts.push_back(Term{mono_mul(a.m, t.m), a.c * t.c});
  return Poly::from_terms(std::move(ts));
}

Poly Poly::pow(uint32_t n) const {
  Poly r = Poly::constant(1);
  Poly base = *this;
  while (n) {
    if (n & 1) r = r * base;
    base = (n >>= 1) ? base * base : base;
  }
  return r;
}

bool Poly::operator==(const Poly& o) const {
  if (t_.size() != o.t_.size()) return false;
  for (size_t i = 0; i < t_.size(); ++i)
    if (!(t_[i].m == o.t_[i].m) || t_[i].c != o.t_[i].c) return false;
  return true;
}

Poly Poly::eval_partial(const std::map<AtomKey, Rational>& vals) const {
  std::vector<Term> ts;
  ts.reserve(t_.size());
  for (auto& t : t_) {
    Term r;
    r.c = t.c;
    for (auto& [k, x] : t.m.e) {
      auto it = vals.find(k);
      if (it == vals.end()) {
        r.m.e.emplace_back(k, x);
      } else {
        Rational v = it->second;
        if (x >= 0) {
          for (int i = 0; i < x; ++i) r.c *= v;
        } else {
          for (int i = 0; i < -x; ++i) r.c /= v;
        }
      }
    }
    ts.push_back(std::move(r));
  }
  return Poly::from_terms(std::move(ts));
}

Poly Poly::subst(const std::map<AtomKey, Poly>& repl) const {
  Poly out;
  for (auto& t : t_) {
    Poly term = Poly::constant(t.c);
    for (auto& [k, x] : t.m.e) {
      auto it = repl.find(k);
      if (it == repl.end()) {
        term = term.mul_term(Term{Poly::atom(k, x).leading().m,
                                  Poly::atom(k, x).leading().c});
      } else {
        if (x < 0) throw std::runtime_error("subst: negative power of substituted atom");
        term = term * it->second.pow(uint32_t(x));
      }
    }
    out += term;
  }
  return out;
}

// ---------------------------------------------------------------------------
// content / primitive
// ---------------------------------------------------------------------------

ContentSplit content_primitive(const Poly& f) {
  if (f.is_zero()) throw ZeroInput();
  // monomial gcd: min exponent per atom over all terms (atoms missing from a
  // term have exponent 0, except unit atoms which are shifted to their true
  // minimum, possibly negative)
  std::map<AtomKey, int32_t> mins;
  bool first = true;
  for (auto& t : f.terms()) {
    if (first) {
      for (auto& [k, x] : t.m.e) mins[k] = x;
      first = false;
      continue;
    }
    for (auto& [k, x] : mins) {
      int32_t d = t.m.degree_of(k);
      x = std::min(x, d);
    }
    // unit atoms present in this term but not in mins: min with 0 unless unit
    for (auto& [k, x] : t.m.e) {
      if (!mins.count(k) && key_is_unit_atom(k) && x < 0) mins[k] = x;
    }
  }
  Monomial g;
  for (auto& [k, x] : mins)
    if (x != 0) g.e.emplace_back(k, x);
  // rational content: gcd of numerators / lcm of denominators, signed by the
  // leading coefficient
  Int gn(0), ld(1);
  for (auto& t : f.terms()) {
    gn = gcd(gn, num(t.c));
    ld = lcm(ld, den(t.c));
  }
  Rational content(gn, ld);
  if (f.leading().c < 0) content = -content;
  std::vector<Term> ts;
  for (auto& t : f.terms())
    ts.push_back(Term{mono_div(t.m, g), t.c / content});
  ContentSplit cs;
  cs.content = content;
  cs.mono = std::move(g);
  cs.primitive = Poly::from_terms(std::move(ts));
  return cs;
}

Poly strip_content_and_units(const Poly& f) {
  if (f.is_zero()) return f;
  ContentSplit cs = content_primitive(f);
  Monomial keep;
  for (auto& [k, x] : cs.mono.e)
    if (!key_is_unit_atom(k)) keep.e.emplace_back(k, x);
  if (keep.is_one()) return cs.primitive;
  return cs.primitive.mul_term(Term{keep, Rational(1)});
}

// ---------------------------------------------------------------------------
// division / reduction
// ---------------------------------------------------------------------------

Poly reduce_by_set(const Poly& f, const std::vector<Poly>& G,
                   std::vector<Poly>* cofactors) {
  if (cofactors) cofactors->assign(G.size(), Poly());
  Poly p = f, r;
  while (!p.is_zero()) {
    bool divided = false;
    for (size_t i = 0; i < G.size(); ++i) {
      if (G[i].is_zero()) continue;
      const Term& lg = G[i].leading();
      if (mono_divides(lg.m, p.leading().m)) {
        Term q{mono_div(p.leading().m, lg.m), p.leading().c / lg.c};
        p -= G[i].mul_term(q);
        if (cofactors) {
          (*cofactors)[i] += Poly::from_terms({q});
        }
        divided = true;
        break;
      }
    }
    if (!divided) {
      r += Poly::from_terms({p.leading()});
      p -= Poly::from_terms({p.leading()});
    }
  }
  return r;
}

std::optional<Poly> divide_exact(const Poly& f, const Poly& g) {
  if (g.is_zero()) return std::nullopt;
  if (f.is_zero()) return Poly();
  Poly p = f, q;
  const Term& lg = g.leading();
  while (!p.is_zero()) {
    if (!mono_divides(lg.m, p.leading().m)) return std::nullopt;
    Term t{mono_div(p.leading().m, lg.m), p.leading().c / lg.c};
    q += Poly::from_terms({t});
    p -= g.mul_term(t);
  }
  return q;
}

std::optional<Poly> poly_sqrt(const Poly& f) {
  if (f.is_zero()) return Poly();
  const Term& lt = f.leading();
  auto c = rational_sqrt(lt.c);
  if (!c) return std::nullopt;
  Monomial m;
  for (auto& [k, x] : lt.m.e) {
    if (x % 2 != 0) return std::nullopt;
    m.e.emplace_back(k, x / 2);
  }
  Poly s = Poly::from_terms({Term{m, *c}});
  Poly two_s = s.mul_scalar(2);
  Poly r = f - s * s;
  size_t guard = f.term_count() * f.term_count() + 16;
  while (!r.is_zero()) {
    if (guard-- == 0) return std::nullopt;
    const Term& lr = r.leading();
    const Term& l2s = two_s.leading();
    if (!mono_divides(l2s.m, lr.m)) return std::nullopt;
    Term t{mono_div(lr.m, l2s.m), lr.c / l2s.c};
    // next approximation must strictly lower the remainder's lead
    s += Poly::from_terms({t});
    two_s = s.mul_scalar(2);
    Poly r2 = f - s * s;
    if (!r2.is_zero() && !mono_degrevlex_greater(r.leading().m, r2.leading().m))
      return std::nullopt;
    r = std::move(r2);
  }
  if (s.leading().c < 0) s = -s;
  return s;
}

// ---------------------------------------------------------------------------
// gcd (primitive PRS)
// ---------------------------------------------------------------------------

namespace {

// pseudo-remainder of f by g in variable x (both with positive degree in x)
Poly prem(const Poly& f, const Poly& g, AtomKey x) {
  auto gc = g.coeffs_in(x);
  int32_t dg = gc.rbegin()->first;
  Poly lcg = gc.rbegin()->second;
  Poly r = f;
  while (!r.is_zero()) {
    auto rc = r.coeffs_in(x);
    int32_t dr = rc.rbegin()->first;
    if (dr < dg) break;
    Poly lcr = rc.rbegin()->second;
    // r = lcg * r - lcr * x^(dr-dg) * g
    r = lcg * r - (lcr * Poly::atom(x, dr - dg)) * g;
  }
  return r;
}

Poly gcd_impl(Poly a, Poly b);

// gcd of all x-coefficients of f
Poly coeff_content(const Poly& f, AtomKey x) {
  Poly c;
  for (auto& [d, p] : f.coeffs_in(x)) {
    c = gcd_impl(c, p);
    if (c.is_nonzero_constant()) break;
  }
  return c;
}

Poly gcd_impl(Poly a, Poly b) {
  if (a.is_zero()) return b.is_zero() ? Poly() : content_primitive(b).primitive;
  if (b.is_zero()) return content_primitive(a).primitive;
  a = content_primitive(a).primitive;
  b = content_primitive(b).primitive;
  if (a.is_constant() || b.is_constant()) return Poly::constant(1);
  // main variable: the most significant atom present in either
  AtomKey x = std::min(*a.atoms().begin(), *b.atoms().begin());
  bool in_a = a.contains_atom(x), in_b = b.contains_atom(x);
  if (!in_a || !in_b) {
    // x only occurs in one: gcd divides that one's x-coefficients
    const Poly& with = in_a ? a : b;
    const Poly& other = in_a ? b : a;
    return gcd_impl(coeff_content(with, x), other);
  }
  Poly ca = coeff_content(a, x), cb = coeff_content(b, x);
  Poly cont = gcd_impl(ca, cb);
  Poly fa = *divide_exact(a, ca);
  Poly fb = *divide_exact(b, cb);
  if (fa.degree_in(x) < fb.degree_in(x)) std::swap(fa, fb);
  while (!fb.is_zero()) {
    Poly r = prem(fa, fb, x);
    fa = std::move(fb);
    if (r.is_zero()) { fb = Poly(); break; }
    // primitive part w.r.t. x
    Poly rc = coeff_content(r, x);
    fb = *divide_exact(r, rc);
    if (fb.degree_in(x) == 0) { fa = Poly::constant(1); fb = Poly(); break; }
  }
  Poly g = content_primitive(fa).primitive;
  // strip residual x-content so g is primitive in x
  Poly gc = coeff_content(g, x);
  if (!gc.is_nonzero_constant() || gc.constant_value() != 1) {
    g = *divide_exact(g, gc);
    g = content_primitive(g).primitive;
  }
  return cont * g;
}

} // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  Poly g = gcd_impl(a, b);
  if (!g.is_zero() && g.leading().c < 0) g = -g;
  return g;
}

// ---------------------------------------------------------------------------
// factor splitting
// ---------------------------------------------------------------------------

namespace {

void split_rec(const Poly& f, std::vector<Poly>& out) {
  if (f.is_constant()) return;
  ContentSplit cs = content_primitive(f);
  for (auto& [k, x] : cs.mono.e) {
    if (key_is_unit_atom(k)) {
      out.push_back(Poly::atom(k, x)); // unit factor, kept for exactness
    } else {
      for (int32_t i = 0; i < x; ++i) out.push_back(Poly::atom(k));
    }
  }
  const Poly& p = cs.primitive;
  if (p.is_constant()) return;

  // linear extraction: p = A*x + B with A | B
  for (AtomKey x : p.atoms()) {
    if (key_is_unit_atom(x)) continue;
    auto co = p.coeffs_in(x);
    if (co.rbegin()->first != 1 || co.size() > 2) continue;
    Poly A = co[1];
    Poly B = co.count(0) ? co[0] : Poly();
    if (A.is_constant()) continue; // nothing to extract
    auto q = divide_exact(B, A);
    if (!q) continue;
    // p = A * (x + B/A)
    Poly lin = Poly::atom(x) + *q;
    split_rec(A, out);
    split_rec(lin, out);
    return;
  }

  // quadratic in one variable with constant leading coefficient and
  // perfect-square discriminant
  for (AtomKey x : p.atoms()) {
    if (key_is_unit_atom(x)) continue;
    auto co = p.coeffs_in(x);
    if (co.rbegin()->first != 2) continue;
    Poly A = co[2];
    if (!A.is_nonzero_constant()) continue;
    Poly B = co.count(1) ? co[1] : Poly();
    Poly C = co.count(0) ? co[0] : Poly();
    Poly disc = B * B - A * C.mul_scalar(4);
    auto D = poly_sqrt(disc);
    if (!D) continue;
    Rational a2 = A.constant_value() * 2;
    Poly f1 = Poly::atom(x).mul_scalar(a2) + B - *D;
    Poly f2 = Poly::atom(x).mul_scalar(a2) + B + *D;
    if (f1.is_zero() || f2.is_zero()) continue; // degenerate: p was A*x^2 form handled by monomial
    split_rec(f1, out);
    split_rec(f2, out);
    return;
  }

  out.push_back(p);
}

} // namespace

std::vector<Poly> try_split_product(const Poly& f) {
  if (f.is_zero()) throw ZeroInput();
  std::vector<Poly> out;
  split_rec(f, out);
  if (out.empty()) out.push_back(content_primitive(f).primitive);
  return out;
}

// ---------------------------------------------------------------------------
// RatFunc
// ---------------------------------------------------------------------------

RatFunc::RatFunc(Poly n, Poly d) {
  if (d.is_zero()) throw std::runtime_error("RatFunc: zero denominator");
  if (n.is_zero()) {
    num = Poly();
    den = Poly::constant(1);
    return;
  }
  if (d.is_constant()) {
    num = n.mul_scalar(Rational(1) / d.constant_value());
    den = Poly::constant(1);
    return;
  }
  Poly g = poly_gcd(n, d);
  if (!g.is_nonzero_constant() || g.constant_value() != 1) {
    n = *divide_exact(n, g);
    d = *divide_exact(d, g);
  }
  // normalize: den has content 1 and positive leading coefficient
  ContentSplit cd = content_primitive(d);
  // unit-atom monomial parts of den are invertible: move to num
  Monomial unit_part, rest;
  for (auto& [k, x] : cd.mono.e) {
    if (key_is_unit_atom(k)) unit_part.e.emplace_back(k, -x);
    else rest.e.emplace_back(k, x);
  }
  n = n.mul_term(Term{unit_part, Rational(1) / cd.content});
  std::vector<Term> dts;
  for (auto& t : cd.primitive.terms()) dts.push_back(Term{mono_mul(t.m, rest), t.c});
  num = std::move(n);
  den = Poly::from_terms(std::move(dts));
}

RatFunc rf_add(const RatFunc& a, const RatFunc& b) {
  return RatFunc(a.num * b.den + b.num * a.den, a.den * b.den);
}
RatFunc rf_sub(const RatFunc& a, const RatFunc& b) {
  return RatFunc(a.num * b.den - b.num * a.den, a.den * b.den);
}
RatFunc rf_mul(const RatFunc& a, const RatFunc& b) {
  return RatFunc(a.num * b.num, a.den * b.den);
}
RatFunc rf_div(const RatFunc& a, const RatFunc& b) {
  if (b.num.is_zero()) throw std::runtime_error("RatFunc: division by zero");
  return RatFunc(a.num * b.den, a.den * b.num);
}
RatFunc rf_neg(const RatFunc& a) {
  RatFunc r = a;
  r.num = -r.num;
  return r;
}

RatFunc subst_ratfunc(const Poly& f, const std::map<AtomKey, RatFunc>& repl) {
  RatFunc out{Poly()};
  for (auto& t : f.terms()) {
    RatFunc term{Poly::constant(t.c)};
    for (auto& [k, x] : t.m.e) {
      auto it = repl.find(k);
      if (it == repl.end()) {
        term = rf_mul(term, RatFunc(Poly::atom(k, x)));
      } else {
        RatFunc p{Poly::constant(1)};
        int32_t n = x >= 0 ? x : -x;
        for (int32_t i = 0; i < n; ++i) p = rf_mul(p, it->second);
        term = x >= 0 ? rf_mul(term, p) : rf_div(term, p);
      }
    }
    out = rf_add(out, term);
  }
  return out;
}

// ---------------------------------------------------------------------------
// AtomTable
// ---------------------------------------------------------------------------

AtomKey AtomTable::intern(const std::string& tag, AtomKind kind, Arg arg,
                          int a, int b, const std::string& name, int rate_idx,
                          uint16_t root_tag) {
  auto it = index_.find(tag);
  if (it != index_.end()) return it->second;
  AtomId id = AtomId(atoms_.size());
  AtomKey key = make_key(id, kind, arg, root_tag);
  atoms_.push_back(AtomData{kind, arg, a, b, name, rate_idx, key});
  index_.emplace(tag, key);
  return key;
}

AtomKey AtomTable::entry_func(int row, int col, Arg arg) {
  return intern("EF:" + std::to_string(row) + ":" + std::to_string(col) + ":" +
                    arg_suffix(arg),
                AtomKind::EntryFunc, arg, row, col, "", -1, kRootNone);
}

AtomKey AtomTable::entry_deriv(int row, int col, Arg arg) {
  return intern("ED:" + std::to_string(row) + ":" + std::to_string(col) + ":" +
                    arg_suffix(arg),
                AtomKind::EntryDeriv, arg, row, col, "", -1, kRootNone);
}

AtomKey AtomTable::init_deriv(int row, int col) {
  return intern("ID:" + std::to_string(row) + ":" + std::to_string(col),
                AtomKind::InitDeriv, Arg::Zero, row, col, "", -1, kRootNone);
}

AtomKey AtomTable::free_func(int k, Arg arg) {
  return intern("FF:" + std::to_string(k) + ":" + arg_suffix(arg),
                AtomKind::FreeFunc, arg, k, 0, "", -1, kRootNone);
}

AtomKey AtomTable::free_func_deriv(int k, Arg arg) {
  return intern("FD:" + std::to_string(k) + ":" + arg_suffix(arg),
                AtomKind::FreeFuncDeriv, arg, k, 0, "", -1, kRootNone);
}

AtomKey AtomTable::spectral(int idx) {
  return intern("SV:" + std::to_string(idx), AtomKind::SpectralVar,
                idx == 0 ? Arg::U : Arg::V, idx, 0, idx == 0 ? "u" : "v", -1,
                kRootNone);
}

AtomKey AtomTable::seed_param(const std::string& name) {
  return intern("P:" + name, AtomKind::SeedParam, Arg::Zero, 0, 0, name, -1,
                kRootNone);
}

AtomKey AtomTable::integration_const(int k) {
  return intern("C:" + std::to_string(k), AtomKind::IntegrationConst, Arg::Zero,
                k, 0, "c" + std::to_string(k), -1, kRootNone);
}

AtomKey AtomTable::root_const(uint16_t tag) {
  std::string name = (tag == kRootImag) ? "I" : "sqrt2";
  return intern("RC:" + name, AtomKind::RootConst, Arg::Zero, 0, 0, name, -1,
                tag);
}

int AtomTable::intern_rate(const RatFunc& r) {
  std::string key = ratfunc_to_string(r, *this);
  auto it = rate_index_.find(key);
  if (it != rate_index_.end()) return it->second;
  int idx = int(rates_.size());
  rates_.push_back(r);
  rate_index_.emplace(std::move(key), idx);
  return idx;
}

AtomKey AtomTable::exp_atom_key(const RatFunc& rate, Arg arg) {
  int idx = intern_rate(rate);
  return intern("E:" + std::to_string(idx) + ":" + arg_suffix(arg),
                AtomKind::ExpAtom, arg, idx, 0, "", idx, kRootNone);
}

Poly AtomTable::exp_atom(const RatFunc& rate, Arg arg) {
  if (rate.num.is_zero() || arg == Arg::Zero) return Poly::constant(1);
  if (arg == Arg::UPV)
    return Poly::atom(exp_atom_key(rate, Arg::U)) *
           Poly::atom(exp_atom_key(rate, Arg::V));
  return Poly::atom(exp_atom_key(rate, arg));
}

std::string AtomTable::atom_name(AtomKey k) const {
  const AtomData& d = data(k);
  switch (d.kind) {
    case AtomKind::EntryFunc:
      return "R[" + std::to_string(d.a) + "," + std::to_string(d.b) + "](" +
             arg_suffix(d.arg) + ")";
    case AtomKind::EntryDeriv:
      return "R'[" + std::to_string(d.a) + "," + std::to_string(d.b) + "](" +
             arg_suffix(d.arg) + ")";
    case AtomKind::InitDeriv:
      return "R'[" + std::to_string(d.a) + "," + std::to_string(d.b) + "](0)";
    case AtomKind::FreeFunc:
      return "r" + std::to_string(d.a) + "(" + arg_suffix(d.arg) + ")";
    case AtomKind::FreeFuncDeriv:
      return "r" + std::to_string(d.a) + "'(" + arg_suffix(d.arg) + ")";
    case AtomKind::SpectralVar:
    case AtomKind::SeedParam:
    case AtomKind::IntegrationConst:
    case AtomKind::RootConst:
      return d.name;
    case AtomKind::ExpAtom:
      return "exp[" + ratfunc_to_string(rates_.at(d.rate), *this) + "](" +
             arg_suffix(d.arg) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

std::string poly_to_string(const Poly& f, const AtomTable& tab) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& t : f.terms()) {
    Rational c = t.c;
    if (first) {
      if (c < 0) { os << "-"; c = -c; }
    } else {
      os << (c < 0 ? " - " : " + ");
      if (c < 0) c = -c;
    }
    first = false;
    bool printed = false;
    if (c != 1 || t.m.is_one()) {
      os << to_string(c);
      printed = true;
    }
    for (auto& [k, x] : t.m.e) {
      if (printed) os << "*";
      os << tab.atom_name(k);
      if (x != 1) os << "^" << x;
      printed = true;
    }
  }
  return os.str();
}

std::string ratfunc_to_string(const RatFunc& f, const AtomTable& tab) {
  if (f.is_poly()) return poly_to_string(f.num, tab);
  return "(" + poly_to_string(f.num, tab) + ")/(" +
         poly_to_string(f.den, tab) + ")";
}

} // namespace ybx
