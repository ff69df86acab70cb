#include "ybx/symmetry.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <map>

#include "ybx/groebner.hpp"

namespace ybx {

RfMatrix to_rf(const PolyMatrix& m) {
  RfMatrix r(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) r.at(i, j) = RatFunc(m.at(i, j));
  return r;
}

PolyMatrix clear_denominators(const RfMatrix& m,
                              std::vector<Poly>* side_conditions) {
  Poly l = Poly::constant(1);
  for (auto& e : m.e) {
    if (e.is_zero()) continue;
    Poly g = poly_gcd(l, e.den);
    l = l * *divide_exact(e.den, g);
  }
  PolyMatrix out(m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) {
      const RatFunc& e = m.at(i, j);
      if (e.is_zero()) continue;
      out.at(i, j) = e.num * *divide_exact(l, e.den);
    }
  if (side_conditions && !l.is_constant())
    side_conditions->push_back(strip_content_and_units(l));
  return out;
}

std::string Transform::str() const {
  switch (kind) {
    case Kind::P: return "P";
    case Kind::T: return "T";
    case Kind::C: return "C^" + std::to_string(shift);
    case Kind::Inversion: return "Inv";
    case Kind::Similarity: return "K(a,b,c,g)";
  }
  return "?";
}

RMatrixSymbolic apply_pct(const RMatrixSymbolic& r, Transform::Kind kind,
                          int shift) {
  const int n = r.n;
  RMatrixSymbolic out(n, r.arg);
  auto mod = [&](int x) { return (x - 1 + shift) % n + 1; };
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l) {
          HietarintaIndex src;
          switch (kind) {
            case Transform::Kind::P: src = {k, l, i, j}; break;
            case Transform::Kind::T: src = {j, i, l, k}; break;
            case Transform::Kind::C: src = {mod(i), mod(j), mod(k), mod(l)}; break;
            default:
              throw std::runtime_error("apply_pct: not a P/C/T transform");
          }
          out.m.at(hiet_row({i, j, k, l}, n) - 1, hiet_col({i, j, k, l}, n) - 1) =
              r.m.at(hiet_row(src, n) - 1, hiet_col(src, n) - 1);
        }
  return out;
}

namespace {

RfMatrix rf_mat_mul(const RfMatrix& a, const RfMatrix& b) {
  RfMatrix r(a.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int k = 0; k < a.dim(); ++k) {
      const RatFunc& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < a.dim(); ++j) {
        if (b.at(k, j).is_zero()) continue;
        r.at(i, j) = rf_add(r.at(i, j), rf_mul(aik, b.at(k, j)));
      }
    }
  return r;
}

RfMatrix kron2(const RfMatrix& a, const RfMatrix& b) {
  RfMatrix r(a.dim() * b.dim());
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) {
      if (a.at(i, j).is_zero()) continue;
      for (int k = 0; k < b.dim(); ++k)
        for (int l = 0; l < b.dim(); ++l) {
          if (b.at(k, l).is_zero()) continue;
          r.at(i * b.dim() + k, j * b.dim() + l) = rf_mul(a.at(i, j), b.at(k, l));
        }
    }
  return r;
}

} // namespace

RfMatrix apply_similarity(const RMatrixSymbolic& r, const RatFunc& a,
                          const RatFunc& b, const RatFunc& c, const RatFunc& g) {
  if (a.is_zero()) throw SingularK();
  if (r.n != 2) throw DimensionMismatch();
  // K' = a*K(a,b,c) keeps entries polynomial; det K' = a^2, so
  // (K x K) R (K x K)^{-1} = (K' x K') R adj(K' x K') / a^4.
  RatFunc a2 = rf_mul(a, a);
  RfMatrix kp(2), kadj(2);
  kp.at(0, 0) = a2;
  kp.at(0, 1) = rf_mul(a2, b);
  kp.at(1, 0) = c;
  kp.at(1, 1) = rf_add(rf_mul(c, b), RatFunc{Poly::constant(1)});
  kadj.at(0, 0) = kp.at(1, 1);
  kadj.at(0, 1) = rf_neg(kp.at(0, 1));
  kadj.at(1, 0) = rf_neg(kp.at(1, 0));
  kadj.at(1, 1) = kp.at(0, 0);
  RfMatrix kk = kron2(kp, kp), nn = kron2(kadj, kadj);
  RfMatrix m = rf_mat_mul(rf_mat_mul(kk, to_rf(r.m)), nn);
  RatFunc scale = rf_div(g, rf_mul(a2, a2));
  for (auto& e : m.e) e = rf_mul(e, scale);
  return m;
}

RfMatrix invert_r(const RMatrixSymbolic& r) {
  Poly det = poly_det(r.m);
  if (det.is_zero()) throw SingularMatrix();
  PolyMatrix adj = poly_adjugate(r.m);
  RfMatrix out(r.dim());
  for (int i = 0; i < r.dim(); ++i)
    for (int j = 0; j < r.dim(); ++j) out.at(i, j) = RatFunc(adj.at(i, j), det);
  return out;
}

namespace {

bool matrix_spectral_free(const PolyMatrix& m) {
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      if (!spectral_free(m.at(i, j))) return false;
  return true;
}

bool verify_any(const PolyMatrix& m, int n, AtomTable& tab) {
  RMatrixSymbolic r(n, Arg::U);
  r.m = m;
  if (matrix_spectral_free(m)) {
    r.arg = Arg::Zero;
    return verify_constant(r, tab).passed;
  }
  return verify_spectral(r, tab).passed;
}

} // namespace

bool ybe_preserved_under(const RMatrixSymbolic& r, const Transform& t,
                         AtomTable& tab) {
  switch (t.kind) {
    case Transform::Kind::P:
    case Transform::Kind::C:
    case Transform::Kind::T: {
      RMatrixSymbolic s = apply_pct(r, t.kind, t.shift);
      return verify_any(s.m, r.n, tab);
    }
    case Transform::Kind::Similarity: {
      RfMatrix s = apply_similarity(r, t.a, t.b, t.c, t.g);
      return verify_any(clear_denominators(s), r.n, tab);
    }
    case Transform::Kind::Inversion: {
      RfMatrix s = invert_r(r);
      return verify_any(clear_denominators(s), r.n, tab);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// canonicalization
// ---------------------------------------------------------------------------

namespace {

// the entry-permutation group generated by P, C, T (order <= 16 for N = 2)
struct OrbitElem {
  std::vector<int> perm; // target flat position -> source flat position
  std::vector<Transform> chain;
};

std::vector<int> perm_of(Transform::Kind k, int n) {
  const int d = n * n;
  std::vector<int> p(size_t(d) * d);
  auto mod = [&](int x) { return x % n + 1; };
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int kk = 1; kk <= n; ++kk)
        for (int l = 1; l <= n; ++l) {
          HietarintaIndex src;
          switch (k) {
            case Transform::Kind::P: src = {kk, l, i, j}; break;
            case Transform::Kind::T: src = {j, i, l, kk}; break;
            default: src = {mod(i), mod(j), mod(kk), mod(l)}; break; // C
          }
          int dst = (hiet_row({i, j, kk, l}, n) - 1) * d +
                    (hiet_col({i, j, kk, l}, n) - 1);
          p[dst] = (hiet_row(src, n) - 1) * d + (hiet_col(src, n) - 1);
        }
  return p;
}

std::vector<OrbitElem> pct_group(int n) {
  const int d = n * n;
  std::vector<int> id(size_t(d) * d);
  for (size_t i = 0; i < id.size(); ++i) id[i] = int(i);
  std::vector<OrbitElem> group{{id, {}}};
  std::map<std::vector<int>, size_t> seen{{id, 0}};
  std::vector<std::pair<Transform::Kind, std::vector<int>>> gens = {
      {Transform::Kind::P, perm_of(Transform::Kind::P, n)},
      {Transform::Kind::C, perm_of(Transform::Kind::C, n)},
      {Transform::Kind::T, perm_of(Transform::Kind::T, n)}};
  for (size_t head = 0; head < group.size(); ++head) {
    for (auto& [kind, gp] : gens) {
      // compose: apply g after group[head]
      std::vector<int> np(gp.size());
      for (size_t t = 0; t < gp.size(); ++t) np[t] = group[head].perm[gp[t]];
      if (seen.count(np)) continue;
      OrbitElem e;
      e.perm = np;
      e.chain = group[head].chain;
      Transform tr;
      tr.kind = kind;
      e.chain.push_back(tr);
      seen.emplace(np, group.size());
      group.push_back(std::move(e));
    }
  }
  return group;
}

// canonical atom renaming: free functions, integration constants and
// leftover initial-derivative atoms are relabeled in first-occurrence order.
// Constants first met with a negative sign inside an exp rate absorb that
// sign into the relabeling.
struct Renamer {
  AtomTable& tab;
  std::map<AtomKey, Poly> map;
  int next_ff = 1, next_c = 1;

  explicit Renamer(AtomTable& t) : tab(t) {}

  void see_rate(const RatFunc& r) {
    for (auto& t : r.num.terms())
      for (auto& [k, x] : t.m.e) see_atom(k, t.c < 0);
    see_poly(r.den);
  }
  void see_poly(const Poly& p) {
    for (auto& t : p.terms())
      for (auto& [k, x] : t.m.e) see_atom(k, false);
  }
  void see_atom(AtomKey k, bool negative) {
    if (map.count(k)) return;
    AtomKind kd = key_kind(k);
    const AtomData& d = tab.data(k);
    switch (kd) {
      case AtomKind::ExpAtom:
        map.emplace(k, Poly::atom(k)); // placeholder so rates walk once
        see_rate(tab.rate(d.rate));
        break;
      case AtomKind::FreeFunc:
      case AtomKind::FreeFuncDeriv: {
        // one index per function, shared by every argument tag
        for (Arg a : {Arg::Zero, Arg::U, Arg::V, Arg::UPV}) {
          map.emplace(tab.free_func(d.a, a),
                      Poly::atom(tab.free_func(next_ff, a)));
          map.emplace(tab.free_func_deriv(d.a, a),
                      Poly::atom(tab.free_func_deriv(next_ff, a)));
        }
        ++next_ff;
        break;
      }
      case AtomKind::IntegrationConst:
      case AtomKind::InitDeriv: {
        Poly fresh = Poly::atom(tab.integration_const(next_c++));
        map.emplace(k, negative ? -fresh : fresh);
        break;
      }
      default:
        map.emplace(k, Poly::atom(k));
    }
  }

  Poly apply(const Poly& p) {
    Poly out;
    for (auto& t : p.terms()) {
      Poly term = Poly::constant(t.c);
      for (auto& [k, x] : t.m.e) {
        if (key_kind(k) == AtomKind::ExpAtom) {
          const AtomData& d = tab.data(k);
          RatFunc rate(apply(tab.rate(d.rate).num), apply(tab.rate(d.rate).den));
          Poly base = tab.exp_atom(rate, d.arg);
          if (x >= 0) {
            term = term * base.pow(uint32_t(x));
          } else {
            Poly inv = tab.exp_atom(RatFunc(-rate.num, rate.den), d.arg);
            term = term * inv.pow(uint32_t(-x));
          }
        } else {
          auto it = map.find(k);
          if (it == map.end()) {
            term = term * Poly::atom(k, x);
          } else {
            if (x < 0) throw std::runtime_error("rename: negative power");
            term = term * it->second.pow(uint32_t(x));
          }
        }
      }
      out += term;
    }
    return out;
  }
  RatFunc apply(const RatFunc& r) { return RatFunc(apply(r.num), apply(r.den)); }
};

// Rewrites multiplicative combinations of free functions (after gauge
// division: ratios like r1/r2) into single fresh free functions when the
// reparametrization is a bijection on the family (pairwise-disjoint
// supports, one primitive direction each). Leaves everything untouched on
// any irregularity.
void collapse_free_monomials(std::vector<RatFunc>& entries, AtomTable& tab) {
  using Expo = std::map<AtomKey, int32_t>;
  auto ff_part = [&](const Monomial& m, Expo& out) {
    for (auto& [k, x] : m.e) {
      if (key_kind(k) == AtomKind::FreeFuncDeriv) return false;
      if (key_kind(k) == AtomKind::FreeFunc) out[k] += x;
    }
    return true;
  };
  struct View {
    const RatFunc* src;
    Expo den_ff;                 // uniform free-function part of den
    std::vector<Expo> term_ff;   // per num term: Laurent part (num - den)
  };
  std::vector<View> views;
  std::vector<Expo> dirs;
  for (auto& e : entries) {
    if (e.is_zero()) continue;
    View v;
    v.src = &e;
    bool first = true;
    for (auto& t : e.den.terms()) {
      Expo p;
      if (!ff_part(t.m, p)) return;
      if (first) { v.den_ff = p; first = false; }
      else if (p != v.den_ff) return;
    }
    for (auto& t : e.num.terms()) {
      Expo p;
      if (!ff_part(t.m, p)) return;
      for (auto& [k, x] : v.den_ff) p[k] -= x;
      for (auto it = p.begin(); it != p.end();)
        it = it->second == 0 ? p.erase(it) : std::next(it);
      if (!p.empty()) {
        // primitive direction, oriented so the discovering occurrence gets a
        // positive power of the fresh function
        int64_t g = 0;
        for (auto& [k, x] : p) g = std::gcd(g, int64_t(x < 0 ? -x : x));
        Expo dir, neg;
        for (auto& [k, x] : p) { dir[k] = int32_t(x / g); neg[k] = int32_t(-x / g); }
        bool known = false;
        for (auto& d : dirs)
          if (d == dir || d == neg) { known = true; break; }
        if (!known) dirs.push_back(dir);
      }
      v.term_ff.push_back(std::move(p));
    }
    views.push_back(std::move(v));
  }
  if (dirs.empty()) return;
  std::set<AtomKey> support;
  for (auto& d : dirs)
    for (auto& [k, x] : d) {
      if (support.count(k)) return; // overlapping supports: keep as-is
      support.insert(k);
    }
  // deterministic fresh indices in direction-discovery order
  std::vector<std::pair<Expo, AtomKey>> repl;
  for (size_t i = 0; i < dirs.size(); ++i)
    repl.emplace_back(dirs[i], tab.free_func(int(100 + i), Arg::U));
  // exact decomposition of a Laurent part into direction powers
  auto decompose = [&](const Expo& p, std::map<AtomKey, int32_t>& powers) {
    Expo rem = p;
    for (auto& [dir, fresh] : repl) {
      auto it0 = rem.find(dir.begin()->first);
      if (it0 == rem.end()) continue;
      int32_t q = it0->second / dir.begin()->second;
      if (q * dir.begin()->second != it0->second) return false;
      for (auto& [k, x] : dir) {
        auto r = rem.find(k);
        if (r == rem.end() || r->second != x * q) return false;
        rem.erase(r);
      }
      if (q != 0) powers[fresh] = q;
    }
    return rem.empty();
  };
  std::vector<RatFunc> out(entries.size());
  size_t vi = 0;
  for (size_t ei = 0; ei < entries.size(); ++ei) {
    if (entries[ei].is_zero()) { out[ei] = entries[ei]; continue; }
    const View& v = views[vi++];
    // per-term powers, then shift so all exponents are nonnegative
    std::vector<std::map<AtomKey, int32_t>> powers(v.term_ff.size());
    std::map<AtomKey, int32_t> minpow;
    for (size_t t = 0; t < v.term_ff.size(); ++t) {
      if (!decompose(v.term_ff[t], powers[t])) return;
      for (auto& [fk, q] : powers[t]) {
        auto mp = minpow.find(fk);
        if (mp == minpow.end()) minpow[fk] = std::min(q, 0);
        else mp->second = std::min(mp->second, q);
      }
    }
    Poly num;
    size_t t = 0;
    for (auto& term : v.src->num.terms()) {
      Term nt{Monomial{}, term.c};
      for (auto& [k, x] : term.m.e)
        if (key_kind(k) != AtomKind::FreeFunc) nt.m.e.emplace_back(k, x);
      for (auto& [fk, mq] : minpow) {
        int32_t q = powers[t].count(fk) ? powers[t][fk] : 0;
        if (q - mq != 0) nt.m.e.emplace_back(fk, q - mq);
      }
      std::sort(nt.m.e.begin(), nt.m.e.end());
      num += Poly::from_terms({nt});
      ++t;
    }
    Poly den;
    {
      // strip the free-function part of den, then append the shifts
      std::vector<Term> dts;
      for (auto& term : v.src->den.terms()) {
        Term dt{Monomial{}, term.c};
        for (auto& [k, x] : term.m.e)
          if (key_kind(k) != AtomKind::FreeFunc) dt.m.e.emplace_back(k, x);
        dts.push_back(std::move(dt));
      }
      den = Poly::from_terms(std::move(dts));
      for (auto& [fk, mq] : minpow)
        if (mq < 0) den = den * Poly::atom(fk, -mq);
    }
    if (den.is_zero()) return;
    out[ei] = RatFunc(std::move(num), std::move(den));
  }
  entries = std::move(out);
}

std::string serialize_gauged(const std::vector<RatFunc>& entries,
                             AtomTable& tab) {
  std::string s;
  for (auto& e : entries) {
    s += ratfunc_to_string(e, tab);
    s += ';';
  }
  return s;
}

std::vector<RatFunc> permuted_entries(const RMatrixSymbolic& r,
                                      const std::vector<int>& perm,
                                      bool gauge) {
  const int d = r.dim();
  std::vector<RatFunc> es(size_t(d) * d);
  for (int t = 0; t < d * d; ++t)
    es[t] = RatFunc(r.m.at(perm[t] / d, perm[t] % d));
  if (gauge) {
    const RatFunc* first = nullptr;
    for (auto& e : es)
      if (!e.is_zero()) { first = &e; break; }
    if (first) {
      RatFunc f = *first;
      for (auto& e : es)
        if (!e.is_zero()) e = rf_div(e, f);
    }
  }
  return es;
}

} // namespace

CanonicalForm canonicalize(const RMatrixSymbolic& r, AtomTable& tab,
                           bool gauge_normalize) {
  auto group = pct_group(r.n);
  CanonicalForm best;
  for (auto& el : group) {
    auto es = permuted_entries(r, el.perm, gauge_normalize);
    if (gauge_normalize) collapse_free_monomials(es, tab);
    Renamer ren(tab);
    for (auto& e : es) {
      for (auto& t : e.num.terms())
        for (auto& [k, x] : t.m.e) ren.see_atom(k, false);
      for (auto& t : e.den.terms())
        for (auto& [k, x] : t.m.e) ren.see_atom(k, false);
    }
    for (auto& e : es) e = ren.apply(e);
    std::string key = serialize_gauged(es, tab);
    if (best.key.empty() || key < best.key) {
      best.key = std::move(key);
      best.witness = el.chain;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// similarity equivalence
// ---------------------------------------------------------------------------

namespace {

// gauge-invariant trace ratio tr(R)^2 / tr(R^2) when both are nonzero
std::optional<RatFunc> trace_ratio(const PolyMatrix& m) {
  Poly tr, tr2;
  for (int i = 0; i < m.dim(); ++i) tr += m.at(i, i);
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) tr2 += m.at(i, j) * m.at(j, i);
  if (tr2.is_zero()) return std::nullopt;
  return RatFunc(tr * tr, tr2);
}

bool cross_ratios_match(const PolyMatrix& a, const PolyMatrix& b) {
  // proportional as matrices: a_e * b_f == a_f * b_e for all entries
  int d = a.dim();
  int e0 = -1;
  for (int t = 0; t < d * d && e0 < 0; ++t)
    if (!a.at(t / d, t % d).is_zero() || !b.at(t / d, t % d).is_zero()) e0 = t;
  if (e0 < 0) return true; // both zero
  const Poly& ae = a.at(e0 / d, e0 % d);
  const Poly& be = b.at(e0 / d, e0 % d);
  if (ae.is_zero() || be.is_zero()) return false;
  for (int t = 0; t < d * d; ++t) {
    if (t == e0) continue;
    const Poly& af = a.at(t / d, t % d);
    const Poly& bf = b.at(t / d, t % d);
    if (ae * bf != be * af) return false;
  }
  return true;
}

const std::vector<Rational>& grid_a() {
  static const std::vector<Rational> v = {1, -1, 2, Rational(1, 2), 3, -2,
                                          Rational(1, 3)};
  return v;
}
const std::vector<Rational>& grid_bc() {
  static const std::vector<Rational> v = {0,  1, -1, 2,
                                          -2, 3, Rational(1, 2), -3};
  return v;
}

} // namespace

EquivalenceReport equivalent_mod_similarity(const RMatrixSymbolic& r1,
                                            const RMatrixSymbolic& r2,
                                            AtomTable& tab) {
  EquivalenceReport rep;
  if (r1.dim() != r2.dim()) {
    rep.verdict = EquivalenceReport::Verdict::Distinct;
    rep.detail = "dimension mismatch";
    return rep;
  }
  int k1 = symbolic_rank(r1.m), k2 = symbolic_rank(r2.m);
  if (k1 != k2) {
    rep.verdict = EquivalenceReport::Verdict::Distinct;
    rep.detail = "rank certificate: " + std::to_string(k1) +
                 " != " + std::to_string(k2);
    return rep;
  }
  auto t1 = trace_ratio(r1.m), t2 = trace_ratio(r2.m);
  if (t1 && t2 && t1->num.is_constant() && t1->den.is_constant() &&
      t2->num.is_constant() && t2->den.is_constant() && !(*t1 == *t2)) {
    rep.verdict = EquivalenceReport::Verdict::Distinct;
    rep.detail = "trace-ratio certificate";
    return rep;
  }
  // deterministic rational witness search over K(a,b,c); the scalar gauge is
  // eliminated through cross-ratios, so g may be any function
  for (const Rational& a : grid_a())
    for (const Rational& b : grid_bc())
      for (const Rational& c : grid_bc()) {
        RfMatrix img = apply_similarity(
            r1, RatFunc{Poly::constant(a)}, RatFunc{Poly::constant(b)},
            RatFunc{Poly::constant(c)}, RatFunc{Poly::constant(1)});
        PolyMatrix m = clear_denominators(img);
        if (!cross_ratios_match(m, r2.m)) continue;
        rep.verdict = EquivalenceReport::Verdict::Equivalent;
        Transform w;
        w.kind = Transform::Kind::Similarity;
        w.a = RatFunc{Poly::constant(a)};
        w.b = RatFunc{Poly::constant(b)};
        w.c = RatFunc{Poly::constant(c)};
        // recover the gauge from the first matching nonzero pair
        for (int t = 0; t < m.dim() * m.dim(); ++t) {
          const Poly& me = m.at(t / m.dim(), t % m.dim());
          const Poly& re = r2.m.at(t / m.dim(), t % m.dim());
          if (!me.is_zero() && !re.is_zero()) {
            w.g = RatFunc(re, me);
            break;
          }
        }
        rep.witness = w;
        rep.detail = "similarity witness a=" + to_string(a) +
                     " b=" + to_string(b) + " c=" + to_string(c);
        return rep;
      }
  // Groebner consistency attempt on the entry-proportionality system
  {
    AtomKey a = tab.seed_param("@a"), b = tab.seed_param("@b"),
            c = tab.seed_param("@c");
    RfMatrix img = apply_similarity(r1, RatFunc{Poly::atom(a)},
                                    RatFunc{Poly::atom(b)}, RatFunc{Poly::atom(c)},
                                    RatFunc{Poly::constant(1)});
    PolyMatrix m = clear_denominators(img);
    // cross-ratio equations, coefficient-collected over function atoms
    std::vector<Poly> gens;
    const int d = m.dim();
    int e0 = -1;
    for (int t = 0; t < d * d && e0 < 0; ++t)
      if (!m.at(t / d, t % d).is_zero() && !r2.m.at(t / d, t % d).is_zero())
        e0 = t;
    if (e0 >= 0) {
      for (int t = 0; t < d * d; ++t) {
        if (t == e0) continue;
        Poly eq = m.at(e0 / d, e0 % d) * r2.m.at(t / d, t % d) -
                  r2.m.at(e0 / d, e0 % d) * m.at(t / d, t % d);
        if (!eq.is_zero()) gens.push_back(strip_content_and_units(eq));
      }
      bool has_root = false;
      for (auto& g : gens)
        if (g.contains_kind(AtomKind::RootConst)) has_root = true;
      if (!gens.empty() && !has_root) {
        GroebnerConfig cfg;
        cfg.pair_budget = 3000;
        cfg.degree_cap = 16;
        Basis basis = buchberger(gens, cfg);
        if (basis.status == BasisStatus::Complete && is_inconsistent(basis)) {
          // no (a,b,c) with a != 0 exists only if the ideal saturated by a is
          // inconsistent; the unsaturated unit ideal already implies that
          rep.verdict = EquivalenceReport::Verdict::Distinct;
          rep.detail = "similarity system inconsistent";
          return rep;
        }
      }
    }
  }
  rep.verdict = EquivalenceReport::Verdict::Unknown;
  rep.detail = "witness search exhausted";
  return rep;
}

std::vector<SolutionClass> dedup(const std::vector<RMatrixSymbolic>& sols,
                                 AtomTable& tab) {
  const size_t n = sols.size();
  std::vector<size_t> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::vector<std::string> notes(n);

  // 1) canonical P/C/T forms (gauge-normalized)
  std::map<std::string, size_t> canon;
  std::vector<std::string> keys(n);
  for (size_t i = 0; i < n; ++i) {
    keys[i] = canonicalize(sols[i], tab, true).key;
    auto [it, fresh] = canon.emplace(keys[i], i);
    if (!fresh) {
      parent[find(i)] = find(it->second);
      notes[i] = "P/C/T image of solution " + std::to_string(it->second);
    }
  }

  // 2) pairwise similarity and inversion equivalence between class reps
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (find(i) == find(j)) continue;
      auto rep = equivalent_mod_similarity(sols[i], sols[j], tab);
      if (rep.verdict == EquivalenceReport::Verdict::Equivalent) {
        parent[find(j)] = find(i);
        notes[j] = rep.detail;
        continue;
      }
      // inversion equivalence: compare adjugate(R_i) (inverse up to the
      // scalar gauge det) with R_j
      Poly det = poly_det(sols[i].m);
      if (!det.is_zero()) {
        RMatrixSymbolic inv(sols[i].n, sols[i].arg);
        inv.m = poly_adjugate(sols[i].m);
        if (canonicalize(inv, tab, true).key == keys[j]) {
          parent[find(j)] = find(i);
          notes[j] = "inverse of solution " + std::to_string(i);
          continue;
        }
        auto rep2 = equivalent_mod_similarity(inv, sols[j], tab);
        if (rep2.verdict == EquivalenceReport::Verdict::Equivalent) {
          parent[find(j)] = find(i);
          notes[j] = "inverse; " + rep2.detail;
        }
      }
    }
  }

  std::map<size_t, SolutionClass> classes;
  for (size_t i = 0; i < n; ++i) {
    auto& cl = classes[find(i)];
    cl.members.push_back(i);
    if (!notes[i].empty()) cl.notes.push_back(notes[i]);
  }
  std::vector<SolutionClass> out;
  for (auto& [root, cl] : classes) out.push_back(std::move(cl));
  return out;
}

} // namespace ybx
