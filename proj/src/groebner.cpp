#include "ybx/groebner.hpp"

#include <algorithm>
#include <tuple>

namespace ybx {

namespace {

struct Tracked {
  Poly p;
  std::vector<Poly> rep; // p = sum rep[j] * input[j]
};

// reduce t.p by basis, updating the representation when tracking
Poly reduce_tracked(const Poly& f, const std::vector<Tracked>& basis,
                    std::vector<Poly>* rep_delta, bool track) {
  Poly p = f, r;
  while (!p.is_zero()) {
    bool divided = false;
    for (size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].p.is_zero()) continue;
      const Term& lg = basis[i].p.leading();
      if (mono_divides(lg.m, p.leading().m)) {
        Term q{mono_div(p.leading().m, lg.m), p.leading().c / lg.c};
        p -= basis[i].p.mul_term(q);
        if (track) {
          Poly qp = Poly::from_terms({q});
          for (size_t j = 0; j < rep_delta->size(); ++j)
            (*rep_delta)[j] += qp * basis[i].rep[j];
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

} // namespace

Basis buchberger(const std::vector<Poly>& gens, const GroebnerConfig& cfg) {
  const size_t n_in = gens.size();
  if (n_in == 0) throw std::runtime_error("buchberger: empty generator list");
  std::vector<Tracked> basis;
  Basis result;
  for (size_t i = 0; i < n_in; ++i) {
    if (gens[i].is_zero()) throw std::runtime_error("buchberger: zero generator");
    Tracked t;
    Rational lc = gens[i].leading().c;
    t.p = gens[i].mul_scalar(Rational(1) / lc);
    if (cfg.track_cofactors) {
      t.rep.assign(n_in, Poly());
      t.rep[i] = Poly::constant(Rational(1) / lc);
    }
    basis.push_back(std::move(t));
  }

  // pair queue ordered by (lcm degree, i, j): normal selection strategy
  using PairKey = std::tuple<int64_t, size_t, size_t>;
  std::set<PairKey> pairs;
  auto push_pair = [&](size_t i, size_t j) {
    const Poly& f = basis[i].p;
    const Poly& g = basis[j].p;
    if (f.is_zero() || g.is_zero()) return;
    if (mono_coprime(f.leading().m, g.leading().m)) return; // Buchberger 1
    pairs.insert({mono_lcm(f.leading().m, g.leading().m).total_degree(), i, j});
  };
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j) push_pair(i, j);

  int processed = 0;
  bool exceeded = false;
  while (!pairs.empty()) {
    if (++processed > cfg.pair_budget) { exceeded = true; break; }
    auto [deg, i, j] = *pairs.begin();
    pairs.erase(pairs.begin());
    const Poly& f = basis[i].p;
    const Poly& g = basis[j].p;
    if (f.is_zero() || g.is_zero()) continue;
    Monomial lcm = mono_lcm(f.leading().m, g.leading().m);
    Term tf{mono_div(lcm, f.leading().m), Rational(1) / f.leading().c};
    Term tg{mono_div(lcm, g.leading().m), Rational(1) / g.leading().c};
    Poly s = f.mul_term(tf) - g.mul_term(tg);
    if (s.is_zero()) continue;
    std::vector<Poly> delta;
    if (cfg.track_cofactors) delta.assign(n_in, Poly());
    Poly r = reduce_tracked(s, basis, &delta, cfg.track_cofactors);
    if (r.is_zero()) continue;
    if (r.total_degree() > cfg.degree_cap) { exceeded = true; break; }
    Tracked t;
    Rational lc = r.leading().c;
    t.p = r.mul_scalar(Rational(1) / lc);
    if (cfg.track_cofactors) {
      t.rep.assign(n_in, Poly());
      for (size_t k = 0; k < n_in; ++k) {
        // r = s - sum q*b  =>  rep_r = rep_s - sum q * rep_b
        Poly acc = basis[i].rep[k].mul_term(tf) - basis[j].rep[k].mul_term(tg);
        acc -= delta[k];
        t.rep[k] = acc.mul_scalar(Rational(1) / lc);
      }
    }
    size_t idx = basis.size();
    basis.push_back(std::move(t));
    for (size_t k = 0; k < idx; ++k) push_pair(k, idx);
  }

  // interreduce: drop redundant leading terms, then tail-reduce
  bool changed = true;
  while (changed && !exceeded) {
    changed = false;
    for (size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].p.is_zero()) continue;
      std::vector<Tracked> others;
      std::vector<size_t> omap;
      for (size_t j = 0; j < basis.size(); ++j)
        if (j != i && !basis[j].p.is_zero()) {
          others.push_back(basis[j]);
          omap.push_back(j);
        }
      std::vector<Poly> delta;
      if (cfg.track_cofactors) delta.assign(n_in, Poly());
      // rebuild delta against inputs directly
      Poly r;
      {
        Poly p = basis[i].p;
        while (!p.is_zero()) {
          bool divided = false;
          for (size_t oi = 0; oi < others.size(); ++oi) {
            const Term& lg = others[oi].p.leading();
            if (mono_divides(lg.m, p.leading().m)) {
              Term q{mono_div(p.leading().m, lg.m), p.leading().c / lg.c};
              p -= others[oi].p.mul_term(q);
              if (cfg.track_cofactors) {
                Poly qp = Poly::from_terms({q});
                for (size_t k = 0; k < n_in; ++k)
                  delta[k] += qp * others[oi].rep[k];
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
      }
      if (r != basis[i].p) {
        changed = true;
        if (r.is_zero()) {
          basis[i].p = Poly();
          if (cfg.track_cofactors) basis[i].rep.assign(n_in, Poly());
        } else {
          Rational lc = r.leading().c;
          basis[i].p = r.mul_scalar(Rational(1) / lc);
          if (cfg.track_cofactors)
            for (size_t k = 0; k < n_in; ++k)
              basis[i].rep[k] =
                  (basis[i].rep[k] - delta[k]).mul_scalar(Rational(1) / lc);
        }
      }
    }
  }

  std::vector<size_t> keep;
  for (size_t i = 0; i < basis.size(); ++i)
    if (!basis[i].p.is_zero()) keep.push_back(i);
  std::sort(keep.begin(), keep.end(), [&](size_t a, size_t b) {
    return mono_degrevlex_greater(basis[b].p.leading().m,
                                  basis[a].p.leading().m);
  });
  for (size_t i : keep) {
    result.gens.push_back(basis[i].p);
    if (cfg.track_cofactors) result.cofactors.push_back(basis[i].rep);
  }
  result.status = exceeded ? BasisStatus::BudgetExceeded : BasisStatus::Complete;
  return result;
}

bool is_inconsistent(const Basis& b) {
  for (auto& g : b.gens)
    if (g.is_nonzero_constant()) return true;
  return false;
}

namespace {

void extract_rec(std::vector<Poly> gens, const std::set<AtomKey>& unknowns,
                 Branch cur, int depth, int depth_cap,
                 std::vector<Branch>& out) {
  // normalize
  std::vector<Poly> work;
  for (auto& g : gens) {
    if (g.is_zero()) continue;
    Poly s = strip_content_and_units(g);
    if (s.is_nonzero_constant()) { cur.inconsistent = true; break; }
    work.push_back(s);
  }
  if (cur.inconsistent) {
    out.push_back(std::move(cur));
    return;
  }

  // (a) generator with total degree 1 over the unknown set: solve the first
  // unknown it contains
  auto unknown_pred = [&](AtomKey k) { return unknowns.count(k) > 0; };
  for (size_t i = 0; i < work.size(); ++i) {
    if (work[i].degree_in_class(unknown_pred) != 1) continue;
    for (AtomKey x : unknowns) {
      if (!work[i].contains_atom(x)) continue;
      auto co = work[i].coeffs_in(x);
      Poly A = co.at(1);
      Poly B = co.count(0) ? co[0] : Poly();
      RatFunc val = rf_neg(rf_div(RatFunc(B), RatFunc(A)));
      Branch next = cur;
      if (!A.is_constant()) next.side_conditions.push_back(A);
      // substitute into the other generators (cleared of denominators)
      std::vector<Poly> rest;
      for (size_t j = 0; j < work.size(); ++j) {
        if (j == i) continue;
        auto cj = work[j].coeffs_in(x);
        Poly acc;
        int32_t dmax = cj.rbegin()->first;
        std::vector<Poly> apows(dmax + 1);
        apows[0] = Poly::constant(1);
        for (int32_t d = 1; d <= dmax; ++d) apows[d] = apows[d - 1] * A;
        for (auto& [d, coeff] : cj) {
          Poly numpow = Poly::constant(1);
          for (int32_t t = 0; t < d; ++t) numpow = numpow * (-B);
          acc += coeff * numpow * apows[dmax - d];
        }
        rest.push_back(acc);
      }
      // record and resolve against previously assigned unknowns
      for (auto& [k, v] : next.assignment) {
        std::map<AtomKey, RatFunc> one{{x, val}};
        RatFunc nn = subst_ratfunc(v.num, one);
        RatFunc dd = subst_ratfunc(v.den, one);
        v = rf_div(nn, dd);
      }
      next.assignment[x] = val;
      extract_rec(std::move(rest), unknowns, std::move(next), depth, depth_cap,
                  out);
      return;
    }
  }

  // (b) univariate quadratic in one unknown with square discriminant
  if (depth < depth_cap) {
    for (size_t i = 0; i < work.size(); ++i) {
      for (AtomKey x : unknowns) {
        if (!work[i].contains_atom(x)) continue;
        auto co = work[i].coeffs_in(x);
        if (co.rbegin()->first != 2) continue;
        bool unifree = true;
        for (auto& [d, c] : co)
          for (AtomKey y : unknowns)
            if (c.contains_atom(y)) { unifree = false; break; }
        if (!unifree) continue;
        auto factors = try_split_product(work[i]);
        if (factors.size() < 2) continue;
        for (auto& f : factors) {
          if (f.degree_in(x) != 1) continue;
          std::vector<Poly> rest = work;
          rest[i] = f;
          extract_rec(std::move(rest), unknowns, cur, depth + 1, depth_cap,
                      out);
        }
        return;
      }
    }
  }

  // leftovers become residual relations
  for (auto& w : work) cur.extra_relations.push_back(w);
  out.push_back(std::move(cur));
}

} // namespace

std::vector<Branch> triangular_extract(const Basis& b,
                                       const std::set<AtomKey>& unknowns,
                                       int branch_depth_cap) {
  std::vector<Branch> out;
  extract_rec(b.gens, unknowns, Branch{}, 0, branch_depth_cap, out);
  return out;
}

} // namespace ybx
