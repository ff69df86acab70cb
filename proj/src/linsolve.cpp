#include "ybx/linsolve.hpp"

#include <algorithm>

namespace ybx {

namespace {

bool is_unknown_free(const Poly& p, const std::set<AtomKey>& unknowns) {
  for (auto& t : p.terms())
    for (auto& [k, x] : t.m.e)
      if (unknowns.count(k)) return false;
  return true;
}

struct Elim {
  AtomKey x;
  Poly a; // pivot coefficient
  Poly b; // remainder: eq = a*x + b
};

struct Solver {
  const std::set<AtomKey>& unknowns;
  int depth_cap;
  std::vector<Branch> out;

  Solver(const std::set<AtomKey>& u, int cap) : unknowns(u), depth_cap(cap) {}

  static Poly strip(const Poly& p) { return strip_content_and_units(p); }

  void emit(std::vector<Elim> chain, std::vector<Poly> residual,
            std::vector<Poly> conds, std::vector<Poly> extras,
            bool inconsistent) {
    Branch br;
    br.inconsistent = inconsistent;
    br.side_conditions = std::move(conds);
    for (auto& r : residual) {
      if (r.is_zero()) continue;
      if (r.is_nonzero_constant()) { br.inconsistent = true; continue; }
      br.extra_relations.push_back(strip(r));
    }
    for (auto& e : extras) br.extra_relations.push_back(strip(e));
    // back-substitute: chain entries were eliminated front to back, so later
    // assignments may appear inside earlier b/a
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      RatFunc val = rf_neg(rf_div(RatFunc(it->b), RatFunc(it->a)));
      std::map<AtomKey, RatFunc> done = br.assignment;
      val = [&] {
        RatFunc n = subst_ratfunc(val.num, done);
        RatFunc d = subst_ratfunc(val.den, done);
        return rf_div(n, d);
      }();
      br.assignment[it->x] = val;
    }
    out.push_back(std::move(br));
  }

  void solve(std::vector<Poly> eqs, std::vector<Elim> chain,
             std::vector<Poly> conds, std::vector<Poly> extras, int depth) {
    // normalize
    std::vector<Poly> work, residual;
    bool contradiction = false;
    for (auto& e : eqs) {
      if (e.is_zero()) continue;
      Poly s = strip(e);
      // use accumulated pivot-vanishing constraints
      if (!extras.empty()) {
        s = strip(reduce_by_set(s, extras));
        if (s.is_zero()) continue;
      }
      if (s.is_nonzero_constant()) { contradiction = true; break; }
      if (is_unknown_free(s, unknowns)) residual.push_back(s);
      else work.push_back(s);
    }
    if (contradiction) {
      emit(std::move(chain), {}, std::move(conds), std::move(extras), true);
      return;
    }
    if (work.empty()) {
      emit(std::move(chain), std::move(residual), std::move(conds),
           std::move(extras), false);
      return;
    }
    // pivot: first unknown (atom order) present; among its equations the one
    // with the fewest terms, ties broken by list position
    AtomKey px = 0;
    for (AtomKey x : unknowns) {
      for (auto& e : work)
        if (e.contains_atom(x)) { px = x; break; }
      if (px) break;
    }
    size_t pe = work.size();
    for (size_t i = 0; i < work.size(); ++i) {
      if (!work[i].contains_atom(px)) continue;
      if (pe == work.size() || work[i].term_count() < work[pe].term_count())
        pe = i;
    }
    auto co = work[pe].coeffs_in(px);
    Poly A = co.at(1);
    Poly B = co.count(0) ? co[0] : Poly();

    // branch 1: pivot nonzero
    {
      std::vector<Poly> next;
      for (size_t i = 0; i < work.size(); ++i) {
        if (i == pe) continue;
        auto ci = work[i].coeffs_in(px);
        if (!ci.count(1)) { next.push_back(work[i]); continue; }
        Poly d = ci.count(0) ? ci[0] : Poly();
        next.push_back(A * d - ci[1] * B);
      }
      for (auto& r : residual) next.push_back(r);
      auto chain1 = chain;
      chain1.push_back(Elim{px, A, B});
      auto conds1 = conds;
      if (!A.is_constant()) conds1.push_back(strip(A));
      solve(std::move(next), std::move(chain1), std::move(conds1), extras,
            depth);
    }
    // branch 2: pivot vanishes (only for non-constant pivots, capped)
    if (!A.is_constant() && depth < depth_cap) {
      std::vector<Poly> next;
      for (size_t i = 0; i < work.size(); ++i) {
        if (i == pe) { if (!B.is_zero()) next.push_back(B); continue; }
        next.push_back(work[i]);
      }
      for (auto& r : residual) next.push_back(r);
      auto extras2 = extras;
      extras2.push_back(strip(A));
      solve(std::move(next), chain, conds, std::move(extras2), depth + 1);
    }
  }
};

} // namespace

bool is_linear_system(const std::vector<Poly>& eqs,
                      const std::set<AtomKey>& unknowns) {
  auto pred = [&](AtomKey k) { return unknowns.count(k) > 0; };
  for (auto& e : eqs)
    if (e.degree_in_class(pred) > 1) return false;
  return true;
}

std::vector<Branch> solve_linear(const std::vector<Poly>& eqs,
                                 const std::set<AtomKey>& unknowns,
                                 int branch_depth_cap) {
  if (!is_linear_system(eqs, unknowns))
    throw std::runtime_error("solve_linear: system is not linear in unknowns");
  Solver s(unknowns, branch_depth_cap);
  s.solve(eqs, {}, {}, {}, 0);
  return std::move(s.out);
}

} // namespace ybx
