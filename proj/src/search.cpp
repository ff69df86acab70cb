#include "ybx/search.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "ybx/symmetry.hpp"
#include "ybx/verifier.hpp"

namespace ybx {

std::vector<int> get_todo_vertices(const RmGraph& g) {
  std::vector<int> out;
  for (auto& v : g.vertices)
    if (v.is_leaf() && !v.flagged()) out.push_back(v.id);
  return out;
}

// ---------------------------------------------------------------------------
// substitution with exp-rate rewriting
// ---------------------------------------------------------------------------

namespace {

bool touches(const Poly& p, const std::map<AtomKey, RatFunc>& asg,
             AtomTable& tab) {
  for (auto& t : p.terms())
    for (auto& [k, x] : t.m.e) {
      if (asg.count(k)) return true;
      if (key_kind(k) == AtomKind::ExpAtom) {
        const RatFunc& r = tab.rate(tab.data(k).rate);
        if (touches(r.num, asg, tab) || touches(r.den, asg, tab)) return true;
      }
    }
  return false;
}

RatFunc subst_rf_full(const Poly& f, const std::map<AtomKey, RatFunc>& asg,
                      AtomTable& tab) {
  RatFunc out{Poly()};
  for (auto& t : f.terms()) {
    RatFunc term{Poly::constant(t.c)};
    for (auto& [k, x] : t.m.e) {
      RatFunc base;
      auto it = asg.find(k);
      if (it != asg.end()) {
        base = it->second;
      } else if (key_kind(k) == AtomKind::ExpAtom &&
                 (touches(tab.rate(tab.data(k).rate).num, asg, tab) ||
                  touches(tab.rate(tab.data(k).rate).den, asg, tab))) {
        const AtomData& d = tab.data(k);
        RatFunc nr = subst_rf_full(tab.rate(d.rate).num, asg, tab);
        RatFunc dr = subst_rf_full(tab.rate(d.rate).den, asg, tab);
        base = RatFunc{tab.exp_atom(rf_div(nr, dr), d.arg)};
      } else {
        base = RatFunc{Poly::atom(k)};
      }
      RatFunc p{Poly::constant(1)};
      int32_t n = x >= 0 ? x : -x;
      for (int32_t i = 0; i < n; ++i) p = rf_mul(p, base);
      term = (x >= 0) ? rf_mul(term, p) : rf_div(term, p);
    }
    out = rf_add(out, term);
  }
  return out;
}

} // namespace

Poly subst_relation(const Poly& rel, const std::map<AtomKey, RatFunc>& asg,
                    AtomTable& tab) {
  if (!touches(rel, asg, tab)) return rel;
  return subst_rf_full(rel, asg, tab).num;
}

RatFunc subst_value(const RatFunc& v, const std::map<AtomKey, RatFunc>& asg,
                    AtomTable& tab) {
  if (!touches(v.num, asg, tab) && !touches(v.den, asg, tab)) return v;
  RatFunc n = subst_rf_full(v.num, asg, tab);
  RatFunc d = subst_rf_full(v.den, asg, tab);
  return rf_div(n, d);
}

// ---------------------------------------------------------------------------
// selection cascade
// ---------------------------------------------------------------------------

namespace {

bool eq_less(const Poly& a, const Poly& b) {
  if (a.term_count() != b.term_count()) return a.term_count() < b.term_count();
  if (a.total_degree() != b.total_degree())
    return a.total_degree() < b.total_degree();
  return false; // stable: list position breaks ties
}

std::set<AtomKey> atoms_of_kind(const std::vector<Poly>& rels, AtomKind kind) {
  std::set<AtomKey> out;
  for (auto& r : rels)
    for (auto& t : r.terms())
      for (auto& [k, x] : t.m.e)
        if (key_kind(k) == kind) out.insert(k);
  return out;
}

} // namespace

std::vector<Poly>& SearchEngine::stage_list(Vertex& v, SolveStage s) {
  return s == SolveStage::Init ? v.rels.D_0 : v.rels.A_u;
}

std::set<AtomKey> SearchEngine::stage_unknowns(const Vertex& v,
                                               SolveStage s) const {
  if (s == SolveStage::Init) return atoms_of_kind(v.rels.D_0, AtomKind::InitDeriv);
  std::set<AtomKey> out = atoms_of_kind(v.rels.A_u, AtomKind::EntryFunc);
  for (AtomKey k : atoms_of_kind(v.rels.D_u, AtomKind::EntryFunc)) out.insert(k);
  return out;
}

Selection select_eqns(const Vertex& v, const Tuning& t, SolveStage stage) {
  const std::vector<Poly>& list =
      stage == SolveStage::Init ? v.rels.D_0 : v.rels.A_u;
  std::set<AtomKey> unknowns =
      stage == SolveStage::Init
          ? atoms_of_kind(v.rels.D_0, AtomKind::InitDeriv)
          : atoms_of_kind(list, AtomKind::EntryFunc);
  auto pred = [&](AtomKey k) { return unknowns.count(k) > 0; };

  Selection sel;
  // 1) linear method
  for (size_t i = 0; i < list.size(); ++i) {
    const Poly& e = list[i];
    if (e.term_count() > size_t(t.n_term)) continue;
    int64_t d = e.degree_in_class(pred);
    if (d != 1) continue;
    sel.eq_indices.push_back(i);
  }
  if (!sel.eq_indices.empty()) {
    sel.method = Method::Linear;
    return sel;
  }
  // 2) product method: shortest factorizable equation
  {
    size_t best = list.size();
    for (size_t i = 0; i < list.size(); ++i) {
      if (list[i].is_constant()) continue;
      auto fs = try_split_product(list[i]);
      size_t proper = 0;
      for (auto& f : fs)
        if (!f.is_constant()) ++proper;
      if (fs.size() >= 2 && proper >= 1 &&
          (best == list.size() || eq_less(list[i], list[best])))
        best = i;
    }
    if (best < list.size()) {
      sel.method = Method::Product;
      sel.eq_indices = {best};
      return sel;
    }
  }
  // 3) Groebner method on the whole list
  if (!list.empty() && list.size() < size_t(t.n_lim)) {
    sel.method = Method::Groebner;
    sel.eq_indices.resize(list.size());
    for (size_t i = 0; i < list.size(); ++i) sel.eq_indices[i] = i;
    return sel;
  }
  // 4) differential method (main stage only): candidate equations within the
  // term cap, shortest first; the reducer takes the first supported one
  if (stage == SolveStage::Main) {
    std::vector<size_t> cands;
    for (size_t i = 0; i < v.rels.D_u.size(); ++i)
      if (v.rels.D_u[i].term_count() <= size_t(t.n_diff)) cands.push_back(i);
    std::stable_sort(cands.begin(), cands.end(), [&](size_t a, size_t b) {
      return eq_less(v.rels.D_u[a], v.rels.D_u[b]);
    });
    if (!cands.empty()) {
      sel.method = Method::Differential;
      sel.eq_indices = std::move(cands);
      return sel;
    }
  }
  sel.method = Method::Exhausted;
  return sel;
}

// ---------------------------------------------------------------------------
// engine
// ---------------------------------------------------------------------------

SearchEngine::SearchEngine(const SeedClass& seed, Mode mode,
                           const Tuning& tuning, AtomTable& tab)
    : seed_(seed), tab_(tab) {
  g_.seed_id = seed.id;
  g_.mode = mode;
  g_.tuning = tuning;
  // pre-register the atom families the stages may need, so parallel workers
  // never mutate the table
  for (int k = 1; k <= seed.tmpl.dim() * seed.tmpl.dim(); ++k)
    for (Arg a : {Arg::Zero, Arg::U, Arg::V, Arg::UPV}) {
      tab_.free_func(k, a);
      tab_.free_func_deriv(k, a);
    }
  tab_.spectral(0);
  tab_.spectral(1);

  Vertex root;
  root.id = 0;
  root.rels = generate_relations(seed, tab_);
  root.side_conditions = seed.side_conditions;
  transform_equations_lists(root, SolveStage::Init);
  root.temp_stopped = false; // the root always enters stage 2
  g_.vertices.push_back(std::move(root));
  canon_index_[canonical_key(g_.vertices[0])] = 0;
}

SearchEngine::SearchEngine(const SeedClass& seed, RmGraph graph, AtomTable& tab)
    : seed_(seed), tab_(tab), g_(std::move(graph)) {
  for (auto& v : g_.vertices)
    canon_index_.emplace(canonical_key(v), v.id);
}

RatFunc SearchEngine::seed_entry(int row, int col) const {
  return RatFunc(seed_.tmpl.m.at(row - 1, col - 1));
}

std::string SearchEngine::canonical_key(const Vertex& v) const {
  std::string s;
  for (auto& [k, val] : v.assignment) {
    s += tab_.atom_name(k);
    s += '=';
    s += ratfunc_to_string(val, tab_);
    s += ';';
  }
  s += '|';
  std::vector<std::string> conds;
  for (auto& c : v.side_conditions) conds.push_back(poly_to_string(c, tab_));
  std::sort(conds.begin(), conds.end());
  conds.erase(std::unique(conds.begin(), conds.end()), conds.end());
  for (auto& c : conds) { s += c; s += ';'; }
  for (auto* list : {&v.rels.A_u, &v.rels.D_u, &v.rels.D_0}) {
    s += '|';
    for (auto& r : *list) { s += poly_to_string(r, tab_); s += ';'; }
  }
  return s;
}

std::array<int64_t, 3> SearchEngine::measure(const Vertex& v) const {
  std::set<AtomKey> unknowns;
  int64_t deg = 0, terms = 0;
  for (auto* list : {&v.rels.A_u, &v.rels.D_u, &v.rels.D_0})
    for (auto& r : *list) {
      deg += r.total_degree();
      terms += int64_t(r.term_count());
      for (auto& t : r.terms())
        for (auto& [k, x] : t.m.e)
          if (key_is_unknown_class(k)) unknowns.insert(k);
    }
  return {int64_t(unknowns.size()), deg, terms};
}

void SearchEngine::transform_equations_lists(Vertex& v, SolveStage stage) {
  // shift derivative-free members of the differential families into A(u)
  std::vector<Poly> a = std::move(v.rels.A_u), d, d0;
  for (auto& r : v.rels.D_u) {
    if (r.is_zero()) continue;
    (has_derivative_atom(r) ? d : a).push_back(r);
  }
  for (auto& r : v.rels.D_0) {
    if (r.is_zero()) continue;
    (has_derivative_atom(r) ? d0 : a).push_back(r);
  }
  v.rels.A_u = cleanup_relations(std::move(a), tab_);
  v.rels.D_u = cleanup_relations(std::move(d), tab_);
  v.rels.D_0 = cleanup_relations(std::move(d0), tab_);
  for (auto* list : {&v.rels.A_u, &v.rels.D_u, &v.rels.D_0})
    for (auto& r : *list)
      if (r.is_nonzero_constant()) {
        v.stopped = true;
        v.note = "contradiction: nonzero constant relation";
        return;
      }
  if (stage == SolveStage::Init) {
    if (v.rels.D_0.empty()) v.temp_stopped = true;
  } else {
    if (v.rels.A_u.empty() && v.rels.D_u.empty()) v.temp_stopped = true;
  }
}

// closes an assignment delta under derivatives
static void close_delta(std::map<AtomKey, RatFunc>& delta, AtomTable& tab) {
  std::vector<std::pair<AtomKey, RatFunc>> extra;
  for (auto& [k, v] : delta) {
    const AtomData& d = tab.data(k);
    if (d.kind == AtomKind::EntryFunc && d.arg == Arg::U) {
      AtomKey dk = tab.entry_deriv(d.a, d.b, Arg::U);
      if (!delta.count(dk)) extra.emplace_back(dk, differentiate(v, 0, tab));
    }
    if (d.kind == AtomKind::FreeFunc) {
      if (spectral_free(v.num) && spectral_free(v.den)) {
        for (Arg a : {Arg::Zero, Arg::U, Arg::V, Arg::UPV}) {
          AtomKey fk = tab.free_func(d.a, a);
          if (fk != k && !delta.count(fk)) extra.emplace_back(fk, v);
          AtomKey gk = tab.free_func_deriv(d.a, a);
          if (!delta.count(gk)) extra.emplace_back(gk, RatFunc{Poly()});
        }
      }
    }
  }
  for (auto& [k, v] : extra) delta.emplace(k, std::move(v));
}

std::vector<SearchEngine::ChildSpec> SearchEngine::reduce_vertex(
    const Vertex& v, const Selection& sel, SolveStage stage) {
  std::vector<ChildSpec> specs;
  const std::vector<Poly>& list =
      stage == SolveStage::Init ? v.rels.D_0 : v.rels.A_u;
  std::set<AtomKey> unknowns = stage_unknowns(v, stage);

  auto from_branch = [&](const Branch& br, std::vector<size_t> consumed,
                         const char* what) {
    ChildSpec cs;
    cs.delta = br.assignment;
    close_delta(cs.delta, tab_);
    cs.conds = br.side_conditions;
    cs.new_relations = br.extra_relations;
    cs.consumed = std::move(consumed);
    cs.inconsistent = br.inconsistent;
    cs.note = what;
    specs.push_back(std::move(cs));
  };

  switch (sel.method) {
    case Method::Linear: {
      std::vector<Poly> eqs;
      for (size_t i : sel.eq_indices) eqs.push_back(list[i]);
      for (auto& br : solve_linear(eqs, unknowns, g_.tuning.branch_depth_cap))
        from_branch(br, sel.eq_indices, "linear");
      break;
    }
    case Method::Product: {
      const Poly& eq = list[sel.eq_indices[0]];
      auto factors = try_split_product(eq);
      for (auto& f : factors) {
        if (f.is_constant()) continue;
        bool unit_only = true;
        for (auto& t : f.terms())
          for (auto& [k, x] : t.m.e)
            if (!key_is_unit_atom(k)) unit_only = false;
        if (unit_only) continue; // units never vanish
        auto pred = [&](AtomKey k) { return unknowns.count(k) > 0; };
        bool has_unknown = false;
        for (AtomKey k : f.atoms())
          if (unknowns.count(k)) has_unknown = true;
        if (has_unknown && f.degree_in_class(pred) == 1) {
          for (auto& br : solve_linear({f}, unknowns, g_.tuning.branch_depth_cap))
            from_branch(br, sel.eq_indices, "product factor");
        } else {
          ChildSpec cs;
          cs.new_relations = {f};
          cs.consumed = sel.eq_indices;
          cs.note = "product factor kept as relation";
          specs.push_back(std::move(cs));
        }
      }
      break;
    }
    case Method::Groebner: {
      std::vector<Poly> gens;
      for (size_t i : sel.eq_indices) gens.push_back(list[i]);
      GroebnerConfig cfg;
      cfg.pair_budget = g_.tuning.pair_budget;
      cfg.degree_cap = g_.tuning.degree_cap;
      Basis b = buchberger(gens, cfg);
      if (b.status == BasisStatus::BudgetExceeded) break; // fall through
      if (is_inconsistent(b)) {
        ChildSpec cs;
        cs.inconsistent = true;
        cs.note = "groebner: unit ideal";
        cs.consumed = sel.eq_indices;
        specs.push_back(std::move(cs));
        break;
      }
      for (auto& br :
           triangular_extract(b, unknowns, g_.tuning.branch_depth_cap))
        from_branch(br, sel.eq_indices, "groebner");
      break;
    }
    case Method::Differential: {
      // candidates are pre-sorted shortest-first; take the first one that
      // yields at least one branch inside the supported fragment
      for (size_t ci : sel.eq_indices) {
        const Poly& eq = v.rels.D_u[ci];
        std::vector<ChildSpec> cand;
        bool supported = false;

        AtomKey wx = 0, wy = 0;
        if (wronskian_pair(eq, tab_, wx, wy)) {
          // x'y - xy' = 0: either x is a constant multiple of y, or y = 0
          ChildSpec prop;
          Poly c = Poly::atom(tab_.integration_const(next_const_++));
          prop.delta[wx] = RatFunc{c * Poly::atom(wy)};
          close_delta(prop.delta, tab_);
          prop.conds = {Poly::atom(wy)};
          prop.consumed_d = {ci};
          prop.note = "differential: proportional pair";
          cand.push_back(std::move(prop));
          ChildSpec zero;
          zero.delta[wy] = RatFunc{Poly()};
          close_delta(zero.delta, tab_);
          zero.consumed_d = {ci};
          zero.note = "differential: vanishing factor of a proportional pair";
          cand.push_back(std::move(zero));
          supported = true;
        } else {
          std::set<AtomKey> derivs;
          for (auto& t : eq.terms())
            for (auto& [k, x] : t.m.e)
              if (key_kind(k) == AtomKind::EntryDeriv) derivs.insert(k);
          if (derivs.empty()) continue;
          auto branches = solve_linear({eq}, derivs, g_.tuning.branch_depth_cap);
          supported = true;
          for (auto& br : branches) {
            if (br.assignment.empty()) {
              // derivative coefficients vanish: algebraic constraints replace
              // the equation
              ChildSpec cs;
              cs.conds = br.side_conditions;
              cs.new_relations = br.extra_relations;
              cs.consumed_d = {ci};
              cs.inconsistent = br.inconsistent;
              cs.note = "differential: algebraic branch";
              cand.push_back(std::move(cs));
              continue;
            }
            auto& [dk, rhs] = *br.assignment.begin();
            const AtomData& dd = tab_.data(dk);
            AtomKey xk = tab_.entry_func(dd.a, dd.b, Arg::U);
            bool coupled = false;
            for (auto* p : {&rhs.num, &rhs.den})
              for (auto& t : p->terms())
                for (auto& [k, x] : t.m.e) {
                  AtomKind kd = key_kind(k);
                  if (kd == AtomKind::EntryDeriv || kd == AtomKind::FreeFuncDeriv)
                    coupled = true;
                  if (kd == AtomKind::EntryFunc && k != xk) coupled = true;
                  if (kd == AtomKind::FreeFunc) coupled = true;
                }
            if (coupled) { supported = false; break; }
            OdeResult ode =
                ode_solve_linear(rhs, xk, seed_entry(dd.a, dd.b), tab_);
            if (!ode.supported) { supported = false; break; }
            ChildSpec cs;
            cs.delta[xk] = ode.solution;
            close_delta(cs.delta, tab_);
            cs.conds = br.side_conditions;
            for (auto& c : ode.side_conditions) cs.conds.push_back(c);
            cs.new_relations = br.extra_relations;
            cs.consumed_d = {ci};
            cs.note = "differential";
            cand.push_back(std::move(cs));
          }
          // dropping an unsupported branch would lose solutions, so the
          // equation is used only when every branch is servable
        }
        if (supported) {
          specs = std::move(cand);
          break;
        }
      }
      break;
    }
    case Method::Exhausted:
      break;
  }
  return specs;
}

void SearchEngine::proc_solutions(int vid, const std::vector<ChildSpec>& specs,
                                  SolveStage stage) {
  if (specs.empty()) {
    g_.vertices[vid].stopped = true;
    g_.vertices[vid].note = "no solutions";
    return;
  }
  auto parent_measure = measure(g_.vertices[vid]);
  int created = 0;
  for (auto& spec : specs) {
    if (int(g_.vertices.size()) >= g_.tuning.max_vertices) {
      g_.vertices[vid].exhausted = true;
      g_.vertices[vid].note = "vertex budget exhausted";
      return;
    }
    Vertex child;
    child.id = int(g_.vertices.size());
    child.parents = {vid};
    child.note = spec.note;
    const Vertex& parent = g_.vertices[vid];
    bool indeterminate = false;
    try {
      // compose assignments
      for (auto& [k, val] : parent.assignment)
        child.assignment[k] = subst_value(val, spec.delta, tab_);
      for (auto& [k, val] : spec.delta) child.assignment[k] = val;
      child.side_conditions = parent.side_conditions;
      for (auto& c : spec.conds) child.side_conditions.push_back(c);
      // substituted relations, minus the consumed equations of the stage list
      std::set<size_t> drop(spec.consumed.begin(), spec.consumed.end());
      auto carry = [&](const std::vector<Poly>& src, bool is_stage_list,
                       std::vector<Poly>& dst) {
        for (size_t i = 0; i < src.size(); ++i) {
          if (is_stage_list && drop.count(i)) continue;
          dst.push_back(subst_relation(src[i], spec.delta, tab_));
        }
      };
      bool init = stage == SolveStage::Init;
      carry(parent.rels.A_u, !init, child.rels.A_u);
      carry(parent.rels.D_u, false, child.rels.D_u);
      carry(parent.rels.D_0, init, child.rels.D_0);
      for (auto& r : spec.new_relations)
        (init ? child.rels.D_0 : child.rels.A_u).push_back(r);
    } catch (const std::exception&) {
      indeterminate = true;
    }
    if (indeterminate) {
      child.stopped = true;
      child.note += "; indeterminate form";
    } else if (spec.inconsistent) {
      child.stopped = true;
      child.note += "; inconsistent";
    } else if (spec.unsupported) {
      child.exhausted = true;
    } else {
      transform_equations_lists(child, stage);
      // invertible mode: a forced-singular partial matrix stops the branch
      if (!child.stopped && g_.mode == Mode::Invertible &&
          !spec.delta.empty()) {
        RfMatrix pm(seed_.tmpl.dim());
        for (int r = 1; r <= seed_.tmpl.dim(); ++r)
          for (int c = 1; c <= seed_.tmpl.dim(); ++c) {
            AtomKey k = tab_.entry_func(r, c, Arg::U);
            auto it = child.assignment.find(k);
            pm.at(r - 1, c - 1) =
                it != child.assignment.end() ? it->second : RatFunc{Poly::atom(k)};
          }
        PolyMatrix cleared = clear_denominators(pm);
        if (poly_det(cleared).is_zero()) {
          child.stopped = true;
          child.note += "; degenerate R-matrix";
        }
      }
      if (!child.flagged()) {
        auto m = measure(child);
        if (!(m < parent_measure)) {
          child.exhausted = true;
          child.note += "; no measure progress";
        }
      }
    }
    // unite: merge with an existing identical vertex
    std::string key = canonical_key(child);
    auto it = canon_index_.find(key);
    if (it != canon_index_.end()) {
      child.merged_into = it->second;
      child.note += "; merged";
    } else {
      canon_index_.emplace(std::move(key), child.id);
    }
    g_.vertices[vid].children.push_back(child.id);
    g_.vertices.push_back(std::move(child));
    ++created;
  }
  if (created == 0) {
    g_.vertices[vid].exhausted = true;
    if (g_.vertices[vid].note.empty())
      g_.vertices[vid].note = "no viable children";
  }
}

void SearchEngine::stage_loop(SolveStage stage) {
  while (true) {
    std::vector<int> todo = get_todo_vertices(g_);
    if (todo.empty()) break;
    // worker results, committed in ascending vertex order
    struct Work {
      Selection sel;
      std::vector<ChildSpec> specs;
      bool reduced = false;
    };
    std::vector<Work> work(todo.size());
    auto run = [&](size_t i) {
      const Vertex& v = g_.vertices[todo[i]];
      work[i].sel = select_eqns(v, g_.tuning, stage);
      // the differential method registers atoms (exp rates, derivative
      // closures); it is reduced in the serial commit phase below
      if (work[i].sel.method != Method::Exhausted &&
          work[i].sel.method != Method::Differential) {
        work[i].specs = reduce_vertex(v, work[i].sel, stage);
        work[i].reduced = true;
      }
    };
    int jobs = std::max(1, g_.tuning.jobs);
    if (jobs == 1 || todo.size() == 1) {
      for (size_t i = 0; i < todo.size(); ++i) run(i);
    } else {
      std::vector<std::thread> pool;
      std::atomic<size_t> next{0};
      for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
          for (size_t i = next.fetch_add(1); i < todo.size();
               i = next.fetch_add(1))
            run(i);
        });
      for (auto& th : pool) th.join();
    }
    for (size_t i = 0; i < todo.size(); ++i) {
      Vertex& v = g_.vertices[todo[i]];
      if (work[i].sel.method == Method::Exhausted) {
        v.exhausted = true;
        v.note = "method cascade exhausted";
        continue;
      }
      if (!work[i].reduced)
        work[i].specs = reduce_vertex(v, work[i].sel, stage);
      if (work[i].specs.empty() && work[i].sel.method == Method::Groebner) {
        // budget exceeded inside the Groebner method: try the next cascade
        // level (differential), otherwise mark for resume
        Selection sel2;
        if (stage == SolveStage::Main) {
          Vertex tmp = v;
          tmp.rels.A_u.clear(); // force the cascade past the algebraic rungs
          sel2 = select_eqns(tmp, g_.tuning, stage);
        }
        if (sel2.method == Method::Differential) {
          work[i].sel = sel2;
          work[i].specs = reduce_vertex(v, sel2, stage);
        } else {
          v.exhausted = true;
          v.note = "groebner budget exceeded";
          continue;
        }
      }
      proc_solutions(todo[i], work[i].specs, stage);
    }
  }
  for (auto& v : g_.vertices) v.temp_stopped = false;
}

void SearchEngine::run_stage2() { stage_loop(SolveStage::Init); }

void SearchEngine::run_stage3() {
  // entering the main stage, vertices whose work is already done are parked
  for (auto& v : g_.vertices)
    if (v.is_leaf() && !v.flagged() && v.rels.A_u.empty() &&
        v.rels.D_u.empty())
      v.temp_stopped = true;
  stage_loop(SolveStage::Main);
}

void SearchEngine::run_stage4() {
  solutions_.clear();
  const int dim = seed_.tmpl.dim();
  for (auto& v : g_.vertices) {
    if (!v.is_leaf() || v.stopped || v.exhausted || v.merged_into >= 0)
      continue;
    if (!v.rels.A_u.empty() || !v.rels.D_u.empty() || !v.rels.D_0.empty())
      continue;
    // promote never-assigned entries to free functions
    std::map<AtomKey, Poly> promote;
    int next_ff = 1;
    for (int r = 1; r <= dim; ++r)
      for (int c = 1; c <= dim; ++c) {
        AtomKey k = tab_.entry_func(r, c, Arg::U);
        if (v.assignment.count(k)) continue;
        promote[k] = Poly::atom(tab_.free_func(next_ff, Arg::U));
        promote[tab_.entry_deriv(r, c, Arg::U)] =
            Poly::atom(tab_.free_func_deriv(next_ff, Arg::U));
        ++next_ff;
      }
    RfMatrix cand(dim);
    bool broken = false;
    for (int r = 1; r <= dim && !broken; ++r)
      for (int c = 1; c <= dim && !broken; ++c) {
        AtomKey k = tab_.entry_func(r, c, Arg::U);
        auto it = v.assignment.find(k);
        RatFunc e = it != v.assignment.end() ? it->second : RatFunc{Poly::atom(k)};
        try {
          cand.at(r - 1, c - 1) = RatFunc(e.num.subst(promote), e.den.subst(promote));
        } catch (const std::exception&) {
          broken = true;
        }
      }
    if (broken) {
      v.stopped = true;
      v.note += "; finalization failed";
      continue;
    }
    std::vector<Poly> conds = v.side_conditions;
    PolyMatrix mat = clear_denominators(cand, &conds);
    RMatrixSymbolic rm(seed_.tmpl.n, Arg::U);
    rm.m = mat;
    VerificationResult vr = verify_spectral(rm, tab_);
    if (vr.passed) {
      v.finalized = true;
      solutions_.push_back(Solution{v.id, rm, conds});
      continue;
    }
    // one residual-solving pass: collect the nonzero residual entries and
    // retry with constant-valued free-function assignments
    RMatrixSymbolic upv(rm.n, Arg::UPV), rv(rm.n, Arg::V);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        Poly e = normalize(rm.m.at(i, j), tab_);
        upv.m.at(i, j) = retag_from_u(e, Arg::UPV, tab_);
        rv.m.at(i, j) = retag_from_u(e, Arg::V, tab_);
      }
    PolyMatrix res = ybe_residual(rm, upv, rv);
    std::vector<Poly> residual;
    for (int i = 0; i < res.dim(); ++i)
      for (int j = 0; j < res.dim(); ++j)
        if (!res.at(i, j).is_zero()) residual.push_back(res.at(i, j));
    residual = cleanup_relations(std::move(residual), tab_);
    std::set<AtomKey> ffs;
    for (auto& r : residual)
      for (auto& t : r.terms())
        for (auto& [k, x] : t.m.e)
          if (key_kind(k) == AtomKind::FreeFunc) ffs.insert(k);
    bool fixed = false;
    if (!ffs.empty()) {
      // try zeroing factorizable residuals via constant free functions
      for (auto& r : residual) {
        auto fs = try_split_product(r);
        for (auto& f : fs) {
          if (f.term_count() != 1) continue;
          auto& m0 = f.leading().m;
          if (m0.e.size() != 1) continue;
          AtomKey k = m0.e[0].first;
          if (key_kind(k) != AtomKind::FreeFunc) continue;
          // child with r_k = 0 everywhere
          std::map<AtomKey, RatFunc> delta;
          delta[k] = RatFunc{Poly()};
          close_delta(delta, tab_);
          Vertex child;
          child.id = int(g_.vertices.size());
          child.parents = {v.id};
          child.note = "stage4: residual forces free function to zero";
          child.side_conditions = v.side_conditions;
          for (auto& [ak, av] : v.assignment)
            child.assignment[ak] = subst_value(av, delta, tab_);
          for (auto& [dk, dv] : delta) child.assignment[dk] = dv;
          RMatrixSymbolic rm2(rm.n, Arg::U);
          bool ok = true;
          for (int i = 0; i < dim && ok; ++i)
            for (int j = 0; j < dim && ok; ++j) {
              try {
                RatFunc e(rm.m.at(i, j));
                e = subst_value(e, delta, tab_);
                if (!e.is_poly()) ok = false;
                rm2.m.at(i, j) = e.num;
              } catch (const std::exception&) { ok = false; }
            }
          if (ok && verify_spectral(rm2, tab_).passed) {
            child.finalized = true;
            g_.vertices[v.id].children.push_back(child.id);
            int cid = child.id;
            g_.vertices.push_back(std::move(child));
            solutions_.push_back(Solution{cid, rm2, v.side_conditions});
            fixed = true;
          }
          if (fixed) break;
        }
        if (fixed) break;
      }
    }
    if (!fixed) {
      v.stopped = true;
      v.note += "; stage4 residual nonzero: " + vr.witness;
    } else {
      v.note += "; stage4 residual repaired in child";
    }
  }
}

void SearchEngine::run_all() {
  run_stage2();
  run_stage3();
  run_stage4();
}

SearchEngine::Stats SearchEngine::stats() const {
  Stats s;
  s.vertices = int(g_.vertices.size());
  for (auto& v : g_.vertices) {
    if (v.finalized) ++s.finalized;
    if (v.stopped) ++s.stopped;
    if (v.exhausted) ++s.exhausted;
    if (v.merged_into >= 0) ++s.merged;
  }
  return s;
}

} // namespace ybx
