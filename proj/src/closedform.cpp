#include "ybx/closedform.hpp"

#include <algorithm>

namespace ybx {

namespace {

bool is_function_arg_atom(AtomKind k) {
  switch (k) {
    case AtomKind::EntryFunc:
    case AtomKind::EntryDeriv:
    case AtomKind::FreeFunc:
    case AtomKind::FreeFuncDeriv:
    case AtomKind::ExpAtom:
      return true;
    default:
      return false;
  }
}

} // namespace

bool spectral_free(const Poly& e) {
  for (auto& t : e.terms())
    for (auto& [k, x] : t.m.e) {
      AtomKind kd = key_kind(k);
      if (kd == AtomKind::SpectralVar) return false;
      if (is_function_arg_atom(kd) && key_arg(k) != Arg::Zero) return false;
    }
  return true;
}

Poly normalize(const Poly& e, AtomTable& tab) {
  Poly out;
  for (auto& t : e.terms()) {
    Poly term = Poly::constant(t.c);
    for (auto& [k, x] : t.m.e) {
      if (key_kind(k) == AtomKind::ExpAtom) {
        const AtomData& d = tab.data(k);
        Poly base = tab.exp_atom(tab.rate(d.rate), d.arg);
        // exp atoms are units; negative exponents invert via the identity
        // exp(r)^-1 = exp(-r)
        if (x >= 0) {
          term = term * base.pow(uint32_t(x));
        } else {
          Poly inv = tab.exp_atom(RatFunc(-tab.rate(d.rate).num,
                                          tab.rate(d.rate).den),
                                  d.arg);
          term = term * inv.pow(uint32_t(-x));
        }
      } else {
        term = term * Poly::atom(k, x);
      }
    }
    out += term;
  }
  return out;
}

RatFunc normalize(const RatFunc& e, AtomTable& tab) {
  return RatFunc(normalize(e.num, tab), normalize(e.den, tab));
}

RatFunc differentiate(const Poly& e, int var, AtomTable& tab) {
  RatFunc out{Poly()};
  AtomKey uv = tab.spectral(var);
  for (auto& t : e.terms()) {
    for (size_t i = 0; i < t.m.e.size(); ++i) {
      auto [k, x] = t.m.e[i];
      // derivative of atom k w.r.t. the spectral variable
      RatFunc da{Poly()};
      AtomKind kd = key_kind(k);
      Arg a = key_arg(k);
      bool matches = false;
      if (kd == AtomKind::SpectralVar) {
        matches = (k == uv);
        if (matches) da = RatFunc{Poly::constant(1)};
      } else if (is_function_arg_atom(kd)) {
        matches = (a == Arg::UPV) || (var == 0 && a == Arg::U) ||
                  (var == 1 && a == Arg::V);
        if (matches) {
          const AtomData& d = tab.data(k);
          switch (kd) {
            case AtomKind::ExpAtom:
              da = rf_mul(tab.rate(d.rate), RatFunc{Poly::atom(k)});
              break;
            case AtomKind::FreeFunc:
              da = RatFunc{Poly::atom(tab.free_func_deriv(d.a, a))};
              break;
            case AtomKind::EntryFunc:
              da = RatFunc{Poly::atom(tab.entry_deriv(d.a, d.b, a))};
              break;
            case AtomKind::FreeFuncDeriv:
            case AtomKind::EntryDeriv:
              throw UnsupportedOrder();
            default:
              break;
          }
        }
      }
      if (!matches || da.is_zero()) continue;
      // term   c * k^x * rest  ->  c * x * k^(x-1) * da * rest
      Term rest{Monomial{}, t.c * x};
      for (size_t j = 0; j < t.m.e.size(); ++j) {
        if (j == i) {
          if (x != 1) rest.m.e.emplace_back(k, x - 1);
        } else {
          rest.m.e.push_back(t.m.e[j]);
        }
      }
      out = rf_add(out, rf_mul(RatFunc{Poly::from_terms({rest})}, da));
    }
  }
  return out;
}

RatFunc differentiate(const RatFunc& e, int var, AtomTable& tab) {
  RatFunc dn = differentiate(e.num, var, tab);
  RatFunc dd = differentiate(e.den, var, tab);
  if (dd.is_zero()) return rf_div(dn, RatFunc(e.den));
  // (n/d)' = (n'd - nd')/d^2
  RatFunc nd = rf_mul(dn, RatFunc(e.den));
  RatFunc dn2 = rf_mul(RatFunc(e.num), dd);
  return rf_div(rf_sub(nd, dn2), RatFunc(e.den * e.den));
}

Poly retag_from_u(const Poly& e, Arg target, AtomTable& tab) {
  AtomKey u = tab.spectral(0);
  Poly out;
  for (auto& t : e.terms()) {
    Poly term = Poly::constant(t.c);
    for (auto& [k, x] : t.m.e) {
      AtomKind kd = key_kind(k);
      if (kd == AtomKind::SpectralVar) {
        if (k != u)
          throw std::runtime_error("retag_from_u: expression already contains v");
        Poly repl;
        switch (target) {
          case Arg::U: repl = Poly::atom(u); break;
          case Arg::V: repl = Poly::atom(tab.spectral(1)); break;
          case Arg::UPV:
            repl = Poly::atom(u) + Poly::atom(tab.spectral(1));
            break;
          case Arg::Zero: repl = Poly(); break;
        }
        if (x < 0) throw std::runtime_error("retag_from_u: negative power of u");
        term = term * repl.pow(uint32_t(x));
        continue;
      }
      if (is_function_arg_atom(kd) && key_arg(k) == Arg::U) {
        const AtomData& d = tab.data(k);
        Poly repl;
        switch (kd) {
          case AtomKind::ExpAtom: repl = tab.exp_atom(tab.rate(d.rate), target); break;
          case AtomKind::FreeFunc: repl = Poly::atom(tab.free_func(d.a, target)); break;
          case AtomKind::FreeFuncDeriv:
            repl = Poly::atom(tab.free_func_deriv(d.a, target));
            break;
          case AtomKind::EntryFunc:
            repl = Poly::atom(tab.entry_func(d.a, d.b, target));
            break;
          case AtomKind::EntryDeriv:
            repl = Poly::atom(tab.entry_deriv(d.a, d.b, target));
            break;
          default: break;
        }
        if (x >= 0) {
          term = term * repl.pow(uint32_t(x));
        } else {
          // only exp atoms are units
          if (kd != AtomKind::ExpAtom)
            throw std::runtime_error("retag_from_u: negative function power");
          Poly inv = tab.exp_atom(
              RatFunc(-tab.rate(tab.data(k).rate).num, tab.rate(tab.data(k).rate).den),
              target);
          term = term * inv.pow(uint32_t(-x));
        }
        continue;
      }
      term = term * Poly::atom(k, x);
    }
    out += term;
  }
  return out;
}

RatFunc retag_from_u(const RatFunc& e, Arg target, AtomTable& tab) {
  Poly d = retag_from_u(e.den, target, tab);
  if (d.is_zero())
    throw std::runtime_error("retag_from_u: denominator vanished");
  return RatFunc(retag_from_u(e.num, target, tab), d);
}

// ---------------------------------------------------------------------------
// ODE solving
// ---------------------------------------------------------------------------

namespace {

// splits a numerator term into (u-power, effective exp rate, u-free rest)
struct ForcingTerm {
  int32_t upow = 0;
  RatFunc rate;  // sum of exp-atom rates weighted by exponents
  Poly rest;     // single term, u/exp-free
  bool ok = true;
};

ForcingTerm split_term(const Term& t, AtomTable& tab) {
  ForcingTerm ft;
  ft.rate = RatFunc{Poly()};
  Term rest{Monomial{}, t.c};
  AtomKey u = tab.spectral(0);
  for (auto& [k, x] : t.m.e) {
    AtomKind kd = key_kind(k);
    if (k == u) {
      if (x < 0) { ft.ok = false; return ft; }
      ft.upow = x;
      continue;
    }
    if (kd == AtomKind::ExpAtom) {
      if (key_arg(k) != Arg::U) { ft.ok = false; return ft; }
      RatFunc r = tab.rate(tab.data(k).rate);
      r.num = r.num.mul_scalar(x);
      ft.rate = rf_add(ft.rate, r);
      continue;
    }
    if (kd == AtomKind::SpectralVar || is_function_arg_atom(kd)) {
      ft.ok = false; // coupled unknown function or v-dependence
      return ft;
    }
    rest.m.e.emplace_back(k, x);
  }
  ft.rest = Poly::from_terms({rest});
  return ft;
}

} // namespace

OdeResult ode_solve_linear(const RatFunc& rhs, AtomKey x, const RatFunc& init,
                           AtomTable& tab) {
  OdeResult res;
  if (!spectral_free(rhs.den)) return res;
  if (!spectral_free(init.num) || !spectral_free(init.den)) return res;
  if (rhs.num.degree_in(x) > 1) return res;
  auto co = rhs.num.coeffs_in(x);
  Poly a_num = co.count(1) ? co[1] : Poly();
  Poly forcing = co.count(0) ? co[0] : Poly();
  if (!spectral_free(a_num)) return res; // alpha must be constant in u
  RatFunc alpha(a_num, rhs.den);

  // group forcing terms by exponential rate
  struct Group {
    RatFunc rate;
    std::map<int32_t, RatFunc> coeff; // u-power -> coefficient
  };
  std::vector<Group> groups;
  for (auto& t : forcing.terms()) {
    ForcingTerm ft = split_term(t, tab);
    if (!ft.ok) return res;
    RatFunc c(ft.rest, rhs.den);
    std::string key = ratfunc_to_string(ft.rate, tab);
    Group* g = nullptr;
    for (auto& gr : groups)
      if (ratfunc_to_string(gr.rate, tab) == key) { g = &gr; break; }
    if (!g) {
      groups.push_back(Group{ft.rate, {}});
      g = &groups.back();
    }
    auto it = g->coeff.find(ft.upow);
    if (it == g->coeff.end()) g->coeff[ft.upow] = c;
    else it->second = rf_add(it->second, c);
  }

  Poly u = Poly::atom(tab.spectral(0));
  RatFunc total{Poly()};   // sum of particular solutions
  RatFunc at_zero{Poly()}; // their value at u = 0
  for (auto& g : groups) {
    RatFunc delta = rf_sub(g.rate, alpha);
    int32_t m = g.coeff.rbegin()->first;
    if (delta.is_zero()) {
      // resonance: integrand is polynomial; contributes e^(alpha u) * P(u)
      // with P = integral of the forcing polynomial
      RatFunc p{Poly()};
      for (auto& [k, c] : g.coeff) {
        RatFunc ck = rf_mul(c, RatFunc{Poly::constant(Rational(1, k + 1))});
        p = rf_add(p, rf_mul(ck, RatFunc{u.pow(uint32_t(k + 1))}));
      }
      Poly e = tab.exp_atom(alpha, Arg::U);
      total = rf_add(total, rf_mul(p, RatFunc{e}));
      // P(0) = 0: no contribution at u = 0
    } else {
      // undetermined coefficients: p_k = (f_k - (k+1) p_{k+1}) / delta
      std::vector<RatFunc> p(size_t(m) + 1, RatFunc{Poly()});
      for (int32_t k = m; k >= 0; --k) {
        RatFunc fk = g.coeff.count(k) ? g.coeff.at(k) : RatFunc{Poly()};
        RatFunc numr = fk;
        if (k < m) {
          RatFunc carry = rf_mul(RatFunc{Poly::constant(k + 1)}, p[size_t(k) + 1]);
          numr = rf_sub(fk, carry);
        }
        p[size_t(k)] = rf_div(numr, delta);
      }
      if (!delta.num.is_constant())
        res.side_conditions.push_back(strip_content_and_units(delta.num));
      RatFunc poly_part{Poly()};
      for (int32_t k = 0; k <= m; ++k)
        poly_part =
            rf_add(poly_part, rf_mul(p[size_t(k)], RatFunc{u.pow(uint32_t(k))}));
      Poly e = tab.exp_atom(g.rate, Arg::U);
      total = rf_add(total, rf_mul(poly_part, RatFunc{e}));
      at_zero = rf_add(at_zero, p[0]);
    }
  }

  // homogeneous part from the initial condition
  RatFunc c0 = rf_sub(init, at_zero);
  Poly eh = tab.exp_atom(alpha, Arg::U);
  res.solution = rf_add(total, rf_mul(c0, RatFunc{eh}));
  res.supported = true;
  return res;
}

} // namespace ybx
