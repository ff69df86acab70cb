#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ybx/groebner.hpp"
#include "ybx/io.hpp"

using namespace ybx;

namespace {

Poly P(const std::string& s, AtomTable& tab) { return parse_poly(s, tab); }

// Buchberger criterion: every S-polynomial reduces to zero mod the basis.
bool buchberger_criterion(const std::vector<Poly>& basis) {
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j) {
      Monomial l = mono_lcm(basis[i].leading().m, basis[j].leading().m);
      Term ti{mono_div(l, basis[i].leading().m),
              Rational(1) / basis[i].leading().c};
      Term tj{mono_div(l, basis[j].leading().m),
              Rational(1) / basis[j].leading().c};
      Poly s = basis[i].mul_term(ti) - basis[j].mul_term(tj);
      if (!reduce_by_set(s, basis).is_zero()) return false;
    }
  return true;
}

} // namespace

TEST_CASE("buchberger worked examples") {
  AtomTable tab;
  SUBCASE("{x, y} is already a basis") {
    auto b = buchberger({P("x", tab), P("y", tab)});
    CHECK(b.status == BasisStatus::Complete);
    REQUIRE(b.gens.size() == 2);
    CHECK(((b.gens[0] == P("x", tab) && b.gens[1] == P("y", tab)) ||
           (b.gens[0] == P("y", tab) && b.gens[1] == P("x", tab))));
  }
  SUBCASE("{x^2-1, xy-1} -> {x-y, y^2-1}") {
    auto b = buchberger({P("x^2-1", tab), P("x*y-1", tab)});
    CHECK(b.status == BasisStatus::Complete);
    REQUIRE(b.gens.size() == 2);
    CHECK(b.gens[0] == P("x-y", tab));
    CHECK(b.gens[1] == P("y^2-1", tab));
  }
  SUBCASE("{x^2+1, x^2-1} -> unit ideal") {
    auto b = buchberger({P("x^2+1", tab), P("x^2-1", tab)});
    CHECK(b.status == BasisStatus::Complete);
    REQUIRE(b.gens.size() == 1);
    CHECK(b.gens[0] == P("1", tab));
    CHECK(is_inconsistent(b));
  }
  SUBCASE("is_inconsistent negative") {
    auto b = buchberger({P("x^2-1", tab), P("x*y-1", tab)});
    CHECK(!is_inconsistent(b));
  }
}

TEST_CASE("triangular_extract") {
  AtomTable tab;
  AtomKey x = tab.entry_func(1, 1, Arg::U);
  AtomKey y = tab.entry_func(1, 2, Arg::U);
  std::string xs = "R[1,1](u)", ys = "R[1,2](u)";
  SUBCASE("basis {x-y, y^2-1} -> {y=1,x=1}, {y=-1,x=-1}") {
    auto b = buchberger({P(xs + "-" + ys, tab), P(ys + "^2-1", tab)});
    auto brs = triangular_extract(b, {x, y});
    REQUIRE(brs.size() == 2);
    std::set<std::string> got;
    for (auto& br : brs) {
      REQUIRE(br.assignment.count(x));
      REQUIRE(br.assignment.count(y));
      CHECK(br.assignment.at(x) == br.assignment.at(y));
      got.insert(to_string(br.assignment.at(y).num.constant_value()));
    }
    CHECK(got == std::set<std::string>{"1", "-1"});
  }
  SUBCASE("basis {x-3} -> {x=3}") {
    auto b = buchberger({P(xs + "-3", tab)});
    auto brs = triangular_extract(b, {x, y});
    REQUIRE(brs.size() == 1);
    CHECK(brs[0].assignment.at(x).num == Poly::constant(3));
  }
  SUBCASE("basis {x^2+y}: nothing extracted, residual returned") {
    auto b = buchberger({P(xs + "^2+" + ys, tab)});
    auto brs = triangular_extract(b, {x, y});
    REQUIRE(brs.size() == 1);
    CHECK(brs[0].assignment.empty());
    REQUIRE(brs[0].extra_relations.size() == 1);
    CHECK(brs[0].extra_relations[0] == P(xs + "^2+" + ys, tab));
  }
}

TEST_CASE("randomized self-validation with ideal equality") {
  AtomTable tab;
  std::mt19937_64 rng(31337);
  const char* names[] = {"x", "y", "z", "w"};
  auto random_poly = [&](int max_terms, int max_deg) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> coeff(-4, 4);
    std::uniform_int_distribution<int> deg(0, max_deg);
    Poly p;
    int t = nterms(rng);
    for (int i = 0; i < t; ++i) {
      int c = coeff(rng);
      if (c == 0) c = 1;
      Poly term = Poly::constant(c);
      for (int v = 0; v < 4; ++v)
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0)
          term = term * Poly::atom(tab.seed_param(names[v]), deg(rng));
      p += term;
    }
    return p;
  };
  GroebnerConfig cfg;
  cfg.track_cofactors = true;
  cfg.degree_cap = 14;
  int complete = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Poly> gens;
    int n = std::uniform_int_distribution<int>(2, 3)(rng);
    for (int i = 0; i < n; ++i) {
      Poly g = random_poly(3, 2);
      if (!g.is_zero()) gens.push_back(g);
    }
    if (gens.empty()) continue;
    Basis b = buchberger(gens, cfg);
    if (b.status != BasisStatus::Complete) continue;
    ++complete;
    CHECK(buchberger_criterion(b.gens));
    // originals reduce to zero mod basis
    for (auto& g : gens) CHECK(reduce_by_set(g, b.gens).is_zero());
    // basis elements lie in the original ideal via recorded cofactors
    REQUIRE(b.cofactors.size() == b.gens.size());
    for (size_t i = 0; i < b.gens.size(); ++i) {
      Poly recon;
      for (size_t j = 0; j < gens.size(); ++j)
        recon += b.cofactors[i][j] * gens[j];
      CHECK(recon == b.gens[i]);
    }
  }
  CHECK(complete >= 30); // most small systems complete within budget
}

TEST_CASE("determinism: same input, byte-identical basis") {
  AtomTable tab;
  std::vector<Poly> gens{P("x^2+y*z-1", tab), P("x*y+z^2", tab),
                         P("y^2-z", tab)};
  auto b1 = buchberger(gens);
  auto b2 = buchberger(gens);
  REQUIRE(b1.gens.size() == b2.gens.size());
  for (size_t i = 0; i < b1.gens.size(); ++i) {
    CHECK(poly_to_string(b1.gens[i], tab) == poly_to_string(b2.gens[i], tab));
  }
}

TEST_CASE("budget exhaustion returns partial basis") {
  AtomTable tab;
  GroebnerConfig cfg;
  cfg.pair_budget = 1;
  auto b = buchberger({P("x^2*y-1", tab), P("x*y^2-x", tab), P("y^3-x*y", tab)},
                      cfg);
  // with a one-pair budget the run cannot complete unless trivially done
  CHECK((b.status == BasisStatus::BudgetExceeded ||
         buchberger_criterion(b.gens)));
}
