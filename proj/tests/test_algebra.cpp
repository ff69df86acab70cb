#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ybx/groebner.hpp"
#include "ybx/io.hpp"
#include "ybx/linsolve.hpp"
#include "ybx/poly.hpp"

using namespace ybx;

namespace {

Poly P(const std::string& s, AtomTable& tab) { return parse_poly(s, tab); }

// deterministic random polynomial over a small parameter pool
Poly random_poly(std::mt19937_64& rng, AtomTable& tab, int max_terms = 5,
                 int max_deg = 3) {
  static const char* names[] = {"x", "y", "z", "w"};
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<int> coeff(-6, 6);
  std::uniform_int_distribution<int> denom(1, 4);
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::uniform_int_distribution<int> nvars(0, 2);
  Poly p;
  int t = nterms(rng);
  for (int i = 0; i < t; ++i) {
    Poly term = Poly::constant(Rational(coeff(rng), denom(rng)));
    int vs = nvars(rng);
    for (int v = 0; v <= vs; ++v) {
      int which = std::uniform_int_distribution<int>(0, 3)(rng);
      term = term * Poly::atom(tab.seed_param(names[which]), deg(rng));
    }
    p += term;
  }
  return p;
}

} // namespace

TEST_CASE("rational helpers") {
  CHECK(to_string(Rational(2, 4)) == "1/2");
  CHECK(*parse_rational("-7/3") == Rational(-7, 3));
  CHECK(rational_sqrt(Rational(9, 4)) == Rational(3, 2));
  CHECK(!rational_sqrt(Rational(2)).has_value());
}

TEST_CASE("poly arithmetic basics") {
  AtomTable tab;
  CHECK(P("(x+1)*(x-1)", tab) == P("x^2-1", tab));
  Poly f = P("x^2+3*y-1/2", tab);
  CHECK((f - f).is_zero());
  CHECK(P("2/3*x+1/3*x", tab) == P("x", tab));
  // exact ring laws on randomized triples
  std::mt19937_64 rng(20240811);
  for (int i = 0; i < 1000; ++i) {
    Poly a = random_poly(rng, tab), b = random_poly(rng, tab),
         c = random_poly(rng, tab);
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a + b == b + a);
    CHECK(((a + b) - b) == a);
  }
}

TEST_CASE("degrevlex order with unknown-class priority") {
  AtomTable tab;
  AtomKey x = tab.entry_func(1, 1, Arg::U); // unknown class
  AtomKey p = tab.seed_param("p");          // parameter class
  Poly f = Poly::atom(p, 3) + Poly::atom(x); // deg 3 vs deg 1
  CHECK(f.leading().m.contains(p)); // graded: higher total degree leads
  Poly g = Poly::atom(p) + Poly::atom(x);
  CHECK(g.leading().m.contains(x)); // same degree: unknown-class first
}

TEST_CASE("root constant folding") {
  AtomTable tab;
  Poly i = Poly::atom(tab.root_const(kRootImag));
  CHECK(i * i == Poly::constant(-1));
  CHECK((i * i * i * i) == Poly::constant(1));
  Poly s2 = Poly::atom(tab.root_const(kRootSqrt2));
  CHECK(s2 * s2 == Poly::constant(2));
  CHECK(P("(1/2-1/2*I)*(1/2+1/2*I)", tab) == P("1/2", tab));
  CHECK(P("(1/2*sqrt2)*(1/2*sqrt2)", tab) == P("1/2", tab));
}

TEST_CASE("reduce_by_set normal forms") {
  AtomTable tab;
  SUBCASE("x^2-1 mod {x-1} -> 0") {
    CHECK(reduce_by_set(P("x^2-1", tab), {P("x-1", tab)}).is_zero());
  }
  SUBCASE("xy mod {y} -> 0") {
    CHECK(reduce_by_set(P("x*y", tab), {P("y", tab)}).is_zero());
  }
  SUBCASE("x^2+y mod {x^2-1} -> y+1 with ideal witness") {
    std::vector<Poly> G{P("x^2-1", tab)};
    std::vector<Poly> cof;
    Poly r = reduce_by_set(P("x^2+y", tab), G, &cof);
    CHECK(r == P("y+1", tab));
    // f - r = sum cof*G
    Poly recon;
    for (size_t i = 0; i < G.size(); ++i) recon += cof[i] * G[i];
    CHECK(recon == P("x^2+y", tab) - r);
  }
}

TEST_CASE("content_primitive") {
  AtomTable tab;
  SUBCASE("2x^2y + 4xy") {
    auto cs = content_primitive(P("2*x^2*y+4*x*y", tab));
    CHECK(cs.content == Rational(2));
    CHECK(cs.primitive == P("x+2", tab));
    Poly mono = Poly::from_terms({Term{cs.mono, Rational(1)}});
    CHECK(mono == P("x*y", tab));
  }
  SUBCASE("constant 7") {
    auto cs = content_primitive(P("7", tab));
    CHECK(cs.content == Rational(7));
    CHECK(cs.mono.is_one());
    CHECK(cs.primitive == P("1", tab));
  }
  SUBCASE("-3x^3: primitive's leading coefficient is +1") {
    auto cs = content_primitive(P("-3*x^3", tab));
    CHECK(cs.content == Rational(-3));
    Poly mono = Poly::from_terms({Term{cs.mono, Rational(1)}});
    CHECK(mono == P("x^3", tab));
    CHECK(cs.primitive == P("1", tab));
  }
  SUBCASE("zero input throws") {
    CHECK_THROWS_AS(content_primitive(Poly()), ZeroInput);
  }
}

TEST_CASE("try_split_product") {
  AtomTable tab;
  auto product_of = [&](const std::vector<Poly>& fs) {
    Poly p = Poly::constant(1);
    for (auto& f : fs) p = p * f;
    return p;
  };
  SUBCASE("xy - x -> [x, y-1]") {
    auto fs = try_split_product(P("x*y-x", tab));
    REQUIRE(fs.size() == 2);
    CHECK(fs[0] == P("x", tab));
    CHECK(fs[1] == P("y-1", tab));
  }
  SUBCASE("x^2 - p0^2 -> [x-p0, x+p0]") {
    auto fs = try_split_product(P("x^2-p0^2", tab));
    REQUIRE(fs.size() == 2);
    Poly prod = product_of(fs);
    CHECK(prod == P("x^2-p0^2", tab));
    for (auto& f : fs) CHECK(f.total_degree() == 1);
  }
  SUBCASE("x^2 + y does not split (discriminant -4y not a square)") {
    auto fs = try_split_product(P("x^2+y", tab));
    REQUIRE(fs.size() == 1);
    CHECK(fs[0] == P("x^2+y", tab));
  }
  SUBCASE("bilinear grouping (x-1)(y-1)") {
    auto fs = try_split_product(P("x*y-x-y+1", tab));
    REQUIRE(fs.size() == 2);
    CHECK(product_of(fs) == P("x*y-x-y+1", tab));
  }
  SUBCASE("re-multiplication reproduces input up to content (random)") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
      Poly f = random_poly(rng, tab, 4, 2);
      if (f.is_zero()) continue;
      auto fs = try_split_product(f);
      Poly prod = product_of(fs);
      auto cf = content_primitive(f);
      // f = content * prod exactly
      CHECK(prod.mul_scalar(cf.content) == f);
    }
  }
}

TEST_CASE("poly gcd and RatFunc reduction") {
  AtomTable tab;
  Poly a = P("(x+y)*(x-y)", tab), b = P("(x+y)*(x+1)", tab);
  CHECK(poly_gcd(a, b) == P("x+y", tab));
  RatFunc r(P("x^2-y^2", tab), P("x+y", tab));
  CHECK(r.num == P("x-y", tab));
  CHECK(r.den == P("1", tab));
  // gcd of coprime polys
  CHECK(poly_gcd(P("x+1", tab), P("y+1", tab)) == P("1", tab));
  std::mt19937_64 rng(99);
  for (int i = 0; i < 60; ++i) {
    Poly f = random_poly(rng, tab, 3, 2), g = random_poly(rng, tab, 3, 2),
         h = random_poly(rng, tab, 2, 1);
    if (f.is_zero() || g.is_zero() || h.is_zero()) continue;
    Poly gg = poly_gcd(f * h, g * h);
    // h divides the gcd
    CHECK(divide_exact(gg, poly_gcd(gg, h)).has_value());
    CHECK(divide_exact(f * h, poly_gcd(f * h, g * h)).has_value());
  }
}

TEST_CASE("solve_linear") {
  AtomTable tab;
  SUBCASE("{2x-4} -> x=2") {
    AtomKey x = tab.entry_func(1, 1, Arg::U);
    Poly eq = Poly::atom(x).mul_scalar(2) - Poly::constant(4);
    auto brs = solve_linear({eq}, {x});
    REQUIRE(brs.size() == 1);
    CHECK(brs[0].assignment.at(x).num == Poly::constant(2));
    CHECK(!brs[0].inconsistent);
  }
  SUBCASE("{a*x-1}: pivot branch and complementary inconsistent branch") {
    AtomKey x = tab.entry_func(1, 2, Arg::U);
    Poly a = Poly::atom(tab.seed_param("a"));
    Poly eq = a * Poly::atom(x) - Poly::constant(1);
    auto brs = solve_linear({eq}, {x});
    REQUIRE(brs.size() == 2);
    CHECK(brs[0].assignment.at(x).den == a);
    REQUIRE(brs[0].side_conditions.size() == 1);
    CHECK(brs[0].side_conditions[0] == a);
    CHECK(brs[1].inconsistent); // a = 0 forces -1 = 0
  }
  SUBCASE("{x+y-1, x-y} -> x=y=1/2") {
    AtomKey x = tab.entry_func(2, 1, Arg::U);
    AtomKey y = tab.entry_func(2, 2, Arg::U);
    Poly e1 = Poly::atom(x) + Poly::atom(y) - Poly::constant(1);
    Poly e2 = Poly::atom(x) - Poly::atom(y);
    auto brs = solve_linear({e1, e2}, {x, y});
    REQUIRE(brs.size() == 1);
    CHECK(brs[0].assignment.at(x).num == Poly::constant(Rational(1, 2)));
    CHECK(brs[0].assignment.at(y).num == Poly::constant(Rational(1, 2)));
  }
  SUBCASE("branch assignments solve the inputs (randomized)") {
    std::mt19937_64 rng(4242);
    AtomKey x = tab.entry_func(3, 1, Arg::U);
    AtomKey y = tab.entry_func(3, 2, Arg::U);
    for (int trial = 0; trial < 100; ++trial) {
      Poly cx = random_poly(rng, tab, 2, 1), cy = random_poly(rng, tab, 2, 1);
      Poly d = random_poly(rng, tab, 2, 1);
      std::vector<Poly> eqs{cx * Poly::atom(x) + cy * Poly::atom(y) + d,
                            Poly::atom(x) - Poly::atom(y)};
      auto brs = solve_linear(eqs, {x, y});
      for (auto& br : brs) {
        if (br.inconsistent) continue;
        for (auto& eq : eqs) {
          RatFunc v = subst_ratfunc(eq, br.assignment);
          if (br.extra_relations.empty()) {
            CHECK(v.num.is_zero());
            continue;
          }
          // under the pivot-vanishing constraints, the residual must vanish
          // after saturating by the side conditions
          Poly conds = Poly::constant(1);
          for (auto& c : br.side_conditions) conds = conds * c;
          Basis gb = buchberger(br.extra_relations);
          REQUIRE(gb.status == BasisStatus::Complete);
          bool ok = false;
          Poly n = v.num;
          for (int k = 0; k <= 3 && !ok; ++k) {
            ok = reduce_by_set(n, gb.gens).is_zero();
            n = n * conds;
          }
          CHECK(ok);
        }
      }
    }
  }
}

TEST_CASE("serialization round-trip is exact") {
  AtomTable tab;
  std::mt19937_64 rng(123);
  for (int i = 0; i < 200; ++i) {
    Poly f = random_poly(rng, tab);
    std::string s = poly_to_string(f, tab);
    Poly g = parse_poly(s, tab);
    CHECK(f == g);
    CHECK(poly_to_string(g, tab) == s);
  }
  // atoms of every kind survive the trip
  Poly mix = P("R[1,4](u)*exp[c1](u) - R'[2,3](u)*r1(u+v) + R'[1,1](0)*u*v - I*sqrt2*q0^2", tab);
  CHECK(parse_poly(poly_to_string(mix, tab), tab) == mix);
}

TEST_CASE("exp atom rewrite rules") {
  AtomTable tab;
  Poly c = Poly::atom(tab.seed_param("c"));
  // exp(c*(u+v)) = exp(c*u)*exp(c*v)
  Poly lhs = tab.exp_atom(RatFunc(c), Arg::UPV);
  Poly rhs = tab.exp_atom(RatFunc(c), Arg::U) * tab.exp_atom(RatFunc(c), Arg::V);
  CHECK(lhs == rhs);
  CHECK(tab.exp_atom(RatFunc(c), Arg::Zero) == Poly::constant(1));
  CHECK(tab.exp_atom(RatFunc(Poly()), Arg::U) == Poly::constant(1));
  // parsed form agrees
  CHECK(parse_poly("exp(c*u+c*v)", tab) == lhs);
  // negative powers: exp is a unit
  Poly e = parse_poly("exp(c*u)^-1*exp(c*u)", tab);
  CHECK(e == Poly::constant(1));
}
