#include "ybx/io.hpp"

#include <algorithm>
#include <cctype>

namespace ybx {

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  AtomTable& tab;

  Parser(const std::string& text, AtomTable& t) : s(text), tab(t) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at position " + std::to_string(pos) + " in \"" +
                     s + "\"");
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool eat(char c) {
    if (peek() == c) { ++pos; return true; }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  RatFunc parse() {
    RatFunc e = expr();
    skip_ws();
    if (pos != s.size()) fail("trailing input");
    return e;
  }

  RatFunc expr() {
    RatFunc acc = term();
    while (true) {
      char c = peek();
      if (c == '+') { ++pos; acc = rf_add(acc, term()); }
      else if (c == '-') { ++pos; acc = rf_sub(acc, term()); }
      else break;
    }
    return acc;
  }

  RatFunc term() {
    RatFunc acc = factor();
    while (true) {
      char c = peek();
      if (c == '*') { ++pos; acc = rf_mul(acc, factor()); }
      else if (c == '/') {
        ++pos;
        RatFunc d = factor();
        if (d.is_zero()) fail("division by zero");
        acc = rf_div(acc, d);
      } else break;
    }
    return acc;
  }

  RatFunc factor() {
    int sign = 1;
    while (true) {
      char c = peek();
      if (c == '-') { sign = -sign; ++pos; }
      else if (c == '+') ++pos;
      else break;
    }
    RatFunc b = base();
    if (peek() == '^') {
      ++pos;
      int neg = eat('-') ? -1 : 1;
      skip_ws();
      if (pos >= s.size() || !std::isdigit((unsigned char)s[pos]))
        fail("expected integer exponent");
      long e = 0;
      while (pos < s.size() && std::isdigit((unsigned char)s[pos]))
        e = e * 10 + (s[pos++] - '0');
      e *= neg;
      RatFunc p{Poly::constant(1)};
      for (long i = 0; i < (e < 0 ? -e : e); ++i) p = rf_mul(p, b);
      if (e < 0) p = rf_div(RatFunc{Poly::constant(1)}, p);
      b = p;
    }
    if (sign < 0) b = rf_neg(b);
    return b;
  }

  RatFunc base() {
    char c = peek();
    if (c == '(') {
      ++pos;
      RatFunc e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit((unsigned char)c)) return number();
    if (std::isalpha((unsigned char)c)) return atom();
    fail("unexpected character");
  }

  RatFunc number() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
    return RatFunc{Poly::constant(Rational(Int(s.substr(start, pos - start))))};
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() &&
           (std::isalnum((unsigned char)s[pos]) || s[pos] == '_'))
      ++pos;
    return s.substr(start, pos - start);
  }

  Arg parse_arg() {
    expect('(');
    Arg a;
    if (eat('0')) a = Arg::Zero;
    else if (eat('u')) {
      if (eat('+')) { expect('v'); a = Arg::UPV; }
      else a = Arg::U;
    } else if (eat('v')) a = Arg::V;
    else fail("expected argument tag");
    expect(')');
    return a;
  }

  RatFunc atom() {
    std::string id = ident();
    if (id.empty()) fail("expected identifier");
    if (id == "u") return RatFunc{Poly::atom(tab.spectral(0))};
    if (id == "v") return RatFunc{Poly::atom(tab.spectral(1))};
    if (id == "I") return RatFunc{Poly::atom(tab.root_const(kRootImag))};
    if (id == "sqrt2") return RatFunc{Poly::atom(tab.root_const(kRootSqrt2))};
    if (id == "exp") {
      // canonical form exp[rate](arg) or general exp(linear-in-u,v)
      skip_ws();
      if (eat('[')) {
        size_t depth = 1, start = pos;
        while (pos < s.size() && depth) {
          if (s[pos] == '[') ++depth;
          else if (s[pos] == ']') --depth;
          if (depth) ++pos;
        }
        if (depth) fail("unterminated exp[");
        std::string inner = s.substr(start, pos - start);
        ++pos; // ']'
        RatFunc rate = parse_expr(inner, tab);
        Arg a = parse_arg();
        return RatFunc{tab.exp_atom(rate, a)};
      }
      expect('(');
      RatFunc argexpr = expr();
      expect(')');
      return exp_of(argexpr);
    }
    if (id == "R") {
      bool deriv = eat('\'');
      expect('[');
      int i = small_int();
      expect(',');
      int j = small_int();
      expect(']');
      Arg a = parse_arg();
      AtomKey k;
      if (a == Arg::Zero) {
        if (!deriv) fail("R[i,j](0) must be written via the seed template");
        k = tab.init_deriv(i, j);
      } else {
        k = deriv ? tab.entry_deriv(i, j, a) : tab.entry_func(i, j, a);
      }
      return RatFunc{Poly::atom(k)};
    }
    if (id[0] == 'c' && id.size() > 1 && all_digits(id.substr(1)))
      return RatFunc{Poly::atom(tab.integration_const(std::stoi(id.substr(1))))};
    if (id[0] == 'r' && id.size() > 1 && all_digits(id.substr(1))) {
      int k = std::stoi(id.substr(1));
      bool deriv = eat('\'');
      Arg a = parse_arg();
      AtomKey key = deriv ? tab.free_func_deriv(k, a) : tab.free_func(k, a);
      return RatFunc{Poly::atom(key)};
    }
    return RatFunc{Poly::atom(tab.seed_param(id))};
  }

  static bool all_digits(const std::string& t) {
    for (char c : t)
      if (!std::isdigit((unsigned char)c)) return false;
    return !t.empty();
  }

  int small_int() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) ++pos;
    if (start == pos) fail("expected integer");
    return std::stoi(s.substr(start, pos - start));
  }

  // exp(A*u + B*v) -> exp[A](u) * exp[B](v)
  RatFunc exp_of(const RatFunc& x) {
    AtomKey ku = tab.spectral(0), kv = tab.spectral(1);
    if (x.den.contains_atom(ku) || x.den.contains_atom(kv))
      fail("exp argument denominator depends on spectral variables");
    Poly a, b;
    for (auto& t : x.num.terms()) {
      int32_t du = t.m.degree_of(ku), dv = t.m.degree_of(kv);
      if (du + dv != 1 || du < 0 || dv < 0)
        fail("exp argument must be linear in u, v with no constant part");
      Term r = t;
      r.m.e.erase(std::remove_if(r.m.e.begin(), r.m.e.end(),
                                 [&](auto& p) {
                                   return p.first == ku || p.first == kv;
                                 }),
                  r.m.e.end());
      if (du == 1) a += Poly::from_terms({r});
      else b += Poly::from_terms({r});
    }
    Poly out = Poly::constant(1);
    if (!a.is_zero()) out = out * tab.exp_atom(RatFunc(a, x.den), Arg::U);
    if (!b.is_zero()) out = out * tab.exp_atom(RatFunc(b, x.den), Arg::V);
    return RatFunc{out};
  }
};

} // namespace

RatFunc parse_expr(const std::string& text, AtomTable& tab) {
  Parser p(text, tab);
  return p.parse();
}

Poly parse_poly(const std::string& text, AtomTable& tab) {
  RatFunc f = parse_expr(text, tab);
  if (!f.is_poly())
    throw ParseError("expected polynomial, got denominator: " + text);
  return f.num;
}

} // namespace ybx
