#ifndef YBX_IO_HPP
#define YBX_IO_HPP

#include <stdexcept>
#include <string>

#include "ybx/poly.hpp"

namespace ybx {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Parses an expression over the atom grammar into a rational function,
// registering atoms in `tab` on first use. Grammar (explicit operators):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := ('-'|'+')* base ('^' int)?
//   base    := number | '(' expr ')' | atom
//   atom    := 'u' | 'v' | 'I' | 'sqrt2'
//            | 'c' k | 'r' k '\''? '(' arg ')'
//            | 'R' '\''? '[' i ',' j ']' '(' arg ')'
//            | 'exp' '(' expr ')'            (argument linear in u, v)
//            | identifier                     (seed parameter)
//   arg     := '0' | 'u' | 'v' | 'u+v'
// exp arguments are decomposed through the addition law:
//   exp(A*u + B*v) = exp[A](u) * exp[B](v).
RatFunc parse_expr(const std::string& text, AtomTable& tab);

// Convenience: parse and require a polynomial (denominator 1).
Poly parse_poly(const std::string& text, AtomTable& tab);

} // namespace ybx

#endif
