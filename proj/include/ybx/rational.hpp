#ifndef YBX_RATIONAL_HPP
#define YBX_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>
#include <optional>
#include <string>

namespace ybx {

using Int = boost::multiprecision::mpz_int;
// Always stored canonical: gcd(|num|, den) = 1, den > 0, zero is 0/1.
// GMP's mpq maintains exactly this invariant.
using Rational = boost::multiprecision::mpq_rational;

inline Int num(const Rational& q) { return numerator(q); }
inline Int den(const Rational& q) { return denominator(q); }

inline bool is_integer(const Rational& q) { return den(q) == 1; }

// Exact square root of a rational, if it is a perfect square.
std::optional<Rational> rational_sqrt(const Rational& q);

// Canonical text form: "n" or "n/d", d > 0.
std::string to_string(const Rational& q);

// Parses the canonical form; returns nullopt on malformed input.
std::optional<Rational> parse_rational(const std::string& s);

} // namespace ybx

#endif
