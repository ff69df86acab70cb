#ifndef YBX_ATOMS_HPP
#define YBX_ATOMS_HPP

#include <cstdint>
#include <string>

namespace ybx {

// Argument tag of a function-valued atom.
enum class Arg : uint8_t { Zero = 0, U = 1, V = 2, UPV = 3 };

enum class AtomKind : uint8_t {
  EntryFunc = 0,     // R_{row,col}(arg): unknown matrix entry
  EntryDeriv = 1,    // R'_{row,col}(arg)
  InitDeriv = 2,     // R'_{row,col}(0)
  FreeFunc = 3,      // r_k(arg): arbitrary scalar function
  FreeFuncDeriv = 4, // r_k'(arg)
  SpectralVar = 5,   // u (index 0), v (index 1)
  SeedParam = 6,     // named parameter of a seed class
  IntegrationConst = 7, // c_k
  ExpAtom = 8,       // exp(rate * arg), rate indexed in the AtomTable
  RootConst = 9,     // named constant with rational square (I^2 = -1, S2^2 = 2)
};

// Root tags carried inside the key so monomial arithmetic can fold
// squares without a table lookup.
inline constexpr uint16_t kRootNone = 0;
inline constexpr uint16_t kRootImag = 1;  // I^2 = -1
inline constexpr uint16_t kRootSqrt2 = 2; // S2^2 = 2

// Atom identity packed into a single ordered key.
//   bits 62..63  order class (0 = unknown-class, 1 = parameter-class)
//   bits 22..61  registration id
//   bits 14..21  kind
//   bits  6..13  arg
//   bits  0..5   root tag
// Unknown-class atoms (EntryFunc, EntryDeriv, InitDeriv) order before all
// parameter-class atoms; within a class, registration order.
using AtomKey = uint64_t;
using AtomId = uint32_t;

inline constexpr int order_class(AtomKind k) {
  switch (k) {
    case AtomKind::EntryFunc:
    case AtomKind::EntryDeriv:
    case AtomKind::InitDeriv:
      return 0;
    default:
      return 1;
  }
}

inline constexpr AtomKey make_key(AtomId id, AtomKind kind, Arg arg,
                                  uint16_t root_tag = kRootNone) {
  return (AtomKey(order_class(kind)) << 62) | (AtomKey(id) << 22) |
         (AtomKey(uint8_t(kind)) << 14) | (AtomKey(uint8_t(arg)) << 6) |
         AtomKey(root_tag & 0x3f);
}

inline constexpr AtomId key_id(AtomKey k) { return AtomId((k >> 22) & 0xffffffffffull); }
inline constexpr AtomKind key_kind(AtomKey k) { return AtomKind((k >> 14) & 0xff); }
inline constexpr Arg key_arg(AtomKey k) { return Arg((k >> 6) & 0xff); }
inline constexpr uint16_t key_root(AtomKey k) { return uint16_t(k & 0x3f); }
inline constexpr bool key_is_unknown_class(AtomKey k) { return (k >> 62) == 0; }

// Exp atoms and root constants are units of the coefficient ring: they may
// carry negative exponents and never vanish.
inline constexpr bool key_is_unit_atom(AtomKey k) {
  AtomKind kd = key_kind(k);
  return kd == AtomKind::ExpAtom || kd == AtomKind::RootConst;
}

std::string arg_suffix(Arg a); // "0", "u", "v", "u+v"

} // namespace ybx

#endif
