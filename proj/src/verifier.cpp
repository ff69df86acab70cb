#include "ybx/verifier.hpp"

#include <algorithm>

namespace ybx {

namespace {

VerificationResult scan_residual(const PolyMatrix& res,
                                 VerificationResult::Which which,
                                 const AtomTable& tab) {
  VerificationResult out;
  out.checked = which;
  for (int i = 0; i < res.dim(); ++i)
    for (int j = 0; j < res.dim(); ++j)
      if (!res.at(i, j).is_zero()) {
        out.passed = false;
        out.fail_row = i + 1;
        out.fail_col = j + 1;
        out.witness =
            poly_to_string(strip_content_and_units(res.at(i, j)), tab);
        return out;
      }
  out.passed = true;
  return out;
}

} // namespace

VerificationResult verify_constant(const RMatrixSymbolic& c,
                                   const AtomTable& tab) {
  return scan_residual(ybe_residual(c, c, c),
                       VerificationResult::Which::ConstantYBE, tab);
}

VerificationResult verify_spectral(const RMatrixSymbolic& r_u, AtomTable& tab) {
  RMatrixSymbolic r_upv(r_u.n, Arg::UPV), r_v(r_u.n, Arg::V);
  for (int i = 0; i < r_u.dim(); ++i)
    for (int j = 0; j < r_u.dim(); ++j) {
      Poly e = normalize(r_u.m.at(i, j), tab);
      r_upv.m.at(i, j) = retag_from_u(e, Arg::UPV, tab);
      r_v.m.at(i, j) = retag_from_u(e, Arg::V, tab);
    }
  PolyMatrix res = ybe_residual(r_u, r_upv, r_v);
  return scan_residual(res, VerificationResult::Which::SpectralYBE, tab);
}

int symbolic_rank(const PolyMatrix& m, std::vector<Poly>* pivots) {
  PolyMatrix a = m;
  const int n = a.dim();
  int rank = 0;
  Poly prev = Poly::constant(1);
  std::vector<int> rows(n), cols(n);
  for (int i = 0; i < n; ++i) rows[i] = cols[i] = i;
  while (rank < n) {
    // smallest nonzero entry in the remaining block
    int pr = -1, pc = -1;
    size_t best = SIZE_MAX;
    for (int i = rank; i < n; ++i)
      for (int j = rank; j < n; ++j) {
        const Poly& e = a.at(rows[i], cols[j]);
        if (!e.is_zero() && e.term_count() < best) {
          best = e.term_count();
          pr = i;
          pc = j;
        }
      }
    if (pr < 0) break;
    std::swap(rows[rank], rows[pr]);
    std::swap(cols[rank], cols[pc]);
    const Poly& piv = a.at(rows[rank], cols[rank]);
    if (pivots) pivots->push_back(strip_content_and_units(piv));
    for (int i = rank + 1; i < n; ++i)
      for (int j = rank + 1; j < n; ++j) {
        Poly num = piv * a.at(rows[i], cols[j]) -
                   a.at(rows[i], cols[rank]) * a.at(rows[rank], cols[j]);
        auto q = divide_exact(num, prev);
        if (!q) throw std::runtime_error("symbolic_rank: Bareiss division failed");
        a.at(rows[i], cols[j]) = std::move(*q);
      }
    for (int i = rank + 1; i < n; ++i) a.at(rows[i], cols[rank]) = Poly();
    prev = piv;
    ++rank;
  }
  return rank;
}

Poly poly_det(const PolyMatrix& m) {
  const int n = m.dim();
  if (n == 1) return m.at(0, 0);
  // cofactor expansion along the row with the most zeros
  int bestr = 0, zeros = -1;
  for (int i = 0; i < n; ++i) {
    int z = 0;
    for (int j = 0; j < n; ++j)
      if (m.at(i, j).is_zero()) ++z;
    if (z > zeros) { zeros = z; bestr = i; }
  }
  Poly det;
  for (int j = 0; j < n; ++j) {
    const Poly& e = m.at(bestr, j);
    if (e.is_zero()) continue;
    PolyMatrix sub(n - 1);
    for (int r = 0, rr = 0; r < n; ++r) {
      if (r == bestr) continue;
      for (int c = 0, cc = 0; c < n; ++c) {
        if (c == j) continue;
        sub.at(rr, cc) = m.at(r, c);
        ++cc;
      }
      ++rr;
    }
    Poly minor = poly_det(sub);
    if ((bestr + j) % 2) minor = -minor;
    det += e * minor;
  }
  return det;
}

PolyMatrix poly_adjugate(const PolyMatrix& m) {
  const int n = m.dim();
  PolyMatrix adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      PolyMatrix sub(n - 1);
      for (int r = 0, rr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, cc = 0; c < n; ++c) {
          if (c == j) continue;
          sub.at(rr, cc) = m.at(r, c);
          ++cc;
        }
        ++rr;
      }
      Poly minor = poly_det(sub);
      if ((i + j) % 2) minor = -minor;
      adj.at(j, i) = std::move(minor); // transpose of cofactors
    }
  return adj;
}

std::map<AtomKey, Rational> random_valuation(const Poly& p,
                                             std::mt19937_64& rng) {
  std::map<AtomKey, Rational> vals;
  std::uniform_int_distribution<int> numd(1, 40), dend(1, 12);
  for (AtomKey k : p.atoms()) {
    if (key_kind(k) == AtomKind::RootConst) continue;
    vals[k] = Rational(numd(rng), dend(rng));
  }
  return vals;
}

bool random_zero_check(const Poly& p, std::mt19937_64& rng, int trials) {
  for (int t = 0; t < trials; ++t) {
    auto vals = random_valuation(p, rng);
    if (!p.eval_partial(vals).is_zero()) return false;
  }
  return true;
}

} // namespace ybx
