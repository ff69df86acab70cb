#ifndef YBX_RMATRIX_HPP
#define YBX_RMATRIX_HPP

#include <array>
#include <vector>

#include "ybx/poly.hpp"

namespace ybx {

// Hietarinta index convention: R = sum R_ij^kl E_jl (x) E_ik, which places
// R_ij^kl at flat row (j-1)*N + i, column (l-1)*N + k (1-based throughout).
struct HietarintaIndex {
  int i, j, k, l;
};

inline int hiet_row(const HietarintaIndex& h, int n) { return (h.j - 1) * n + h.i; }
inline int hiet_col(const HietarintaIndex& h, int n) { return (h.l - 1) * n + h.k; }
inline HietarintaIndex hiet_from_flat(int row, int col, int n) {
  return HietarintaIndex{(row - 1) % n + 1, (row - 1) / n + 1,
                         (col - 1) % n + 1, (col - 1) / n + 1};
}

// Square matrix of polynomials; rows/cols are 0-based in storage, the
// Hietarinta helpers above speak 1-based.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  explicit PolyMatrix(int dim) : dim_(dim), e_(size_t(dim) * dim) {}

  int dim() const { return dim_; }
  Poly& at(int r, int c) { return e_[size_t(r) * dim_ + c]; }
  const Poly& at(int r, int c) const { return e_[size_t(r) * dim_ + c]; }

  static PolyMatrix identity(int dim);
  bool is_zero() const;
  bool operator==(const PolyMatrix& o) const { return dim_ == o.dim_ && e_ == o.e_; }

  friend PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
  friend PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);

 private:
  int dim_ = 0;
  std::vector<Poly> e_;
};

// A symbolic R-matrix: N^2 x N^2 matrix of polynomials tagged with the
// spectral argument its entries carry.
struct RMatrixSymbolic {
  int n = 2; // auxiliary dimension N
  Arg arg = Arg::Zero;
  PolyMatrix m;

  RMatrixSymbolic() : m(4) {}
  RMatrixSymbolic(int n_, Arg a) : n(n_), arg(a), m(n_ * n_) {}
  int dim() const { return n * n; }
};

struct DimensionMismatch : std::runtime_error {
  DimensionMismatch() : std::runtime_error("dimension mismatch") {}
};

// Three-site embeddings on A (x) A (x) A.
enum class Slot { S12, S13, S23 };
PolyMatrix embed(const RMatrixSymbolic& r, Slot slot);

// R12(a) R13(b) R23(c) - R23(c) R13(b) R12(a)
PolyMatrix ybe_residual(const RMatrixSymbolic& ra, const RMatrixSymbolic& rb,
                        const RMatrixSymbolic& rc);

// Generic unknown R(u): every entry is the EntryFunc atom R[r,c](arg).
RMatrixSymbolic unknown_rmatrix(AtomTable& tab, int n, Arg arg);
// Its entrywise derivative atoms R'[r,c](arg).
RMatrixSymbolic unknown_rmatrix_deriv(AtomTable& tab, int n, Arg arg);
// R'(0): InitDeriv atoms.
RMatrixSymbolic init_deriv_rmatrix(AtomTable& tab, int n);

} // namespace ybx

#endif
