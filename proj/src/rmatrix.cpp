#include "ybx/rmatrix.hpp"

namespace ybx {

PolyMatrix PolyMatrix::identity(int dim) {
  PolyMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = Poly::constant(1);
  return m;
}

bool PolyMatrix::is_zero() const {
  for (auto& p : e_)
    if (!p.is_zero()) return false;
  return true;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.dim_ != b.dim_) throw DimensionMismatch();
  PolyMatrix r(a.dim_);
  for (int i = 0; i < a.dim_; ++i)
    for (int k = 0; k < a.dim_; ++k) {
      const Poly& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (int j = 0; j < a.dim_; ++j) {
        const Poly& bkj = b.at(k, j);
        if (bkj.is_zero()) continue;
        r.at(i, j) += aik * bkj;
      }
    }
  return r;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.dim_ != b.dim_) throw DimensionMismatch();
  PolyMatrix r(a.dim_);
  for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] - b.e_[i];
  return r;
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.dim_ != b.dim_) throw DimensionMismatch();
  PolyMatrix r(a.dim_);
  for (size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
  return r;
}

PolyMatrix embed(const RMatrixSymbolic& r, Slot slot) {
  const int n = r.n;
  const int d2 = n * n, d3 = d2 * n;
  if (r.m.dim() != d2) throw DimensionMismatch();
  PolyMatrix out(d3);
  // phi_12(E_jl (x) E_ik) = E_jl (x) E_ik (x) 1   [rows (j,i,m), cols (l,k,m)]
  // phi_23(E_jl (x) E_ik) = 1 (x) E_jl (x) E_ik   [rows (m,j,i), cols (m,l,k)]
  // phi_13(E_jl (x) E_ik) = E_jl (x) 1 (x) E_ik   [rows (j,m,i), cols (l,m,k)]
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l) {
          const Poly& v =
              r.m.at(hiet_row({i, j, k, l}, n) - 1, hiet_col({i, j, k, l}, n) - 1);
          if (v.is_zero()) continue;
          for (int m = 1; m <= n; ++m) {
            int row, col;
            switch (slot) {
              case Slot::S12:
                row = ((j - 1) * n + (i - 1)) * n + m;
                col = ((l - 1) * n + (k - 1)) * n + m;
                break;
              case Slot::S23:
                row = ((m - 1) * n + (j - 1)) * n + i;
                col = ((m - 1) * n + (l - 1)) * n + k;
                break;
              case Slot::S13:
                row = ((j - 1) * n + (m - 1)) * n + i;
                col = ((l - 1) * n + (m - 1)) * n + k;
                break;
            }
            out.at(row - 1, col - 1) += v;
          }
        }
  return out;
}

PolyMatrix ybe_residual(const RMatrixSymbolic& ra, const RMatrixSymbolic& rb,
                        const RMatrixSymbolic& rc) {
  if (ra.n != rb.n || rb.n != rc.n) throw DimensionMismatch();
  PolyMatrix a = embed(ra, Slot::S12);
  PolyMatrix b = embed(rb, Slot::S13);
  PolyMatrix c = embed(rc, Slot::S23);
  return a * b * c - c * b * a;
}

RMatrixSymbolic unknown_rmatrix(AtomTable& tab, int n, Arg arg) {
  RMatrixSymbolic r(n, arg);
  for (int i = 0; i < n * n; ++i)
    for (int j = 0; j < n * n; ++j)
      r.m.at(i, j) = Poly::atom(tab.entry_func(i + 1, j + 1, arg));
  return r;
}

RMatrixSymbolic unknown_rmatrix_deriv(AtomTable& tab, int n, Arg arg) {
  RMatrixSymbolic r(n, arg);
  for (int i = 0; i < n * n; ++i)
    for (int j = 0; j < n * n; ++j)
      r.m.at(i, j) = Poly::atom(tab.entry_deriv(i + 1, j + 1, arg));
  return r;
}

RMatrixSymbolic init_deriv_rmatrix(AtomTable& tab, int n) {
  RMatrixSymbolic r(n, Arg::Zero);
  for (int i = 0; i < n * n; ++i)
    for (int j = 0; j < n * n; ++j)
      r.m.at(i, j) = Poly::atom(tab.init_deriv(i + 1, j + 1));
  return r;
}

} // namespace ybx
