#include "romega/intmat.hpp"

#include <cstdlib>
#include <utility>

#include "romega/errors.hpp"

namespace romega {

IntMatrix IntMatrix::identity(int dim) {
  IntMatrix m(dim);
  for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw UsageError("empty matrix");
  IntMatrix m(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw UsageError("matrix is not square");
    }
    for (int j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  if (dim_ != o.dim_) throw UsageError("dimension mismatch in matrix product");
  IntMatrix r(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int k = 0; k < dim_; ++k) {
      const Int& aik = at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
    }
  }
  return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  if (dim_ != o.dim_) throw UsageError("dimension mismatch in matrix difference");
  IntMatrix r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r.at(i, j) = at(i, j) - o.at(i, j);
  return r;
}

IntMatrix IntMatrix::pow(unsigned k) const {
  IntMatrix result = identity(dim_);
  IntMatrix base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    base = base * base;
    k >>= 1u;
  }
  return result;
}

std::vector<Int> IntMatrix::apply(const std::vector<Int>& v) const {
  if (static_cast<int>(v.size()) != dim_) {
    throw UsageError("dimension mismatch in matrix-vector product");
  }
  std::vector<Int> r(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) r[i] += at(i, j) * v[j];
  return r;
}

Int IntMatrix::determinant() const {
  const int n = dim_;
  if (n == 0) return 1;
  IntMatrix w = *this;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (w.at(k, k) == 0) {
      int r = -1;
      for (int i = k + 1; i < n; ++i) {
        if (w.at(i, k) != 0) {
          r = i;
          break;
        }
      }
      if (r < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(w.at(k, j), w.at(r, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        // Bareiss update; the division is exact.
        w.at(i, j) = (w.at(i, j) * w.at(k, k) - w.at(i, k) * w.at(k, j)) / prev;
      }
      w.at(i, k) = 0;
    }
    prev = w.at(k, k);
  }
  return sign > 0 ? w.at(n - 1, n - 1) : -w.at(n - 1, n - 1);
}

namespace {

// Smallest nonzero |entry| in the trailing block starting at (t, t).
bool find_pivot(const IntMatrix& w, int t, int* pi, int* pj) {
  const int n = w.dim();
  bool found = false;
  Int best;
  for (int i = t; i < n; ++i) {
    for (int j = t; j < n; ++j) {
      const Int& v = w.at(i, j);
      if (v == 0) continue;
      Int a = abs(v);
      if (!found || a < best) {
        found = true;
        best = a;
        *pi = i;
        *pj = j;
      }
    }
  }
  return found;
}

}  // namespace

SmithDiagonal smith_diagonalize(const IntMatrix& m) {
  const int n = m.dim();
  IntMatrix w = m;
  IntMatrix v = IntMatrix::identity(n);
  for (int t = 0; t < n; ++t) {
    for (;;) {
      int pi = 0, pj = 0;
      if (!find_pivot(w, t, &pi, &pj)) {
        throw DomainError("singular matrix in Smith diagonalization");
      }
      if (pi != t)
        for (int j = 0; j < n; ++j) std::swap(w.at(t, j), w.at(pi, j));
      if (pj != t) {
        for (int i = 0; i < n; ++i) {
          std::swap(w.at(i, t), w.at(i, pj));
          std::swap(v.at(i, t), v.at(i, pj));
        }
      }
      bool clean = true;
      for (int i = t + 1; i < n; ++i) {
        if (w.at(i, t) == 0) continue;
        Int q = w.at(i, t) / w.at(t, t);
        if (q != 0)
          for (int j = t; j < n; ++j) w.at(i, j) -= q * w.at(t, j);
        if (w.at(i, t) != 0) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        if (w.at(t, j) == 0) continue;
        Int q = w.at(t, j) / w.at(t, t);
        if (q != 0) {
          for (int i = 0; i < n; ++i) {
            w.at(i, j) -= q * w.at(i, t);
            v.at(i, j) -= q * v.at(i, t);
          }
        }
        if (w.at(t, j) != 0) clean = false;
      }
      if (clean) break;
    }
    if (w.at(t, t) < 0) {
      for (int i = 0; i < n; ++i) {
        w.at(i, t) = -w.at(i, t);
        v.at(i, t) = -v.at(i, t);
      }
    }
  }
  SmithDiagonal out;
  out.diag.resize(n);
  for (int t = 0; t < n; ++t) out.diag[t] = w.at(t, t);
  out.col_ops = std::move(v);
  return out;
}

}  // namespace romega
