#pragma once

#include <vector>

#include "romega/rational.hpp"

namespace romega {

// Dense square integer matrix with exact arithmetic. Sized for the small
// dimensions of toral automorphisms, not for bulk linear algebra.
class IntMatrix {
 public:
  IntMatrix() = default;
  explicit IntMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

  static IntMatrix identity(int dim);
  // Throws UsageError on ragged or non-square input.
  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);

  int dim() const { return dim_; }
  Int& at(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const Int& at(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  IntMatrix pow(unsigned k) const;
  std::vector<Int> apply(const std::vector<Int>& v) const;

  // Bareiss fraction-free elimination; exact.
  Int determinant() const;

  bool operator==(const IntMatrix& o) const { return dim_ == o.dim_ && a_ == o.a_; }

 private:
  int dim_ = 0;
  std::vector<Int> a_;
};

// Column operations V (unimodular) such that U*M*V is diag(diag) for some
// unimodular U that is not tracked. Entries are made positive; the
// divisibility chain of the full Smith form is not enforced, which is enough
// for solving M*x = 0 mod Z^d. Requires det(M) != 0.
struct SmithDiagonal {
  std::vector<Int> diag;
  IntMatrix col_ops;
};

SmithDiagonal smith_diagonalize(const IntMatrix& m);

}  // namespace romega
