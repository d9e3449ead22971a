#pragma once

#include <vector>

#include "romega/rational.hpp"

namespace romega {

// Finitely supported element of the countable product of lines: coordinate k
// (1-based) is entries[k-1], and every coordinate past the stored range is
// zero. Trailing zeros are trimmed so equal vectors compare equal.
struct SeqVector {
  std::vector<double> entries;

  SeqVector() = default;
  explicit SeqVector(std::vector<double> e);

  int support() const { return static_cast<int>(entries.size()); }
  double coord(int k) const;  // 1-based, zero beyond support

  double euclidean_norm() const;
  bool operator==(const SeqVector& o) const { return entries == o.entries; }
};

SeqVector operator+(const SeqVector& a, const SeqVector& b);
SeqVector operator-(const SeqVector& a, const SeqVector& b);
SeqVector operator*(double s, const SeqVector& a);

// Product metric sum over coordinates of 2^-k * |dk| / (1 + |dk|).
// Always < 1; a genuine metric, invariant under which trailing zeros are
// stored.
double product_metric(const SeqVector& a, const SeqVector& b);

// Zeroes every coordinate past n. Requires n >= 0.
SeqVector truncate(const SeqVector& a, int n);

// Functional reading only coordinates 1..level; pairing is a finite dot
// product, so it is continuous and truncation-invariant past its level.
struct LinearFunctional {
  int level;
  std::vector<double> coefficients;  // size == level, not all zero

  LinearFunctional(int lvl, std::vector<double> coeffs);
};

double pair(const LinearFunctional& f, const SeqVector& a);

// Exact pairing for certificate re-verification.
Rat pair_exact(const std::vector<Rat>& coeffs, const SeqVector& a);

}  // namespace romega
