#include "romega/seq.hpp"

#include <cmath>

#include "romega/errors.hpp"

namespace romega {

namespace {

void trim(std::vector<double>& e) {
  while (!e.empty() && e.back() == 0.0) e.pop_back();
}

}  // namespace

SeqVector::SeqVector(std::vector<double> e) : entries(std::move(e)) {
  for (double v : entries) {
    if (!std::isfinite(v)) throw DomainError("non-finite sequence entry");
  }
  trim(entries);
}

double SeqVector::coord(int k) const {
  if (k < 1) throw UsageError("coordinates are 1-based");
  return k <= support() ? entries[static_cast<size_t>(k - 1)] : 0.0;
}

double SeqVector::euclidean_norm() const {
  double sq = 0.0;
  for (double v : entries) sq += v * v;
  return std::sqrt(sq);
}

SeqVector operator+(const SeqVector& a, const SeqVector& b) {
  std::vector<double> e(static_cast<size_t>(std::max(a.support(), b.support())), 0.0);
  for (int k = 1; k <= static_cast<int>(e.size()); ++k)
    e[static_cast<size_t>(k - 1)] = a.coord(k) + b.coord(k);
  return SeqVector(std::move(e));
}

SeqVector operator-(const SeqVector& a, const SeqVector& b) {
  std::vector<double> e(static_cast<size_t>(std::max(a.support(), b.support())), 0.0);
  for (int k = 1; k <= static_cast<int>(e.size()); ++k)
    e[static_cast<size_t>(k - 1)] = a.coord(k) - b.coord(k);
  return SeqVector(std::move(e));
}

SeqVector operator*(double s, const SeqVector& a) {
  std::vector<double> e = a.entries;
  for (double& v : e) v *= s;
  return SeqVector(std::move(e));
}

double product_metric(const SeqVector& a, const SeqVector& b) {
  const int n = std::max(a.support(), b.support());
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    double d = std::abs(a.coord(k) - b.coord(k));
    sum += std::ldexp(d / (1.0 + d), -k);
  }
  return sum;
}

SeqVector truncate(const SeqVector& a, int n) {
  if (n < 0) throw UsageError("truncation level must be non-negative");
  std::vector<double> e = a.entries;
  if (static_cast<int>(e.size()) > n) e.resize(static_cast<size_t>(n));
  return SeqVector(std::move(e));
}

LinearFunctional::LinearFunctional(int lvl, std::vector<double> coeffs)
    : level(lvl), coefficients(std::move(coeffs)) {
  if (level < 1 || static_cast<int>(coefficients.size()) != level) {
    throw UsageError("functional level must match coefficient count");
  }
  bool nonzero = false;
  for (double c : coefficients) {
    if (!std::isfinite(c)) throw DomainError("non-finite functional coefficient");
    if (c != 0.0) nonzero = true;
  }
  if (!nonzero) throw DomainError("zero functional is not a valid witness");
}

double pair(const LinearFunctional& f, const SeqVector& a) {
  double s = 0.0;
  for (int k = 1; k <= f.level; ++k)
    s += f.coefficients[static_cast<size_t>(k - 1)] * a.coord(k);
  return s;
}

Rat pair_exact(const std::vector<Rat>& coeffs, const SeqVector& a) {
  Rat s = 0;
  for (int k = 1; k <= static_cast<int>(coeffs.size()); ++k) {
    double v = a.coord(k);
    if (v != 0.0) s += coeffs[static_cast<size_t>(k - 1)] * exact_rational(v);
  }
  return s;
}

}  // namespace romega
