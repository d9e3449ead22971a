#pragma once

#include <optional>
#include <string>
#include <vector>

#include "romega/intmat.hpp"
#include "romega/rational.hpp"

namespace romega {

// Point on the d-torus with float coordinates, kept canonical in [0, 1).
struct TorusPoint {
  std::vector<double> coords;

  explicit TorusPoint(std::vector<double> c);
  static TorusPoint zero(int dim);
  int dim() const { return static_cast<int>(coords.size()); }
};

// Point with exact rational coordinates num[i]/den, 0 <= num[i] < den.
struct RationalTorusPoint {
  std::vector<Int> num;
  Int den;

  RationalTorusPoint(std::vector<Int> numerators, Int denominator);
  static RationalTorusPoint from_rationals(const std::vector<Rat>& coords);

  int dim() const { return static_cast<int>(num.size()); }
  Rat coord(int i) const { return Rat(num[i], den); }
  TorusPoint to_point() const;
  std::vector<std::string> coord_strings() const;

  bool operator==(const RationalTorusPoint& o) const;
};

// Exact lexicographic comparison by coordinate values.
bool lex_less(const RationalTorusPoint& a, const RationalTorusPoint& b);

// base is the lexicographically smallest point; period is minimal.
struct PeriodicOrbit {
  RationalTorusPoint base;
  int period;
};

struct HyperbolicityReport {
  bool accepted = false;
  bool square = false;
  std::optional<Int> det;                 // exact
  std::vector<double> eigenvalue_moduli;  // sorted ascending
  std::string reason;                     // empty when accepted
};

// Accepts iff the matrix is square with |det| = 1 (exact) and no eigenvalue
// modulus within tol of 1.
HyperbolicityReport check_hyperbolic(const std::vector<std::vector<long long>>& rows,
                                     double tol = 1e-9);

class ToralAutomorphism {
 public:
  // Throws DomainError when check_hyperbolic rejects.
  explicit ToralAutomorphism(const std::vector<std::vector<long long>>& rows,
                             double tol = 1e-9);

  int dim() const { return matrix_.dim(); }
  const IntMatrix& matrix() const { return matrix_; }
  const std::vector<double>& eigenvalue_moduli() const { return moduli_; }

  // Largest eigenvalue modulus.
  double expansion_rate() const { return moduli_.back(); }
  // max over eigenvalues of min(|mu|, 1/|mu|); the shadowing decay rate.
  double contraction_rate() const;

  // Row-major double copy of the matrix, for tight loops.
  const std::vector<double>& rows_as_double() const { return rows_dbl_; }

 private:
  IntMatrix matrix_;
  std::vector<double> moduli_;
  std::vector<double> rows_dbl_;
};

TorusPoint apply(const ToralAutomorphism& map, const TorusPoint& x);
RationalTorusPoint apply_exact(const ToralAutomorphism& map, const RationalTorusPoint& x);

// Allocation-free core of apply: out = map(in) mod 1, in/out of length dim,
// out must not alias in. apply() and the skew-product stepper both route
// through here, so their float results agree bitwise.
void apply_into(const ToralAutomorphism& map, const double* in, double* out);

// Quotient metric: Euclidean distance to the nearest integer translate.
double torus_distance(const TorusPoint& x, const TorusPoint& y);
// Exact squared quotient distance.
Rat torus_distance_sq(const RationalTorusPoint& x, const RationalTorusPoint& y);

// |det(map^n - I)|, exact. Zero cannot occur for hyperbolic maps but is
// reported rather than trusted.
Int fixed_point_count(const ToralAutomorphism& map, int n);

// All orbits through points of period dividing n, grouped by orbit with
// minimal periods, each represented by its lexicographically smallest point,
// sorted by (period, base). Total point count equals fixed_point_count.
std::vector<PeriodicOrbit> periodic_points(const ToralAutomorphism& map, int n);

// The orbit's points in iteration order starting from base.
std::vector<RationalTorusPoint> orbit_points(const ToralAutomorphism& map,
                                             const PeriodicOrbit& orbit);

// All orbits with minimal period <= n_max, sorted by (period, base).
// Throws DomainError when some fixed_point_count(map, n) exceeds budget.
std::vector<PeriodicOrbit> orbits_up_to(const ToralAutomorphism& map, int n_max,
                                        const Int& budget);

}  // namespace romega
