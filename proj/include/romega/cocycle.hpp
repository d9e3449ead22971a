#pragma once

#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "romega/seq.hpp"
#include "romega/torus.hpp"

namespace romega {

// Tent profile: amplitude * max(0, 1 - torus_distance(x, center)/radius).
// Lipschitz with constant |amplitude|/radius, supported in the radius-ball.
struct Bump {
  TorusPoint center;
  double radius;
  double amplitude;
  // Kept when the bump sits on a periodic point, for exact disjointness
  // checks.
  std::optional<RationalTorusPoint> exact_center;
};

double bump_value(const Bump& b, const TorusPoint& x);

struct Constant {
  double value = 0.0;
};

struct TrigTerm {
  std::vector<long long> frequency;
  double cos_coeff = 0.0;
  double sin_coeff = 0.0;
};

struct TrigPoly {
  std::vector<TrigTerm> terms;
};

struct BumpSum {
  std::vector<Bump> bumps;
};

using CoordinateFunction = std::variant<Constant, TrigPoly, BumpSum>;
using CoordinatePtr = std::shared_ptr<const CoordinateFunction>;

double coordinate_value(const CoordinateFunction& fn, const TorusPoint& x);
// Certified Lipschitz bound: 0 for constants, sum of 2*pi*|k|*(|c|+|s|) for
// trig terms, max |amplitude|/radius over bumps.
double coordinate_lipschitz(const CoordinateFunction& fn);
// Certified sup-norm bound.
double coordinate_sup(const CoordinateFunction& fn);

// Map from the base torus into the sequence space: finitely many coordinate
// functions, all further coordinates zero. Coordinates are shared immutably,
// so truncations alias their originals.
class Cocycle {
 public:
  Cocycle(int base_dim, double holder_exponent, std::vector<CoordinatePtr> coordinates);

  int base_dim() const { return base_dim_; }
  double holder_exponent() const { return holder_exponent_; }
  int coordinate_count() const { return static_cast<int>(coords_.size()); }
  const CoordinateFunction& coordinate(int k) const;  // 1-based
  CoordinatePtr coordinate_ptr(int k) const;

  std::vector<double> lipschitz_bounds() const;
  // sqrt of the sum of squared per-coordinate bounds; Lipschitz constant for
  // the Euclidean norm on the support.
  double euclidean_lipschitz() const;

  // Writes coordinate values into out[0..count-1]. The single evaluation
  // primitive: every caller (evaluate, Birkhoff sums, skew steps) goes
  // through here so float results agree bitwise.
  void evaluate_into(const TorusPoint& x, double* out) const;

 private:
  int base_dim_;
  double holder_exponent_;
  std::vector<CoordinatePtr> coords_;
};

SeqVector evaluate(const Cocycle& f, const TorusPoint& x);

// Sum of f over the first k points of the forward orbit; k = 0 gives zero.
SeqVector birkhoff_sum(const Cocycle& f, const ToralAutomorphism& map, const TorusPoint& x,
                       long long k);

struct WeightEntry {
  PeriodicOrbit orbit;
  SeqVector weight;  // Birkhoff sum over the minimal period, exact orbit
};

struct PeriodicData {
  std::vector<WeightEntry> entries;
};

inline constexpr long long kDefaultEnumerationBudget = 10'000'000;

PeriodicData periodic_data(const Cocycle& f, const ToralAutomorphism& map, int n_max,
                           const Int& budget = Int(kDefaultEnumerationBudget));

struct DistanceEstimate {
  double lower_bound = 0.0;
  std::optional<double> upper_bound;  // certified when present
};

// Sup over the base of the product metric between f(x) and g(x): lower bound
// from a regular grid with grid_per_dim points per dimension, certified upper
// bound from per-coordinate sup bounds (coordinates shared by f and g
// contribute nothing).
DistanceEstimate sup_distance(const Cocycle& f, const Cocycle& g, int grid_per_dim);

struct PairSampleSpec {
  int grid_per_dim = 8;
  // Short displacements probing the local ratio near each grid point.
  std::vector<double> offsets = {1e-3, 1e-2, 0.1};
};

// Hölder seminorm sup_{x != y} d(Δ(x), Δ(y)) / torus_distance(x,y)^alpha for
// Δ = f - g: sampled lower bound and certified upper bound from Lipschitz and
// sup bounds per coordinate.
DistanceEstimate holder_distance(const Cocycle& f, const Cocycle& g, double alpha,
                                 const PairSampleSpec& sample = {});

// pi_n composed with f: coordinates past n dropped, shared with f.
Cocycle truncation_perturbation(const Cocycle& f, int n);

struct ConstructionOptions {
  // Per-level bump amplitude = min(2^-(k-1), amplitude_cap) * radius. The cap
  // trades fiber diffusion speed against the Lipschitz schedule; 1 keeps the
  // plain power-of-two schedule.
  double amplitude_cap = 1.0;
  // Select the 2^levels smallest orbits of one shared period instead of the
  // 2^levels smallest overall. Sign patterns split each level in half, so
  // equal periods cancel the signed sum of weights exactly: the cocycle has
  // zero space mean and Birkhoff sums carry no linear drift. The transitivity
  // diagnostic needs this; a drifting fiber exits any fixed window.
  bool equal_period_only = false;
  Int enumeration_budget = Int(kDefaultEnumerationBudget);
};

struct ConstructionLog {
  std::vector<PeriodicOrbit> selected_orbits;
  std::vector<std::vector<int>> sign_patterns;  // per orbit, per level, +1/-1
  double min_pairwise_distance = 0.0;
  double radius = 0.0;
  std::vector<double> amplitudes;        // per level
  std::vector<double> lipschitz_bounds;  // per level
  std::vector<bool> orthant_covered;     // per level, over selected orbits
  int bump_count = 0;
};

struct ConstructionResult {
  Cocycle cocycle;
  ConstructionLog log;
};

// Builds N coordinates of signed tent bumps over the 2^N smallest periodic
// orbits (period, then lexicographic order; one shared period under
// equal_period_only), one full sign pattern per orbit, so the level-k
// periodic weights of the selected orbits sit strictly inside every orthant
// of R^k for each k <= N. Supports are pairwise disjoint, verified in exact
// arithmetic.
ConstructionResult construct_inseparable(const ToralAutomorphism& map, int levels,
                                         int orbit_period_max,
                                         const ConstructionOptions& opts = {});

}  // namespace romega
