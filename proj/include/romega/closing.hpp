#pragma once

#include <vector>

#include "romega/cocycle.hpp"
#include "romega/torus.hpp"

namespace romega {

struct ClosingConstants {
  double c = 0.0;
  double lambda = 0.0;  // in (0, 1)
};

struct NearReturn {
  TorusPoint x;
  int n = 0;
  double epsilon = 0.0;  // d(map^n x, x) of the true orbit, rounded once
};

// All n in 1..max_steps with d(map^n x, x) < eps, ascending. The orbit is
// walked exactly (x lifts to rationals with no loss), so returns are real
// at any n; a float orbit would fabricate them past a hundred steps.
std::vector<NearReturn> find_near_returns(const ToralAutomorphism& map, const TorusPoint& x,
                                          double eps, int max_steps);

struct ClosedOrbit {
  RationalTorusPoint point;
  int n = 0;
  // Some component of (map^n - I) * lift(x) was exactly half-integral; the
  // lexicographically smaller integer was chosen.
  bool rounding_tie = false;
  std::vector<int> tie_components;
};

// The period-n point shadowing a near-return, solved exactly: round
// (map^n - I) * lift(x) to the nearest integer vector m and return the
// fractional part of (map^n - I)^{-1} m. Exact periodicity is re-checked.
ClosedOrbit close_orbit(const ToralAutomorphism& map, const NearReturn& ret);

// Shadowing decay rate: max over eigenvalues of min(|mu|, 1/|mu|).
double theoretical_contraction(const ToralAutomorphism& map);

struct ShadowingReport {
  std::vector<double> ratios;  // r_i for i = 0..n
  double max_ratio = 0.0;
  ClosingConstants fitted;  // c = max_ratio, lambda = theoretical rate
  double epsilon = 0.0;
  bool degenerate = false;  // epsilon == 0; ratios undefined, distances exact
};

// r_i = d(map^i x, map^i p) / (lambda^min(i, n-i) * eps), i = 0..n, both
// orbits exact, eps the true return distance. lambda^(n/2) underflows to 0
// somewhere past n ~ 2900, so ratios are only meaningful below that.
ShadowingReport verify_shadowing(const ToralAutomorphism& map, const TorusPoint& x,
                                 const RationalTorusPoint& p, int n);

// Sum over i < n of the Euclidean norm of f(map^i x) - f(map^i p), both
// orbits exact; bounded by L_f * c * eps * 2/(1 - lambda) under shadowing.
double weight_closeness(const Cocycle& f, const ToralAutomorphism& map, const TorusPoint& x,
                        const RationalTorusPoint& p, int n);

}  // namespace romega
