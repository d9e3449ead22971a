#include "romega/closing.hpp"

#include <cmath>

#include "romega/errors.hpp"

namespace romega {

namespace {

// Exact solve of M y = b by Gauss-Jordan over the rationals; M square,
// det != 0 checked by the caller.
std::vector<Rat> solve_rational(const IntMatrix& m, const std::vector<Rat>& b) {
  const int n = m.dim();
  std::vector<std::vector<Rat>> aug(static_cast<size_t>(n),
                                    std::vector<Rat>(static_cast<size_t>(n) + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug[i][j] = Rat(m.at(i, j));
    aug[i][static_cast<size_t>(n)] = b[static_cast<size_t>(i)];
  }
  for (int c = 0; c < n; ++c) {
    int sel = c;
    while (sel < n && aug[sel][c] == 0) ++sel;
    if (sel == n) throw DomainError("singular system in orbit closing");
    std::swap(aug[static_cast<size_t>(sel)], aug[static_cast<size_t>(c)]);
    const Rat piv = aug[c][c];
    for (int j = c; j <= n; ++j) aug[c][j] /= piv;
    for (int i = 0; i < n; ++i) {
      if (i == c || aug[i][c] == 0) continue;
      const Rat f = aug[i][c];
      for (int j = c; j <= n; ++j) aug[i][j] -= f * aug[c][j];
    }
  }
  std::vector<Rat> y(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<size_t>(i)] = aug[i][static_cast<size_t>(n)];
  return y;
}

// Doubles are dyadic rationals, so a float point lifts exactly.
RationalTorusPoint exact_lift(const TorusPoint& x) {
  std::vector<Rat> coords(x.coords.size());
  for (size_t i = 0; i < x.coords.size(); ++i) coords[i] = exact_rational(x.coords[i]);
  return RationalTorusPoint::from_rationals(coords);
}

}  // namespace

std::vector<NearReturn> find_near_returns(const ToralAutomorphism& map, const TorusPoint& x,
                                          double eps, int max_steps) {
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  if (max_steps < 1) throw UsageError("max_steps must be positive");
  if (x.dim() != map.dim()) throw UsageError("point dimension does not match map");
  // A float orbit drifts from the true one at the expansion rate and is
  // useless past a hundred or so steps. The exact orbit is cheap instead:
  // an integer matrix keeps the lifted denominator fixed, so each step is
  // an integer matrix-vector product mod den.
  const RationalTorusPoint start = exact_lift(x);
  const int d = map.dim();
  const Int& den = start.den;
  std::vector<Int> cur = start.num, next(static_cast<size_t>(d));
  // dist_sq < eps^2 iff acc * bound_den < bound_num with acc = dist_sq * den^2.
  const Rat bound = exact_rational(eps) * exact_rational(eps) * Rat(den * den);
  const Int bound_num = numerator(bound), bound_den = denominator(bound);
  const double den_d = static_cast<double>(den);
  const IntMatrix& m = map.matrix();
  std::vector<NearReturn> out;
  for (int n = 1; n <= max_steps; ++n) {
    for (int i = 0; i < d; ++i) {
      Int acc = 0;
      for (int j = 0; j < d; ++j) {
        acc += m.at(i, j) * cur[static_cast<size_t>(j)];
      }
      acc %= den;
      if (acc < 0) acc += den;
      next[static_cast<size_t>(i)] = std::move(acc);
    }
    std::swap(cur, next);
    Int dist_sq = 0;
    for (int i = 0; i < d; ++i) {
      Int diff = cur[static_cast<size_t>(i)] - start.num[static_cast<size_t>(i)];
      if (diff < 0) diff = -diff;
      if (diff * 2 > den) diff = den - diff;
      dist_sq += diff * diff;
    }
    if (dist_sq * bound_den < bound_num) {
      const double dd = std::sqrt(static_cast<double>(dist_sq)) / den_d;
      out.push_back(NearReturn{x, n, dd});
    }
  }
  return out;
}

ClosedOrbit close_orbit(const ToralAutomorphism& map, const NearReturn& ret) {
  if (ret.n < 1) throw UsageError("near-return period must be positive");
  if (ret.x.dim() != map.dim()) throw UsageError("point dimension does not match map");
  const int d = map.dim();
  IntMatrix m =
      map.matrix().pow(static_cast<unsigned>(ret.n)) - IntMatrix::identity(d);
  if (m.determinant() == 0) {
    throw DomainError("det(A^n - I) vanishes; cannot close a period-" +
                      std::to_string(ret.n) + " return");
  }

  bool rounding_tie = false;
  std::vector<int> tie_components;
  std::vector<Rat> target(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) {
    Rat row = 0;
    for (int j = 0; j < d; ++j) {
      row += Rat(m.at(i, j)) * exact_rational(ret.x.coords[static_cast<size_t>(j)]);
    }
    // Nearest integer; an exact half goes down, making m lexicographically
    // smallest among the tied choices.
    Rat frac = rat_fract(row);
    Int rounded = rat_floor(row);
    if (frac > Rat(1, 2)) {
      ++rounded;
    } else if (frac == Rat(1, 2)) {
      rounding_tie = true;
      tie_components.push_back(i);
    }
    target[static_cast<size_t>(i)] = Rat(rounded);
  }

  std::vector<Rat> p = solve_rational(m, target);
  ClosedOrbit closed{RationalTorusPoint::from_rationals(p), ret.n, rounding_tie,
                     std::move(tie_components)};

  RationalTorusPoint check = closed.point;
  for (int i = 0; i < ret.n; ++i) check = apply_exact(map, check);
  if (!(check == closed.point)) {
    throw DomainError("closed orbit failed the exact periodicity re-check");
  }
  return closed;
}

double theoretical_contraction(const ToralAutomorphism& map) {
  return map.contraction_rate();
}

ShadowingReport verify_shadowing(const ToralAutomorphism& map, const TorusPoint& x,
                                 const RationalTorusPoint& p, int n) {
  if (n < 1) throw UsageError("period must be positive");
  if (x.dim() != map.dim()) throw UsageError("point dimension does not match map");
  ShadowingReport rep;
  rep.fitted.lambda = theoretical_contraction(map);

  // Both orbits walked exactly; mid-orbit distances decay like lambda^(n/2)
  // and a float orbit of x would swamp them with its own drift.
  const RationalTorusPoint x0 = exact_lift(x);
  RationalTorusPoint xi = x0;
  RationalTorusPoint pi = p;
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    dists.push_back(std::sqrt(static_cast<double>(torus_distance_sq(xi, pi))));
    if (i < n) {
      xi = apply_exact(map, xi);
      pi = apply_exact(map, pi);
    }
  }
  rep.epsilon = std::sqrt(static_cast<double>(torus_distance_sq(xi, x0)));
  if (rep.epsilon == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  for (int i = 0; i <= n; ++i) {
    const int depth = std::min(i, n - i);
    const double denom = std::pow(rep.fitted.lambda, depth) * rep.epsilon;
    rep.ratios.push_back(dists[static_cast<size_t>(i)] / denom);
  }
  for (double r : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
  rep.fitted.c = rep.max_ratio;
  return rep;
}

double weight_closeness(const Cocycle& f, const ToralAutomorphism& map, const TorusPoint& x,
                        const RationalTorusPoint& p, int n) {
  if (n < 1) throw UsageError("period must be positive");
  if (f.base_dim() != map.dim()) throw UsageError("cocycle base does not match map");
  const size_t count = static_cast<size_t>(f.coordinate_count());
  std::vector<double> fx(count, 0.0), fp(count, 0.0);
  double total = 0.0;
  RationalTorusPoint xi = exact_lift(x);
  RationalTorusPoint pi = p;
  for (int i = 0; i < n; ++i) {
    f.evaluate_into(xi.to_point(), fx.data());
    f.evaluate_into(pi.to_point(), fp.data());
    double sq = 0.0;
    for (size_t j = 0; j < count; ++j) {
      const double dv = fx[j] - fp[j];
      sq += dv * dv;
    }
    total += std::sqrt(sq);
    xi = apply_exact(map, xi);
    pi = apply_exact(map, pi);
  }
  return total;
}

}  // namespace romega
