#include "doctest.h"

#include <cmath>

#include "romega/closing.hpp"
#include "romega/errors.hpp"
#include "romega/rng.hpp"

using namespace romega;

namespace {

ToralAutomorphism cat_map() { return ToralAutomorphism({{2, 1}, {1, 1}}); }

RationalTorusPoint fifths(long long a, long long b) {
  return RationalTorusPoint({Int(a), Int(b)}, Int(5));
}

}  // namespace

TEST_SUITE("closing") {

TEST_CASE("every step is a near return at a fixed point") {
  ToralAutomorphism map = cat_map();
  std::vector<NearReturn> rets =
      find_near_returns(map, TorusPoint({0.0, 0.0}), 1e-9, 6);
  REQUIRE(rets.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(rets[static_cast<size_t>(i)].n == i + 1);
    CHECK(rets[static_cast<size_t>(i)].epsilon == 0.0);
  }
  CHECK_THROWS_AS(find_near_returns(map, TorusPoint({0.0, 0.0}), 0.0, 5), UsageError);
  CHECK_THROWS_AS(find_near_returns(map, TorusPoint({0.0, 0.0}), 0.1, 0), UsageError);
}

TEST_CASE("near returns at a floating period-2 point") {
  ToralAutomorphism map = cat_map();
  std::vector<NearReturn> rets =
      find_near_returns(map, TorusPoint({0.2, 0.4}), 1e-9, 8);
  REQUIRE(!rets.empty());
  for (const NearReturn& r : rets) {
    CHECK(r.n % 2 == 0);
    CHECK(r.epsilon < 1e-12);
  }
}

TEST_CASE("closing a perturbed period-2 return recovers the exact orbit") {
  ToralAutomorphism map = cat_map();
  NearReturn ret{TorusPoint({0.21, 0.39}), 2, 0.0};
  ClosedOrbit closed = close_orbit(map, ret);
  CHECK(closed.n == 2);
  CHECK_FALSE(closed.rounding_tie);
  CHECK(closed.point == fifths(1, 2));
}

TEST_CASE("closing near the fixed point lands on the origin") {
  ToralAutomorphism map = cat_map();
  NearReturn ret{TorusPoint({0.01, 0.99}), 1, 0.0};
  ClosedOrbit closed = close_orbit(map, ret);
  CHECK(closed.point == RationalTorusPoint({Int(0), Int(0)}, Int(1)));
  CHECK_FALSE(closed.rounding_tie);
}

TEST_CASE("exact half-integral components are ties, rounded down") {
  ToralAutomorphism map = cat_map();
  NearReturn ret{TorusPoint({0.5, 0.5}), 1, 0.0};
  ClosedOrbit closed = close_orbit(map, ret);
  CHECK(closed.rounding_tie);
  REQUIRE(closed.tie_components.size() == 1);
  CHECK(closed.tie_components[0] == 1);
  CHECK(closed.point == RationalTorusPoint({Int(0), Int(0)}, Int(1)));
  CHECK_THROWS_AS(close_orbit(map, NearReturn{TorusPoint({0.1, 0.1}), 0, 0.0}),
                  UsageError);
}

TEST_CASE("planted periodic points are recovered exactly") {
  ToralAutomorphism map = cat_map();
  Rng rng(99123);
  int closed_count = 0;
  for (int n = 1; n <= 4; ++n) {
    for (const PeriodicOrbit& orbit : periodic_points(map, n)) {
      TorusPoint base = orbit.base.to_point();
      std::vector<double> c = base.coords;
      for (double& v : c) v += (rng.unit() - 0.5) * 2e-6;
      ClosedOrbit closed = close_orbit(map, NearReturn{TorusPoint(std::move(c)), n, 0.0});
      CHECK(closed.point == orbit.base);
      ++closed_count;
    }
  }
  CHECK(closed_count > 20);
}

TEST_CASE("closed orbits satisfy exact periodicity") {
  ToralAutomorphism map = cat_map();
  Rng rng(555);
  int verified = 0;
  for (int trial = 0; trial < 30; ++trial) {
    TorusPoint x({rng.unit(), rng.unit()});
    for (const NearReturn& ret : find_near_returns(map, x, 0.1, 30)) {
      ClosedOrbit closed = close_orbit(map, ret);
      RationalTorusPoint cur = closed.point;
      for (int i = 0; i < closed.n; ++i) cur = apply_exact(map, cur);
      CHECK(cur == closed.point);
      ++verified;
    }
  }
  CHECK(verified > 10);
}

TEST_CASE("contraction rate of the standard map") {
  ToralAutomorphism map = cat_map();
  const double expect = (3.0 - std::sqrt(5.0)) / 2.0;
  CHECK(theoretical_contraction(map) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("shadowing report on a genuine near return") {
  ToralAutomorphism map = cat_map();
  TorusPoint x({0.21, 0.39});
  ClosedOrbit closed = close_orbit(map, NearReturn{x, 2, 0.0});
  ShadowingReport rep = verify_shadowing(map, x, closed.point, 2);
  CHECK_FALSE(rep.degenerate);
  REQUIRE(rep.ratios.size() == 3);
  CHECK(rep.epsilon == doctest::Approx(std::sqrt(0.0005)));
  for (double r : rep.ratios) CHECK(r > 0.0);
  CHECK(rep.max_ratio < 2.0);
  CHECK(rep.fitted.c == rep.max_ratio);
  CHECK(rep.fitted.lambda == theoretical_contraction(map));
  // Endpoint ratio r_0 is d(x, p)/eps by definition.
  const double d0 = torus_distance(x, closed.point.to_point());
  CHECK(rep.ratios[0] == doctest::Approx(d0 / rep.epsilon));
}

TEST_CASE("shadowing at an exact fixed point is degenerate") {
  ToralAutomorphism map = cat_map();
  ShadowingReport rep = verify_shadowing(map, TorusPoint({0.0, 0.0}),
                                         RationalTorusPoint({Int(0), Int(0)}, Int(1)), 3);
  CHECK(rep.degenerate);
  CHECK(rep.epsilon == 0.0);
  CHECK(rep.ratios.empty());
  CHECK_THROWS_AS(verify_shadowing(map, TorusPoint({0.0, 0.0}),
                                   RationalTorusPoint({Int(0), Int(0)}, Int(1)), 0),
                  UsageError);
}

TEST_CASE("weight closeness vanishes for constants and identical orbits") {
  ToralAutomorphism map = cat_map();
  Cocycle constant(2, 1.0,
                   {std::make_shared<const CoordinateFunction>(Constant{0.7})});
  CHECK(weight_closeness(constant, map, TorusPoint({0.31, 0.62}), fifths(1, 2), 4) == 0.0);

  ConstructionResult built = construct_inseparable(map, 1, 2);
  CHECK(weight_closeness(built.cocycle, map, TorusPoint({0.0, 0.0}),
                         RationalTorusPoint({Int(0), Int(0)}, Int(1)), 5) == 0.0);
}

TEST_CASE("weight closeness is bounded by the shadowing budget") {
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 2, 3);
  Rng rng(777);
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    TorusPoint x({rng.unit(), rng.unit()});
    for (const NearReturn& ret : find_near_returns(map, x, 0.1, 30)) {
      ClosedOrbit closed = close_orbit(map, ret);
      ShadowingReport rep = verify_shadowing(map, x, closed.point, ret.n);
      if (rep.degenerate) continue;
      const double lhs = weight_closeness(built.cocycle, map, x, closed.point, ret.n);
      const double budget = built.cocycle.euclidean_lipschitz() * rep.max_ratio *
                            rep.epsilon * 2.0 / (1.0 - rep.fitted.lambda);
      CHECK(lhs <= budget + 1e-12);
      ++checked;
    }
  }
  CHECK(checked > 3);
}

TEST_CASE("a generic point has no returns under a tiny threshold") {
  ToralAutomorphism map = cat_map();
  CHECK(find_near_returns(map, TorusPoint({0.123456789, 0.987654321}), 1e-9, 30).empty());
}

TEST_CASE("periodic weights track the Birkhoff sums of near-returning orbits") {
  // The density mechanism: a near-return at time k closes to a periodic
  // point whose weight sits within C*eps of the Birkhoff sum S_k, so the
  // weights reach whatever the sums reach. Verified on every return found
  // along a pool of long orbits, then exercised against random targets.
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 2, 3);
  const Cocycle& f = built.cocycle;
  REQUIRE(f.coordinate_count() == 2);
  const double lambda = theoretical_contraction(map);
  const double lip = f.euclidean_lipschitz();

  struct Entry {
    double s0, s1, gap;
  };
  std::vector<Entry> pool;
  int long_returns = 0;
  Rng rng(20260816);
  for (int s = 0; s < 40; ++s) {
    TorusPoint x({rng.unit(), rng.unit()});
    for (const NearReturn& ret : find_near_returns(map, x, 0.008, 1200)) {
      ClosedOrbit closed = close_orbit(map, ret);
      ShadowingReport rep = verify_shadowing(map, x, closed.point, ret.n);
      REQUIRE(!rep.degenerate);
      // Both measure the true return distance.
      CHECK(rep.epsilon == ret.epsilon);
      // Symmetric 2x2 worst case is 1/(1-lambda) + lambda_u/(lambda_u - 1)
      // at n = 1, about 3.236.
      CHECK(rep.max_ratio <= 3.24);
      const double wc = weight_closeness(f, map, x, closed.point, ret.n);
      const double budget = lip * rep.max_ratio * ret.epsilon * 2.0 / (1.0 - lambda);

      // Birkhoff sum of x and weight of the closed orbit, exact orbits.
      std::vector<Rat> lifted(2);
      for (int i = 0; i < 2; ++i) lifted[i] = exact_rational(x.coords[static_cast<size_t>(i)]);
      RationalTorusPoint xi = RationalTorusPoint::from_rationals(lifted);
      RationalTorusPoint pi = closed.point;
      double sum[2] = {0.0, 0.0}, weight[2] = {0.0, 0.0}, fx[2], fp[2];
      for (int i = 0; i < ret.n; ++i) {
        f.evaluate_into(xi.to_point(), fx);
        f.evaluate_into(pi.to_point(), fp);
        for (int j = 0; j < 2; ++j) {
          sum[j] += fx[j];
          weight[j] += fp[j];
        }
        xi = apply_exact(map, xi);
        pi = apply_exact(map, pi);
      }
      const double gap = std::hypot(weight[0] - sum[0], weight[1] - sum[1]);
      CHECK(gap <= wc + 1e-9);
      CHECK(wc <= budget + 1e-9);
      CHECK(budget <= 0.1);
      if (ret.n >= 300) ++long_returns;
      pool.push_back({sum[0], sum[1], gap});
    }
  }
  REQUIRE(pool.size() >= 8);
  CHECK(long_returns >= 4);

  // For each target in the level-2 box, the return whose sum comes nearest
  // has its periodic weight within 0.1 of that sum.
  Rng targets(7);
  for (int t = 0; t < 20; ++t) {
    const double w0 = targets.uniform(-2.0, 2.0);
    const double w1 = targets.uniform(-2.0, 2.0);
    size_t best = 0;
    double best_dist = std::hypot(pool[0].s0 - w0, pool[0].s1 - w1);
    for (size_t i = 1; i < pool.size(); ++i) {
      const double dist = std::hypot(pool[i].s0 - w0, pool[i].s1 - w1);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    CHECK(pool[best].gap <= 0.1);
  }
}

}  // TEST_SUITE
