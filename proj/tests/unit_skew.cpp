#include "doctest.h"

#include <cstdint>
#include <set>
#include <utility>

#include "romega/errors.hpp"
#include "romega/rng.hpp"
#include "romega/skew.hpp"

using namespace romega;

namespace {

ToralAutomorphism cat_map() { return ToralAutomorphism({{2, 1}, {1, 1}}); }

CoordinatePtr make_coord(CoordinateFunction fn) {
  return std::make_shared<const CoordinateFunction>(std::move(fn));
}

Cocycle zero_cocycle(int coords) {
  std::vector<CoordinatePtr> c;
  for (int k = 0; k < coords; ++k) c.push_back(make_coord(Constant{0.0}));
  return Cocycle(2, 1.0, c);
}

}  // namespace

TEST_SUITE("skew") {

TEST_CASE("fiber evolution matches Birkhoff sums bitwise") {
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 2, 3);
  Rng rng(4242);
  for (int trial = 0; trial < 5; ++trial) {
    TorusPoint x({rng.unit(), rng.unit()});
    std::vector<SkewState> states =
        skew_orbit(map, built.cocycle, SkewState{x, SeqVector{}}, 200);
    REQUIRE(states.size() == 201);
    for (std::uint64_t i : {std::uint64_t{0}, std::uint64_t{1}, std::uint64_t{37},
                            std::uint64_t{200}}) {
      SeqVector expect = birkhoff_sum(built.cocycle, map, x,
                                      static_cast<long long>(i));
      CHECK(states[i].fiber == expect);
      TorusPoint base = x;
      for (std::uint64_t s = 0; s < i; ++s) base = apply(map, base);
      CHECK(states[i].base.coords == base.coords);
    }
  }
}

TEST_CASE("nonzero start fiber translates the trajectory") {
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 1, 2);
  TorusPoint x({0.3, 0.8});
  SeqVector offset({1.5});
  std::vector<SkewState> states =
      skew_orbit(map, built.cocycle, SkewState{x, offset}, 50);
  SeqVector expect = offset + birkhoff_sum(built.cocycle, map, x, 50);
  CHECK(states[50].fiber.coord(1) ==
        doctest::Approx(expect.coord(1)).epsilon(1e-12));
}

TEST_CASE("zero steps returns the start state") {
  ToralAutomorphism map = cat_map();
  Cocycle f = zero_cocycle(1);
  std::vector<SkewState> states =
      skew_orbit(map, f, SkewState{TorusPoint({0.25, 0.75}), SeqVector{}}, 0);
  REQUIRE(states.size() == 1);
  CHECK(states[0].base.coords == std::vector<double>{0.25, 0.75});
  CHECK(states[0].fiber.support() == 0);
}

TEST_CASE("start fiber beyond the cocycle support is rejected") {
  ToralAutomorphism map = cat_map();
  Cocycle f = zero_cocycle(1);
  SkewState start{TorusPoint({0.1, 0.2}), SeqVector({0.0, 3.0})};
  CHECK_THROWS_AS(skew_orbit(map, f, start, 1), UsageError);
}

TEST_CASE("box index arithmetic on a tiny grid") {
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 1.0;
  g.base_subdivisions = 2;
  g.fiber_subdivisions = 2;
  CoverageTracker t(1, g);
  CHECK(t.boxes_total() == 4);
  double base = 0.6, fiber = 0.5;
  CHECK(t.box_index(&base, &fiber) == 3);
  base = 0.1;
  fiber = -0.5;
  CHECK(t.box_index(&base, &fiber) == 0);
  fiber = 2.0;
  CHECK(t.box_index(&base, &fiber) == -1);
}

TEST_CASE("tracker counts hits, overflow and fiber columns") {
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 1.0;
  g.base_subdivisions = 2;
  g.fiber_subdivisions = 2;
  CoverageTracker t(1, g);
  auto put = [&](double b, double f, std::uint64_t step) { t.visit(&b, &f, step); };
  put(0.1, -0.5, 0);
  put(0.1, -0.5, 1);  // same box, first hit stays 0
  put(0.9, 0.5, 2);
  put(0.9, 9.0, 3);  // overflow
  CoverageReport rep = t.report();
  CHECK(rep.boxes_total == 4);
  CHECK(rep.boxes_hit == 2);
  CHECK(rep.fraction == doctest::Approx(0.5));
  CHECK(rep.overflow_count == 1);
  CHECK(rep.trajectory_length == 3);
  CHECK(rep.distinct_fiber_boxes == 2);
  CHECK(rep.first_hit_max == 2);
  CHECK(rep.first_hit_mean == doctest::Approx(1.0));
  CHECK_FALSE(t.complete());
}

TEST_CASE("merge unions hit sets and keeps earlier first hits") {
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 1.0;
  g.base_subdivisions = 2;
  g.fiber_subdivisions = 2;
  CoverageTracker a(1, g), b(1, g);
  auto put = [](CoverageTracker& t, double bs, double f, std::uint64_t step) {
    t.visit(&bs, &f, step);
  };
  put(a, 0.1, -0.5, 5);
  put(b, 0.1, -0.5, 2);
  put(b, 0.9, 0.5, 7);
  a.merge(b);
  CoverageReport rep = a.report();
  CHECK(rep.boxes_hit == 2);
  CHECK(rep.first_hit_max == 7);
  CHECK(rep.first_hit_mean == doctest::Approx(4.5));

  GridSpec other = g;
  other.base_subdivisions = 4;
  CoverageTracker c(1, other);
  CHECK_THROWS_AS(a.merge(c), UsageError);
}

TEST_CASE("zero cocycle pins the fiber column") {
  ToralAutomorphism map = cat_map();
  Cocycle f = zero_cocycle(2);
  GridSpec g;
  g.truncation_level = 2;
  g.fiber_halfwidth = 1.0;
  g.base_subdivisions = 4;
  g.fiber_subdivisions = 4;
  CoverageReport rep =
      coverage(map, f, SkewState{TorusPoint({0.3, 0.7}), SeqVector{}}, 5000, g);
  CHECK(rep.distinct_fiber_boxes == 1);
  CHECK(rep.overflow_count == 0);
  CHECK(rep.boxes_hit <= 16);
  CHECK(rep.boxes_hit >= 1);
}

TEST_CASE("escaping fiber lands in the overflow bucket") {
  ToralAutomorphism map = cat_map();
  Cocycle f(2, 1.0, {make_coord(Constant{10.0})});
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 5.0;
  g.base_subdivisions = 2;
  g.fiber_subdivisions = 2;
  CoverageReport rep =
      coverage(map, f, SkewState{TorusPoint({0.3, 0.7}), SeqVector{}}, 3, g);
  CHECK(rep.boxes_hit == 1);
  CHECK(rep.overflow_count == 3);
}

TEST_CASE("coverage commutes with truncation to the grid level") {
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 3, 3);
  Cocycle cut = truncation_perturbation(built.cocycle, 1);
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 0.5;
  g.base_subdivisions = 8;
  g.fiber_subdivisions = 8;
  SkewState start{TorusPoint({0.31, 0.77}), SeqVector{}};
  CoverageReport full = coverage(map, built.cocycle, start, 20000, g);
  CoverageReport trunc = coverage(map, cut, start, 20000, g);
  CHECK(full.boxes_hit == trunc.boxes_hit);
  CHECK(full.overflow_count == trunc.overflow_count);
  CHECK(full.distinct_fiber_boxes == trunc.distinct_fiber_boxes);
  CHECK(full.first_hit_max == trunc.first_hit_max);
  CHECK(full.first_hit_mean == trunc.first_hit_mean);
}

TEST_CASE("grid validation") {
  ToralAutomorphism map = cat_map();
  Cocycle f = zero_cocycle(1);
  GridSpec deep;
  deep.truncation_level = 3;
  CHECK_THROWS_AS(coverage(map, f, SkewState{TorusPoint({0.1, 0.1}), SeqVector{}}, 1, deep),
                  UsageError);
  GridSpec bad;
  bad.base_subdivisions = 0;
  CHECK_THROWS_AS(CoverageTracker(2, bad), UsageError);
  GridSpec huge;
  huge.truncation_level = 1;
  huge.base_subdivisions = 4096;
  huge.fiber_subdivisions = 4096;
  CHECK_THROWS_AS(CoverageTracker(2, huge), UsageError);
}

TEST_CASE("search completes instantly on a one-box grid") {
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 1, 2);
  SearchSpec spec;
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 100.0;
  g.base_subdivisions = 1;
  g.fiber_subdivisions = 1;
  spec.levels = {g};
  spec.steps_per_start = 10;
  spec.num_starts = 3;
  SearchResult res = transitive_point_search(map, built.cocycle, spec);
  CHECK(res.complete);
  CHECK(res.steps_used == 0);
  CHECK(res.starts_tried == 1);
  REQUIRE(res.levels.size() == 1);
  CHECK(res.levels[0].complete);
  CHECK(res.levels[0].boxes_hit == 1);
}

TEST_CASE("search cannot complete under a pinned fiber") {
  ToralAutomorphism map = cat_map();
  Cocycle f = zero_cocycle(1);
  SearchSpec spec;
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 1.0;
  g.base_subdivisions = 4;
  g.fiber_subdivisions = 4;
  spec.levels = {g};
  spec.steps_per_start = 2000;
  spec.num_starts = 2;
  SearchResult res = transitive_point_search(map, f, spec);
  CHECK_FALSE(res.complete);
  CHECK(res.starts_tried == 2);
  CHECK(res.levels[0].boxes_hit <= 16);  // one fiber column per base box

  SearchResult again = transitive_point_search(map, f, spec);
  CHECK(again.candidate.coords == res.candidate.coords);
  CHECK(again.levels[0].boxes_hit == res.levels[0].boxes_hit);
}

TEST_CASE("product diagnostic agrees with two independent trajectories") {
  ToralAutomorphism map = cat_map();
  ConstructionResult built = construct_inseparable(map, 1, 2);
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 0.5;
  g.base_subdivisions = 3;
  g.fiber_subdivisions = 3;
  TorusPoint x({0.12, 0.34}), y({0.56, 0.78});
  const std::uint64_t steps = 400;
  CoverageReport rep = weak_mixing_diagnostic(map, built.cocycle, g, steps, x, y);

  CoverageTracker shape(2, g);
  std::vector<SkewState> ox = skew_orbit(map, built.cocycle, SkewState{x, SeqVector{}}, steps);
  std::vector<SkewState> oy = skew_orbit(map, built.cocycle, SkewState{y, SeqVector{}}, steps);
  std::set<std::pair<std::int64_t, std::int64_t>> pairs;
  std::uint64_t overflow = 0;
  for (std::uint64_t i = 0; i <= steps; ++i) {
    double f1 = ox[i].fiber.coord(1), f2 = oy[i].fiber.coord(1);
    std::int64_t i1 = shape.box_index(ox[i].base.coords.data(), &f1);
    std::int64_t i2 = shape.box_index(oy[i].base.coords.data(), &f2);
    if (i1 < 0 || i2 < 0) {
      ++overflow;
      continue;
    }
    pairs.emplace(i1, i2);
  }
  CHECK(rep.boxes_total == shape.boxes_total() * shape.boxes_total());
  CHECK(rep.boxes_hit == pairs.size());
  CHECK(rep.overflow_count == overflow);
}

TEST_CASE("product diagnostic from equal starts stays on the diagonal") {
  ToralAutomorphism map = cat_map();
  Cocycle f = zero_cocycle(1);
  GridSpec g;
  g.truncation_level = 1;
  g.fiber_halfwidth = 1.0;
  g.base_subdivisions = 2;
  g.fiber_subdivisions = 3;
  TorusPoint x({0.21, 0.43});
  CoverageReport rep = weak_mixing_diagnostic(map, f, g, 500, x, x);
  // Identical trajectories: only diagonal pairs, one per reachable base box.
  CHECK(rep.boxes_hit <= 4);
  CHECK(rep.boxes_total == 144);

  GridSpec big;
  big.truncation_level = 1;
  big.base_subdivisions = 64;
  big.fiber_subdivisions = 8;
  CHECK_THROWS_AS(weak_mixing_diagnostic(map, f, big, 10, x, x), UsageError);
}

}  // TEST_SUITE
