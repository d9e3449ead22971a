#pragma once

#include <cstdint>
#include <vector>

#include "romega/cocycle.hpp"

namespace romega {

// State of the extension T_f(x, g) = (map(x), g + f(x)).
struct SkewState {
  TorusPoint base;
  SeqVector fiber;
};

// Finite partition of torus x [-R, R]^level: per-dimension base boxes, per
// fiber coordinate. Fiber samples outside the box range land in a single
// overflow bucket rather than being dropped.
struct GridSpec {
  int truncation_level = 2;
  double fiber_halfwidth = 5.0;
  int base_subdivisions = 64;
  int fiber_subdivisions = 32;
};

struct CoverageReport {
  std::uint64_t boxes_total = 0;
  std::uint64_t boxes_hit = 0;
  double fraction = 0.0;  // hit/total, overflow excluded from both
  std::uint64_t overflow_count = 0;
  std::uint64_t trajectory_length = 0;
  std::uint64_t distinct_fiber_boxes = 0;  // fiber-box columns seen
  std::uint64_t fiber_boxes_total = 0;     // fiber_subdivisions^truncation_level
  std::uint64_t first_hit_max = 0;
  double first_hit_mean = 0.0;
};

class CoverageTracker {
 public:
  CoverageTracker(int base_dim, const GridSpec& grid);

  // fiber points at truncation_level doubles.
  void visit(const double* base, const double* fiber, std::uint64_t step);
  void visit_state(const SkewState& s, std::uint64_t step);
  // Union of hit sets; first hits keep the earlier time.
  void merge(const CoverageTracker& other);

  bool complete() const { return hit_count_ == first_hit_.size(); }
  std::uint64_t boxes_total() const { return first_hit_.size(); }
  std::uint64_t boxes_hit() const { return hit_count_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<std::int64_t>& first_hits() const { return first_hit_; }
  CoverageReport report() const;

  // Flat box index for a state, or -1 for overflow. Exposed for the product
  // system diagnostic.
  std::int64_t box_index(const double* base, const double* fiber) const;

 private:
  GridSpec grid_;
  int base_dim_;
  std::vector<std::int64_t> first_hit_;  // -1 while unhit
  std::vector<char> fiber_seen_;
  std::uint64_t hit_count_ = 0;
  std::uint64_t fiber_seen_count_ = 0;
  std::uint64_t overflow_ = 0;
  std::uint64_t length_ = 0;
};

// First k+1 states (start included). Fiber evolution matches birkhoff_sum
// bitwise: state i has fiber start.fiber + birkhoff_sum(f, map, start.base, i).
std::vector<SkewState> skew_orbit(const ToralAutomorphism& map, const Cocycle& f,
                                  const SkewState& start, std::uint64_t k);

// Streams a trajectory of `steps` steps from start into a fresh tracker; the
// tracker keeps per-box first-hit times for coverage curves.
CoverageTracker coverage_tracker(const ToralAutomorphism& map, const Cocycle& f,
                                 const SkewState& start, std::uint64_t steps,
                                 const GridSpec& grid);

CoverageReport coverage(const ToralAutomorphism& map, const Cocycle& f, const SkewState& start,
                        std::uint64_t steps, const GridSpec& grid);

struct SearchSpec {
  std::vector<GridSpec> levels;
  std::uint64_t steps_per_start = 1'000'000;
  int num_starts = 8;
};

struct SearchLevelOutcome {
  GridSpec grid;
  std::uint64_t boxes_total = 0;
  std::uint64_t boxes_hit = 0;
  bool complete = false;
};

struct SearchResult {
  TorusPoint candidate;
  bool complete = false;  // every box at every level hit
  std::vector<SearchLevelOutcome> levels;
  std::uint64_t steps_used = 0;
  int starts_tried = 0;
};

// Multi-start search for a base point whose orbit from fiber 0 hits every box
// at every requested level. Starts come from a deterministic low-discrepancy
// sequence; an exhausted budget returns the best candidate flagged incomplete.
SearchResult transitive_point_search(const ToralAutomorphism& map, const Cocycle& f,
                                     const SearchSpec& spec);

// Coverage of the product system T_f x T_f from ((x,0),(y,0)) on the product
// of the grid with itself.
CoverageReport weak_mixing_diagnostic(const ToralAutomorphism& map, const Cocycle& f,
                                      const GridSpec& grid, std::uint64_t steps,
                                      const TorusPoint& x, const TorusPoint& y);

}  // namespace romega
