#include "romega/skew.hpp"

#include <algorithm>
#include <cmath>

#include "romega/errors.hpp"

namespace romega {

namespace {

void check_grid(const GridSpec& g) {
  if (g.truncation_level < 1 || g.base_subdivisions < 1 || g.fiber_subdivisions < 1 ||
      !(g.fiber_halfwidth > 0.0)) {
    throw UsageError("grid spec fields must be positive");
  }
}

std::uint64_t checked_pow(std::uint64_t base, int exp, std::uint64_t limit) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > limit / base) throw UsageError("grid has too many boxes");
    r *= base;
  }
  return r;
}

// Streams the orbit of (x, fiber) for `steps` steps, calling
// fn(base, fiber, step) on every state including the start. Buffers are
// reused; fn must copy what it keeps.
template <typename Fn>
void stream_orbit(const ToralAutomorphism& map, const Cocycle& f, const SkewState& start,
                  std::uint64_t steps, Fn&& fn) {
  const int d = map.dim();
  if (f.base_dim() != d) throw UsageError("cocycle base does not match map");
  if (start.base.dim() != d) throw UsageError("start dimension does not match map");
  const int count = f.coordinate_count();
  if (start.fiber.support() > count) {
    throw UsageError("start fiber support exceeds cocycle coordinate count");
  }
  std::vector<double> base(start.base.coords);
  std::vector<double> next(static_cast<size_t>(d));
  std::vector<double> fiber(static_cast<size_t>(count), 0.0);
  for (int k = 1; k <= start.fiber.support(); ++k)
    fiber[static_cast<size_t>(k - 1)] = start.fiber.coord(k);
  std::vector<double> buf(static_cast<size_t>(count), 0.0);
  TorusPoint probe = start.base;  // reused shell for evaluate_into

  fn(base.data(), fiber.data(), std::uint64_t{0});
  for (std::uint64_t s = 1; s <= steps; ++s) {
    probe.coords = base;
    f.evaluate_into(probe, buf.data());
    for (int j = 0; j < count; ++j)
      fiber[static_cast<size_t>(j)] += buf[static_cast<size_t>(j)];
    apply_into(map, base.data(), next.data());
    std::swap(base, next);
    fn(base.data(), fiber.data(), s);
  }
}

// Low-discrepancy starts: the d-dimensional Kronecker sequence driven by the
// root of x^(d+1) = x + 1.
std::vector<TorusPoint> quasirandom_starts(int dim, int count) {
  double p = 1.5;
  for (int i = 0; i < 64; ++i) {
    const double fp = std::pow(p, dim + 1) - p - 1.0;
    const double dp = (dim + 1) * std::pow(p, dim) - 1.0;
    p -= fp / dp;
  }
  std::vector<double> alpha(static_cast<size_t>(dim));
  double a = 1.0;
  for (int j = 0; j < dim; ++j) {
    a /= p;
    alpha[static_cast<size_t>(j)] = a;
  }
  std::vector<TorusPoint> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> c(static_cast<size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      double v = 0.5 + (i + 1) * alpha[static_cast<size_t>(j)];
      c[static_cast<size_t>(j)] = v - std::floor(v);
    }
    out.emplace_back(std::move(c));
  }
  return out;
}

}  // namespace

CoverageTracker::CoverageTracker(int base_dim, const GridSpec& grid)
    : grid_(grid), base_dim_(base_dim) {
  check_grid(grid);
  if (base_dim_ < 1) throw UsageError("base dimension must be positive");
  const std::uint64_t limit = 1u << 22;  // bitmap memory guard
  std::uint64_t base_boxes =
      checked_pow(static_cast<std::uint64_t>(grid.base_subdivisions), base_dim_, limit);
  std::uint64_t fiber_boxes = checked_pow(static_cast<std::uint64_t>(grid.fiber_subdivisions),
                                          grid.truncation_level, limit);
  if (base_boxes > limit / fiber_boxes) throw UsageError("grid has too many boxes");
  first_hit_.assign(base_boxes * fiber_boxes, -1);
  fiber_seen_.assign(fiber_boxes, 0);
}

std::int64_t CoverageTracker::box_index(const double* base, const double* fiber) const {
  std::uint64_t idx = 0;
  for (int i = 0; i < base_dim_; ++i) {
    int b = static_cast<int>(base[i] * grid_.base_subdivisions);
    b = std::clamp(b, 0, grid_.base_subdivisions - 1);
    idx = idx * static_cast<std::uint64_t>(grid_.base_subdivisions) +
          static_cast<std::uint64_t>(b);
  }
  const double r = grid_.fiber_halfwidth;
  for (int j = 0; j < grid_.truncation_level; ++j) {
    const double v = fiber[j];
    if (v < -r || v > r) return -1;
    int b = static_cast<int>((v + r) / (2.0 * r) * grid_.fiber_subdivisions);
    b = std::clamp(b, 0, grid_.fiber_subdivisions - 1);
    idx = idx * static_cast<std::uint64_t>(grid_.fiber_subdivisions) +
          static_cast<std::uint64_t>(b);
  }
  return static_cast<std::int64_t>(idx);
}

void CoverageTracker::visit(const double* base, const double* fiber, std::uint64_t step) {
  length_ = std::max(length_, step);
  const std::int64_t idx = box_index(base, fiber);
  if (idx < 0) {
    ++overflow_;
    return;
  }
  auto& slot = first_hit_[static_cast<size_t>(idx)];
  if (slot < 0) {
    slot = static_cast<std::int64_t>(step);
    ++hit_count_;
  }
  // Fiber column: trailing truncation_level digits of the mixed-radix index.
  std::uint64_t fiber_boxes = fiber_seen_.size();
  std::uint64_t fcol = static_cast<std::uint64_t>(idx) % fiber_boxes;
  if (!fiber_seen_[static_cast<size_t>(fcol)]) {
    fiber_seen_[static_cast<size_t>(fcol)] = 1;
    ++fiber_seen_count_;
  }
}

void CoverageTracker::visit_state(const SkewState& s, std::uint64_t step) {
  if (s.base.dim() != base_dim_) throw UsageError("state dimension mismatch");
  std::vector<double> fiber(static_cast<size_t>(grid_.truncation_level), 0.0);
  for (int j = 1; j <= grid_.truncation_level; ++j)
    fiber[static_cast<size_t>(j - 1)] = s.fiber.coord(j);
  visit(s.base.coords.data(), fiber.data(), step);
}

void CoverageTracker::merge(const CoverageTracker& other) {
  if (other.first_hit_.size() != first_hit_.size() || other.base_dim_ != base_dim_) {
    throw UsageError("cannot merge trackers over different grids");
  }
  for (size_t i = 0; i < first_hit_.size(); ++i) {
    if (other.first_hit_[i] < 0) continue;
    if (first_hit_[i] < 0) {
      first_hit_[i] = other.first_hit_[i];
      ++hit_count_;
    } else {
      first_hit_[i] = std::min(first_hit_[i], other.first_hit_[i]);
    }
  }
  for (size_t i = 0; i < fiber_seen_.size(); ++i) {
    if (other.fiber_seen_[i] && !fiber_seen_[i]) {
      fiber_seen_[i] = 1;
      ++fiber_seen_count_;
    }
  }
  overflow_ += other.overflow_;
  length_ = std::max(length_, other.length_);
}

CoverageReport CoverageTracker::report() const {
  CoverageReport rep;
  rep.boxes_total = first_hit_.size();
  rep.boxes_hit = hit_count_;
  rep.fraction = rep.boxes_total ? static_cast<double>(hit_count_) / rep.boxes_total : 0.0;
  rep.overflow_count = overflow_;
  rep.trajectory_length = length_;
  rep.distinct_fiber_boxes = fiber_seen_count_;
  rep.fiber_boxes_total = fiber_seen_.size();
  std::uint64_t max_hit = 0;
  double sum = 0.0;
  for (std::int64_t h : first_hit_) {
    if (h < 0) continue;
    max_hit = std::max(max_hit, static_cast<std::uint64_t>(h));
    sum += static_cast<double>(h);
  }
  rep.first_hit_max = max_hit;
  rep.first_hit_mean = hit_count_ ? sum / static_cast<double>(hit_count_) : 0.0;
  return rep;
}

std::vector<SkewState> skew_orbit(const ToralAutomorphism& map, const Cocycle& f,
                                  const SkewState& start, std::uint64_t k) {
  std::vector<SkewState> out;
  out.reserve(static_cast<size_t>(k) + 1);
  const int count = f.coordinate_count();
  stream_orbit(map, f, start, k, [&](const double* base, const double* fiber, std::uint64_t) {
    std::vector<double> b(base, base + map.dim());
    std::vector<double> v(fiber, fiber + count);
    out.push_back(SkewState{TorusPoint(std::move(b)), SeqVector(std::move(v))});
  });
  return out;
}

CoverageTracker coverage_tracker(const ToralAutomorphism& map, const Cocycle& f,
                                 const SkewState& start, std::uint64_t steps,
                                 const GridSpec& grid) {
  if (grid.truncation_level > f.coordinate_count()) {
    throw UsageError("grid truncation level exceeds cocycle support");
  }
  CoverageTracker tracker(map.dim(), grid);
  stream_orbit(map, f, start, steps,
               [&](const double* base, const double* fiber, std::uint64_t step) {
                 tracker.visit(base, fiber, step);
               });
  return tracker;
}

CoverageReport coverage(const ToralAutomorphism& map, const Cocycle& f, const SkewState& start,
                        std::uint64_t steps, const GridSpec& grid) {
  return coverage_tracker(map, f, start, steps, grid).report();
}

SearchResult transitive_point_search(const ToralAutomorphism& map, const Cocycle& f,
                                     const SearchSpec& spec) {
  if (spec.levels.empty()) throw UsageError("search needs at least one grid level");
  if (spec.num_starts < 1 || spec.steps_per_start == 0) {
    throw UsageError("search budget must be positive");
  }
  for (const GridSpec& g : spec.levels) {
    if (g.truncation_level > f.coordinate_count()) {
      throw UsageError("grid truncation level exceeds cocycle support");
    }
  }

  SearchResult best{TorusPoint::zero(map.dim()), false, {}, 0, 0};
  std::uint64_t best_score = 0;
  bool have_best = false;
  for (const TorusPoint& x : quasirandom_starts(map.dim(), spec.num_starts)) {
    std::vector<CoverageTracker> trackers;
    trackers.reserve(spec.levels.size());
    for (const GridSpec& g : spec.levels) trackers.emplace_back(map.dim(), g);

    std::uint64_t used = spec.steps_per_start;
    SkewState start{x, SeqVector{}};
    bool done = false;
    stream_orbit(map, f, start, spec.steps_per_start,
                 [&](const double* base, const double* fiber, std::uint64_t step) {
                   if (done) return;
                   bool all = true;
                   for (CoverageTracker& t : trackers) {
                     t.visit(base, fiber, step);
                     all = all && t.complete();
                   }
                   if (all) {
                     done = true;
                     used = step;
                   }
                 });

    std::uint64_t score = 0;
    bool complete = true;
    for (const CoverageTracker& t : trackers) {
      score += t.boxes_hit();
      complete = complete && t.complete();
    }
    if (!have_best || score > best_score) {
      have_best = true;
      best_score = score;
      best.candidate = x;
      best.complete = complete;
      best.steps_used = used;
      best.levels.clear();
      for (const CoverageTracker& t : trackers) {
        best.levels.push_back(SearchLevelOutcome{t.grid(), t.boxes_total(), t.boxes_hit(),
                                                 t.complete()});
      }
    }
    best.starts_tried++;
    if (best.complete) break;
  }
  return best;
}

CoverageReport weak_mixing_diagnostic(const ToralAutomorphism& map, const Cocycle& f,
                                      const GridSpec& grid, std::uint64_t steps,
                                      const TorusPoint& x, const TorusPoint& y) {
  if (grid.truncation_level > f.coordinate_count()) {
    throw UsageError("grid truncation level exceeds cocycle support");
  }
  CoverageTracker shape(map.dim(), grid);  // index computer for one factor
  const std::uint64_t factor = shape.boxes_total();
  if (factor > (1u << 11)) throw UsageError("product grid too large");
  std::vector<std::int64_t> first_hit(factor * factor, -1);
  std::uint64_t hits = 0, overflow = 0;

  // Advance both factors in lockstep by streaming the second inside the
  // first; buffers from the outer stream must be captured per step.
  const int d = map.dim();
  const int count = f.coordinate_count();
  std::vector<double> base2(y.coords);
  std::vector<double> next2(static_cast<size_t>(d));
  std::vector<double> fiber2(static_cast<size_t>(count), 0.0);
  std::vector<double> buf2(static_cast<size_t>(count), 0.0);
  TorusPoint probe2 = y;

  std::uint64_t step_now = 0;
  auto joint_visit = [&](const double* b1, const double* f1, std::uint64_t step) {
    const std::int64_t i1 = shape.box_index(b1, f1);
    const std::int64_t i2 = shape.box_index(base2.data(), fiber2.data());
    if (i1 < 0 || i2 < 0) {
      ++overflow;
      return;
    }
    auto& slot = first_hit[static_cast<size_t>(i1) * factor + static_cast<size_t>(i2)];
    if (slot < 0) {
      slot = static_cast<std::int64_t>(step);
      ++hits;
    }
  };
  SkewState start1{x, SeqVector{}};
  stream_orbit(map, f, start1, steps,
               [&](const double* b1, const double* f1, std::uint64_t step) {
                 if (step > step_now) {
                   // advance the second factor to the same step
                   probe2.coords = base2;
                   f.evaluate_into(probe2, buf2.data());
                   for (int j = 0; j < count; ++j)
                     fiber2[static_cast<size_t>(j)] += buf2[static_cast<size_t>(j)];
                   apply_into(map, base2.data(), next2.data());
                   std::swap(base2, next2);
                   step_now = step;
                 }
                 joint_visit(b1, f1, step);
               });

  CoverageReport rep;
  rep.boxes_total = factor * factor;
  rep.boxes_hit = hits;
  rep.fraction = rep.boxes_total ? static_cast<double>(hits) / rep.boxes_total : 0.0;
  rep.overflow_count = overflow;
  rep.trajectory_length = steps;
  std::uint64_t max_hit = 0;
  double sum = 0.0;
  for (std::int64_t h : first_hit) {
    if (h < 0) continue;
    max_hit = std::max(max_hit, static_cast<std::uint64_t>(h));
    sum += static_cast<double>(h);
  }
  rep.first_hit_max = max_hit;
  rep.first_hit_mean = hits ? sum / static_cast<double>(hits) : 0.0;
  return rep;
}

}  // namespace romega
