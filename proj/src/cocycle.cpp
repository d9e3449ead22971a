#include "romega/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "romega/errors.hpp"
#include "romega/separation.hpp"

namespace romega {

namespace {

double freq_norm(const std::vector<long long>& k) {
  double sq = 0.0;
  for (long long v : k) sq += static_cast<double>(v) * static_cast<double>(v);
  return std::sqrt(sq);
}

void validate_coordinate(const CoordinateFunction& fn, int base_dim) {
  if (const auto* poly = std::get_if<TrigPoly>(&fn)) {
    for (const TrigTerm& t : poly->terms) {
      if (static_cast<int>(t.frequency.size()) != base_dim) {
        throw UsageError("trig frequency dimension does not match base");
      }
      if (!std::isfinite(t.cos_coeff) || !std::isfinite(t.sin_coeff)) {
        throw DomainError("non-finite trig coefficient");
      }
    }
  } else if (const auto* bs = std::get_if<BumpSum>(&fn)) {
    for (const Bump& b : bs->bumps) {
      if (b.center.dim() != base_dim) {
        throw UsageError("bump center dimension does not match base");
      }
      if (!(b.radius > 0.0) || !(b.radius < 0.5)) {
        throw DomainError("bump radius must lie in (0, 1/2)");
      }
      if (!std::isfinite(b.amplitude)) throw DomainError("non-finite bump amplitude");
    }
  } else {
    if (!std::isfinite(std::get<Constant>(fn).value)) {
      throw DomainError("non-finite constant coordinate");
    }
  }
}

}  // namespace

double bump_value(const Bump& b, const TorusPoint& x) {
  const double d = torus_distance(x, b.center);
  if (d >= b.radius) return 0.0;
  return b.amplitude * (1.0 - d / b.radius);
}

double coordinate_value(const CoordinateFunction& fn, const TorusPoint& x) {
  if (const auto* c = std::get_if<Constant>(&fn)) return c->value;
  if (const auto* poly = std::get_if<TrigPoly>(&fn)) {
    double s = 0.0;
    for (const TrigTerm& t : poly->terms) {
      double phase = 0.0;
      for (size_t j = 0; j < t.frequency.size(); ++j) {
        phase += static_cast<double>(t.frequency[j]) * x.coords[j];
      }
      phase *= 2.0 * std::numbers::pi;
      s += t.cos_coeff * std::cos(phase) + t.sin_coeff * std::sin(phase);
    }
    return s;
  }
  const auto& bs = std::get<BumpSum>(fn);
  double s = 0.0;
  for (const Bump& b : bs.bumps) s += bump_value(b, x);
  return s;
}

double coordinate_lipschitz(const CoordinateFunction& fn) {
  if (std::holds_alternative<Constant>(fn)) return 0.0;
  if (const auto* poly = std::get_if<TrigPoly>(&fn)) {
    double l = 0.0;
    for (const TrigTerm& t : poly->terms) {
      l += 2.0 * std::numbers::pi * freq_norm(t.frequency) *
           (std::abs(t.cos_coeff) + std::abs(t.sin_coeff));
    }
    return l;
  }
  const auto& bs = std::get<BumpSum>(fn);
  double l = 0.0;
  for (const Bump& b : bs.bumps) l = std::max(l, std::abs(b.amplitude) / b.radius);
  return l;
}

double coordinate_sup(const CoordinateFunction& fn) {
  if (const auto* c = std::get_if<Constant>(&fn)) return std::abs(c->value);
  if (const auto* poly = std::get_if<TrigPoly>(&fn)) {
    double s = 0.0;
    for (const TrigTerm& t : poly->terms) {
      s += std::abs(t.cos_coeff) + std::abs(t.sin_coeff);
    }
    return s;
  }
  // Disjointness not assumed; the sum of peaks always bounds.
  const auto& bs = std::get<BumpSum>(fn);
  double s = 0.0;
  for (const Bump& b : bs.bumps) s += std::abs(b.amplitude);
  return s;
}

Cocycle::Cocycle(int base_dim, double holder_exponent, std::vector<CoordinatePtr> coordinates)
    : base_dim_(base_dim), holder_exponent_(holder_exponent), coords_(std::move(coordinates)) {
  if (base_dim_ < 1) throw UsageError("base dimension must be positive");
  if (!(holder_exponent_ > 0.0) || holder_exponent_ > 1.0) {
    throw UsageError("Hölder exponent must lie in (0, 1]");
  }
  for (const CoordinatePtr& c : coords_) {
    if (!c) throw UsageError("null coordinate function");
    validate_coordinate(*c, base_dim_);
  }
}

const CoordinateFunction& Cocycle::coordinate(int k) const {
  if (k < 1 || k > coordinate_count()) throw UsageError("coordinate index out of range");
  return *coords_[static_cast<size_t>(k - 1)];
}

CoordinatePtr Cocycle::coordinate_ptr(int k) const {
  if (k < 1 || k > coordinate_count()) throw UsageError("coordinate index out of range");
  return coords_[static_cast<size_t>(k - 1)];
}

std::vector<double> Cocycle::lipschitz_bounds() const {
  std::vector<double> out;
  out.reserve(coords_.size());
  for (const CoordinatePtr& c : coords_) out.push_back(coordinate_lipschitz(*c));
  return out;
}

double Cocycle::euclidean_lipschitz() const {
  double sq = 0.0;
  for (const CoordinatePtr& c : coords_) {
    double l = coordinate_lipschitz(*c);
    sq += l * l;
  }
  return std::sqrt(sq);
}

void Cocycle::evaluate_into(const TorusPoint& x, double* out) const {
  if (x.dim() != base_dim_) throw UsageError("point dimension does not match cocycle base");
  for (size_t i = 0; i < coords_.size(); ++i) out[i] = coordinate_value(*coords_[i], x);
}

SeqVector evaluate(const Cocycle& f, const TorusPoint& x) {
  std::vector<double> v(static_cast<size_t>(f.coordinate_count()), 0.0);
  f.evaluate_into(x, v.data());
  return SeqVector(std::move(v));
}

SeqVector birkhoff_sum(const Cocycle& f, const ToralAutomorphism& map, const TorusPoint& x,
                       long long k) {
  if (k < 0) throw UsageError("step count must be non-negative");
  if (x.dim() != f.base_dim() || map.dim() != f.base_dim()) {
    throw UsageError("dimension mismatch in Birkhoff sum");
  }
  const size_t count = static_cast<size_t>(f.coordinate_count());
  std::vector<double> acc(count, 0.0);
  std::vector<double> buf(count, 0.0);
  TorusPoint cur = x;
  for (long long i = 0; i < k; ++i) {
    f.evaluate_into(cur, buf.data());
    for (size_t j = 0; j < count; ++j) acc[j] += buf[j];
    cur = apply(map, cur);
  }
  return SeqVector(std::move(acc));
}

PeriodicData periodic_data(const Cocycle& f, const ToralAutomorphism& map, int n_max,
                           const Int& budget) {
  if (map.dim() != f.base_dim()) throw UsageError("cocycle base does not match map");
  PeriodicData data;
  const size_t count = static_cast<size_t>(f.coordinate_count());
  std::vector<double> buf(count, 0.0);
  for (PeriodicOrbit& orbit : orbits_up_to(map, n_max, budget)) {
    std::vector<double> acc(count, 0.0);
    for (const RationalTorusPoint& pt : orbit_points(map, orbit)) {
      f.evaluate_into(pt.to_point(), buf.data());
      for (size_t j = 0; j < count; ++j) acc[j] += buf[j];
    }
    data.entries.push_back(WeightEntry{std::move(orbit), SeqVector(std::move(acc))});
  }
  return data;
}

namespace {

double metric_term(double b) { return b / (1.0 + b); }

std::vector<TorusPoint> base_grid(int dim, int per_dim) {
  if (per_dim < 1) throw UsageError("sample grid must be non-empty");
  double total = std::pow(static_cast<double>(per_dim), dim);
  if (total > 2e6) throw UsageError("sample grid too large");
  std::vector<TorusPoint> pts;
  pts.reserve(static_cast<size_t>(total));
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  for (;;) {
    std::vector<double> c(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      c[static_cast<size_t>(i)] = (idx[static_cast<size_t>(i)] + 0.5) / per_dim;
    }
    pts.emplace_back(std::move(c));
    int i = 0;
    while (i < dim) {
      if (++idx[static_cast<size_t>(i)] < per_dim) break;
      idx[static_cast<size_t>(i)] = 0;
      ++i;
    }
    if (i == dim) break;
  }
  return pts;
}

// Per-coordinate certified data for the difference f - g.
struct DiffBound {
  double lipschitz = 0.0;
  double sup = 0.0;
  bool identical = false;
};

std::vector<DiffBound> difference_bounds(const Cocycle& f, const Cocycle& g) {
  const int count = std::max(f.coordinate_count(), g.coordinate_count());
  std::vector<DiffBound> out(static_cast<size_t>(count));
  for (int k = 1; k <= count; ++k) {
    DiffBound& b = out[static_cast<size_t>(k - 1)];
    const bool has_f = k <= f.coordinate_count();
    const bool has_g = k <= g.coordinate_count();
    if (has_f && has_g && f.coordinate_ptr(k) == g.coordinate_ptr(k)) {
      b.identical = true;
      continue;
    }
    if (has_f) {
      b.lipschitz += coordinate_lipschitz(f.coordinate(k));
      b.sup += coordinate_sup(f.coordinate(k));
    }
    if (has_g) {
      b.lipschitz += coordinate_lipschitz(g.coordinate(k));
      b.sup += coordinate_sup(g.coordinate(k));
    }
  }
  return out;
}

}  // namespace

DistanceEstimate sup_distance(const Cocycle& f, const Cocycle& g, int grid_per_dim) {
  if (f.base_dim() != g.base_dim()) throw UsageError("cocycles have different bases");
  DistanceEstimate est;
  for (const TorusPoint& x : base_grid(f.base_dim(), grid_per_dim)) {
    est.lower_bound = std::max(est.lower_bound, product_metric(evaluate(f, x), evaluate(g, x)));
  }
  double upper = 0.0;
  const std::vector<DiffBound> bounds = difference_bounds(f, g);
  for (size_t k = 1; k <= bounds.size(); ++k) {
    const DiffBound& b = bounds[k - 1];
    if (b.identical || b.sup == 0.0) continue;
    upper += std::ldexp(metric_term(b.sup), -static_cast<int>(k));
  }
  est.upper_bound = upper;
  return est;
}

DistanceEstimate holder_distance(const Cocycle& f, const Cocycle& g, double alpha,
                                 const PairSampleSpec& sample) {
  if (f.base_dim() != g.base_dim()) throw UsageError("cocycles have different bases");
  if (!(alpha > 0.0) || alpha > 1.0) throw UsageError("exponent must lie in (0, 1]");
  const int d = f.base_dim();

  DistanceEstimate est;
  std::vector<TorusPoint> pts = base_grid(d, sample.grid_per_dim);
  auto probe = [&](const TorusPoint& x, const TorusPoint& y) {
    const double dist = torus_distance(x, y);
    if (dist == 0.0) return;
    SeqVector dx = evaluate(f, x) - evaluate(g, x);
    SeqVector dy = evaluate(f, y) - evaluate(g, y);
    est.lower_bound =
        std::max(est.lower_bound, product_metric(dx, dy) / std::pow(dist, alpha));
  };
  // All grid pairs when affordable, a strided subset otherwise.
  const size_t stride = pts.size() > 512 ? pts.size() / 512 + 1 : 1;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); j += stride) probe(pts[i], pts[j]);
  }
  for (const TorusPoint& x : pts) {
    for (double off : sample.offsets) {
      for (int axis = 0; axis < d; ++axis) {
        std::vector<double> c = x.coords;
        c[static_cast<size_t>(axis)] += off;
        probe(x, TorusPoint(std::move(c)));
      }
    }
  }

  // sup over distances t of min(1, 2*sup, L*t)/t^alpha, maximized either at
  // the kink or at the torus diameter.
  const double diam = std::sqrt(static_cast<double>(d)) / 2.0;
  double upper = 0.0;
  const std::vector<DiffBound> bounds = difference_bounds(f, g);
  for (size_t k = 1; k <= bounds.size(); ++k) {
    const DiffBound& b = bounds[k - 1];
    if (b.identical || b.lipschitz == 0.0 || b.sup == 0.0) continue;
    const double cap = std::min(1.0, 2.0 * b.sup);
    const double term = std::min(std::pow(b.lipschitz, alpha) * std::pow(cap, 1.0 - alpha),
                                 b.lipschitz * std::pow(diam, 1.0 - alpha));
    upper += std::ldexp(term, -static_cast<int>(k));
  }
  est.upper_bound = upper;
  return est;
}

Cocycle truncation_perturbation(const Cocycle& f, int n) {
  if (n < 0) throw UsageError("truncation level must be non-negative");
  std::vector<CoordinatePtr> coords;
  const int keep = std::min(n, f.coordinate_count());
  coords.reserve(static_cast<size_t>(keep));
  for (int k = 1; k <= keep; ++k) coords.push_back(f.coordinate_ptr(k));
  return Cocycle(f.base_dim(), f.holder_exponent(), std::move(coords));
}

ConstructionResult construct_inseparable(const ToralAutomorphism& map, int levels,
                                         int orbit_period_max,
                                         const ConstructionOptions& opts) {
  if (levels < 1) throw UsageError("levels must be positive");
  if (levels > 20) throw UsageError("orthant bookkeeping limited to 20 levels");
  if (!(opts.amplitude_cap > 0.0) || opts.amplitude_cap > 1.0) {
    throw UsageError("amplitude cap must lie in (0, 1]");
  }

  const size_t wanted = size_t{1} << levels;
  std::vector<PeriodicOrbit> orbits = orbits_up_to(map, orbit_period_max, opts.enumeration_budget);
  if (opts.equal_period_only) {
    // First period owning enough orbits; they are sorted by period, then base.
    size_t begin = 0, end = 0;
    while (begin < orbits.size()) {
      end = begin;
      while (end < orbits.size() && orbits[end].period == orbits[begin].period) ++end;
      if (end - begin >= wanted) break;
      begin = end;
    }
    if (begin >= orbits.size()) {
      std::ostringstream os;
      os << "no single period <= " << orbit_period_max << " holds " << wanted
         << " orbits";
      throw DomainError(os.str());
    }
    orbits.erase(orbits.begin() + static_cast<std::ptrdiff_t>(begin + wanted), orbits.end());
    orbits.erase(orbits.begin(), orbits.begin() + static_cast<std::ptrdiff_t>(begin));
  } else if (orbits.size() < wanted) {
    std::ostringstream os;
    os << "need " << wanted << " periodic orbits but only " << orbits.size()
       << " have period <= " << orbit_period_max;
    throw DomainError(os.str());
  } else {
    orbits.erase(orbits.begin() + static_cast<std::ptrdiff_t>(wanted), orbits.end());
  }

  std::vector<std::vector<RationalTorusPoint>> orbit_pts;
  orbit_pts.reserve(wanted);
  for (const PeriodicOrbit& o : orbits) orbit_pts.push_back(orbit_points(map, o));

  std::vector<const RationalTorusPoint*> flat;
  for (const auto& pts : orbit_pts)
    for (const RationalTorusPoint& p : pts) flat.push_back(&p);

  Rat min_sq(-1);
  for (size_t i = 0; i < flat.size(); ++i) {
    for (size_t j = i + 1; j < flat.size(); ++j) {
      Rat sq = torus_distance_sq(*flat[i], *flat[j]);
      if (min_sq < 0 || sq < min_sq) min_sq = sq;
    }
  }
  if (min_sq <= 0) throw DomainError("selected orbits share a point");

  double radius = std::sqrt(to_double(min_sq)) / 3.0;
  radius = std::min(radius, 0.4999);
  // Exact disjointness: supports are closed radius-balls around distinct
  // points, disjoint iff every pairwise distance exceeds 2*radius.
  const Rat radius_exact = exact_rational(radius);
  if (!(min_sq > 4 * radius_exact * radius_exact)) {
    throw DomainError("bump radius collision: cannot make supports disjoint");
  }

  ConstructionLog log;
  log.selected_orbits = orbits;
  log.min_pairwise_distance = std::sqrt(to_double(min_sq));
  log.radius = radius;

  std::vector<CoordinatePtr> coords;
  for (int k = 1; k <= levels; ++k) {
    const double schedule = std::min(std::ldexp(1.0, -(k - 1)), opts.amplitude_cap);
    const double amp = schedule * radius;
    BumpSum bs;
    for (size_t i = 0; i < wanted; ++i) {
      const int sign = ((i >> (k - 1)) & 1u) ? -1 : +1;
      for (const RationalTorusPoint& p : orbit_pts[i]) {
        bs.bumps.push_back(Bump{p.to_point(), radius, sign * amp, p});
      }
    }
    log.amplitudes.push_back(amp);
    log.bump_count += static_cast<int>(bs.bumps.size());
    coords.push_back(std::make_shared<const CoordinateFunction>(std::move(bs)));
  }

  Cocycle cocycle(map.dim(), 1.0, std::move(coords));
  log.lipschitz_bounds = cocycle.lipschitz_bounds();

  for (size_t i = 0; i < wanted; ++i) {
    std::vector<int> pattern;
    for (int k = 1; k <= levels; ++k) pattern.push_back(((i >> (k - 1)) & 1u) ? -1 : +1);
    log.sign_patterns.push_back(std::move(pattern));
  }

  // Each selected orbit point sits at its own bump peak and outside every
  // other support, so its weight in coordinate k is exactly
  // period * sign * amp; verify the signs and the orthant coverage anyway.
  std::vector<SeqVector> selected_weights;
  {
    const size_t count = static_cast<size_t>(cocycle.coordinate_count());
    std::vector<double> buf(count, 0.0);
    for (size_t i = 0; i < wanted; ++i) {
      std::vector<double> acc(count, 0.0);
      for (const RationalTorusPoint& p : orbit_pts[i]) {
        cocycle.evaluate_into(p.to_point(), buf.data());
        for (size_t j = 0; j < count; ++j) acc[j] += buf[j];
      }
      for (int k = 1; k <= levels; ++k) {
        const double w = acc[static_cast<size_t>(k - 1)];
        if (!(w * log.sign_patterns[i][static_cast<size_t>(k - 1)] > 0.0)) {
          throw DomainError("constructed weight lost its sign; supports not isolated");
        }
      }
      selected_weights.push_back(SeqVector(std::move(acc)));
    }
  }
  for (int k = 1; k <= levels; ++k) {
    std::vector<std::vector<Rat>> pts;
    pts.reserve(wanted);
    for (const SeqVector& w : selected_weights) pts.push_back(level_slice(w, k));
    OrthantCoverage cov = orthant_coverage(pts);
    log.orthant_covered.push_back(cov.covered);
    if (!cov.covered) {
      throw DomainError("constructed weights failed orthant coverage at level " +
                        std::to_string(k));
    }
  }

  return ConstructionResult{std::move(cocycle), std::move(log)};
}

}  // namespace romega
