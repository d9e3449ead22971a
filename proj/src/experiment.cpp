#include "romega/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "romega/errors.hpp"
#include "romega/separation.hpp"

namespace romega {

namespace {

std::string iso_utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
  if (!out) throw UsageError("write failed for " + path);
}

int opt_int(const Json& j, const char* key, int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer()) {
    throw UsageError(std::string("field \"") + key + "\" must be an integer");
  }
  return j.at(key).get<int>();
}

long long opt_ll(const Json& j, const char* key, long long dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number_integer()) {
    throw UsageError(std::string("field \"") + key + "\" must be an integer");
  }
  return j.at(key).get<long long>();
}

double opt_double(const Json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) {
    throw UsageError(std::string("field \"") + key + "\" must be a number");
  }
  return j.at(key).get<double>();
}

Json construction_log_to_json(const ConstructionLog& log) {
  Json orbits = Json::array();
  for (const auto& o : log.selected_orbits) {
    orbits.push_back(Json{{"period", o.period}, {"base", o.base.coord_strings()}});
  }
  return Json{{"selected_orbits", std::move(orbits)},
              {"sign_patterns", log.sign_patterns},
              {"min_pairwise_distance", log.min_pairwise_distance},
              {"radius", log.radius},
              {"amplitudes", log.amplitudes},
              {"lipschitz_bounds", log.lipschitz_bounds},
              {"orthant_covered", log.orthant_covered},
              {"bump_count", log.bump_count}};
}

// Weight slices of all orbits at the given level, decided and re-verified.
Json decide_level(const PeriodicData& data, int level) {
  std::vector<std::vector<Rat>> pts;
  pts.reserve(data.entries.size());
  for (const auto& e : data.entries) pts.push_back(level_slice(e.weight, level));
  SeparationCertificate cert = decide(pts);
  return Json{{"level", level},
              {"reverified", verify_certificate(cert, pts)},
              {"certificate", certificate_to_json(cert)}};
}

// Distinct (step, cumulative fraction) pairs from first-hit times, thinned.
Json coverage_curve_json(const std::vector<std::int64_t>& first_hits, std::uint64_t boxes_total,
                         size_t max_points) {
  std::vector<std::int64_t> hits;
  for (auto h : first_hits) {
    if (h >= 0) hits.push_back(h);
  }
  std::sort(hits.begin(), hits.end());
  std::vector<std::pair<std::int64_t, double>> curve;
  for (size_t i = 0; i < hits.size(); ++i) {
    const double frac = static_cast<double>(i + 1) / static_cast<double>(boxes_total);
    if (!curve.empty() && curve.back().first == hits[i]) {
      curve.back().second = frac;
    } else {
      curve.push_back({hits[i], frac});
    }
  }
  Json out = Json::array();
  const size_t stride = curve.size() > max_points ? (curve.size() + max_points - 1) / max_points : 1;
  for (size_t i = 0; i < curve.size(); ++i) {
    if (i % stride == 0 || i + 1 == curve.size()) {
      out.push_back(Json::array({curve[i].first, curve[i].second}));
    }
  }
  return out;
}

double grid_factor_boxes(const GridSpec& g, int dim) {
  return std::pow(static_cast<double>(g.base_subdivisions), dim) *
         std::pow(static_cast<double>(g.fiber_subdivisions), g.truncation_level);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  if (!j.contains("schema") || j.at("schema") != "experiment/1") {
    throw UsageError("expected schema \"experiment/1\"");
  }
  ExperimentConfig c;
  if (j.contains("map")) {
    const Json& m = j.at("map");
    if (!m.is_array()) throw UsageError("\"map\" must be an array of integer rows");
    for (const auto& row : m) {
      if (!row.is_array()) throw UsageError("\"map\" must be an array of integer rows");
      std::vector<long long> r;
      for (const auto& e : row) {
        if (!e.is_number_integer()) throw UsageError("map entries must be integers");
        r.push_back(e.get<long long>());
      }
      c.map_rows.push_back(std::move(r));
    }
  }
  if (j.contains("cocycle")) {
    const Json& co = j.at("cocycle");
    if (!co.is_object()) throw UsageError("\"cocycle\" must be an object");
    if (co.contains("file")) {
      if (!co.at("file").is_string()) throw UsageError("cocycle file must be a string path");
      c.cocycle_file = co.at("file").get<std::string>();
    }
    if (co.contains("construct")) {
      const Json& cs = co.at("construct");
      if (!cs.is_object()) throw UsageError("cocycle construct spec must be an object");
      ConstructSpec s;
      s.levels = opt_int(cs, "levels", s.levels);
      s.orbit_period_max = opt_int(cs, "orbit_period_max", s.orbit_period_max);
      s.amplitude_cap = opt_double(cs, "amplitude_cap", s.amplitude_cap);
      if (cs.contains("equal_period_only")) {
        if (!cs.at("equal_period_only").is_boolean()) {
          throw UsageError("equal_period_only must be a boolean");
        }
        s.equal_period_only = cs.at("equal_period_only").get<bool>();
      }
      c.construct = s;
    }
  }
  c.periodic_n_max = opt_int(j, "periodic_n_max", c.periodic_n_max);
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    if (!g.is_object()) throw UsageError("\"grid\" must be an object");
    c.grid.truncation_level = opt_int(g, "truncation_level", c.grid.truncation_level);
    c.grid.fiber_halfwidth = opt_double(g, "fiber_halfwidth", c.grid.fiber_halfwidth);
    c.grid.base_subdivisions = opt_int(g, "base_subdivisions", c.grid.base_subdivisions);
    c.grid.fiber_subdivisions = opt_int(g, "fiber_subdivisions", c.grid.fiber_subdivisions);
  }
  if (j.contains("search")) {
    const Json& s = j.at("search");
    if (!s.is_object()) throw UsageError("\"search\" must be an object");
    long long sp = opt_ll(s, "steps_per_start",
                          static_cast<long long>(c.search.steps_per_start));
    if (sp < 0) throw UsageError("steps_per_start must be nonnegative");
    c.search.steps_per_start = static_cast<std::uint64_t>(sp);
    c.search.num_starts = opt_int(s, "num_starts", c.search.num_starts);
  }
  if (j.contains("perturbation_levels")) {
    const Json& p = j.at("perturbation_levels");
    if (!p.is_array()) throw UsageError("\"perturbation_levels\" must be an array of integers");
    c.perturbation_levels.clear();
    for (const auto& e : p) {
      if (!e.is_number_integer()) {
        throw UsageError("\"perturbation_levels\" must be an array of integers");
      }
      c.perturbation_levels.push_back(e.get<int>());
    }
  }
  if (j.contains("closing")) {
    const Json& cl = j.at("closing");
    if (!cl.is_object()) throw UsageError("\"closing\" must be an object");
    c.closing.trials = opt_int(cl, "trials", c.closing.trials);
    c.closing.eps_min = opt_double(cl, "eps_min", c.closing.eps_min);
    c.closing.eps_max = opt_double(cl, "eps_max", c.closing.eps_max);
    c.closing.max_period = opt_int(cl, "max_period", c.closing.max_period);
  }
  c.enumeration_budget = opt_ll(j, "enumeration_budget", c.enumeration_budget);
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else if (s.is_number_integer() && s.get<long long>() >= 0) {
      c.seed = static_cast<std::uint64_t>(s.get<long long>());
    } else {
      throw UsageError("\"seed\" must be a nonnegative integer");
    }
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json co = Json::object();
  if (cocycle_file) co["file"] = *cocycle_file;
  if (construct) {
    co["construct"] = Json{{"levels", construct->levels},
                           {"orbit_period_max", construct->orbit_period_max},
                           {"amplitude_cap", construct->amplitude_cap},
                           {"equal_period_only", construct->equal_period_only}};
  }
  Json j{{"schema", "experiment/1"},
         {"map", map_rows},
         {"cocycle", std::move(co)},
         {"periodic_n_max", periodic_n_max},
         {"grid", grid_to_json(grid)},
         {"search",
          Json{{"steps_per_start", search.steps_per_start}, {"num_starts", search.num_starts}}},
         {"perturbation_levels", perturbation_levels},
         {"closing", Json{{"trials", closing.trials},
                          {"eps_min", closing.eps_min},
                          {"eps_max", closing.eps_max},
                          {"max_period", closing.max_period}}},
         {"enumeration_budget", enumeration_budget}};
  if (seed) j["seed"] = *seed;
  return j;
}

std::vector<std::string> ExperimentConfig::violations() const {
  std::vector<std::string> v;
  if (map_rows.empty()) {
    v.push_back("map: required, a nonempty square integer matrix");
  } else {
    for (const auto& r : map_rows) {
      if (r.size() != map_rows.size()) {
        v.push_back("map: must be square");
        break;
      }
    }
  }
  const int sources = (cocycle_file ? 1 : 0) + (construct ? 1 : 0);
  if (sources != 1) v.push_back("cocycle: exactly one source required, file or construct");
  if (construct) {
    if (construct->levels < 1) v.push_back("cocycle.construct.levels: must be >= 1");
    if (construct->orbit_period_max < 1) {
      v.push_back("cocycle.construct.orbit_period_max: must be >= 1");
    }
    if (!(construct->amplitude_cap > 0.0)) {
      v.push_back("cocycle.construct.amplitude_cap: must be positive");
    }
  }
  if (periodic_n_max < 1) v.push_back("periodic_n_max: must be >= 1");
  if (grid.truncation_level < 1) v.push_back("grid.truncation_level: must be >= 1");
  if (!(grid.fiber_halfwidth > 0.0)) v.push_back("grid.fiber_halfwidth: must be positive");
  if (grid.base_subdivisions < 1) v.push_back("grid.base_subdivisions: must be >= 1");
  if (grid.fiber_subdivisions < 1) v.push_back("grid.fiber_subdivisions: must be >= 1");
  if (search.steps_per_start == 0) v.push_back("search.steps_per_start: must be >= 1");
  if (search.num_starts < 1) v.push_back("search.num_starts: must be >= 1");
  for (int n : perturbation_levels) {
    if (n < 1) {
      v.push_back("perturbation_levels: entries must be >= 1");
      break;
    }
  }
  if (closing.trials < 0) v.push_back("closing.trials: must be >= 0");
  if (!(closing.eps_min > 0.0)) v.push_back("closing.eps_min: must be positive");
  if (!(closing.eps_max > closing.eps_min)) v.push_back("closing.eps_max: must exceed eps_min");
  if (closing.max_period < 1) v.push_back("closing.max_period: must be >= 1");
  if (enumeration_budget < 1) v.push_back("enumeration_budget: must be >= 1");
  if (!seed) v.push_back("seed: required, runs must be reproducible");
  return v;
}

Json Report::to_json() const {
  return Json{{"exact", exact},
              {"sampled", sampled},
              {"statistical", statistical},
              {"errors", errors},
              {"metadata", metadata}};
}

std::vector<NearReturn> sample_near_returns(const ToralAutomorphism& map, int count,
                                            double eps_min, double eps_max, int max_period,
                                            Rng& rng, long long max_attempts) {
  if (count < 0) throw UsageError("count must be nonnegative");
  if (!(eps_min > 0.0) || !(eps_max > eps_min)) {
    throw UsageError("need 0 < eps_min < eps_max");
  }
  if (max_period < 1) throw UsageError("max_period must be positive");
  const int d = map.dim();
  std::vector<NearReturn> out;
  for (long long attempt = 0; attempt < max_attempts && out.size() < static_cast<size_t>(count);
       ++attempt) {
    std::vector<double> coords(static_cast<size_t>(d));
    for (auto& c : coords) c = rng.unit();
    TorusPoint x(std::move(coords));
    TorusPoint cur = x;
    // First qualifying return only, so trials are not correlated along one
    // orbit. The float scan is a prescreen; the float orbit drifts by about
    // lambda_u^n ulp, so the recorded epsilon is confirmed exactly.
    for (int n = 1; n <= max_period; ++n) {
      cur = apply(map, cur);
      const double dist = torus_distance(cur, x);
      if (dist >= eps_min * 0.5 && dist < eps_max * 1.5) {
        std::vector<Rat> lifted(x.coords.size());
        for (size_t i = 0; i < x.coords.size(); ++i) lifted[i] = exact_rational(x.coords[i]);
        const RationalTorusPoint rx = RationalTorusPoint::from_rationals(lifted);
        RationalTorusPoint rcur = rx;
        for (int k = 0; k < n; ++k) rcur = apply_exact(map, rcur);
        const double true_eps = std::sqrt(static_cast<double>(torus_distance_sq(rcur, rx)));
        if (true_eps >= eps_min && true_eps < eps_max) {
          out.push_back(NearReturn{x, n, true_eps});
          break;
        }
      }
    }
  }
  return out;
}

Report run(const ExperimentConfig& config) {
  {
    const auto v = config.violations();
    if (!v.empty()) {
      std::string msg = "invalid config:";
      for (const auto& s : v) msg += "\n  - " + s;
      throw UsageError(msg);
    }
  }
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  rep.metadata["schema"] = "report/1";
  rep.metadata["started_at"] = iso_utc_now();
  rep.metadata["config"] = config.to_json();
  const Int budget(config.enumeration_budget);

  std::optional<ToralAutomorphism> map;
  const HyperbolicityReport hyper = check_hyperbolic(config.map_rows);
  rep.exact["map"] = hyperbolicity_to_json(hyper);
  if (hyper.accepted) {
    map.emplace(config.map_rows);
  } else {
    rep.errors["map"] = "map rejected: " + hyper.reason;
  }

  std::optional<Cocycle> f;
  if (map) {
    try {
      if (config.cocycle_file) {
        f.emplace(cocycle_from_json(load_json_file(*config.cocycle_file)));
        if (f->base_dim() != map->dim()) {
          throw UsageError("cocycle base dimension " + std::to_string(f->base_dim()) +
                           " does not match map dimension " + std::to_string(map->dim()));
        }
        rep.exact["cocycle"] = Json{{"source", "file"},
                                    {"path", *config.cocycle_file},
                                    {"coordinates", f->coordinate_count()},
                                    {"holder_exponent", f->holder_exponent()},
                                    {"lipschitz_bounds", f->lipschitz_bounds()}};
      } else {
        ConstructionOptions opts;
        opts.amplitude_cap = config.construct->amplitude_cap;
        opts.equal_period_only = config.construct->equal_period_only;
        opts.enumeration_budget = budget;
        ConstructionResult res = construct_inseparable(*map, config.construct->levels,
                                                       config.construct->orbit_period_max, opts);
        rep.exact["cocycle"] = Json{{"source", "construct"},
                                    {"coordinates", res.cocycle.coordinate_count()},
                                    {"holder_exponent", res.cocycle.holder_exponent()},
                                    {"construction", construction_log_to_json(res.log)}};
        f.emplace(std::move(res.cocycle));
      }
    } catch (const std::exception& e) {
      rep.errors["cocycle"] = e.what();
      f.reset();
    }
  }

  std::optional<PeriodicData> data;
  if (map && f) {
    try {
      data = periodic_data(*f, *map, config.periodic_n_max, budget);
      Json counts = Json::array();
      for (int n = 1; n <= config.periodic_n_max; ++n) {
        counts.push_back(Json{{"n", n}, {"points", fixed_point_count(*map, n).str()}});
      }
      std::map<int, int> by_period;
      for (const auto& e : data->entries) ++by_period[e.orbit.period];
      Json periods = Json::object();
      for (const auto& [p, c] : by_period) periods[std::to_string(p)] = c;
      rep.exact["periodic"] = Json{{"n_max", config.periodic_n_max},
                                   {"orbit_count", data->entries.size()},
                                   {"orbits_by_period", std::move(periods)},
                                   {"points_by_n", std::move(counts)}};
    } catch (const std::exception& e) {
      rep.errors["periodic"] = e.what();
    }
  }

  if (map && f && data) {
    try {
      Json levels = Json::array();
      for (int k = 1; k <= f->coordinate_count(); ++k) levels.push_back(decide_level(*data, k));
      rep.exact["separation"] = std::move(levels);
    } catch (const std::exception& e) {
      rep.errors["separation"] = e.what();
    }
  }

  if (map && f && !config.perturbation_levels.empty()) {
    try {
      Json dists = Json::array();
      Json certs = Json::array();
      for (int n : config.perturbation_levels) {
        Cocycle g = truncation_perturbation(*f, n);
        const DistanceEstimate sup = sup_distance(*f, g, 16);
        const DistanceEstimate hol = holder_distance(*f, g, f->holder_exponent());
        Json d{{"n", n},
               {"holder_exponent", f->holder_exponent()},
               {"sup_sampled_lower", sup.lower_bound},
               {"holder_sampled_lower", hol.lower_bound},
               {"tail_bound", std::ldexp(1.0, -n)}};
        d["sup_certified_upper"] = sup.upper_bound ? Json(*sup.upper_bound) : Json(nullptr);
        d["holder_certified_upper"] = hol.upper_bound ? Json(*hol.upper_bound) : Json(nullptr);
        dists.push_back(std::move(d));
        const PeriodicData gd = periodic_data(g, *map, config.periodic_n_max, budget);
        Json cert = decide_level(gd, n + 1);
        cert["n"] = n;
        certs.push_back(std::move(cert));
      }
      rep.sampled["perturbation_distances"] = std::move(dists);
      rep.exact["perturbation_certificates"] = std::move(certs);
    } catch (const std::exception& e) {
      rep.errors["perturbation"] = e.what();
    }
  }

  if (map && config.closing.trials > 0) {
    try {
      Rng rng(*config.seed);
      const auto trials =
          sample_near_returns(*map, config.closing.trials, config.closing.eps_min,
                              config.closing.eps_max, config.closing.max_period, rng);
      const double lambda = theoretical_contraction(*map);
      struct Row {
        int n;
        double eps;
        double ratio;
        double weight;
      };
      std::vector<Row> rows;
      double fitted_c = 0.0;
      bool all_periodic = true;
      int ties = 0;
      for (const auto& t : trials) {
        const ClosedOrbit closed = close_orbit(*map, t);
        RationalTorusPoint q = closed.point;
        for (int i = 0; i < closed.n; ++i) q = apply_exact(*map, q);
        all_periodic = all_periodic && (q == closed.point);
        if (closed.rounding_tie) ++ties;
        const ShadowingReport shadow = verify_shadowing(*map, t.x, closed.point, t.n);
        fitted_c = std::max(fitted_c, shadow.max_ratio);
        const double w = f ? weight_closeness(*f, *map, t.x, closed.point, t.n) : 0.0;
        rows.push_back(Row{t.n, t.epsilon, shadow.max_ratio, w});
      }
      rep.exact["closing"] = Json{{"trials_found", rows.size()},
                                  {"trials_requested", config.closing.trials},
                                  {"all_exactly_periodic", all_periodic},
                                  {"rounding_tie_count", ties}};
      Json jt = Json::array();
      for (const auto& r : rows) {
        jt.push_back(Json{{"n", r.n}, {"epsilon", r.eps}, {"max_ratio", r.ratio}});
      }
      Json closing{{"lambda_theoretical", lambda},
                   {"fitted_c", fitted_c},
                   {"trials", std::move(jt)}};
      if (f && !rows.empty()) {
        const double lip = f->euclidean_lipschitz();
        int violations = 0;
        double max_util = 0.0;
        for (const auto& r : rows) {
          const double bound = lip * fitted_c * r.eps * 2.0 / (1.0 - lambda);
          if (r.weight > bound) ++violations;
          if (bound > 0.0) max_util = std::max(max_util, r.weight / bound);
        }
        closing["weight_bound"] =
            Json{{"lipschitz", lip}, {"violations", violations}, {"max_utilization", max_util}};
      }
      rep.sampled["closing"] = std::move(closing);
    } catch (const std::exception& e) {
      rep.errors["closing"] = e.what();
    }
  }

  if (map && f) {
    try {
      SearchSpec ss;
      ss.levels = {config.grid};
      ss.steps_per_start = config.search.steps_per_start;
      ss.num_starts = config.search.num_starts;
      const SearchResult sr = transitive_point_search(*map, *f, ss);
      const SkewState start{sr.candidate, SeqVector{}};
      const CoverageTracker tracker =
          coverage_tracker(*map, *f, start, config.search.steps_per_start, config.grid);
      const CoverageReport cov = tracker.report();

      const auto zero_fn = std::make_shared<const CoordinateFunction>(Constant{0.0});
      const std::vector<CoordinatePtr> zcoords(
          static_cast<size_t>(config.grid.truncation_level), zero_fn);
      const Cocycle zero(map->dim(), f->holder_exponent(), zcoords);
      const std::uint64_t zsteps = std::min<std::uint64_t>(config.search.steps_per_start, 200'000);
      const CoverageReport zcov = coverage(*map, zero, start, zsteps, config.grid);

      Json stat{
          {"label", "statistical"},
          {"note", "simulation diagnostics; coverage cannot prove transitivity"},
          {"search", Json{{"complete", sr.complete},
                          {"steps_used", sr.steps_used},
                          {"starts_tried", sr.starts_tried},
                          {"candidate", sr.candidate.coords}}},
          {"coverage", coverage_to_json(cov)},
          {"coverage_curve", coverage_curve_json(tracker.first_hits(), tracker.boxes_total(), 1024)},
          {"zero_cocycle_control",
           Json{{"trajectory_length", zcov.trajectory_length},
                {"distinct_fiber_boxes", zcov.distinct_fiber_boxes},
                {"single_fiber_column", zcov.distinct_fiber_boxes == 1}}}};

      GridSpec wg = config.grid;
      wg.base_subdivisions = std::min(wg.base_subdivisions, 8);
      wg.fiber_subdivisions = std::min(wg.fiber_subdivisions, 4);
      while (wg.base_subdivisions > 1 && grid_factor_boxes(wg, map->dim()) > 2048.0) {
        wg.base_subdivisions /= 2;
      }
      while (wg.fiber_subdivisions > 1 && grid_factor_boxes(wg, map->dim()) > 2048.0) {
        wg.fiber_subdivisions /= 2;
      }
      if (grid_factor_boxes(wg, map->dim()) <= 2048.0) {
        std::vector<double> yc(sr.candidate.coords);
        for (size_t i = 0; i < yc.size(); ++i) {
          yc[i] += 0.377964473009227 * static_cast<double>(i + 1);
        }
        const TorusPoint y(std::move(yc));
        const std::uint64_t wsteps =
            std::min<std::uint64_t>(config.search.steps_per_start, 2'000'000);
        const CoverageReport wm = weak_mixing_diagnostic(*map, *f, wg, wsteps, sr.candidate, y);
        stat["weak_mixing"] = Json{{"grid", grid_to_json(wg)}, {"coverage", coverage_to_json(wm)}};
      } else {
        stat["weak_mixing"] = Json{{"skipped", "product grid too large"}};
      }
      rep.statistical = std::move(stat);
    } catch (const std::exception& e) {
      rep.errors["statistical"] = e.what();
    }
  }

  rep.metadata["finished_at"] = iso_utc_now();
  rep.metadata["wall_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

std::vector<std::vector<long long>> parse_matrix(const std::string& s) {
  Json j;
  try {
    j = Json::parse(s);
  } catch (const Json::exception&) {
    throw UsageError("matrix must be a JSON array like [[2,1],[1,1]]");
  }
  if (!j.is_array() || j.empty()) {
    throw UsageError("matrix must be a JSON array like [[2,1],[1,1]]");
  }
  std::vector<std::vector<long long>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw UsageError("matrix rows must be arrays");
    std::vector<long long> row;
    for (const auto& e : r) {
      if (!e.is_number_integer()) throw UsageError("matrix entries must be integers");
      row.push_back(e.get<long long>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

TorusPoint parse_point(const std::string& s) {
  std::vector<double> coords;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      size_t used = 0;
      coords.push_back(std::stod(part, &used));
      while (used < part.size() && std::isspace(static_cast<unsigned char>(part[used]))) ++used;
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("point must be comma-separated numbers like 0.3,0.7");
    }
  }
  if (coords.empty()) throw UsageError("point must be comma-separated numbers like 0.3,0.7");
  return TorusPoint(std::move(coords));
}

void emit(const std::string& text, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << text;
  } else {
    write_text_file(output_path, text);
  }
}

}  // namespace

int cli_dispatch(int argc, char** argv) {
  CLI::App app{"laboratory for toral automorphisms extended by sequence-space cocycles"};
  app.require_subcommand(1);

  std::string matrix_str = "[[2,1],[1,1]]";
  std::string output_path, cocycle_path, config_path, curve_path, log_path, x_str;
  int n = 1, n_max = 3, level = 1, levels = 3, period_max = 5, max_steps = 25, starts = 8;
  double eps = 1e-2, amplitude_cap = 1.0;
  long long budget = kDefaultEnumerationBudget;
  GridSpec grid;
  std::uint64_t steps = 200'000;
  std::uint64_t seed = 0;
  int exit_code = 0;

  const auto add_matrix = [&](CLI::App* sub) {
    sub->add_option("--matrix", matrix_str, "map matrix as a JSON array of integer rows")
        ->capture_default_str();
  };
  const auto add_output = [&](CLI::App* sub) {
    sub->add_option("--output", output_path, "write the result to this file instead of stdout");
  };
  const auto add_budget = [&](CLI::App* sub) {
    sub->add_option("--budget", budget, "periodic point enumeration budget")
        ->capture_default_str();
  };

  auto* vm = app.add_subcommand("validate-map", "check a matrix for hyperbolicity");
  add_matrix(vm);
  add_output(vm);
  vm->callback([&] {
    const HyperbolicityReport hrep = check_hyperbolic(parse_matrix(matrix_str));
    emit(hyperbolicity_to_json(hrep).dump(2) + "\n", output_path);
    if (!hrep.accepted) throw DomainError("map rejected: " + hrep.reason);
  });

  auto* pp = app.add_subcommand("periodic-points", "enumerate periodic points as CSV");
  pp->add_option("--n", n, "list points of period dividing n")->required();
  add_matrix(pp);
  add_output(pp);
  pp->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    const auto orbits = periodic_points(map, n);
    std::ostringstream os;
    write_periodic_points_csv(os, map, orbits);
    emit(os.str(), output_path);
  });

  auto* wt = app.add_subcommand("weights", "periodic orbit weights of a cocycle as CSV");
  wt->add_option("--cocycle", cocycle_path, "cocycle JSON file")->required();
  wt->add_option("--n-max", n_max, "maximal minimal period")->capture_default_str();
  add_budget(wt);
  add_matrix(wt);
  add_output(wt);
  wt->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    const Cocycle f = cocycle_from_json(load_json_file(cocycle_path));
    const PeriodicData data = periodic_data(f, map, n_max, Int(budget));
    std::ostringstream os;
    write_weights_csv(os, data);
    emit(os.str(), output_path);
  });

  auto* dc = app.add_subcommand("decide", "separability verdict for periodic weight data");
  dc->add_option("--cocycle", cocycle_path, "cocycle JSON file")->required();
  dc->add_option("--level", level, "sequence-space level to slice at")->required();
  dc->add_option("--n-max", n_max, "maximal minimal period")->capture_default_str();
  add_budget(dc);
  add_matrix(dc);
  add_output(dc);
  dc->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    const Cocycle f = cocycle_from_json(load_json_file(cocycle_path));
    const PeriodicData data = periodic_data(f, map, n_max, Int(budget));
    emit(decide_level(data, level).dump(2) + "\n", output_path);
  });

  auto* cs = app.add_subcommand("construct",
                                "build an inseparable bump cocycle over periodic orbits");
  cs->add_option("--levels", levels, "number of sequence-space coordinates")
      ->capture_default_str();
  cs->add_option("--period-max", period_max, "orbit pool: minimal periods up to this")
      ->capture_default_str();
  cs->add_option("--amplitude-cap", amplitude_cap, "per-level amplitude/radius cap")
      ->capture_default_str();
  bool equal_period = false;
  cs->add_flag("--equal-period", equal_period,
               "select orbits of one shared period, giving a zero-mean cocycle");
  cs->add_option("--log", log_path, "write the construction log JSON to this file");
  add_budget(cs);
  add_matrix(cs);
  add_output(cs);
  cs->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    ConstructionOptions opts;
    opts.amplitude_cap = amplitude_cap;
    opts.equal_period_only = equal_period;
    opts.enumeration_budget = Int(budget);
    const ConstructionResult res = construct_inseparable(map, levels, period_max, opts);
    emit(cocycle_to_json(res.cocycle).dump(2) + "\n", output_path);
    if (!log_path.empty()) {
      write_text_file(log_path, construction_log_to_json(res.log).dump(2) + "\n");
    }
  });

  auto* sim = app.add_subcommand("simulate", "coverage diagnostics for the skew product");
  sim->add_option("--cocycle", cocycle_path, "cocycle JSON file")->required();
  sim->add_option("--steps", steps, "steps per start")->capture_default_str();
  sim->add_option("--starts", starts, "number of search starts")->capture_default_str();
  sim->add_option("--truncation-level", grid.truncation_level, "fiber coordinates tracked")
      ->capture_default_str();
  sim->add_option("--fiber-halfwidth", grid.fiber_halfwidth, "fiber box range [-R, R]")
      ->capture_default_str();
  sim->add_option("--base-subdivisions", grid.base_subdivisions, "boxes per base dimension")
      ->capture_default_str();
  sim->add_option("--fiber-subdivisions", grid.fiber_subdivisions, "boxes per fiber coordinate")
      ->capture_default_str();
  sim->add_option("--curve", curve_path, "write the coverage curve CSV to this file");
  add_matrix(sim);
  add_output(sim);
  sim->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    const Cocycle f = cocycle_from_json(load_json_file(cocycle_path));
    SearchSpec ss;
    ss.levels = {grid};
    ss.steps_per_start = steps;
    ss.num_starts = starts;
    const SearchResult sr = transitive_point_search(map, f, ss);
    const CoverageTracker tracker =
        coverage_tracker(map, f, SkewState{sr.candidate, SeqVector{}}, steps, grid);
    const Json j{{"label", "statistical"},
                 {"search", Json{{"complete", sr.complete},
                                 {"steps_used", sr.steps_used},
                                 {"starts_tried", sr.starts_tried},
                                 {"candidate", sr.candidate.coords}}},
                 {"coverage", coverage_to_json(tracker.report())}};
    emit(j.dump(2) + "\n", output_path);
    if (!curve_path.empty()) {
      std::ostringstream os;
      write_coverage_curve_csv(os, tracker.first_hits(), tracker.boxes_total());
      write_text_file(curve_path, os.str());
    }
  });

  auto* cl = app.add_subcommand("close", "close near-returns to exact periodic points");
  cl->add_option("--x", x_str, "start point, comma-separated coordinates")->required();
  cl->add_option("--eps", eps, "near-return threshold")->capture_default_str();
  cl->add_option("--max-steps", max_steps, "scan the orbit this far")->capture_default_str();
  add_matrix(cl);
  add_output(cl);
  cl->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    const TorusPoint x = parse_point(x_str);
    const auto returns = find_near_returns(map, x, eps, max_steps);
    Json arr = Json::array();
    for (const auto& ret : returns) {
      const ClosedOrbit closed = close_orbit(map, ret);
      const ShadowingReport shadow = verify_shadowing(map, x, closed.point, ret.n);
      arr.push_back(Json{{"n", ret.n},
                         {"epsilon", ret.epsilon},
                         {"point", closed.point.coord_strings()},
                         {"rounding_tie", closed.rounding_tie},
                         {"max_ratio", shadow.max_ratio},
                         {"lambda_theoretical", shadow.fitted.lambda}});
    }
    emit(Json{{"near_returns", std::move(arr)}}.dump(2) + "\n", output_path);
  });

  auto* pb = app.add_subcommand("perturb",
                                "truncate a cocycle and measure the distance to the original");
  pb->add_option("--cocycle", cocycle_path, "cocycle JSON file")->required();
  pb->add_option("--n", n, "truncation level")->required();
  pb->add_option("--n-max", n_max, "maximal minimal period for the certificate data")
      ->capture_default_str();
  add_budget(pb);
  add_matrix(pb);
  add_output(pb);
  pb->callback([&] {
    const ToralAutomorphism map(parse_matrix(matrix_str));
    const Cocycle f = cocycle_from_json(load_json_file(cocycle_path));
    const Cocycle g = truncation_perturbation(f, n);
    const DistanceEstimate sup = sup_distance(f, g, 16);
    const DistanceEstimate hol = holder_distance(f, g, f.holder_exponent());
    Json dists{{"holder_exponent", f.holder_exponent()},
               {"sup_sampled_lower", sup.lower_bound},
               {"holder_sampled_lower", hol.lower_bound},
               {"tail_bound", std::ldexp(1.0, -n)}};
    dists["sup_certified_upper"] = sup.upper_bound ? Json(*sup.upper_bound) : Json(nullptr);
    dists["holder_certified_upper"] = hol.upper_bound ? Json(*hol.upper_bound) : Json(nullptr);
    const PeriodicData gd = periodic_data(g, map, n_max, Int(budget));
    Json j{{"n", n},
           {"distances", std::move(dists)},
           {"separation", decide_level(gd, n + 1)},
           {"truncated_cocycle", cocycle_to_json(g)}};
    emit(j.dump(2) + "\n", output_path);
  });

  auto* rn = app.add_subcommand("run", "execute the full pipeline from a config file");
  rn->add_option("--config", config_path, "experiment config JSON")->required();
  auto* seed_opt = rn->add_option("--seed", seed, "override the config seed");
  rn->add_option("--output", output_path, "directory for report.json and CSV artifacts");
  rn->callback([&] {
    ExperimentConfig cfg = ExperimentConfig::from_json(load_json_file(config_path));
    if (seed_opt->count() > 0) cfg.seed = seed;
    const Report rep = run(cfg);
    const Json jr = rep.to_json();
    if (output_path.empty()) {
      std::cout << jr.dump(2) << "\n";
    } else {
      namespace fs = std::filesystem;
      const fs::path dir(output_path);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw UsageError("cannot create output directory " + output_path);
      write_text_file((dir / "report.json").string(), jr.dump(2) + "\n");
      if (rep.sampled.contains("closing")) {
        const Json& c = rep.sampled.at("closing");
        std::vector<ClosingTrialRow> rows;
        const double fc = c.at("fitted_c").get<double>();
        for (const auto& t : c.at("trials")) {
          rows.push_back(ClosingTrialRow{t.at("n").get<int>(), t.at("epsilon").get<double>(),
                                         t.at("max_ratio").get<double>(), fc});
        }
        std::ostringstream os;
        write_closing_trials_csv(os, rows);
        write_text_file((dir / "closing_trials.csv").string(), os.str());
      }
      if (rep.statistical.contains("coverage_curve")) {
        std::ostringstream os;
        os << "step,fraction\n";
        for (const auto& pr : rep.statistical.at("coverage_curve")) {
          os << pr.at(0).get<std::int64_t>() << "," << pr.at(1).get<double>() << "\n";
        }
        write_text_file((dir / "coverage_curve.csv").string(), os.str());
      }
      // Companion artifacts, re-derived from the config; report.json already
      // holds the pipeline results if any of this throws.
      try {
        const ToralAutomorphism map(cfg.map_rows);
        std::optional<Cocycle> f;
        if (cfg.cocycle_file) {
          f.emplace(cocycle_from_json(load_json_file(*cfg.cocycle_file)));
        } else if (cfg.construct) {
          ConstructionOptions opts;
          opts.amplitude_cap = cfg.construct->amplitude_cap;
          opts.equal_period_only = cfg.construct->equal_period_only;
          opts.enumeration_budget = Int(cfg.enumeration_budget);
          f.emplace(
              construct_inseparable(map, cfg.construct->levels, cfg.construct->orbit_period_max,
                                    opts)
                  .cocycle);
        }
        const auto orbits = orbits_up_to(map, cfg.periodic_n_max, Int(cfg.enumeration_budget));
        std::ostringstream os;
        write_periodic_points_csv(os, map, orbits);
        write_text_file((dir / "periodic_points.csv").string(), os.str());
        if (f) {
          write_text_file((dir / "cocycle.json").string(), cocycle_to_json(*f).dump(2) + "\n");
          const PeriodicData pdata = periodic_data(*f, map, cfg.periodic_n_max,
                                                   Int(cfg.enumeration_budget));
          std::ostringstream ws;
          write_weights_csv(ws, pdata);
          write_text_file((dir / "weights.csv").string(), ws.str());
        }
      } catch (const std::exception& e) {
        std::cerr << "companion artifacts incomplete: " << e.what() << "\n";
      }
      std::cout << "report written to " << (dir / "report.json").string() << "\n";
    }
    if (!rep.errors.empty()) {
      std::string stages;
      for (const auto& [key, val] : rep.errors.items()) {
        if (!stages.empty()) stages += ", ";
        stages += key;
      }
      std::cerr << "stages with errors: " << stages << "\n";
      exit_code = 1;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace romega
