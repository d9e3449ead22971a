#include "romega/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>

#include "romega/errors.hpp"

namespace romega {

namespace {

// Shortest-ish round-trip formatting; %.17g always reconstructs the exact
// double.
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double require_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw UsageError(std::string("missing or non-numeric field \"") + key + "\"");
  }
  return j.at(key).get<double>();
}

long long require_integer(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw UsageError(std::string("missing or non-integer field \"") + key + "\"");
  }
  return j.at(key).get<long long>();
}

const Json& require_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw UsageError(std::string("missing or non-array field \"") + key + "\"");
  }
  return j.at(key);
}

std::vector<double> number_list(const Json& arr, const char* what) {
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_number()) throw UsageError(std::string(what) + " must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Json rats_to_json(const std::vector<Rat>& v) {
  Json arr = Json::array();
  for (const auto& r : v) arr.push_back(rat_to_string(r));
  return arr;
}

CoordinateFunction coordinate_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw UsageError("coordinate descriptor must be an object with a \"type\" string");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") {
    return Constant{require_number(j, "value")};
  }
  if (type == "trig") {
    TrigPoly poly;
    for (const auto& t : require_array(j, "terms")) {
      TrigTerm term;
      for (const auto& f : require_array(t, "frequency")) {
        if (!f.is_number_integer()) throw UsageError("trig frequency must be integer");
        term.frequency.push_back(f.get<long long>());
      }
      term.cos_coeff = require_number(t, "cos");
      term.sin_coeff = require_number(t, "sin");
      poly.terms.push_back(std::move(term));
    }
    return poly;
  }
  if (type == "bumps") {
    BumpSum sum;
    for (const auto& b : require_array(j, "bumps")) {
      double radius = require_number(b, "radius");
      double amplitude = require_number(b, "amplitude");
      if (b.contains("center_exact")) {
        std::vector<Rat> coords;
        for (const auto& s : require_array(b, "center_exact")) {
          if (!s.is_string()) throw UsageError("center_exact entries must be strings");
          coords.push_back(rat_from_string(s.get<std::string>()));
        }
        auto exact = RationalTorusPoint::from_rationals(coords);
        TorusPoint center = exact.to_point();
        sum.bumps.push_back(Bump{std::move(center), radius, amplitude, std::move(exact)});
      } else {
        TorusPoint center(number_list(require_array(b, "center"), "center"));
        sum.bumps.push_back(Bump{std::move(center), radius, amplitude, std::nullopt});
      }
    }
    return sum;
  }
  throw UsageError("unknown coordinate type \"" + type + "\"");
}

Json coordinate_to_json(const CoordinateFunction& fn) {
  Json j;
  if (const auto* c = std::get_if<Constant>(&fn)) {
    j["type"] = "constant";
    j["value"] = c->value;
  } else if (const auto* p = std::get_if<TrigPoly>(&fn)) {
    j["type"] = "trig";
    Json terms = Json::array();
    for (const auto& t : p->terms) {
      terms.push_back({{"frequency", t.frequency}, {"cos", t.cos_coeff}, {"sin", t.sin_coeff}});
    }
    j["terms"] = std::move(terms);
  } else {
    const auto& sum = std::get<BumpSum>(fn);
    j["type"] = "bumps";
    Json bumps = Json::array();
    for (const auto& b : sum.bumps) {
      Json jb{{"center", b.center.coords}, {"radius", b.radius}, {"amplitude", b.amplitude}};
      if (b.exact_center) jb["center_exact"] = b.exact_center->coord_strings();
      bumps.push_back(std::move(jb));
    }
    j["bumps"] = std::move(bumps);
  }
  return j;
}

}  // namespace

Json seqvector_to_json(const SeqVector& v) {
  return Json{{"support", v.support()}, {"entries", v.entries}};
}

SeqVector seqvector_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("sequence vector must be a JSON object");
  auto entries = number_list(require_array(j, "entries"), "entries");
  long long support = require_integer(j, "support");
  if (support != static_cast<long long>(entries.size())) {
    throw UsageError("declared support does not match entry count");
  }
  return SeqVector(std::move(entries));
}

Json cocycle_to_json(const Cocycle& f) {
  Json coords = Json::array();
  for (int k = 1; k <= f.coordinate_count(); ++k) {
    coords.push_back(coordinate_to_json(f.coordinate(k)));
  }
  return Json{{"schema", "cocycle/1"},
              {"base_dim", f.base_dim()},
              {"holder_exponent", f.holder_exponent()},
              {"coordinates", std::move(coords)}};
}

Cocycle cocycle_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("cocycle must be a JSON object");
  if (!j.contains("schema") || j.at("schema") != "cocycle/1") {
    throw UsageError("expected schema \"cocycle/1\"");
  }
  int base_dim = static_cast<int>(require_integer(j, "base_dim"));
  double alpha = require_number(j, "holder_exponent");
  std::vector<CoordinatePtr> coords;
  for (const auto& c : require_array(j, "coordinates")) {
    coords.push_back(std::make_shared<const CoordinateFunction>(coordinate_from_json(c)));
  }
  return Cocycle(base_dim, alpha, std::move(coords));
}

Json hyperbolicity_to_json(const HyperbolicityReport& rep) {
  Json j{{"accepted", rep.accepted},
         {"square", rep.square},
         {"eigenvalue_moduli", rep.eigenvalue_moduli},
         {"reason", rep.reason}};
  j["det"] = rep.det ? Json(rep.det->str()) : Json(nullptr);
  return j;
}

Json certificate_to_json(const SeparationCertificate& cert) {
  Json j{{"verdict",
          cert.verdict == SeparationCertificate::Verdict::separable ? "separable" : "inseparable"},
         {"level", cert.level},
         {"verified", cert.verified}};
  if (!cert.functional.empty()) j["functional"] = rats_to_json(cert.functional);
  if (cert.orthant) {
    Json witness = Json::object();
    for (size_t idx = 0; idx < cert.orthant->witness.size(); ++idx) {
      if (cert.orthant->witness[idx]) witness[std::to_string(idx)] = *cert.orthant->witness[idx];
    }
    j["orthant"] = Json{{"covered", cert.orthant->covered},
                        {"witness", std::move(witness)},
                        {"boundary_points", cert.orthant->boundary_points}};
  }
  if (!cert.positive_combination.empty()) {
    j["positive_combination"] = rats_to_json(cert.positive_combination);
  }
  return j;
}

Json grid_to_json(const GridSpec& g) {
  return Json{{"truncation_level", g.truncation_level},
              {"fiber_halfwidth", g.fiber_halfwidth},
              {"base_subdivisions", g.base_subdivisions},
              {"fiber_subdivisions", g.fiber_subdivisions}};
}

GridSpec grid_from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("grid must be a JSON object");
  GridSpec g;
  g.truncation_level = static_cast<int>(require_integer(j, "truncation_level"));
  g.fiber_halfwidth = require_number(j, "fiber_halfwidth");
  g.base_subdivisions = static_cast<int>(require_integer(j, "base_subdivisions"));
  g.fiber_subdivisions = static_cast<int>(require_integer(j, "fiber_subdivisions"));
  return g;
}

Json coverage_to_json(const CoverageReport& rep) {
  return Json{{"boxes_total", rep.boxes_total},
              {"boxes_hit", rep.boxes_hit},
              {"fraction", rep.fraction},
              {"overflow_count", rep.overflow_count},
              {"trajectory_length", rep.trajectory_length},
              {"distinct_fiber_boxes", rep.distinct_fiber_boxes},
              {"fiber_boxes_total", rep.fiber_boxes_total},
              {"fiber_column_fraction",
               rep.fiber_boxes_total
                   ? static_cast<double>(rep.distinct_fiber_boxes) / rep.fiber_boxes_total
                   : 0.0},
              {"first_hit_max", rep.first_hit_max},
              {"first_hit_mean", rep.first_hit_mean}};
}

void write_periodic_points_csv(std::ostream& os, const ToralAutomorphism& map,
                               const std::vector<PeriodicOrbit>& orbits) {
  os << "orbit_id,point_index,period";
  for (int i = 1; i <= map.dim(); ++i) os << ",x_" << i;
  os << "\n";
  for (size_t id = 0; id < orbits.size(); ++id) {
    auto points = orbit_points(map, orbits[id]);
    for (size_t pi = 0; pi < points.size(); ++pi) {
      os << id << "," << pi << "," << orbits[id].period;
      for (const auto& s : points[pi].coord_strings()) os << "," << s;
      os << "\n";
    }
  }
}

void write_weights_csv(std::ostream& os, const PeriodicData& data) {
  int levels = 0;
  for (const auto& e : data.entries) levels = std::max(levels, e.weight.support());
  os << "orbit_id,period";
  for (int k = 1; k <= levels; ++k) os << ",w_" << k;
  os << "\n";
  for (size_t id = 0; id < data.entries.size(); ++id) {
    const auto& e = data.entries[id];
    os << id << "," << e.orbit.period;
    for (int k = 1; k <= levels; ++k) os << "," << fmt_double(e.weight.coord(k));
    os << "\n";
  }
}

void write_closing_trials_csv(std::ostream& os, const std::vector<ClosingTrialRow>& rows) {
  os << "n,epsilon,max_ratio,fitted_c\n";
  for (const auto& r : rows) {
    os << r.n << "," << fmt_double(r.epsilon) << "," << fmt_double(r.max_ratio) << ","
       << fmt_double(r.fitted_c) << "\n";
  }
}

void write_coverage_curve_csv(std::ostream& os, const std::vector<std::int64_t>& first_hits,
                              std::uint64_t boxes_total) {
  if (boxes_total == 0) throw UsageError("coverage curve needs a nonempty grid");
  std::vector<std::int64_t> hits;
  hits.reserve(first_hits.size());
  for (auto t : first_hits) {
    if (t >= 0) hits.push_back(t);
  }
  std::sort(hits.begin(), hits.end());
  // One row per distinct hit time, thinned for plotting.
  std::vector<std::pair<std::int64_t, double>> curve;
  for (size_t i = 0; i < hits.size(); ++i) {
    double frac = static_cast<double>(i + 1) / static_cast<double>(boxes_total);
    if (!curve.empty() && curve.back().first == hits[i]) {
      curve.back().second = frac;
    } else {
      curve.push_back({hits[i], frac});
    }
  }
  os << "step,fraction\n";
  size_t stride = curve.size() > 4096 ? (curve.size() + 4095) / 4096 : 1;
  for (size_t i = 0; i < curve.size(); ++i) {
    if (i % stride == 0 || i + 1 == curve.size()) {
      os << curve[i].first << "," << fmt_double(curve[i].second) << "\n";
    }
  }
}

}  // namespace romega
