#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "romega/closing.hpp"
#include "romega/cocycle.hpp"
#include "romega/errors.hpp"
#include "romega/separation.hpp"
#include "romega/skew.hpp"
#include "romega/torus.hpp"

namespace py = pybind11;
using namespace romega;

namespace {

TorusPoint to_point(const std::vector<double>& coords) { return TorusPoint(coords); }

py::dict report_dict(const CoverageReport& rep) {
  py::dict d;
  d["boxes_total"] = rep.boxes_total;
  d["boxes_hit"] = rep.boxes_hit;
  d["fraction"] = rep.fraction;
  d["overflow_count"] = rep.overflow_count;
  d["trajectory_length"] = rep.trajectory_length;
  d["distinct_fiber_boxes"] = rep.distinct_fiber_boxes;
  d["fiber_boxes_total"] = rep.fiber_boxes_total;
  d["fiber_column_fraction"] =
      rep.fiber_boxes_total ? static_cast<double>(rep.distinct_fiber_boxes) /
                                  static_cast<double>(rep.fiber_boxes_total)
                            : 0.0;
  d["first_hit_max"] = rep.first_hit_max;
  d["first_hit_mean"] = rep.first_hit_mean;
  return d;
}

py::dict orbit_dict(const PeriodicOrbit& orbit) {
  py::dict d;
  d["base"] = orbit.base.coord_strings();
  std::vector<double> f;
  for (double c : orbit.base.to_point().coords) f.push_back(c);
  d["base_float"] = f;
  d["period"] = orbit.period;
  return d;
}

std::vector<std::string> rats_to_strings(const std::vector<Rat>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const Rat& r : v) out.push_back(rat_to_string(r));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact periodic data, separation decisions and skew-product "
            "diagnostics for hyperbolic toral automorphisms";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def("validate_map", [](const std::vector<std::vector<long long>>& rows) {
    HyperbolicityReport rep = check_hyperbolic(rows);
    py::dict d;
    d["accepted"] = rep.accepted;
    d["square"] = rep.square;
    d["det"] = rep.det ? py::cast(rep.det->str()) : py::none();
    d["eigenvalue_moduli"] = rep.eigenvalue_moduli;
    d["reason"] = rep.reason;
    return d;
  }, py::arg("rows"), "Check that an integer matrix is hyperbolic with |det| = 1");

  py::class_<ToralAutomorphism>(m, "Map")
      .def(py::init<const std::vector<std::vector<long long>>&>(), py::arg("rows"))
      .def_property_readonly("dim", &ToralAutomorphism::dim)
      .def_property_readonly("expansion_rate", &ToralAutomorphism::expansion_rate)
      .def_property_readonly("contraction_rate", &ToralAutomorphism::contraction_rate)
      .def("apply",
           [](const ToralAutomorphism& a, const std::vector<double>& x) {
             return apply(a, to_point(x)).coords;
           },
           py::arg("x"))
      .def("fixed_point_count",
           [](const ToralAutomorphism& a, int n) { return fixed_point_count(a, n).str(); },
           py::arg("n"))
      .def("periodic_orbits",
           [](const ToralAutomorphism& a, int n) {
             py::list out;
             for (const PeriodicOrbit& o : periodic_points(a, n)) out.append(orbit_dict(o));
             return out;
           },
           py::arg("n"))
      .def("orbits_up_to",
           [](const ToralAutomorphism& a, int n_max, long long budget) {
             py::list out;
             for (const PeriodicOrbit& o : orbits_up_to(a, n_max, Int(budget)))
               out.append(orbit_dict(o));
             return out;
           },
           py::arg("n_max"), py::arg("budget") = kDefaultEnumerationBudget);

  py::class_<Cocycle>(m, "Cocycle")
      .def_property_readonly("coordinate_count", &Cocycle::coordinate_count)
      .def_property_readonly("holder_exponent", &Cocycle::holder_exponent)
      .def_property_readonly("lipschitz_bounds", &Cocycle::lipschitz_bounds)
      .def_property_readonly("euclidean_lipschitz", &Cocycle::euclidean_lipschitz)
      .def("evaluate",
           [](const Cocycle& f, const std::vector<double>& x) {
             return evaluate(f, to_point(x)).entries;
           },
           py::arg("x"));

  m.def("constant_cocycle",
        [](int base_dim, const std::vector<double>& values) {
          std::vector<CoordinatePtr> coords;
          for (double v : values)
            coords.push_back(std::make_shared<const CoordinateFunction>(Constant{v}));
          return Cocycle(base_dim, 1.0, std::move(coords));
        },
        py::arg("base_dim"), py::arg("values"),
        "Cocycle with the given constant coordinates");

  m.def("construct_inseparable",
        [](const ToralAutomorphism& map, int levels, int orbit_period_max, double cap,
           bool equal_period_only, long long budget) {
          ConstructionOptions opts;
          opts.amplitude_cap = cap;
          opts.equal_period_only = equal_period_only;
          opts.enumeration_budget = Int(budget);
          ConstructionResult r = construct_inseparable(map, levels, orbit_period_max, opts);
          py::dict log;
          py::list sel;
          for (const PeriodicOrbit& o : r.log.selected_orbits) sel.append(orbit_dict(o));
          log["selected_orbits"] = sel;
          log["sign_patterns"] = r.log.sign_patterns;
          log["min_pairwise_distance"] = r.log.min_pairwise_distance;
          log["radius"] = r.log.radius;
          log["amplitudes"] = r.log.amplitudes;
          log["lipschitz_bounds"] = r.log.lipschitz_bounds;
          log["orthant_covered"] = r.log.orthant_covered;
          log["bump_count"] = r.log.bump_count;
          return py::make_tuple(r.cocycle, log);
        },
        py::arg("map"), py::arg("levels"), py::arg("orbit_period_max"),
        py::arg("amplitude_cap") = 1.0, py::arg("equal_period_only") = false,
        py::arg("budget") = kDefaultEnumerationBudget,
        "Signed-bump cocycle whose periodic weights fill every orthant");

  m.def("truncate_cocycle", &truncation_perturbation, py::arg("f"), py::arg("n"),
        "Drop all coordinates past level n; kept coordinates are shared");

  m.def("birkhoff_sum",
        [](const Cocycle& f, const ToralAutomorphism& map, const std::vector<double>& x,
           long long k) { return birkhoff_sum(f, map, to_point(x), k).entries; },
        py::arg("f"), py::arg("map"), py::arg("x"), py::arg("k"));

  m.def("periodic_weights",
        [](const Cocycle& f, const ToralAutomorphism& map, int n_max, long long budget) {
          py::list out;
          for (const WeightEntry& e : periodic_data(f, map, n_max, Int(budget)).entries) {
            py::dict d = orbit_dict(e.orbit);
            d["weight"] = e.weight.entries;
            out.append(d);
          }
          return out;
        },
        py::arg("f"), py::arg("map"), py::arg("n_max"),
        py::arg("budget") = kDefaultEnumerationBudget);

  m.def("decide_weights",
        [](const std::vector<std::vector<double>>& weights, int level) {
          std::vector<std::vector<Rat>> pts;
          pts.reserve(weights.size());
          for (const auto& w : weights) pts.push_back(level_slice(SeqVector(w), level));
          SeparationCertificate cert = decide(pts);
          py::dict d;
          const bool sep = cert.verdict == SeparationCertificate::Verdict::separable;
          d["verdict"] = sep ? "separable" : "inseparable";
          d["level"] = cert.level;
          d["verified"] = cert.verified;
          d["functional"] = sep ? py::cast(rats_to_strings(cert.functional)) : py::none();
          d["orthant_covered"] = cert.orthant.has_value();
          d["positive_combination"] =
              cert.positive_combination.empty()
                  ? py::none()
                  : py::cast(rats_to_strings(cert.positive_combination));
          return d;
        },
        py::arg("weights"), py::arg("level"),
        "Exact separation decision for float weight vectors at a level");

  m.def("sup_distance",
        [](const Cocycle& f, const Cocycle& g, int grid) {
          DistanceEstimate est = sup_distance(f, g, grid);
          return py::make_tuple(est.lower_bound, est.upper_bound);
        },
        py::arg("f"), py::arg("g"), py::arg("grid_per_dim") = 16);

  m.def("holder_distance",
        [](const Cocycle& f, const Cocycle& g, double alpha) {
          DistanceEstimate est = holder_distance(f, g, alpha);
          return py::make_tuple(est.lower_bound, est.upper_bound);
        },
        py::arg("f"), py::arg("g"), py::arg("alpha") = 1.0);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("truncation_level", &GridSpec::truncation_level)
      .def_readwrite("fiber_halfwidth", &GridSpec::fiber_halfwidth)
      .def_readwrite("base_subdivisions", &GridSpec::base_subdivisions)
      .def_readwrite("fiber_subdivisions", &GridSpec::fiber_subdivisions);

  m.def("coverage",
        [](const ToralAutomorphism& map, const Cocycle& f, const std::vector<double>& x,
           std::uint64_t steps, const GridSpec& grid) {
          return report_dict(coverage(map, f, SkewState{to_point(x), SeqVector{}}, steps, grid));
        },
        py::arg("map"), py::arg("f"), py::arg("x"), py::arg("steps"), py::arg("grid"));

  m.def("transitive_point_search",
        [](const ToralAutomorphism& map, const Cocycle& f, const std::vector<GridSpec>& levels,
           std::uint64_t steps_per_start, int num_starts) {
          SearchSpec spec;
          spec.levels = levels;
          spec.steps_per_start = steps_per_start;
          spec.num_starts = num_starts;
          SearchResult res = transitive_point_search(map, f, spec);
          py::dict d;
          d["candidate"] = res.candidate.coords;
          d["complete"] = res.complete;
          d["steps_used"] = res.steps_used;
          d["starts_tried"] = res.starts_tried;
          py::list lv;
          for (const SearchLevelOutcome& o : res.levels) {
            py::dict l;
            l["boxes_total"] = o.boxes_total;
            l["boxes_hit"] = o.boxes_hit;
            l["complete"] = o.complete;
            lv.append(l);
          }
          d["levels"] = lv;
          return d;
        },
        py::arg("map"), py::arg("f"), py::arg("levels"),
        py::arg("steps_per_start") = 1'000'000, py::arg("num_starts") = 8);

  m.def("weak_mixing_diagnostic",
        [](const ToralAutomorphism& map, const Cocycle& f, const GridSpec& grid,
           std::uint64_t steps, const std::vector<double>& x, const std::vector<double>& y) {
          return report_dict(weak_mixing_diagnostic(map, f, grid, steps, to_point(x), to_point(y)));
        },
        py::arg("map"), py::arg("f"), py::arg("grid"), py::arg("steps"), py::arg("x"),
        py::arg("y"));

  m.def("find_near_returns",
        [](const ToralAutomorphism& map, const std::vector<double>& x, double eps,
           int max_steps) {
          py::list out;
          for (const NearReturn& r : find_near_returns(map, to_point(x), eps, max_steps)) {
            py::dict d;
            d["n"] = r.n;
            d["epsilon"] = r.epsilon;
            out.append(d);
          }
          return out;
        },
        py::arg("map"), py::arg("x"), py::arg("eps"), py::arg("max_steps"));

  py::class_<ClosedOrbit>(m, "ClosedOrbit")
      .def_property_readonly("point",
                             [](const ClosedOrbit& c) { return c.point.coord_strings(); })
      .def_property_readonly("point_float",
                             [](const ClosedOrbit& c) { return c.point.to_point().coords; })
      .def_readonly("n", &ClosedOrbit::n)
      .def_readonly("rounding_tie", &ClosedOrbit::rounding_tie)
      .def_readonly("tie_components", &ClosedOrbit::tie_components);

  m.def("close_orbit",
        [](const ToralAutomorphism& map, const std::vector<double>& x, int n) {
          return close_orbit(map, NearReturn{to_point(x), n, 0.0});
        },
        py::arg("map"), py::arg("x"), py::arg("n"),
        "Exact period-n point shadowing the near return at x");

  m.def("theoretical_contraction", &theoretical_contraction, py::arg("map"));

  m.def("verify_shadowing",
        [](const ToralAutomorphism& map, const std::vector<double>& x, const ClosedOrbit& c) {
          ShadowingReport rep = verify_shadowing(map, to_point(x), c.point, c.n);
          py::dict d;
          d["ratios"] = rep.ratios;
          d["max_ratio"] = rep.max_ratio;
          d["c"] = rep.fitted.c;
          d["lambda"] = rep.fitted.lambda;
          d["epsilon"] = rep.epsilon;
          d["degenerate"] = rep.degenerate;
          return d;
        },
        py::arg("map"), py::arg("x"), py::arg("closed"));

  m.def("weight_closeness",
        [](const Cocycle& f, const ToralAutomorphism& map, const std::vector<double>& x,
           const ClosedOrbit& c) { return weight_closeness(f, map, to_point(x), c.point, c.n); },
        py::arg("f"), py::arg("map"), py::arg("x"), py::arg("closed"));
}
