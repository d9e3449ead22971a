#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "romega/cocycle.hpp"
#include "romega/separation.hpp"
#include "romega/skew.hpp"
#include "romega/torus.hpp"

namespace romega {

// Keys are emitted sorted, floats round-trip exactly, so equal values
// serialize to identical bytes.
using Json = nlohmann::json;

Json seqvector_to_json(const SeqVector& v);
SeqVector seqvector_from_json(const Json& j);

// Declarative cocycle format, schema "cocycle/1": base dimension, Hölder
// exponent and a list of coordinate descriptors. Bump centers carry exact
// rational coordinates when known; those win over the float mirror on load.
Json cocycle_to_json(const Cocycle& f);
Cocycle cocycle_from_json(const Json& j);

Json hyperbolicity_to_json(const HyperbolicityReport& rep);

// Verdict plus its witness: functional as exact "num/den" strings, orthant
// cover as an index map, or a positive null combination.
Json certificate_to_json(const SeparationCertificate& cert);

Json grid_to_json(const GridSpec& g);
GridSpec grid_from_json(const Json& j);

Json coverage_to_json(const CoverageReport& rep);

// One row per periodic point: orbit id, index within the orbit, period, then
// exact rational coordinates.
void write_periodic_points_csv(std::ostream& os, const ToralAutomorphism& map,
                               const std::vector<PeriodicOrbit>& orbits);

// One row per orbit: orbit id, period, then the weight coordinates.
void write_weights_csv(std::ostream& os, const PeriodicData& data);

struct ClosingTrialRow {
  int n = 0;
  double epsilon = 0.0;
  double max_ratio = 0.0;
  double fitted_c = 0.0;
};

void write_closing_trials_csv(std::ostream& os, const std::vector<ClosingTrialRow>& rows);

// Coverage fraction as a function of trajectory step, one row per first-hit
// event, thinned to at most ~4096 rows.
void write_coverage_curve_csv(std::ostream& os, const std::vector<std::int64_t>& first_hits,
                              std::uint64_t boxes_total);

}  // namespace romega
