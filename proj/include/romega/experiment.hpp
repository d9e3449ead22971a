#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "romega/closing.hpp"
#include "romega/rng.hpp"
#include "romega/serialize.hpp"
#include "romega/skew.hpp"

namespace romega {

struct ConstructSpec {
  int levels = 3;
  int orbit_period_max = 5;
  double amplitude_cap = 1.0;
  bool equal_period_only = false;
};

struct ClosingSpec {
  int trials = 100;
  double eps_min = 1e-4;
  double eps_max = 1e-2;
  int max_period = 25;
};

struct SearchSpecConfig {
  std::uint64_t steps_per_start = 200'000;
  int num_starts = 8;
};

// Full pipeline description, schema "experiment/1". The seed is mandatory:
// a run must never depend on hidden nondeterminism.
struct ExperimentConfig {
  std::vector<std::vector<long long>> map_rows;
  std::optional<std::string> cocycle_file;       // exactly one of these two
  std::optional<ConstructSpec> construct;
  int periodic_n_max = 3;
  GridSpec grid;
  SearchSpecConfig search;
  std::vector<int> perturbation_levels = {1, 2};
  ClosingSpec closing;
  long long enumeration_budget = kDefaultEnumerationBudget;
  std::optional<std::uint64_t> seed;

  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
  // Schema violations, empty when the config is runnable.
  std::vector<std::string> violations() const;
};

// Claims are split by how they were verified: "exact" holds rational-
// arithmetic facts, "sampled" float measurements with certified bounds where
// available, "statistical" simulation diagnostics that cannot prove anything.
// Timestamps live only in metadata so reports are byte-identical otherwise.
struct Report {
  Json exact = Json::object();
  Json sampled = Json::object();
  Json statistical = Json::object();
  Json errors = Json::object();
  Json metadata = Json::object();

  Json to_json() const;
};

// Runs every stage, recording per-stage errors; stages independent of a
// failed one still run. Throws UsageError when the config has violations.
Report run(const ExperimentConfig& config);

// Random base points streamed forward up to max_period steps; keeps starts
// whose orbit returns within [eps_min, eps_max) of the start. Stops after
// `count` finds or max_attempts starts, whichever is first.
std::vector<NearReturn> sample_near_returns(const ToralAutomorphism& map, int count,
                                            double eps_min, double eps_max, int max_period,
                                            Rng& rng, long long max_attempts = 200'000);

int cli_dispatch(int argc, char** argv);

}  // namespace romega
