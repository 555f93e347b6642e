#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "tplan/planner.hpp"

namespace tplan {

/// Every tunable of the pipeline. Serialized next to each output.
struct Config {
  double eps = 0.1;            // boundary tolerance for relation scoring
  double theta_pre = 0.999;    // pre-assignment / subtask split threshold
  double margin = 0.05;        // slack for strict inequalities, seconds
  double min_length = 0.2;     // shortest planned action, seconds
  double subtask_gap = 1.0;    // seconds between planned subtasks
  int k_max = 3;
  int em_max_iterations = 200;
  double em_tolerance = 1e-8;
  double unit = 1.0;
  int max_length = 5;
  int horizon_factor = 4;
  int qp_max_iterations = 2000;
  double kkt_tolerance = 1e-8;
  double time_limit = 0.0;     // search wall limit, seconds; 0 = none
  std::uint64_t seed = 0;

  PlannerConfig planner() const;
};

/// Throws ValidationError when a tolerance is out of range.
void validate(const Config& c);

nlohmann::json to_json(const Config& c);

/// Overrides fields present in `j`; unknown keys are rejected.
Config apply_overrides(Config base, const nlohmann::json& j);

}  // namespace tplan
