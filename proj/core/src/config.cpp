#include "tplan/config.hpp"

#include <string>

#include "tplan/error.hpp"

namespace tplan {

PlannerConfig Config::planner() const {
  PlannerConfig p;
  p.eps = eps;
  p.theta_pre = theta_pre;
  p.gmm.k_max = k_max;
  p.gmm.seed = seed;
  p.gmm.max_iterations = em_max_iterations;
  p.gmm.tolerance = em_tolerance;
  p.symbolic.unit = unit;
  p.symbolic.max_length = max_length;
  p.symbolic.horizon_factor = horizon_factor;
  p.parametrize.margin = margin;
  p.parametrize.min_length = min_length;
  p.parametrize.subtask_gap = subtask_gap;
  p.parametrize.max_iterations = qp_max_iterations;
  p.parametrize.kkt_tolerance = kkt_tolerance;
  p.search.time_limit = time_limit;
  return p;
}

void validate(const Config& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("config: ") + what);
  };
  require(c.eps >= 0.0, "eps must be >= 0");
  require(c.theta_pre > 0.0 && c.theta_pre <= 1.0,
          "theta_pre must be in (0, 1]");
  require(c.margin > 0.0, "margin must be > 0");
  require(c.min_length > 0.0, "min_length must be > 0");
  require(c.subtask_gap >= 0.0, "subtask_gap must be >= 0");
  require(c.k_max >= 1, "k_max must be >= 1");
  require(c.em_max_iterations >= 1, "em_max_iterations must be >= 1");
  require(c.em_tolerance >= 0.0, "em_tolerance must be >= 0");
  require(c.unit > 0.0, "unit must be > 0");
  require(c.max_length >= 1, "max_length must be >= 1");
  require(c.horizon_factor >= 1, "horizon_factor must be >= 1");
  require(c.qp_max_iterations >= 1, "qp_max_iterations must be >= 1");
  require(c.kkt_tolerance > 0.0, "kkt_tolerance must be > 0");
  require(c.time_limit >= 0.0, "time_limit must be >= 0");
}

nlohmann::json to_json(const Config& c) {
  return {
      {"eps", c.eps},
      {"theta_pre", c.theta_pre},
      {"margin", c.margin},
      {"min_length", c.min_length},
      {"subtask_gap", c.subtask_gap},
      {"k_max", c.k_max},
      {"em_max_iterations", c.em_max_iterations},
      {"em_tolerance", c.em_tolerance},
      {"unit", c.unit},
      {"max_length", c.max_length},
      {"horizon_factor", c.horizon_factor},
      {"qp_max_iterations", c.qp_max_iterations},
      {"kkt_tolerance", c.kkt_tolerance},
      {"time_limit", c.time_limit},
      {"seed", c.seed},
  };
}

Config apply_overrides(Config base, const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    auto number = [&](double& field) {
      if (!value.is_number()) {
        throw ValidationError("config: '" + key + "' must be a number");
      }
      field = value.get<double>();
    };
    auto integer = [&](int& field) {
      if (!value.is_number_integer()) {
        throw ValidationError("config: '" + key + "' must be an integer");
      }
      field = value.get<int>();
    };
    if (key == "eps") number(base.eps);
    else if (key == "theta_pre") number(base.theta_pre);
    else if (key == "margin") number(base.margin);
    else if (key == "min_length") number(base.min_length);
    else if (key == "subtask_gap") number(base.subtask_gap);
    else if (key == "k_max") integer(base.k_max);
    else if (key == "em_max_iterations") integer(base.em_max_iterations);
    else if (key == "em_tolerance") number(base.em_tolerance);
    else if (key == "unit") number(base.unit);
    else if (key == "max_length") integer(base.max_length);
    else if (key == "horizon_factor") integer(base.horizon_factor);
    else if (key == "qp_max_iterations") integer(base.qp_max_iterations);
    else if (key == "kkt_tolerance") number(base.kkt_tolerance);
    else if (key == "time_limit") number(base.time_limit);
    else if (key == "seed") {
      if (!value.is_number_unsigned()) {
        throw ValidationError("config: 'seed' must be a non-negative integer");
      }
      base.seed = value.get<std::uint64_t>();
    } else {
      throw ValidationError("config: unknown key '" + key + "'");
    }
  }
  validate(base);
  return base;
}

}  // namespace tplan
