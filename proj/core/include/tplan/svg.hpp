#pragma once

#include <map>
#include <string>

#include "tplan/model.hpp"

namespace tplan {

struct SvgOptions {
  double px_per_second = 80.0;
  double origin_x = 120.0;  // x of the earliest keypoint
  double lane_height = 40.0;
  double top = 40.0;
  std::string title;
};

/// Gantt chart with one lane per hand and one bar per action. Bars are
/// colored by subtask index. Bar x = origin_x + (t - t0) * px_per_second,
/// where t0 is the earliest start; all three are recorded as data-*
/// attributes on the root element.
std::string render_svg(const TemporalPlan& plan,
                       const std::map<Action, std::size_t>& subtask_of,
                       const SvgOptions& options = {});

}  // namespace tplan
