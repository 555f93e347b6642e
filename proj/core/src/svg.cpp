#include "tplan/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace tplan {

namespace {

constexpr std::array<const char*, 8> kPalette = {
    "#4e79a7", "#f28e2b", "#59a14f", "#e15759",
    "#76b7b2", "#edc948", "#b07aa1", "#9c755f",
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const TemporalPlan& plan,
                       const std::map<Action, std::size_t>& subtask_of,
                       const SvgOptions& o) {
  double t0 = std::numeric_limits<double>::infinity();
  double t1 = -std::numeric_limits<double>::infinity();
  for (const auto& x : all_actions(plan)) {
    t0 = std::min(t0, x.start);
    t1 = std::max(t1, x.end);
  }
  if (t0 > t1) t0 = t1 = 0.0;

  const double width = o.origin_x + (t1 - t0) * o.px_per_second + 40.0;
  const double height = o.top + 2 * o.lane_height + 50.0;
  auto x_of = [&](double t) { return o.origin_x + (t - t0) * o.px_per_second; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width)
    << "\" height=\"" << num(height) << "\" data-px-per-second=\""
    << num(o.px_per_second) << "\" data-origin-x=\"" << num(o.origin_x)
    << "\" data-t0=\"" << num(t0) << "\">\n";
  s << "<style>text{font-family:sans-serif;font-size:11px}</style>\n";
  if (!o.title.empty()) {
    s << "<text x=\"10\" y=\"20\" style=\"font-size:14px\">" << escape(o.title)
      << "</text>\n";
  }

  const std::array<std::pair<const char*, const ActionSequence*>, 2> lanes = {
      {{"left", &plan.left}, {"right", &plan.right}}};
  for (std::size_t lane = 0; lane < lanes.size(); ++lane) {
    const double y = o.top + static_cast<double>(lane) * o.lane_height;
    s << "<text x=\"10\" y=\"" << num(y + o.lane_height * 0.6) << "\">"
      << lanes[lane].first << " hand</text>\n";
    for (const auto& a : *lanes[lane].second) {
      std::size_t sub = 0;
      if (auto it = subtask_of.find(a.action); it != subtask_of.end()) {
        sub = it->second;
      }
      const double x = x_of(a.start);
      const double w = (a.end - a.start) * o.px_per_second;
      s << "<g data-action=\"" << escape(a.action.label())
        << "\" data-subtask=\"" << sub << "\">"
        << "<rect x=\"" << num(x) << "\" y=\"" << num(y + 4) << "\" width=\""
        << num(w) << "\" height=\"" << num(o.lane_height - 8) << "\" fill=\""
        << kPalette[sub % kPalette.size()] << "\" stroke=\"#333\"/>"
        << "<text x=\"" << num(x + 3) << "\" y=\""
        << num(y + o.lane_height * 0.6) << "\">"
        << escape(a.action.label()) << "</text></g>\n";
    }
  }

  // Time axis, ticks at whole seconds.
  const double axis_y = o.top + 2 * o.lane_height + 10.0;
  s << "<line x1=\"" << num(x_of(t0)) << "\" y1=\"" << num(axis_y)
    << "\" x2=\"" << num(x_of(t1)) << "\" y2=\"" << num(axis_y)
    << "\" stroke=\"#333\"/>\n";
  const double tick = std::max(1.0, std::ceil((t1 - t0) / 40.0));
  for (double t = t0; t <= t1 + 1e-9; t += tick) {
    s << "<text x=\"" << num(x_of(t)) << "\" y=\"" << num(axis_y + 15)
      << "\">" << num(t - t0) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace tplan
