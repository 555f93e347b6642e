#include "tplan/timing.hpp"

#include <cmath>

namespace tplan {

Timing4 timing_of(const Interval& a, const Interval& b) {
  return {a.start, a.end, b.start, b.end};
}

Timing3 embed(const Timing4& t) {
  const double mid_a = 0.5 * (t.a_start + t.a_end);
  const double mid_b = 0.5 * (t.b_start + t.b_end);
  return {(t.a_end - t.a_start) / kSqrt2, (t.b_end - t.b_start) / kSqrt2,
          mid_b - mid_a};
}

Timing4 lift(const Timing3& t, double anchor_a_start) {
  const double len_a = t.lam_a * kSqrt2;
  const double len_b = t.lam_b * kSqrt2;
  const double mid_a = anchor_a_start + 0.5 * len_a;
  const double mid_b = mid_a + t.omega;
  return {anchor_a_start, anchor_a_start + len_a, mid_b - 0.5 * len_b,
          mid_b + 0.5 * len_b};
}

double distance(const Timing3& t1, const Timing3& t2) {
  return (t2.vector() - t1.vector()).norm();
}

double shift_minimized_norm(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return (v.array() - v.mean()).matrix().norm();
}

KeypointOffsets keypoint_offsets(const Timing3& t) {
  const double diff = (t.lam_a - t.lam_b) / kSqrt2;
  const double sum = (t.lam_a + t.lam_b) / kSqrt2;
  return {t.omega + diff, t.omega - diff, t.omega - sum, t.omega + sum};
}

}  // namespace tplan
