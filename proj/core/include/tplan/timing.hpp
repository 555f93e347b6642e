#pragma once

#include <numbers>

#include <Eigen/Core>

#include "tplan/model.hpp"

namespace tplan {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

/// Keypoints of an action pair: (a.start, a.end, b.start, b.end).
struct Timing4 {
  double a_start = 0.0;
  double a_end = 0.0;
  double b_start = 0.0;
  double b_end = 0.0;

  Interval a() const { return {a_start, a_end}; }
  Interval b() const { return {b_start, b_end}; }
  Eigen::Vector4d vector() const { return {a_start, a_end, b_start, b_end}; }
};

/// Point in the shift-free timing space: lengths scaled by 1/sqrt(2) and the
/// midpoint offset mid(b) - mid(a). With this scaling the Euclidean norm
/// equals the keypoint norm minimized over uniform shifts.
struct Timing3 {
  double lam_a = 0.0;
  double lam_b = 0.0;
  double omega = 0.0;

  Eigen::Vector3d vector() const { return {lam_a, lam_b, omega}; }
  static Timing3 from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

  bool operator==(const Timing3&) const = default;
};

Timing4 timing_of(const Interval& a, const Interval& b);

Timing3 embed(const Timing4& t);

/// Inverse of embed with a.start pinned to `anchor_a_start`.
Timing4 lift(const Timing3& t, double anchor_a_start = 0.0);

/// Euclidean distance in timing space.
double distance(const Timing3& t1, const Timing3& t2);

/// min over s of |v + s * 1|; closed form via mean subtraction.
double shift_minimized_norm(const Eigen::VectorXd& v);

/// Keypoint offsets as linear functions of a timing point. Shares the
/// equality semantics of classify_offsets.
KeypointOffsets keypoint_offsets(const Timing3& t);

}  // namespace tplan
