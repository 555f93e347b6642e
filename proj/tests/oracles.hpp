#pragma once

// Test-side reference implementations. Nothing here calls into the library's
// classification or composition code, so agreement is evidence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tplan/model.hpp"

namespace oracle {

using tplan::AllenRelation;

/// Allen relation straight from the endpoint definitions.
inline AllenRelation relation(double as, double ae, double bs, double be) {
  using R = AllenRelation;
  if (as == bs && ae == be) return R::kEquals;
  if (ae < bs) return R::kBefore;
  if (be < as) return R::kAfter;
  if (ae == bs) return R::kMeets;
  if (be == as) return R::kMetBy;
  if (as == bs) return ae < be ? R::kStarts : R::kStartedBy;
  if (ae == be) return as > bs ? R::kFinishes : R::kFinishedBy;
  if (as < bs) return ae < be ? R::kOverlaps : R::kContains;
  return ae > be ? R::kOverlappedBy : R::kDuring;
}

inline AllenRelation relation(const tplan::Interval& a,
                              const tplan::Interval& b) {
  return relation(a.start, a.end, b.start, b.end);
}

/// Every interval [s, e) with integer endpoints 0 <= s < e <= hi.
inline std::vector<tplan::Interval> grid_intervals(int hi) {
  std::vector<tplan::Interval> out;
  for (int s = 0; s <= hi; ++s) {
    for (int e = s + 1; e <= hi; ++e) out.push_back({double(s), double(e)});
  }
  return out;
}

/// min over s of |v + s 1|, by a golden-section search on the convex
/// one-dimensional function. Slow and independent of any closed form.
inline double shift_min_norm_search(const std::vector<double>& v) {
  auto f = [&](double s) {
    double acc = 0.0;
    for (double x : v) acc += (x + s) * (x + s);
    return acc;
  };
  // The minimizer is minus the mean, so it lies within the largest |x|.
  double hi = 1.0;
  for (double x : v) hi = std::max(hi, std::abs(x) + 1.0);
  double lo = -hi;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 300; ++it) {
    const double m1 = hi - g * (hi - lo);
    const double m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2)) hi = m2; else lo = m1;
  }
  return std::sqrt(f(0.5 * (lo + hi)));
}

/// Desired timing of interval b relative to interval a, in the scaled
/// length / midpoint-offset coordinates.
struct PairTarget {
  std::size_t a = 0;
  std::size_t b = 0;
  double lam_a = 0.0;
  double lam_b = 0.0;
  double omega = 0.0;
};

/// Minimum of sqrt(sum of squared timing residuals) over keypoint placements
/// that keep the weak order of `witness` endpoints: tied endpoints stay tied,
/// consecutive distinct ones at least `margin` apart, every interval at least
/// `min_length` long. Found by coarse-to-fine lattice search over the distinct
/// times (the first pinned at 0); the lattice halves from `h0` for `levels`
/// rounds, each round re-centering a full (2w+1)^n window until it stops
/// improving.
inline double brute_force_plan_objective(
    const std::vector<tplan::Interval>& witness,
    const std::vector<PairTarget>& targets, double margin, double min_length,
    double h0 = 1.0, int levels = 18, int w = 2) {
  std::vector<double> pts;
  for (const auto& iv : witness) {
    pts.push_back(iv.start);
    pts.push_back(iv.end);
  }
  std::vector<double> distinct(pts);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<std::size_t> cls(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    cls[k] = std::size_t(std::lower_bound(distinct.begin(), distinct.end(), pts[k]) -
                         distinct.begin());
  }
  const std::size_t m = distinct.size();
  const double r2 = std::sqrt(2.0);

  auto objective = [&](const std::vector<double>& y) {
    for (std::size_t k = 0; k + 1 < m; ++k) {
      if (y[k + 1] - y[k] < margin) return HUGE_VAL;
    }
    for (std::size_t i = 0; i < witness.size(); ++i) {
      if (y[cls[2 * i + 1]] - y[cls[2 * i]] < min_length) return HUGE_VAL;
    }
    double acc = 0.0;
    for (const auto& t : targets) {
      const double as = y[cls[2 * t.a]], ae = y[cls[2 * t.a + 1]];
      const double bs = y[cls[2 * t.b]], be = y[cls[2 * t.b + 1]];
      const double la = (ae - as) / r2 - t.lam_a;
      const double lb = (be - bs) / r2 - t.lam_b;
      const double om = 0.5 * (bs + be) - 0.5 * (as + ae) - t.omega;
      acc += la * la + lb * lb + om * om;
    }
    return std::sqrt(acc);
  };

  const double step = std::max({margin, min_length, h0});
  std::vector<double> best(m);
  for (std::size_t k = 0; k < m; ++k) best[k] = double(k) * step;
  double best_value = objective(best);

  const std::size_t free = m - 1;
  std::size_t window = 1;
  for (std::size_t k = 0; k < free; ++k) window *= std::size_t(2 * w + 1);
  double h = h0;
  for (int level = 0; level < levels; ++level, h /= 2) {
    bool improved = true;
    while (improved) {
      improved = false;
      const std::vector<double> center = best;
      for (std::size_t code = 0; code < window; ++code) {
        std::vector<double> y = center;
        std::size_t c = code;
        for (std::size_t k = 1; k < m; ++k) {
          y[k] += h * (double(c % std::size_t(2 * w + 1)) - w);
          c /= std::size_t(2 * w + 1);
        }
        const double v = objective(y);
        if (v < best_value - 1e-15) {
          best_value = v;
          best = y;
          improved = true;
        }
      }
    }
  }
  return best_value;
}

}  // namespace oracle
