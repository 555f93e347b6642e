#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tplan/allen.hpp"
#include "tplan/model.hpp"
#include "tplan/timing.hpp"

namespace tplan {

struct GaussianComponent {
  double weight = 1.0;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
};

struct FitMeta {
  int k = 1;
  std::uint64_t seed = 0;
  double log_likelihood = 0.0;
  double bic = 0.0;
  int iterations = 0;
  /// Eigenvalue floor applied to every covariance.
  double covariance_floor = 0.0;
  /// All input points coincide; the model is a single floor-width Gaussian.
  bool degenerate = false;
  /// Log-likelihood after each E-step of the selected fit.
  std::vector<double> log_likelihood_trace;
};

/// Multivariate mixture over timing-space points for one action pair.
struct TimingModel {
  ActionPair pair;
  std::vector<GaussianComponent> components;
  std::size_t n_points = 0;
  FitMeta fit_meta;
};

struct GmmOptions {
  int k_max = 3;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double tolerance = 1e-8;
  /// K is capped at n / this, and a fit with a component whose effective point
  /// count (n * weight) is below it is discarded.
  int min_points_per_component = 4;
};

/// EM with k-means++ seeding for a fixed K. Exposed for tests and benchmarks;
/// fit_gmm is the normal entry point.
TimingModel fit_gmm_fixed_k(std::span<const Timing3> points, int k,
                            const GmmOptions& options);

/// Fits K = 1..min(k_max, n / min_points_per_component) and keeps the lowest
/// BIC (ties go to the smaller K).
TimingModel fit_gmm(std::span<const Timing3> points, const GmmOptions& options);

double covariance_floor(std::span<const Timing3> points);

double log_pdf(const TimingModel& m, const Timing3& t);
double pdf(const TimingModel& m, const Timing3& t);

/// Highest-density point of the model inside the margin-tightened region of r.
/// Candidates start at each component's Euclidean and Mahalanobis projections
/// and at the projected mixture mean; each is refined by constrained
/// minorize-maximize steps until the move is below 1e-12 or 500 steps pass.
Timing3 conditioned_argmax(const TimingModel& m, AllenRelation r, double margin);

}  // namespace tplan
