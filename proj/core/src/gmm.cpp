#include "tplan/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "tplan/error.hpp"
#include "tplan/rng.hpp"

namespace tplan {

namespace {

using Eigen::Matrix3d;
using Eigen::Vector3d;

constexpr double kLog2Pi = 1.8378770664093453;  // log(2 pi)

struct PreparedComponent {
  double log_weight = 0.0;
  Vector3d mean;
  Matrix3d precision;
  Eigen::LLT<Matrix3d> llt;
  double log_norm = 0.0;

  double log_density(const Vector3d& x) const {
    const Vector3d z = llt.matrixL().solve(x - mean);
    return log_weight + log_norm - 0.5 * z.squaredNorm();
  }
};

std::vector<PreparedComponent> prepare(const TimingModel& m) {
  std::vector<PreparedComponent> out;
  out.reserve(m.components.size());
  for (const auto& c : m.components) {
    PreparedComponent p;
    p.log_weight = std::log(c.weight);
    p.mean = c.mean;
    p.llt.compute(c.covariance);
    p.precision = p.llt.solve(Matrix3d::Identity());
    const Matrix3d L = p.llt.matrixL();
    p.log_norm = -1.5 * kLog2Pi - L.diagonal().array().log().sum();
    out.push_back(std::move(p));
  }
  return out;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double hi = v.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((v.array() - hi).exp().sum());
}

double log_density(const std::vector<PreparedComponent>& comps,
                   const Vector3d& x) {
  Eigen::VectorXd terms(static_cast<Eigen::Index>(comps.size()));
  for (std::size_t k = 0; k < comps.size(); ++k) {
    terms[static_cast<Eigen::Index>(k)] = comps[k].log_density(x);
  }
  return log_sum_exp(terms);
}

/// Maximizer of the Gaussian likelihood term subject to eigenvalues >= floor.
Matrix3d clip_covariance(const Matrix3d& s, double floor) {
  const Matrix3d sym = 0.5 * (s + s.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(sym);
  const Vector3d vals = es.eigenvalues().cwiseMax(floor);
  Matrix3d out = es.eigenvectors() * vals.asDiagonal() *
                 es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixX3d as_matrix(std::span<const Timing3> points) {
  Eigen::MatrixX3d x(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = points[i].vector().transpose();
  }
  return x;
}

bool all_identical(const Eigen::MatrixX3d& x) {
  for (Eigen::Index i = 1; i < x.rows(); ++i) {
    if (x.row(i) != x.row(0)) return false;
  }
  return true;
}

std::vector<Vector3d> kmeans_pp(const Eigen::MatrixX3d& x, int k, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(x.rows());
  std::vector<Vector3d> centers;
  centers.push_back(x.row(static_cast<Eigen::Index>(rng.below(n))).transpose());
  Eigen::VectorXd d2(x.rows());
  while (static_cast<int>(centers.size()) < k) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) {
        best = std::min(best, (x.row(i).transpose() - c).squaredNorm());
      }
      d2[i] = best;
    }
    const double total = d2.sum();
    if (!(total > 0.0)) break;  // fewer distinct points than k
    const double u = rng.uniform() * total;
    double acc = 0.0;
    Eigen::Index pick = x.rows() - 1;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      acc += d2[i];
      if (u < acc && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(x.row(pick).transpose());
  }
  return centers;
}

double bic(double log_likelihood, int k, std::size_t n) {
  const double params = 10.0 * k - 1.0;
  return -2.0 * log_likelihood + params * std::log(static_cast<double>(n));
}

TimingModel degenerate_model(const Eigen::MatrixX3d& x, double floor,
                             const GmmOptions& options) {
  TimingModel m;
  m.components.push_back({1.0, x.row(0).transpose(),
                          floor * Matrix3d::Identity()});
  m.n_points = static_cast<std::size_t>(x.rows());
  const auto comps = prepare(m);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    ll += log_density(comps, x.row(i).transpose());
  }
  m.fit_meta.k = 1;
  m.fit_meta.seed = options.seed;
  m.fit_meta.log_likelihood = ll;
  m.fit_meta.bic = bic(ll, 1, m.n_points);
  m.fit_meta.iterations = 1;
  m.fit_meta.covariance_floor = floor;
  m.fit_meta.degenerate = true;
  m.fit_meta.log_likelihood_trace = {ll};
  return m;
}

}  // namespace

double covariance_floor(std::span<const Timing3> points) {
  double scale = 0.0;
  if (!points.empty()) {
    const auto x = as_matrix(points);
    scale = (x.colwise().maxCoeff() - x.colwise().minCoeff()).maxCoeff();
  }
  if (!(scale > 0.0)) scale = 1.0;
  return 1e-6 * scale * scale;
}

TimingModel fit_gmm_fixed_k(std::span<const Timing3> points, int k,
                            const GmmOptions& options) {
  if (points.empty()) {
    throw ValidationError("fit_gmm needs at least one point");
  }
  if (k < 1) throw ValidationError("fit_gmm needs k >= 1");
  const Eigen::MatrixX3d x = as_matrix(points);
  const auto n = x.rows();
  const double floor = covariance_floor(points);
  if (all_identical(x)) return degenerate_model(x, floor, options);

  Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(k)));
  const auto centers = kmeans_pp(x, static_cast<int>(std::min<Eigen::Index>(k, n)), rng);
  const auto kk = static_cast<Eigen::Index>(centers.size());

  const Vector3d global_mean = x.colwise().mean().transpose();
  const Eigen::MatrixX3d centered = x.rowwise() - global_mean.transpose();
  const Matrix3d global_cov = clip_covariance(
      (centered.transpose() * centered) / static_cast<double>(n), floor);

  TimingModel m;
  m.n_points = static_cast<std::size_t>(n);
  for (const auto& c : centers) {
    m.components.push_back({1.0 / static_cast<double>(kk), c, global_cov});
  }

  std::vector<double> trace;
  Eigen::MatrixXd log_p(n, kk);
  double previous = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < options.max_iterations; ++it) {
    // E-step
    const auto comps = prepare(m);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector3d xi = x.row(i).transpose();
      for (Eigen::Index c = 0; c < kk; ++c) {
        log_p(i, c) = comps[static_cast<std::size_t>(c)].log_density(xi);
      }
      const double lse = log_sum_exp(log_p.row(i).transpose());
      log_p.row(i).array() -= lse;
      ll += lse;
    }
    trace.push_back(ll);
    if (it > 0 && ll - previous < options.tolerance) break;
    previous = ll;
    if (it + 1 == options.max_iterations) break;

    // M-step
    const Eigen::MatrixXd resp = log_p.array().exp();
    for (Eigen::Index c = 0; c < kk; ++c) {
      auto& comp = m.components[static_cast<std::size_t>(c)];
      const double nk = resp.col(c).sum();
      comp.weight = nk / static_cast<double>(n);
      if (nk < 1e-12) continue;  // starved component keeps its shape
      const Vector3d mean = (x.transpose() * resp.col(c)) / nk;
      const Eigen::MatrixX3d d = x.rowwise() - mean.transpose();
      const Matrix3d scatter =
          (d.transpose() * resp.col(c).asDiagonal() * d) / nk;
      comp.mean = mean;
      comp.covariance = clip_covariance(scatter, floor);
    }
  }

  m.fit_meta.k = static_cast<int>(kk);
  m.fit_meta.seed = options.seed;
  m.fit_meta.log_likelihood = trace.back();
  m.fit_meta.bic = bic(trace.back(), static_cast<int>(kk), m.n_points);
  m.fit_meta.iterations = static_cast<int>(trace.size());
  m.fit_meta.covariance_floor = floor;
  m.fit_meta.log_likelihood_trace = std::move(trace);
  return m;
}

TimingModel fit_gmm(std::span<const Timing3> points, const GmmOptions& options) {
  if (points.empty()) {
    throw ValidationError("fit_gmm needs at least one point");
  }
  const int per = std::max(1, options.min_points_per_component);
  const int cap = std::max(
      1, std::min(options.k_max, static_cast<int>(points.size()) / per));
  TimingModel best = fit_gmm_fixed_k(points, 1, options);
  if (best.fit_meta.degenerate) return best;
  for (int k = 2; k <= cap; ++k) {
    TimingModel candidate = fit_gmm_fixed_k(points, k, options);
    // A fit whose components shrink below `per` effective points is rejected
    // too, not just K > n / per.
    bool supported = candidate.fit_meta.k == k;
    for (const auto& c : candidate.components) {
      supported = supported &&
                  c.weight * static_cast<double>(points.size()) >= per - 1e-9;
    }
    if (supported && candidate.fit_meta.bic < best.fit_meta.bic) {
      best = std::move(candidate);
    }
  }
  return best;
}

double log_pdf(const TimingModel& m, const Timing3& t) {
  return log_density(prepare(m), t.vector());
}

double pdf(const TimingModel& m, const Timing3& t) {
  return std::exp(log_pdf(m, t));
}

Timing3 conditioned_argmax(const TimingModel& m, AllenRelation r,
                           double margin) {
  if (m.components.empty()) {
    throw ValidationError("conditioned_argmax on an empty model");
  }
  const auto comps = prepare(m);

  std::vector<Timing3> seeds;
  Vector3d mixture_mean = Vector3d::Zero();
  for (std::size_t k = 0; k < comps.size(); ++k) {
    mixture_mean += m.components[k].weight * comps[k].mean;
    seeds.push_back(region_project(Timing3::from(comps[k].mean), r, margin));
    seeds.push_back(
        region_project(comps[k].mean, comps[k].precision, r, margin));
  }
  seeds.push_back(region_project(Timing3::from(mixture_mean), r, margin));

  // Minorize-maximize: with responsibilities frozen at x, the log-density
  // bound is a single Gaussian whose constrained maximum is a metric
  // projection; each step cannot decrease the density.
  auto step = [&](const Vector3d& x) {
    Eigen::VectorXd terms(static_cast<Eigen::Index>(comps.size()));
    for (std::size_t k = 0; k < comps.size(); ++k) {
      terms[static_cast<Eigen::Index>(k)] = comps[k].log_density(x);
    }
    const double lse = log_sum_exp(terms);
    Matrix3d precision = Matrix3d::Zero();
    Vector3d b = Vector3d::Zero();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const double resp = std::exp(terms[static_cast<Eigen::Index>(k)] - lse);
      precision += resp * comps[k].precision;
      b += resp * (comps[k].precision * comps[k].mean);
    }
    const Vector3d center = precision.ldlt().solve(b);
    return region_project(center, precision, r, margin);
  };

  Timing3 best = seeds.front();
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& seed : seeds) {
    Timing3 x = seed;
    double fx = log_density(comps, x.vector());
    for (int it = 0; it < 500; ++it) {
      const Timing3 next = step(x.vector());
      const double fn = log_density(comps, next.vector());
      if (!(fn >= fx)) break;
      const double moved = distance(x, next);
      x = next;
      fx = fn;
      if (moved <= 1e-12 * (1.0 + x.vector().norm())) break;
    }
    if (fx > best_value) {
      best_value = fx;
      best = x;
    }
  }
  return best;
}

}  // namespace tplan
