#include "polytope_qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace tplan::detail {

std::optional<Eigen::Vector3d> minimize_in_polytope(
    const Eigen::Vector3d& c, const Eigen::Matrix3d& P,
    std::span<const LinearConstraint> constraints) {
  // The minimizer is invariant to scaling P; normalizing keeps the KKT
  // system well conditioned when P is a sharp precision matrix.
  const double pn = P.norm();
  const Eigen::Matrix3d Pn = pn > 0.0 ? Eigen::Matrix3d(P / pn) : P;
  std::vector<std::size_t> eq;
  std::vector<std::size_t> ineq;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    (constraints[i].equality ? eq : ineq).push_back(i);
  }

  double scale = 1.0 + c.cwiseAbs().maxCoeff();
  for (const auto& k : constraints) scale = std::max(scale, std::abs(k.h));
  const double feas_tol = 1e-10 * scale;

  std::optional<Eigen::Vector3d> best;
  double best_value = std::numeric_limits<double>::infinity();

  const std::size_t subsets = std::size_t{1} << ineq.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    std::vector<std::size_t> active(eq);
    for (std::size_t b = 0; b < ineq.size(); ++b) {
      if (mask & (std::size_t{1} << b)) active.push_back(ineq[b]);
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    if (m > 3) continue;

    Eigen::Vector3d x;
    if (m == 0) {
      x = c;
    } else {
      // KKT: [P G^T; G 0] [x; mu] = [P c; h]
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(3 + m, 3 + m);
      Eigen::VectorXd rhs(3 + m);
      kkt.topLeftCorner<3, 3>() = Pn;
      rhs.head<3>() = Pn * c;
      for (Eigen::Index i = 0; i < m; ++i) {
        const auto& k = constraints[active[static_cast<std::size_t>(i)]];
        kkt.block(3 + i, 0, 1, 3) = k.g.transpose();
        kkt.block(0, 3 + i, 3, 1) = k.g;
        rhs[3 + i] = k.h;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (lu.rank() < 3 + m) continue;
      x = lu.solve(rhs).head<3>();
    }

    bool feasible = true;
    for (const auto& k : constraints) {
      const double v = k.g.dot(x) - k.h;
      if (k.equality ? std::abs(v) > feas_tol : v < -feas_tol) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const Eigen::Vector3d d = x - c;
    const double value = d.dot(Pn * d);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  return best;
}

}  // namespace tplan::detail
