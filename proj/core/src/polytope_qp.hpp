#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "tplan/allen.hpp"

namespace tplan::detail {

/// argmin (x - c)^T P (x - c) over {g.x = h (equalities), g.x >= h (rest)} in
/// three dimensions. Enumerates active sets: the optimum is the projection
/// onto the affine hull of some face, so the best feasible face projection is
/// exact. Returns nullopt when no face projection is feasible.
std::optional<Eigen::Vector3d> minimize_in_polytope(
    const Eigen::Vector3d& c, const Eigen::Matrix3d& P,
    std::span<const LinearConstraint> constraints);

}  // namespace tplan::detail
