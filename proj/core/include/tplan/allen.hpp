#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tplan/model.hpp"
#include "tplan/timing.hpp"

namespace tplan {

AllenRelation inverse(AllenRelation r);

/// Bitset over the 13 relations.
class RelationSet {
 public:
  constexpr RelationSet() = default;
  constexpr explicit RelationSet(std::uint16_t bits) : bits_(bits) {}
  constexpr RelationSet(std::initializer_list<AllenRelation> rs) {
    for (auto r : rs) insert(r);
  }

  static constexpr RelationSet all() { return RelationSet(0x1fff); }
  static constexpr RelationSet none() { return RelationSet(0); }

  constexpr bool contains(AllenRelation r) const {
    return (bits_ >> index_of(r)) & 1u;
  }
  constexpr void insert(AllenRelation r) {
    bits_ = static_cast<std::uint16_t>(bits_ | (1u << index_of(r)));
  }
  constexpr void erase(AllenRelation r) {
    bits_ = static_cast<std::uint16_t>(bits_ & ~(1u << index_of(r)));
  }
  constexpr bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }
  constexpr std::uint16_t bits() const { return bits_; }

  std::vector<AllenRelation> members() const;
  std::string to_string() const;

  constexpr RelationSet operator|(RelationSet o) const {
    return RelationSet(static_cast<std::uint16_t>(bits_ | o.bits_));
  }
  constexpr RelationSet operator&(RelationSet o) const {
    return RelationSet(static_cast<std::uint16_t>(bits_ & o.bits_));
  }
  constexpr bool operator==(const RelationSet&) const = default;

 private:
  std::uint16_t bits_ = 0;
};

RelationSet inverse(RelationSet s);

/// Allen's transitivity table: relations possible between a and c given
/// a r1 b and b r2 c.
RelationSet compose(AllenRelation r1, AllenRelation r2);

// ---------------------------------------------------------------------------
// Regions in timing space

enum class OffsetKind : std::uint8_t { kStartStart, kEndEnd, kStartEnd, kEndStart };
enum class Sense : std::uint8_t { kZero, kPositive, kNegative };

/// One sign condition of a relation, e.g. start_end > 0 for Before.
struct OffsetPredicate {
  OffsetKind offset;
  Sense sense;
};

/// The sign conditions that define relation r (besides positive lengths).
std::span<const OffsetPredicate> relation_predicates(AllenRelation r);

double offset_value(const KeypointOffsets& o, OffsetKind k);

/// Coefficients c with offset(k) = c . (lam_a, lam_b, omega).
Eigen::Vector3d offset_normal(OffsetKind k);

/// Geometric dimension of the region in timing space: 1 line, 2 area, 3 volume.
int region_dimension(AllenRelation r);

struct AllenRegion {
  AllenRelation relation;
  int dimension;
};

inline AllenRegion region_of(AllenRelation r) { return {r, region_dimension(r)}; }

/// Linear constraint g . x (= or >=) h on a timing point.
struct LinearConstraint {
  Eigen::Vector3d g;
  double h = 0.0;
  bool equality = false;
};

/// Closed region of r with strict inequalities tightened by `margin`. Lengths
/// are bounded below by margin too (lam >= margin / sqrt(2)).
std::vector<LinearConstraint> region_constraints(AllenRelation r, double margin);

AllenRelation classify_timing(const Timing3& t, double eps = 0.0);

/// True iff any concrete lift of t classifies as r under tolerance eps.
bool region_contains(const Timing3& t, AllenRelation r, double eps = 0.0);

/// Euclidean-closest point of the margin-tightened closed region. Equality
/// constraints hold exactly in floating point on the returned point.
Timing3 region_project(const Timing3& t, AllenRelation r, double margin);

/// Closest point of the region in the metric (x - c)^T P (x - c), P SPD.
Timing3 region_project(const Eigen::Vector3d& c, const Eigen::Matrix3d& metric,
                       AllenRelation r, double margin);

/// Rewrites omega (and lengths for Equals) so the relation's equality
/// predicates evaluate to exactly zero.
Timing3 snap_to_region(const Timing3& t, AllenRelation r);

}  // namespace tplan
