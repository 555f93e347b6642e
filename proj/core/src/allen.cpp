#include "tplan/allen.hpp"

#include <cmath>

#include "polytope_qp.hpp"
#include "tplan/error.hpp"

namespace tplan {

namespace {

constexpr std::uint16_t bit(AllenRelation r) {
  return static_cast<std::uint16_t>(1u << index_of(r));
}

constexpr std::uint16_t k_b = bit(AllenRelation::kBefore);
constexpr std::uint16_t k_bi = bit(AllenRelation::kAfter);
constexpr std::uint16_t k_m = bit(AllenRelation::kMeets);
constexpr std::uint16_t k_mi = bit(AllenRelation::kMetBy);
constexpr std::uint16_t k_o = bit(AllenRelation::kOverlaps);
constexpr std::uint16_t k_oi = bit(AllenRelation::kOverlappedBy);
constexpr std::uint16_t k_s = bit(AllenRelation::kStarts);
constexpr std::uint16_t k_si = bit(AllenRelation::kStartedBy);
constexpr std::uint16_t k_d = bit(AllenRelation::kDuring);
constexpr std::uint16_t k_di = bit(AllenRelation::kContains);
constexpr std::uint16_t k_f = bit(AllenRelation::kFinishes);
constexpr std::uint16_t k_fi = bit(AllenRelation::kFinishedBy);
constexpr std::uint16_t k_e = bit(AllenRelation::kEquals);
constexpr std::uint16_t kFull = 0x1fff;

// Row: a r1 b, column: b r2 c, both in enum order.
constexpr std::uint16_t kComposition[kRelationCount][kRelationCount] = {
    // Before
    {k_b, kFull, k_b, k_b|k_m|k_o|k_s|k_d, k_b, k_b|k_m|k_o|k_s|k_d, k_b, k_b, k_b|k_m|k_o|k_s|k_d, k_b, k_b|k_m|k_o|k_s|k_d, k_b, k_b},
    // After
    {kFull, k_bi, k_bi|k_mi|k_oi|k_d|k_f, k_bi, k_bi|k_mi|k_oi|k_d|k_f, k_bi, k_bi|k_mi|k_oi|k_d|k_f, k_bi, k_bi|k_mi|k_oi|k_d|k_f, k_bi, k_bi, k_bi, k_bi},
    // Meets
    {k_b, k_bi|k_mi|k_oi|k_si|k_di, k_b, k_f|k_fi|k_e, k_b, k_o|k_s|k_d, k_m, k_m, k_o|k_s|k_d, k_b, k_o|k_s|k_d, k_b, k_m},
    // MetBy
    {k_b|k_m|k_o|k_di|k_fi, k_bi, k_s|k_si|k_e, k_bi, k_oi|k_d|k_f, k_bi, k_oi|k_d|k_f, k_bi, k_oi|k_d|k_f, k_bi, k_mi, k_mi, k_mi},
    // Overlaps
    {k_b, k_bi|k_mi|k_oi|k_si|k_di, k_b, k_oi|k_si|k_di, k_b|k_m|k_o, k_o|k_oi|k_s|k_si|k_d|k_di|k_f|k_fi|k_e, k_o, k_o|k_di|k_fi, k_o|k_s|k_d, k_b|k_m|k_o|k_di|k_fi, k_o|k_s|k_d, k_b|k_m|k_o, k_o},
    // OverlappedBy
    {k_b|k_m|k_o|k_di|k_fi, k_bi, k_o|k_di|k_fi, k_bi, k_o|k_oi|k_s|k_si|k_d|k_di|k_f|k_fi|k_e, k_bi|k_mi|k_oi, k_oi|k_d|k_f, k_bi|k_mi|k_oi, k_oi|k_d|k_f, k_bi|k_mi|k_oi|k_si|k_di, k_oi, k_oi|k_si|k_di, k_oi},
    // Starts
    {k_b, k_bi, k_b, k_mi, k_b|k_m|k_o, k_oi|k_d|k_f, k_s, k_s|k_si|k_e, k_d, k_b|k_m|k_o|k_di|k_fi, k_d, k_b|k_m|k_o, k_s},
    // StartedBy
    {k_b|k_m|k_o|k_di|k_fi, k_bi, k_o|k_di|k_fi, k_mi, k_o|k_di|k_fi, k_oi, k_s|k_si|k_e, k_si, k_oi|k_d|k_f, k_di, k_oi, k_di, k_si},
    // During
    {k_b, k_bi, k_b, k_bi, k_b|k_m|k_o|k_s|k_d, k_bi|k_mi|k_oi|k_d|k_f, k_d, k_bi|k_mi|k_oi|k_d|k_f, k_d, kFull, k_d, k_b|k_m|k_o|k_s|k_d, k_d},
    // Contains
    {k_b|k_m|k_o|k_di|k_fi, k_bi|k_mi|k_oi|k_si|k_di, k_o|k_di|k_fi, k_oi|k_si|k_di, k_o|k_di|k_fi, k_oi|k_si|k_di, k_o|k_di|k_fi, k_di, k_o|k_oi|k_s|k_si|k_d|k_di|k_f|k_fi|k_e, k_di, k_oi|k_si|k_di, k_di, k_di},
    // Finishes
    {k_b, k_bi, k_m, k_bi, k_o|k_s|k_d, k_bi|k_mi|k_oi, k_d, k_bi|k_mi|k_oi, k_d, k_bi|k_mi|k_oi|k_si|k_di, k_f, k_f|k_fi|k_e, k_f},
    // FinishedBy
    {k_b, k_bi|k_mi|k_oi|k_si|k_di, k_m, k_oi|k_si|k_di, k_o, k_oi|k_si|k_di, k_o, k_di, k_o|k_s|k_d, k_di, k_f|k_fi|k_e, k_fi, k_fi},
    // Equals
    {k_b, k_bi, k_m, k_mi, k_o, k_oi, k_s, k_si, k_d, k_di, k_f, k_fi, k_e},
};

using P = OffsetPredicate;
using K = OffsetKind;
using S = Sense;

constexpr P kBeforePreds[] = {{K::kStartEnd, S::kPositive}};
constexpr P kAfterPreds[] = {{K::kEndStart, S::kNegative}};
constexpr P kMeetsPreds[] = {{K::kStartEnd, S::kZero}};
constexpr P kMetByPreds[] = {{K::kEndStart, S::kZero}};
constexpr P kOverlapsPreds[] = {{K::kStartStart, S::kPositive},
                                {K::kStartEnd, S::kNegative},
                                {K::kEndEnd, S::kPositive}};
constexpr P kOverlappedByPreds[] = {{K::kStartStart, S::kNegative},
                                    {K::kEndStart, S::kPositive},
                                    {K::kEndEnd, S::kNegative}};
constexpr P kStartsPreds[] = {{K::kStartStart, S::kZero},
                              {K::kEndEnd, S::kPositive}};
constexpr P kStartedByPreds[] = {{K::kStartStart, S::kZero},
                                 {K::kEndEnd, S::kNegative}};
constexpr P kDuringPreds[] = {{K::kStartStart, S::kNegative},
                              {K::kEndEnd, S::kPositive}};
constexpr P kContainsPreds[] = {{K::kStartStart, S::kPositive},
                                {K::kEndEnd, S::kNegative}};
constexpr P kFinishesPreds[] = {{K::kEndEnd, S::kZero},
                                {K::kStartStart, S::kNegative}};
constexpr P kFinishedByPreds[] = {{K::kEndEnd, S::kZero},
                                  {K::kStartStart, S::kPositive}};
constexpr P kEqualsPreds[] = {{K::kStartStart, S::kZero},
                              {K::kEndEnd, S::kZero}};

}  // namespace

AllenRelation inverse(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return AllenRelation::kAfter;
    case AllenRelation::kAfter: return AllenRelation::kBefore;
    case AllenRelation::kMeets: return AllenRelation::kMetBy;
    case AllenRelation::kMetBy: return AllenRelation::kMeets;
    case AllenRelation::kOverlaps: return AllenRelation::kOverlappedBy;
    case AllenRelation::kOverlappedBy: return AllenRelation::kOverlaps;
    case AllenRelation::kStarts: return AllenRelation::kStartedBy;
    case AllenRelation::kStartedBy: return AllenRelation::kStarts;
    case AllenRelation::kDuring: return AllenRelation::kContains;
    case AllenRelation::kContains: return AllenRelation::kDuring;
    case AllenRelation::kFinishes: return AllenRelation::kFinishedBy;
    case AllenRelation::kFinishedBy: return AllenRelation::kFinishes;
    case AllenRelation::kEquals: return AllenRelation::kEquals;
  }
  return r;
}

std::vector<AllenRelation> RelationSet::members() const {
  std::vector<AllenRelation> out;
  for (auto r : kAllRelations) {
    if (contains(r)) out.push_back(r);
  }
  return out;
}

std::string RelationSet::to_string() const {
  std::string out = "{";
  bool first = true;
  for (auto r : members()) {
    if (!first) out += ", ";
    out += tplan::to_string(r);
    first = false;
  }
  return out + "}";
}

RelationSet inverse(RelationSet s) {
  RelationSet out;
  for (auto r : s.members()) out.insert(inverse(r));
  return out;
}

RelationSet compose(AllenRelation r1, AllenRelation r2) {
  return RelationSet(kComposition[index_of(r1)][index_of(r2)]);
}

std::span<const OffsetPredicate> relation_predicates(AllenRelation r) {
  switch (r) {
    case AllenRelation::kBefore: return kBeforePreds;
    case AllenRelation::kAfter: return kAfterPreds;
    case AllenRelation::kMeets: return kMeetsPreds;
    case AllenRelation::kMetBy: return kMetByPreds;
    case AllenRelation::kOverlaps: return kOverlapsPreds;
    case AllenRelation::kOverlappedBy: return kOverlappedByPreds;
    case AllenRelation::kStarts: return kStartsPreds;
    case AllenRelation::kStartedBy: return kStartedByPreds;
    case AllenRelation::kDuring: return kDuringPreds;
    case AllenRelation::kContains: return kContainsPreds;
    case AllenRelation::kFinishes: return kFinishesPreds;
    case AllenRelation::kFinishedBy: return kFinishedByPreds;
    case AllenRelation::kEquals: return kEqualsPreds;
  }
  return {};
}

double offset_value(const KeypointOffsets& o, OffsetKind k) {
  switch (k) {
    case OffsetKind::kStartStart: return o.start_start;
    case OffsetKind::kEndEnd: return o.end_end;
    case OffsetKind::kStartEnd: return o.start_end;
    case OffsetKind::kEndStart: return o.end_start;
  }
  return 0.0;
}

Eigen::Vector3d offset_normal(OffsetKind k) {
  const double s = 1.0 / kSqrt2;
  switch (k) {
    case OffsetKind::kStartStart: return {s, -s, 1.0};
    case OffsetKind::kEndEnd: return {-s, s, 1.0};
    case OffsetKind::kStartEnd: return {-s, -s, 1.0};
    case OffsetKind::kEndStart: return {s, s, 1.0};
  }
  return Eigen::Vector3d::Zero();
}

int region_dimension(AllenRelation r) {
  int equalities = 0;
  for (const auto& p : relation_predicates(r)) {
    if (p.sense == Sense::kZero) ++equalities;
  }
  return 3 - equalities;
}

std::vector<LinearConstraint> region_constraints(AllenRelation r,
                                                 double margin) {
  std::vector<LinearConstraint> out;
  for (const auto& p : relation_predicates(r)) {
    const Eigen::Vector3d n = offset_normal(p.offset);
    switch (p.sense) {
      case Sense::kZero: out.push_back({n, 0.0, true}); break;
      case Sense::kPositive: out.push_back({n, margin, false}); break;
      case Sense::kNegative: out.push_back({-n, margin, false}); break;
    }
  }
  const double min_lam = margin / kSqrt2;
  out.push_back({Eigen::Vector3d(1.0, 0.0, 0.0), min_lam, false});
  out.push_back({Eigen::Vector3d(0.0, 1.0, 0.0), min_lam, false});
  return out;
}

AllenRelation classify_timing(const Timing3& t, double eps) {
  return classify_offsets(keypoint_offsets(t), eps);
}

bool region_contains(const Timing3& t, AllenRelation r, double eps) {
  if (!(t.lam_a > 0.0) || !(t.lam_b > 0.0)) return false;
  return classify_timing(t, eps) == r;
}

Timing3 snap_to_region(const Timing3& t, AllenRelation r) {
  Timing3 out = t;
  const double diff = (out.lam_a - out.lam_b) / kSqrt2;
  const double sum = (out.lam_a + out.lam_b) / kSqrt2;
  switch (r) {
    case AllenRelation::kMeets: out.omega = sum; break;
    case AllenRelation::kMetBy: out.omega = -sum; break;
    case AllenRelation::kStarts:
    case AllenRelation::kStartedBy: out.omega = -diff; break;
    case AllenRelation::kFinishes:
    case AllenRelation::kFinishedBy: out.omega = diff; break;
    case AllenRelation::kEquals: {
      const double lam = 0.5 * (out.lam_a + out.lam_b);
      out = {lam, lam, 0.0};
      break;
    }
    default: break;
  }
  return out;
}

Timing3 region_project(const Eigen::Vector3d& c, const Eigen::Matrix3d& metric,
                       AllenRelation r, double margin) {
  if (margin < 0.0) {
    throw InfeasibleRegionError("margin must be non-negative");
  }
  const auto constraints = region_constraints(r, margin);
  const auto x = detail::minimize_in_polytope(c, metric, constraints);
  if (!x) {
    throw InfeasibleRegionError("region of '" + std::string(to_string(r)) +
                                "' is empty under margin " +
                                std::to_string(margin));
  }
  return snap_to_region(Timing3::from(*x), r);
}

Timing3 region_project(const Timing3& t, AllenRelation r, double margin) {
  return region_project(t.vector(), Eigen::Matrix3d::Identity(), r, margin);
}

}  // namespace tplan
