#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tplan {

/// A (verb, object) tuple. Field-wise ordering makes it usable as a map key.
struct Action {
  std::string verb;
  std::string object;

  auto operator<=>(const Action&) const = default;
  bool operator==(const Action&) const = default;

  std::string label() const { return verb + " " + object; }
};

/// Ordered pair of actions. Orientation matters: (a, b) carries relations of
/// a relative to b.
using ActionPair = std::pair<Action, Action>;

inline ActionPair reversed(const ActionPair& p) { return {p.second, p.first}; }

struct Interval {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  double midpoint() const { return 0.5 * (start + end); }
};

struct TimeEnrichedAction {
  Action action;
  double start = 0.0;
  double end = 0.0;

  Interval interval() const { return {start, end}; }
  double length() const { return end - start; }
  double midpoint() const { return 0.5 * (start + end); }
};

/// One hand's actions in execution order.
using ActionSequence = std::vector<TimeEnrichedAction>;

enum class Hand : std::uint8_t { kLeft, kRight };

std::string_view to_string(Hand h);

struct Demonstration {
  std::string id;
  ActionSequence left;
  ActionSequence right;
};

struct Dataset {
  std::string task;
  std::vector<Demonstration> demonstrations;
};

/// Two per-hand sequences. `grid` is set for symbolic (integer-grid) plans and
/// holds the seconds per grid step.
struct TemporalPlan {
  ActionSequence left;
  ActionSequence right;
  std::optional<double> grid;
};

/// The 13 Allen relations, read as "a R b".
enum class AllenRelation : std::uint8_t {
  kBefore,
  kAfter,
  kMeets,
  kMetBy,
  kOverlaps,
  kOverlappedBy,
  kStarts,
  kStartedBy,
  kDuring,
  kContains,
  kFinishes,
  kFinishedBy,
  kEquals,
};

inline constexpr std::size_t kRelationCount = 13;

inline constexpr std::array<AllenRelation, kRelationCount> kAllRelations = {
    AllenRelation::kBefore,   AllenRelation::kAfter,
    AllenRelation::kMeets,    AllenRelation::kMetBy,
    AllenRelation::kOverlaps, AllenRelation::kOverlappedBy,
    AllenRelation::kStarts,   AllenRelation::kStartedBy,
    AllenRelation::kDuring,   AllenRelation::kContains,
    AllenRelation::kFinishes, AllenRelation::kFinishedBy,
    AllenRelation::kEquals,
};

constexpr std::size_t index_of(AllenRelation r) {
  return static_cast<std::size_t>(r);
}

/// snake_case names used in every file format ("met_by", "overlapped_by").
std::string_view to_string(AllenRelation r);
std::optional<AllenRelation> parse_relation(std::string_view name);

/// Signed gaps between the four keypoints of a pair (a, b):
/// start_start = b.start - a.start, end_end = b.end - a.end,
/// start_end = b.start - a.end, end_start = b.end - a.start.
/// Every Allen relation is a conjunction of sign conditions on these.
struct KeypointOffsets {
  double start_start = 0.0;
  double end_end = 0.0;
  double start_end = 0.0;
  double end_start = 0.0;
};

KeypointOffsets keypoint_offsets(const Interval& a, const Interval& b);

/// Relation of offsets where |x| <= eps counts as equality. Equality families
/// are tested first (Equals, Starts*, Finishes*, Meets*), then the strict ones,
/// so the result is a function and is antisymmetric under inverse.
AllenRelation classify_offsets(const KeypointOffsets& o, double eps);

AllenRelation classify_relation(const Interval& a, const Interval& b,
                                double eps = 0.0);

struct Violation {
  enum class Rule {
    kEmptyName,
    kNonPositiveLength,
    kOverlap,
    kDuplicateAction,
  };
  Rule rule;
  std::string hand;  // "left", "right" or "both"
  Action first;
  std::optional<Action> second;
  std::string message;
};

std::string_view to_string(Violation::Rule rule);

/// Reports every broken sequence invariant. Never throws.
std::vector<Violation> validate_demonstration(const Demonstration& d);
std::vector<Violation> validate_plan(const TemporalPlan& p);

/// Throws ValidationError naming the first offending demonstration.
void validate_dataset(const Dataset& d);

/// All actions of a demonstration or plan, both hands, unordered.
std::vector<TimeEnrichedAction> all_actions(const Demonstration& d);
std::vector<TimeEnrichedAction> all_actions(const TemporalPlan& p);

/// Lookup by action; nullptr when absent.
const TimeEnrichedAction* find_action(const Demonstration& d, const Action& a);

/// Sorted, de-duplicated action vocabulary of a dataset.
std::vector<Action> action_vocabulary(const Dataset& d);

/// Majority vote over demonstrations; ties go to the hand used in the earliest
/// demonstration that contains the action.
std::map<Action, Hand> majority_hands(const Dataset& d);

}  // namespace tplan
