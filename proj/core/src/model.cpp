#include "tplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tplan/error.hpp"

namespace tplan {

namespace {

constexpr std::array<std::string_view, kRelationCount> kRelationNames = {
    "before",   "after",         "meets",  "met_by",     "overlaps",
    "overlapped_by", "starts",   "started_by", "during", "contains",
    "finishes", "finished_by",   "equals",
};

bool near(double x, double eps) { return std::abs(x) <= eps; }

void check_sequence(const ActionSequence& seq, std::string_view hand,
                    std::vector<Violation>& out) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& a = seq[i];
    if (a.action.verb.empty() || a.action.object.empty()) {
      out.push_back({Violation::Rule::kEmptyName, std::string(hand), a.action,
                     std::nullopt,
                     std::string(hand) + "[" + std::to_string(i) +
                         "]: verb and object must be non-empty"});
    }
    if (!(a.end > a.start)) {
      out.push_back({Violation::Rule::kNonPositiveLength, std::string(hand),
                     a.action, std::nullopt,
                     "'" + a.action.label() + "' on " + std::string(hand) +
                         " hand: end must be greater than start"});
    }
    if (i + 1 < seq.size()) {
      const auto& b = seq[i + 1];
      if (a.end > b.start) {
        out.push_back({Violation::Rule::kOverlap, std::string(hand), a.action,
                       b.action,
                       "'" + a.action.label() + "' and '" + b.action.label() +
                           "' overlap on " + std::string(hand) + " hand"});
      }
    }
  }
}

std::vector<Violation> validate_hands(const ActionSequence& left,
                                      const ActionSequence& right) {
  std::vector<Violation> out;
  check_sequence(left, "left", out);
  check_sequence(right, "right", out);

  std::set<Action> seen;
  for (const auto* seq : {&left, &right}) {
    for (const auto& a : *seq) {
      if (!seen.insert(a.action).second) {
        out.push_back({Violation::Rule::kDuplicateAction, "both", a.action,
                       std::nullopt,
                       "'" + a.action.label() + "' occurs more than once"});
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Hand h) {
  return h == Hand::kLeft ? "left" : "right";
}

std::string_view to_string(AllenRelation r) { return kRelationNames[index_of(r)]; }

std::optional<AllenRelation> parse_relation(std::string_view name) {
  for (auto r : kAllRelations) {
    if (kRelationNames[index_of(r)] == name) return r;
  }
  return std::nullopt;
}

KeypointOffsets keypoint_offsets(const Interval& a, const Interval& b) {
  return {b.start - a.start, b.end - a.end, b.start - a.end, b.end - a.start};
}

AllenRelation classify_offsets(const KeypointOffsets& o, double eps) {
  const bool same_start = near(o.start_start, eps);
  const bool same_end = near(o.end_end, eps);
  if (same_start && same_end) return AllenRelation::kEquals;
  if (same_start) {
    return o.end_end > 0 ? AllenRelation::kStarts : AllenRelation::kStartedBy;
  }
  if (same_end) {
    return o.start_start < 0 ? AllenRelation::kFinishes
                             : AllenRelation::kFinishedBy;
  }
  // Both can hold only when the start/end families above already matched.
  if (near(o.start_end, eps)) return AllenRelation::kMeets;
  if (near(o.end_start, eps)) return AllenRelation::kMetBy;

  if (o.start_end > 0) return AllenRelation::kBefore;
  if (o.end_start < 0) return AllenRelation::kAfter;
  if (o.start_start > 0) {
    return o.end_end > 0 ? AllenRelation::kOverlaps : AllenRelation::kContains;
  }
  return o.end_end < 0 ? AllenRelation::kOverlappedBy : AllenRelation::kDuring;
}

AllenRelation classify_relation(const Interval& a, const Interval& b,
                                double eps) {
  return classify_offsets(keypoint_offsets(a, b), eps);
}

std::string_view to_string(Violation::Rule rule) {
  switch (rule) {
    case Violation::Rule::kEmptyName:
      return "empty_name";
    case Violation::Rule::kNonPositiveLength:
      return "non_positive_length";
    case Violation::Rule::kOverlap:
      return "overlap";
    case Violation::Rule::kDuplicateAction:
      return "duplicate_action";
  }
  return "unknown";
}

std::vector<Violation> validate_demonstration(const Demonstration& d) {
  return validate_hands(d.left, d.right);
}

std::vector<Violation> validate_plan(const TemporalPlan& p) {
  return validate_hands(p.left, p.right);
}

void validate_dataset(const Dataset& d) {
  if (d.demonstrations.empty()) {
    throw EmptyDatasetError("dataset '" + d.task + "' has no demonstrations");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < d.demonstrations.size(); ++i) {
    const auto& demo = d.demonstrations[i];
    if (!ids.insert(demo.id).second) {
      throw ValidationError("demonstrations[" + std::to_string(i) +
                            "]: duplicate id '" + demo.id + "'");
    }
    const auto violations = validate_demonstration(demo);
    if (!violations.empty()) {
      std::ostringstream msg;
      msg << "demonstrations[" << i << "] ('" << demo.id << "'): ";
      for (std::size_t k = 0; k < violations.size(); ++k) {
        if (k) msg << "; ";
        msg << violations[k].message;
      }
      throw ValidationError(msg.str());
    }
  }
}

std::vector<TimeEnrichedAction> all_actions(const Demonstration& d) {
  std::vector<TimeEnrichedAction> out(d.left);
  out.insert(out.end(), d.right.begin(), d.right.end());
  return out;
}

std::vector<TimeEnrichedAction> all_actions(const TemporalPlan& p) {
  std::vector<TimeEnrichedAction> out(p.left);
  out.insert(out.end(), p.right.begin(), p.right.end());
  return out;
}

const TimeEnrichedAction* find_action(const Demonstration& d, const Action& a) {
  for (const auto* seq : {&d.left, &d.right}) {
    for (const auto& x : *seq) {
      if (x.action == a) return &x;
    }
  }
  return nullptr;
}

std::vector<Action> action_vocabulary(const Dataset& d) {
  std::set<Action> all;
  for (const auto& demo : d.demonstrations) {
    for (const auto* seq : {&demo.left, &demo.right}) {
      for (const auto& x : *seq) all.insert(x.action);
    }
  }
  return {all.begin(), all.end()};
}

std::map<Action, Hand> majority_hands(const Dataset& d) {
  struct Tally {
    int left = 0;
    int right = 0;
    std::optional<Hand> first;
  };
  std::map<Action, Tally> tally;
  for (const auto& demo : d.demonstrations) {
    for (const auto& x : demo.left) {
      auto& t = tally[x.action];
      ++t.left;
      if (!t.first) t.first = Hand::kLeft;
    }
    for (const auto& x : demo.right) {
      auto& t = tally[x.action];
      ++t.right;
      if (!t.first) t.first = Hand::kRight;
    }
  }
  std::map<Action, Hand> out;
  for (const auto& [action, t] : tally) {
    if (t.left != t.right) {
      out[action] = t.left > t.right ? Hand::kLeft : Hand::kRight;
    } else {
      out[action] = *t.first;
    }
  }
  return out;
}

}  // namespace tplan
