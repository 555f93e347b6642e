#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "tplan/gmm.hpp"
#include "tplan/model.hpp"
#include "tplan/timing.hpp"

namespace tplan {

using RelationScores = std::array<double, kRelationCount>;

/// Per ordered pair, a graded score in [0, 1] for each relation. Only one
/// orientation is stored; the other is answered through inverse relations, so
/// score(p, r) == score(reversed(p), inverse(r)) holds exactly.
class RelationScoreTable {
 public:
  void set(const ActionPair& pair, const RelationScores& scores);

  bool contains(const ActionPair& pair) const;
  double score(const ActionPair& pair, AllenRelation r) const;
  RelationScores scores(const ActionPair& pair) const;

  /// Stored pairs in canonical orientation (first < second), sorted.
  std::vector<ActionPair> pairs() const;
  std::size_t size() const { return table_.size(); }

 private:
  std::map<ActionPair, RelationScores> table_;
};

/// Fuzzy truth of relation r for one observed pair. Each sign condition of r
/// is smoothed with a kernel of half-width eps: equality by a triangle
/// 1 - |x| / eps, strict signs by a ramp through 0.5 at x = 0; the results are
/// combined with min. eps = 0 gives the crisp 0/1 predicate.
double relation_membership(const Interval& a, const Interval& b,
                           AllenRelation r, double eps);

/// One timing point per demonstration that contains both actions.
std::vector<Timing3> collect_timings(const Dataset& d, const ActionPair& pair);

/// Mean membership over co-occurrences. Throws PairNeverCoOccursError.
double score_relation(const Dataset& d, const ActionPair& pair,
                      AllenRelation r, double eps);

RelationScores score_pair(const Dataset& d, const ActionPair& pair, double eps);

struct Assessment {
  std::vector<Action> actions;
  RelationScoreTable scores;
  /// Canonical-orientation pair -> fitted timing model.
  std::map<ActionPair, TimingModel> models;
  std::map<ActionPair, std::size_t> co_occurrences;
  std::vector<ActionPair> never_co_occurring;
  double eps = 0.0;
};

/// Canonical orientation: the lexicographically smaller action first.
ActionPair canonical(const ActionPair& p);

/// Scores and timing models for every co-occurring pair. Pairs that never
/// co-occur are listed, not scored. Throws EmptyDatasetError.
Assessment assess_all(const Dataset& d, double eps, const GmmOptions& gmm);

/// Timing models only (used when the symbolic layer is held fixed).
std::map<ActionPair, TimingModel> fit_timing_models(
    const Dataset& d, std::span<const ActionPair> pairs, const GmmOptions& gmm);

}  // namespace tplan
