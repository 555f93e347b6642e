#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tplan/allen.hpp"
#include "tplan/assessment.hpp"
#include "tplan/model.hpp"
#include "tplan/timing.hpp"

namespace tplan {

/// One relation assigned to one action pair, with its support score.
struct Binding {
  ActionPair pair;
  AllenRelation relation;
  double score = 0.0;

  bool operator==(const Binding&) const = default;
};

/// Complete, contradiction-free assignment for one group of actions.
struct TaskAssignment {
  std::vector<Binding> bindings;
  double score = 0.0;
};

/// Actions grouped into subtasks, in execution order. Every pair spanning
/// two groups is a unanimous precedence.
struct SubtaskPartition {
  std::vector<std::vector<Action>> groups;

  std::optional<std::size_t> group_of(const Action& a) const;
};

/// Groups actions so that cross-group pairs score >= theta on Before or After.
/// Connected components of the "not a clear precedence" graph are merged
/// until every pair of groups is ordered one way; groups are then sorted by
/// mean start time.
SubtaskPartition segment_subtasks(const Dataset& d, const Assessment& a,
                                  double theta);

/// Pairs whose Meets/MetBy/Before/After score reaches theta, in canonical
/// orientation. When `scope` is given only pairs with both actions inside it
/// are considered.
std::vector<Binding> pre_assign(const RelationScoreTable& scores, double theta,
                                std::span<const Action> scope = {});

/// True iff adding `candidate` keeps every triangle it closes consistent with
/// the transitivity table. Bindings may be stored in either orientation.
bool is_feasible(std::span<const Binding> assigned, const Binding& candidate);

/// Sum of binding scores whose relation is neither Before nor After.
double score_assignment(std::span<const Binding> bindings);

/// Exhaustive check over all triples; independent of the incremental search.
bool is_contradiction_free(std::span<const Binding> bindings);

// ---------------------------------------------------------------------------
// Search

using PairId = std::uint32_t;

/// Search node: pairs still open plus one relation slot per pair (-1 = open).
struct PartialTaskAssignment {
  std::vector<PairId> unassigned;
  std::vector<std::int8_t> relations;
};

enum class PairOrder : std::uint8_t {
  kMostConstrained,  // fewest feasible relations first
  kInOrder,          // pop from the back of the unassigned list
};

/// Dense, index-based view of one group's assignment problem. Actions are
/// sorted, so pair (i, j) with i < j is the canonical orientation.
class AssignmentProblem {
 public:
  AssignmentProblem(std::vector<Action> actions,
                    const RelationScoreTable& scores);

  std::span<const Action> actions() const { return actions_; }
  std::size_t action_count() const { return actions_.size(); }
  std::size_t pair_count() const { return pairs_.size(); }

  ActionPair pair(PairId id) const;
  std::pair<std::size_t, std::size_t> endpoints(PairId id) const {
    return pairs_[id];
  }
  std::optional<PairId> find_pair(std::size_t i, std::size_t j) const;
  double score(PairId id, AllenRelation r) const {
    return scores_[id * kRelationCount + index_of(r)];
  }

  /// Limits the relations the search may give pair `id`; used to keep two
  /// actions of the same hand from overlapping.
  void restrict(PairId id, RelationSet allowed);
  RelationSet allowed(PairId id) const { return allowed_[id]; }

  /// Root node with `pre` applied. Throws ValidationError when `pre` names
  /// unknown actions or is itself inconsistent.
  PartialTaskAssignment initial(std::span<const Binding> pre) const;

  /// Relation of action i to action j in `t`, if assigned.
  std::optional<AllenRelation> relation(const PartialTaskAssignment& t,
                                        std::size_t i, std::size_t j) const;

  bool is_feasible(const PartialTaskAssignment& t, PairId id,
                   AllenRelation r) const;
  RelationSet feasible_relations(const PartialTaskAssignment& t,
                                 PairId id) const;

  /// Pops one open pair and returns one child per feasible relation, highest
  /// score first. Empty when the pair admits no relation.
  std::vector<PartialTaskAssignment> assign_next(
      const PartialTaskAssignment& t, PairOrder order) const;

  TaskAssignment complete(const PartialTaskAssignment& t) const;

  /// Score of a full relation vector (pair-id order), as score_assignment.
  double score_of(std::span<const std::int8_t> relations) const;

  /// Best score any completion of t can reach.
  double upper_bound(const PartialTaskAssignment& t) const;

 private:
  std::vector<Action> actions_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::int32_t> pair_index_;  // n x n, -1 on the diagonal
  std::vector<double> scores_;
  std::vector<double> best_overlap_score_;
  std::vector<RelationSet> allowed_;
};

struct SearchProgress {
  double elapsed = 0.0;
  std::size_t partials = 0;   // stack size
  std::size_t solutions = 0;  // complete assignments found so far
  std::size_t expanded = 0;
};

struct SearchOptions {
  PairOrder order = PairOrder::kMostConstrained;
  /// 0 = exhaustive. Otherwise branch-and-bound keeps only the k best.
  std::size_t top_k = 0;
  /// When false, solutions are counted but not stored.
  bool collect = true;
  /// Seconds; 0 disables the limit.
  double time_limit = 0.0;
  std::function<void(const SearchProgress&)> observer;
  std::size_t observe_every = 256;
};

struct SearchOutcome {
  std::vector<TaskAssignment> assignments;  // sorted, best first
  std::size_t solutions = 0;
  std::size_t expanded = 0;
  double elapsed = 0.0;
  bool timed_out = false;
};

/// Depth-first enumeration of every contradiction-free completion of `pre`.
/// Output order: score descending, then lexicographic (pair, relation index).
SearchOutcome search_assignments(const AssignmentProblem& problem,
                                 std::span<const Binding> pre,
                                 const SearchOptions& options = {});

/// search_assignments that throws NoFeasibleAssignmentError on an empty result
/// and TimeoutError when the limit hits.
std::vector<TaskAssignment> find_assignments(const AssignmentProblem& problem,
                                             std::span<const Binding> pre,
                                             const SearchOptions& options = {});

// ---------------------------------------------------------------------------
// Pipeline

struct InferenceOptions {
  double theta_pre = 0.999;
  SearchOptions search;
};

struct SubtaskSolution {
  std::vector<Action> actions;
  std::vector<Binding> pre_assigned;
  std::vector<TaskAssignment> ranked;
  bool timed_out = false;
};

struct Inference {
  SubtaskPartition partition;
  std::vector<SubtaskSolution> subtasks;
};

/// Segments, pre-assigns and searches each subtask (subtasks run
/// concurrently; output order is fixed).
Inference infer_assignments(const Dataset& d, const Assessment& a,
                            const InferenceOptions& options);

struct ConstraintNode {
  Action action;
  Hand hand = Hand::kLeft;
  std::size_t subtask = 0;
  double mean_length = 0.0;
};

/// Symbolic relation plus subsymbolic target timing for one intra-subtask
/// pair (canonical orientation).
struct ConstraintEdge {
  ActionPair pair;
  AllenRelation relation = AllenRelation::kEquals;
  double score = 0.0;
  Timing3 target;
  std::size_t subtask = 0;
};

struct ConstraintGraph {
  std::vector<ConstraintNode> nodes;
  std::vector<ConstraintEdge> edges;
  SubtaskPartition partition;
  std::vector<TaskAssignment> assignments;  // chosen, one per subtask
  std::vector<std::size_t> ranks;

  const ConstraintNode* node(const Action& a) const;
};

/// Attaches conditioned timing targets to the chosen assignments.
ConstraintGraph build_constraint_graph(
    const Dataset& d, const std::map<ActionPair, TimingModel>& models,
    const SubtaskPartition& partition,
    const std::vector<TaskAssignment>& chosen,
    const std::map<Action, Hand>& hands, double margin);

/// Picks the rank-th assignment per subtask (clamped to the last available)
/// and builds the constraint graph.
ConstraintGraph infer_constraints(const Dataset& d, const Assessment& a,
                                  const Inference& inference, std::size_t rank,
                                  double margin);

}  // namespace tplan
