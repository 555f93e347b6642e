#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tplan/inference.hpp"
#include "tplan/model.hpp"
#include "tplan/planner.hpp"

namespace tplan {

/// Keypoint distance modulo one uniform time shift. Actions are matched by
/// (verb, object) and stacked in sorted action order as (start, end).
/// Throws ActionSetMismatchError.
double plan_demo_distance(const TemporalPlan& p, const Demonstration& d);
double plan_demo_distance(const Demonstration& a, const Demonstration& b);

/// Subtask-level variant: each group gets its own shift, and the result is
/// the root-sum-square of the per-group distances.
double plan_demo_distance(const TemporalPlan& p, const Demonstration& d,
                          const SubtaskPartition& partition);
double plan_demo_distance(const Demonstration& a, const Demonstration& b,
                          const SubtaskPartition& partition);

/// Demonstration with the smallest total distance to all others (ties go to
/// the lowest id).
const Demonstration& most_characteristic(std::span<const Demonstration> demos);
const Demonstration& most_characteristic(std::span<const Demonstration> demos,
                                         const SubtaskPartition& partition);

struct EvalRow {
  std::size_t trial = 0;
  std::size_t prefix = 0;  // number of demonstrations known
  double plan_distance = 0.0;
  double baseline_distance = 0.0;
  std::string baseline_id;
};

struct EvalSummary {
  std::size_t prefix = 0;
  double plan_mean = 0.0;
  double plan_variance = 0.0;
  double baseline_mean = 0.0;
  double baseline_variance = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<EvalSummary> summary;
  std::vector<std::uint64_t> trial_seeds;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  /// Plain-text definition of the distances reported.
  std::string definition;
};

/// Symbolic layer held fixed across the incremental protocol.
struct FixedTaskChoice {
  SubtaskPartition partition;
  std::vector<TaskAssignment> assignments;  // one per subtask
  std::map<Action, Hand> hands;
};

/// Chooses the rank-th assignment per subtask from the full dataset.
FixedTaskChoice choose_task(const Dataset& d, std::size_t rank,
                            const PlannerConfig& config);

/// For each trial, demonstrations arrive in a seeded random order; after each
/// arrival timing models are refit on the prefix, the plan is rebuilt with the
/// fixed symbolic layer, and its mean subtask-level distance to the known
/// demonstrations is recorded next to the most characteristic demonstration's.
EvalReport incremental_eval(const Dataset& d, const FixedTaskChoice& choice,
                            std::size_t trials, std::uint64_t seed,
                            const PlannerConfig& config);

struct BenchSample {
  double elapsed = 0.0;
  std::size_t partials = 0;
  std::size_t solutions = 0;
};

struct BenchTrace {
  std::vector<BenchSample> samples;
  std::size_t solutions = 0;
  double elapsed = 0.0;
  bool timed_out = false;
};

/// Runs the exhaustive search (without storing solutions) and samples the
/// stack size and solution count every `sample_interval` seconds. The last
/// sample is taken when the stack empties.
BenchTrace bench_assignments(const AssignmentProblem& problem,
                             std::span<const Binding> pre,
                             double sample_interval, double time_limit = 0.0,
                             PairOrder order = PairOrder::kMostConstrained);

}  // namespace tplan
