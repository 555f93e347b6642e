#pragma once

#include <map>
#include <span>
#include <vector>

#include "tplan/assessment.hpp"
#include "tplan/inference.hpp"
#include "tplan/model.hpp"
#include "tplan/timing.hpp"

namespace tplan {

struct SymbolicOptions {
  double unit = 1.0;       // seconds per grid step
  int max_length = 5;      // initial per-action bound, in grid steps
  int horizon_factor = 4;  // horizon = factor * |actions| steps
};

/// Integer-grid plan for one group of actions. Times are grid indices
/// multiplied by `unit`.
struct SymbolicPlan {
  TemporalPlan plan;
  double unit = 1.0;
  std::vector<Action> actions;
};

/// Minimal grid witness of a complete assignment. The relations fix the order
/// of all keypoints (with ties for equalities); each keypoint gets its
/// longest-path level in that order, which is the earliest schedule on the
/// grid, so max_length and the horizon never bind.
/// Throws NoSymbolicSolutionError when the keypoint order is cyclic or a
/// same-hand pair overlaps.
SymbolicPlan symbolic_plan(std::span<const Action> actions,
                           std::span<const Binding> assignment,
                           const std::map<Action, Hand>& hands,
                           const SymbolicOptions& options = {});

/// Lays out per-subtask plans one after another with `gap_units` empty steps.
SymbolicPlan concatenate(std::span<const SymbolicPlan> blocks, int gap_units);

struct PairResidual {
  ActionPair pair;
  AllenRelation relation = AllenRelation::kEquals;
  Timing3 target;
  Timing3 achieved;
  double residual = 0.0;
};

struct ParametrizedPlan {
  TemporalPlan plan;
  double objective = 0.0;  // Euclidean norm of all pair residuals
  double start_objective = 0.0;  // same norm at the symbolic starting point
  std::vector<PairResidual> residuals;
  std::map<Action, std::size_t> subtask_of;
  bool stalled = false;
  int iterations = 0;
};

struct ParametrizeOptions {
  double margin = 0.05;
  double min_length = 0.2;
  double subtask_gap = 1.0;
  int max_iterations = 2000;
  double kkt_tolerance = 1e-8;
};

/// Moves keypoints toward the graph's target timings while every relation of
/// the symbolic plan stays a hard constraint. Per subtask this is a
/// least-squares problem in the distinct keypoints under ordering constraints,
/// solved by a primal active-set method from the symbolic plan. Subtasks are
/// laid out in order with `subtask_gap` seconds between them.
ParametrizedPlan parametrize(const SymbolicPlan& plan,
                             const ConstraintGraph& graph,
                             const ParametrizeOptions& options = {});

struct PlannerConfig {
  double eps = 0.1;
  double theta_pre = 0.999;
  GmmOptions gmm;
  SymbolicOptions symbolic;
  ParametrizeOptions parametrize;
  SearchOptions search;
};

struct PipelineResult {
  Assessment assessment;
  Inference inference;
  ConstraintGraph graph;
  std::vector<SymbolicPlan> blocks;
  SymbolicPlan symbolic;
  ParametrizedPlan plan;
};

/// Builds per-subtask symbolic plans for the graph's chosen assignments.
std::vector<SymbolicPlan> symbolic_blocks(const ConstraintGraph& graph,
                                          const SymbolicOptions& options);

/// assess -> infer (rank-th per subtask) -> symbolic plans -> parametrize.
PipelineResult plan_pipeline(const Dataset& d, std::size_t rank,
                             const PlannerConfig& config);

}  // namespace tplan
