#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tplan/inference.hpp"
#include "tplan/model.hpp"
#include "tplan/planner.hpp"
#include "tplan/timing.hpp"

namespace tplan {

struct SynthAction {
  Action action;
  Hand hand = Hand::kLeft;
  std::size_t subtask = 0;
};

/// One task mode: a relation for every pair inside a subtask, plus optional
/// target timings. Pairs without a target use the timing of the mode's
/// symbolic plan scaled by the spec unit.
struct SynthMode {
  double probability = 1.0;
  std::vector<Binding> relations;
  std::map<ActionPair, Timing3> targets;
};

struct GroundTruthSpec {
  std::string task;
  std::vector<SynthAction> actions;
  std::vector<SynthMode> modes;
  std::size_t demonstrations = 10;
  std::uint64_t seed = 0;
  /// Standard deviation of the timing-space noise (seconds), per coordinate.
  double noise = 0.05;
  std::map<ActionPair, double> pair_noise;
  double unit = 1.0;
  double subtask_gap = 1.5;
  /// Each demonstration is shifted by a uniform draw from [0, start_jitter).
  double start_jitter = 0.0;
  double margin = 0.05;
  double min_length = 0.2;
};

/// Checks completeness and consistency of every mode. Throws ValidationError
/// or SpecInfeasibleError.
void validate_spec(const GroundTruthSpec& spec);

struct GeneratedDataset {
  Dataset dataset;
  std::vector<std::size_t> modes;  // sampled mode per demonstration
};

/// Each demonstration samples a mode, perturbs its targets in timing space and
/// realizes them through the planner, so every relation of the mode holds
/// exactly. A draw whose realization does not classify back is redrawn.
GeneratedDataset generate_with_modes(const GroundTruthSpec& spec);
Dataset generate(const GroundTruthSpec& spec);

/// Complete relation map of a mode including the implied cross-subtask
/// precedences, canonical orientation.
std::map<ActionPair, AllenRelation> ground_truth_relations(
    const GroundTruthSpec& spec, std::size_t mode);

}  // namespace tplan
