#include <gtest/gtest.h>

#include <cmath>

#include "tplan/allen.hpp"
#include "tplan/error.hpp"
#include "tplan/evaluation.hpp"
#include "tplan/io.hpp"
#include "tplan/synth.hpp"

using namespace tplan;

namespace {

GroundTruthSpec load(const char* name) {
  return io::spec_from_json(io::parse_json(
      io::read_file(std::string(TPLAN_DATA_DIR) + "/" + name)));
}

std::map<Action, Interval> intervals(const Demonstration& d) {
  std::map<Action, Interval> out;
  for (const auto& x : all_actions(d)) out[x.action] = x.interval();
  return out;
}

/// Does the demo realize the mode's relations exactly?
bool matches_mode(const Demonstration& d,
                  const std::map<ActionPair, AllenRelation>& truth) {
  const auto at = intervals(d);
  for (const auto& [p, r] : truth) {
    if (classify_relation(at.at(p.first), at.at(p.second)) != r) return false;
  }
  return true;
}

}  // namespace

TEST(Generate, ZeroNoiseGivesIdenticalDemosUpToShift) {
  auto spec = load("muesli_spec.json");
  spec.noise = 0.0;
  spec.pair_noise.clear();
  spec.demonstrations = 5;
  const auto ds = generate(spec);
  ASSERT_EQ(ds.demonstrations.size(), 5u);
  for (const auto& d : ds.demonstrations) {
    EXPECT_NEAR(plan_demo_distance(ds.demonstrations[0], d), 0.0, 1e-9);
  }
}

TEST(Generate, EveryDemoRealizesItsMode) {
  for (const char* name : {"muesli_spec.json", "two_mode_spec.json"}) {
    const auto spec = load(name);
    const auto g = generate_with_modes(spec);
    ASSERT_EQ(g.dataset.demonstrations.size(), spec.demonstrations);
    for (std::size_t i = 0; i < g.modes.size(); ++i) {
      const auto& d = g.dataset.demonstrations[i];
      EXPECT_TRUE(validate_demonstration(d).empty());
      EXPECT_TRUE(matches_mode(d, ground_truth_relations(spec, g.modes[i])))
          << name << " " << d.id;
    }
  }
}

TEST(Generate, DeterministicFromSeed) {
  const auto spec = load("two_mode_spec.json");
  EXPECT_EQ(io::dump(io::to_json(generate(spec))),
            io::dump(io::to_json(generate(spec))));
  auto other = spec;
  other.seed += 1;
  EXPECT_NE(io::dump(io::to_json(generate(spec))),
            io::dump(io::to_json(generate(other))));
}

TEST(Generate, ModeCountsFollowProbabilities) {
  auto spec = load("two_mode_spec.json");
  spec.demonstrations = 100;
  const auto g = generate_with_modes(spec);
  std::size_t first = 0;
  for (auto m : g.modes) first += m == 0;
  // Binomial(100, 0.5): the central 99% interval is [37, 63].
  EXPECT_GE(first, 37u);
  EXPECT_LE(first, 63u);
}

TEST(Generate, StartJitterStaysInRange) {
  auto spec = load("muesli_spec.json");
  spec.start_jitter = 2.0;
  const auto ds = generate(spec);
  for (const auto& d : ds.demonstrations) {
    double first = 1e9;
    for (const auto& x : all_actions(d)) first = std::min(first, x.start);
    EXPECT_GE(first, 0.0);
    EXPECT_LT(first, 2.0);
  }
}

TEST(ValidateSpec, RejectsContradictionsAndGaps) {
  GroundTruthSpec spec;
  const Action a{"do", "a"}, b{"do", "b"}, c{"do", "c"};
  spec.actions = {{a, Hand::kLeft, 0}, {b, Hand::kRight, 0}, {c, Hand::kRight, 0}};
  SynthMode m;
  m.relations = {{{a, b}, AllenRelation::kBefore, 1},
                 {{b, c}, AllenRelation::kBefore, 1},
                 {{a, c}, AllenRelation::kAfter, 1}};
  spec.modes = {m};
  EXPECT_THROW(validate_spec(spec), SpecInfeasibleError);

  spec.modes[0].relations.pop_back();
  EXPECT_THROW(validate_spec(spec), ValidationError);  // missing (a, c)

  spec.modes[0].relations.push_back({{a, c}, AllenRelation::kBefore, 1});
  EXPECT_NO_THROW(validate_spec(spec));

  // b and c share a hand, so they cannot overlap.
  spec.modes[0].relations[1].relation = AllenRelation::kOverlaps;
  spec.modes[0].relations[2].relation = AllenRelation::kBefore;
  EXPECT_THROW(validate_spec(spec), SpecInfeasibleError);
}

TEST(GroundTruth, AddsCrossSubtaskPrecedence) {
  const auto spec = load("two_mode_spec.json");
  const auto truth = ground_truth_relations(spec, 0);
  const std::size_t n = spec.actions.size();
  EXPECT_EQ(truth.size(), n * (n - 1) / 2);
  for (const auto& [p, r] : truth) EXPECT_LT(p.first, p.second);
}
