#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "tplan/allen.hpp"
#include "tplan/error.hpp"
#include "tplan/planner.hpp"

using namespace tplan;

namespace {

struct Instance {
  std::vector<Action> actions;  // sorted
  std::vector<Interval> witness;
  std::map<Action, Hand> hands;
  std::vector<Binding> bindings;
};

bool sequential(AllenRelation r) {
  return r == AllenRelation::kBefore || r == AllenRelation::kAfter ||
         r == AllenRelation::kMeets || r == AllenRelation::kMetBy;
}

/// Relations come from the witness; hands are the first two-coloring that keeps
/// every same-hand pair sequential.
std::optional<Instance> make_instance(std::vector<Interval> witness) {
  Instance in;
  in.witness = std::move(witness);
  const std::size_t n = in.witness.size();
  for (std::size_t i = 0; i < n; ++i) {
    in.actions.push_back({"do", std::string(1, char('a' + i))});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      in.bindings.push_back({{in.actions[i], in.actions[j]},
                             oracle::relation(in.witness[i], in.witness[j]), 1.0});
    }
  }
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = i + 1; j < n && ok; ++j) {
        const bool same = ((mask >> i) & 1u) == ((mask >> j) & 1u);
        ok = !same || sequential(oracle::relation(in.witness[i], in.witness[j]));
      }
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < n; ++i) {
      in.hands[in.actions[i]] = (mask >> i) & 1u ? Hand::kRight : Hand::kLeft;
    }
    return in;
  }
  return std::nullopt;
}

ConstraintGraph graph_for(const Instance& in,
                          const std::vector<oracle::PairTarget>& targets) {
  ConstraintGraph g;
  g.partition.groups = {in.actions};
  g.assignments = {{in.bindings, 0.0}};
  g.ranks = {0};
  for (const auto& a : in.actions) g.nodes.push_back({a, in.hands.at(a), 0, 1.0});
  for (const auto& t : targets) {
    ConstraintEdge e;
    e.pair = {in.actions[t.a], in.actions[t.b]};
    e.relation = oracle::relation(in.witness[t.a], in.witness[t.b]);
    e.target = {t.lam_a, t.lam_b, t.omega};
    g.edges.push_back(e);
  }
  return g;
}

std::vector<oracle::PairTarget> random_targets(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(0.1, 2.5);
  std::uniform_real_distribution<double> off(-3, 3);
  std::vector<oracle::PairTarget> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      out.push_back({i, j, len(rng), len(rng), off(rng)});
    }
  }
  return out;
}

void expect_feasible(const ParametrizedPlan& p, const Instance& in,
                     const ParametrizeOptions& o) {
  EXPECT_TRUE(validate_plan(p.plan).empty());
  std::vector<double> keys;
  for (const auto& x : all_actions(p.plan)) {
    EXPECT_GE(x.length(), o.min_length - 1e-12);
    keys.push_back(x.start);
    keys.push_back(x.end);
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t k = 1; k < keys.size(); ++k) {
    const double gap = keys[k] - keys[k - 1];
    EXPECT_TRUE(gap == 0.0 || gap >= o.margin - 1e-12) << gap;
  }
  for (const auto& b : in.bindings) {
    const TimeEnrichedAction* x = nullptr;
    const TimeEnrichedAction* y = nullptr;
    for (const auto& z : all_actions(p.plan)) {
      if (z.action == b.pair.first) x = &z;
    }
    for (const auto& z : all_actions(p.plan)) {
      if (z.action == b.pair.second) y = &z;
    }
    ASSERT_TRUE(x && y);
    EXPECT_EQ(oracle::relation(x->interval(), y->interval()), b.relation);
  }
}

}  // namespace

TEST(SymbolicPlan, ClassifiesBackAndStartsAtZero) {
  const auto in = make_instance({{0, 3}, {1, 2}, {3, 5}});
  ASSERT_TRUE(in);
  const auto sp = symbolic_plan(in->actions, in->bindings, in->hands, {0.5, 5, 4});
  ASSERT_EQ(sp.plan.grid.value_or(0), 0.5);
  double first = 1e9;
  for (const auto& x : all_actions(sp.plan)) {
    first = std::min(first, x.start);
    EXPECT_EQ(std::fmod(x.start, 0.5), 0.0);
    EXPECT_EQ(std::fmod(x.end, 0.5), 0.0);
  }
  EXPECT_EQ(first, 0.0);
  std::map<Action, Interval> at;
  for (const auto& x : all_actions(sp.plan)) at[x.action] = x.interval();
  for (const auto& b : in->bindings) {
    EXPECT_EQ(classify_relation(at[b.pair.first], at[b.pair.second]), b.relation);
  }
}

TEST(SymbolicPlan, EveryRealizableTripleHasAWitness) {
  const auto ivs = oracle::grid_intervals(5);
  std::set<std::vector<int>> done;
  for (const auto& a : ivs) {
    for (const auto& b : ivs) {
      for (const auto& c : ivs) {
        const std::vector<int> key{int(index_of(oracle::relation(a, b))),
                                   int(index_of(oracle::relation(a, c))),
                                   int(index_of(oracle::relation(b, c)))};
        if (!done.insert(key).second) continue;
        const auto in = make_instance({a, b, c});
        if (!in) continue;
        const auto sp = symbolic_plan(in->actions, in->bindings, in->hands);
        std::map<Action, Interval> at;
        for (const auto& x : all_actions(sp.plan)) at[x.action] = x.interval();
        for (const auto& bd : in->bindings) {
          EXPECT_EQ(classify_relation(at[bd.pair.first], at[bd.pair.second]),
                    bd.relation);
        }
      }
    }
  }
  EXPECT_EQ(done.size(), 409u);
}

TEST(SymbolicPlan, SameHandOverlapIsRejected) {
  const std::vector<Action> acts{{"do", "a"}, {"do", "b"}};
  const std::vector<Binding> rel{{{acts[0], acts[1]}, AllenRelation::kOverlaps, 1}};
  const std::map<Action, Hand> hands{{acts[0], Hand::kLeft}, {acts[1], Hand::kLeft}};
  EXPECT_THROW(symbolic_plan(acts, rel, hands), NoSymbolicSolutionError);
}

TEST(SymbolicPlan, CyclicOrderIsRejected) {
  const std::vector<Action> acts{{"do", "a"}, {"do", "b"}, {"do", "c"}};
  const std::vector<Binding> rel{{{acts[0], acts[1]}, AllenRelation::kBefore, 1},
                                 {{acts[1], acts[2]}, AllenRelation::kBefore, 1},
                                 {{acts[0], acts[2]}, AllenRelation::kAfter, 1}};
  EXPECT_THROW(symbolic_plan(acts, rel, {}), NoSymbolicSolutionError);
}

TEST(Concatenate, ShiftsBlocksWithGap) {
  const auto a = make_instance({{0, 1}, {0, 2}});
  ASSERT_TRUE(a);
  const auto sa = symbolic_plan(a->actions, a->bindings, a->hands);
  Instance b = *make_instance({{0, 1}, {1, 2}});
  b.actions = {{"go", "x"}, {"go", "y"}};
  b.hands = {{b.actions[0], Hand::kLeft}, {b.actions[1], Hand::kLeft}};
  b.bindings = {{{b.actions[0], b.actions[1]}, AllenRelation::kMeets, 1}};
  const auto sb = symbolic_plan(b.actions, b.bindings, b.hands);
  const std::vector<SymbolicPlan> blocks{sa, sb};
  const auto all = concatenate(blocks, 1);
  double end_a = 0;
  for (const auto& x : all_actions(sa.plan)) end_a = std::max(end_a, x.end);
  double start_b = 1e9;
  for (const auto& x : all_actions(all.plan)) {
    if (x.action.verb == "go") start_b = std::min(start_b, x.start);
  }
  EXPECT_EQ(start_b, end_a + 1.0);
  EXPECT_EQ(all.actions.size(), 4u);
  EXPECT_TRUE(validate_plan(all.plan).empty());
}

TEST(Parametrize, ReachesTargetsInsideTheRegion) {
  const auto in = make_instance({{0, 2}, {1, 4}});
  ASSERT_TRUE(in);
  // Consistent overlapping target: a = [0, 2], b = [1, 4].
  const Timing3 t = embed(timing_of({0, 2}, {1, 4}));
  const std::vector<oracle::PairTarget> targets{{0, 1, t.lam_a, t.lam_b, t.omega}};
  const auto sp = symbolic_plan(in->actions, in->bindings, in->hands);
  const auto p = parametrize(sp, graph_for(*in, targets), {});
  EXPECT_LT(p.objective, 1e-9);
  EXPECT_GT(p.start_objective, p.objective);
  EXPECT_FALSE(p.stalled);
  ASSERT_EQ(p.residuals.size(), 1u);
  std::map<Action, Interval> at;
  for (const auto& x : all_actions(p.plan)) at[x.action] = x.interval();
  EXPECT_NEAR(at[in->actions[0]].length(), 2.0, 1e-9);
  EXPECT_NEAR(at[in->actions[1]].start - at[in->actions[0]].start, 1.0, 1e-9);
}

TEST(Parametrize, TargetsOutsideTheRegionStayFeasible) {
  std::mt19937_64 rng(5);
  ParametrizeOptions o;
  for (const auto& w : {std::vector<Interval>{{0, 1}, {1, 2}},
                        std::vector<Interval>{{0, 2}, {0, 2}},
                        std::vector<Interval>{{0, 3}, {1, 2}, {3, 5}},
                        std::vector<Interval>{{0, 2}, {2, 4}, {1, 3}}}) {
    const auto in = make_instance(w);
    ASSERT_TRUE(in);
    const auto sp = symbolic_plan(in->actions, in->bindings, in->hands);
    for (int rep = 0; rep < 10; ++rep) {
      const auto targets = random_targets(w.size(), rng);
      const auto p = parametrize(sp, graph_for(*in, targets), o);
      expect_feasible(p, *in, o);
      EXPECT_LE(p.objective, p.start_objective + 1e-12);
    }
  }
}

TEST(Parametrize, MatchesBruteForceOnSmallInstances) {
  std::mt19937_64 rng(12);
  ParametrizeOptions o;
  o.margin = 0.0625;
  o.min_length = 0.25;
  for (const auto& w : {std::vector<Interval>{{0, 1}, {2, 3}},
                        std::vector<Interval>{{0, 2}, {1, 3}},
                        std::vector<Interval>{{0, 1}, {0, 2}},
                        std::vector<Interval>{{1, 2}, {0, 3}}}) {
    const auto in = make_instance(w);
    ASSERT_TRUE(in);
    const auto sp = symbolic_plan(in->actions, in->bindings, in->hands);
    for (int rep = 0; rep < 5; ++rep) {
      const auto targets = random_targets(w.size(), rng);
      const auto p = parametrize(sp, graph_for(*in, targets), o);
      const double brute =
          oracle::brute_force_plan_objective(w, targets, o.margin, o.min_length);
      EXPECT_NEAR(p.objective, brute, 1e-3);
    }
  }
}

TEST(Parametrize, RejectsBadOptions) {
  const auto in = make_instance({{0, 1}, {2, 3}});
  const auto sp = symbolic_plan(in->actions, in->bindings, in->hands);
  ParametrizeOptions o;
  o.margin = 0.0;
  EXPECT_THROW(parametrize(sp, graph_for(*in, {}), o), ValidationError);
}
