#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "tplan/error.hpp"
#include "tplan/inference.hpp"

using namespace tplan;

namespace {

std::vector<Action> actions(std::size_t n) {
  std::vector<Action> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"act", std::string(1, char('a' + i))});
  return out;
}

RelationScoreTable random_scores(const std::vector<Action>& acts,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  RelationScoreTable t;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    for (std::size_t j = i + 1; j < acts.size(); ++j) {
      RelationScores s;
      for (auto& x : s) x = u(rng);
      t.set({acts[i], acts[j]}, s);
    }
  }
  return t;
}

using Labeling = std::vector<int>;  // relation index per pair (i < j order)

/// Labelings realized by some placement of n grid intervals.
std::set<Labeling> realizable(std::size_t n, int hi) {
  const auto ivs = oracle::grid_intervals(hi);
  std::set<Labeling> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Labeling l;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        l.push_back(int(index_of(oracle::relation(ivs[idx[i]], ivs[idx[j]]))));
      }
    }
    out.insert(l);
    std::size_t k = 0;
    while (k < n && ++idx[k] == ivs.size()) idx[k++] = 0;
    if (k == n) break;
  }
  return out;
}

Labeling labeling_of(const TaskAssignment& t, const std::vector<Action>& acts) {
  std::map<ActionPair, int> rel;
  for (const auto& b : t.bindings) {
    if (b.pair.first < b.pair.second) {
      rel[b.pair] = int(index_of(b.relation));
    } else {
      rel[reversed(b.pair)] = int(index_of(inverse(b.relation)));
    }
  }
  Labeling l;
  for (std::size_t i = 0; i < acts.size(); ++i) {
    for (std::size_t j = i + 1; j < acts.size(); ++j) l.push_back(rel.at({acts[i], acts[j]}));
  }
  return l;
}

bool counts(AllenRelation r) {
  return r != AllenRelation::kBefore && r != AllenRelation::kAfter;
}

}  // namespace

TEST(Search, TwoActionsGiveAllThirteen) {
  const auto acts = actions(2);
  const AssignmentProblem p(acts, random_scores(acts, 1));
  const auto out = find_assignments(p, {});
  EXPECT_EQ(out.size(), 13u);
  for (std::size_t i = 1; i < out.size(); ++i) {
    EXPECT_GE(out[i - 1].score, out[i].score);
  }
}

TEST(Search, ThreeActionsMatchRealizableLabelings) {
  const auto acts = actions(3);
  const auto truth = realizable(3, 5);
  EXPECT_EQ(truth.size(), 409u);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto scores = random_scores(acts, seed);
    const AssignmentProblem p(acts, scores);
    for (auto order : {PairOrder::kMostConstrained, PairOrder::kInOrder}) {
      SearchOptions o;
      o.order = order;
      const auto out = find_assignments(p, {}, o);
      std::set<Labeling> got;
      for (const auto& t : out) {
        got.insert(labeling_of(t, acts));
        double s = 0.0;
        for (const auto& b : t.bindings) {
          if (counts(b.relation)) s += scores.score(b.pair, b.relation);
        }
        EXPECT_NEAR(t.score, s, 1e-12);
        EXPECT_TRUE(is_contradiction_free(t.bindings));
      }
      EXPECT_EQ(got, truth);
      EXPECT_EQ(out.size(), truth.size());
      for (std::size_t i = 1; i < out.size(); ++i) {
        EXPECT_GE(out[i - 1].score, out[i].score);
      }
    }
  }
}

TEST(Search, PreAssignmentFiltersToConsistentExtensions) {
  const auto acts = actions(3);
  const auto truth = realizable(3, 5);
  const AssignmentProblem p(acts, random_scores(acts, 3));
  const std::vector<Binding> pre{{{acts[0], acts[1]}, AllenRelation::kMeets, 1.0}};
  const auto out = find_assignments(p, pre);
  std::size_t expected = 0;
  for (const auto& l : truth) expected += l[0] == int(index_of(AllenRelation::kMeets));
  EXPECT_EQ(out.size(), expected);
  for (const auto& t : out) {
    EXPECT_EQ(labeling_of(t, acts)[0], int(index_of(AllenRelation::kMeets)));
  }
}

TEST(Search, ReversedPreAssignmentIsAccepted) {
  const auto acts = actions(2);
  const AssignmentProblem p(acts, random_scores(acts, 3));
  const std::vector<Binding> pre{{{acts[1], acts[0]}, AllenRelation::kAfter, 1.0}};
  const auto out = find_assignments(p, pre);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(labeling_of(out[0], acts)[0], int(index_of(AllenRelation::kBefore)));
}

TEST(Search, InconsistentPreAssignmentRejected) {
  const auto acts = actions(3);
  const AssignmentProblem p(acts, random_scores(acts, 3));
  const std::vector<Binding> pre{
      {{acts[0], acts[1]}, AllenRelation::kBefore, 1.0},
      {{acts[1], acts[2]}, AllenRelation::kBefore, 1.0},
      {{acts[0], acts[2]}, AllenRelation::kAfter, 1.0}};
  EXPECT_THROW(find_assignments(p, pre), ValidationError);
}

TEST(Search, TopKIsPrefixOfExhaustive) {
  const auto acts = actions(4);
  const AssignmentProblem p(acts, random_scores(acts, 8));
  const auto all = find_assignments(p, {});
  for (std::size_t k : {1u, 5u, 40u}) {
    SearchOptions o;
    o.top_k = k;
    const auto top = find_assignments(p, {}, o);
    ASSERT_EQ(top.size(), k);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(labeling_of(top[i], acts), labeling_of(all[i], acts));
    }
  }
}

TEST(Search, RestrictLimitsRelations) {
  const auto acts = actions(2);
  AssignmentProblem p(acts, random_scores(acts, 2));
  p.restrict(0, RelationSet{AllenRelation::kBefore, AllenRelation::kMeets});
  const auto out = find_assignments(p, {});
  ASSERT_EQ(out.size(), 2u);
}

TEST(Search, CountOnlyModeAndObserver) {
  const auto acts = actions(3);
  const AssignmentProblem p(acts, random_scores(acts, 1));
  SearchOptions o;
  o.collect = false;
  std::size_t last = 0;
  bool monotone = true;
  o.observer = [&](const SearchProgress& s) {
    monotone = monotone && s.solutions >= last;
    last = s.solutions;
  };
  o.observe_every = 1;
  const auto r = search_assignments(p, {}, o);
  EXPECT_TRUE(r.assignments.empty());
  EXPECT_EQ(r.solutions, 409u);
  EXPECT_TRUE(monotone);
}

TEST(Feasibility, AgreesWithTransitivityOnTriangles) {
  const auto acts = actions(3);
  const auto truth = realizable(3, 5);
  for (auto r1 : kAllRelations) {
    for (auto r2 : kAllRelations) {
      const std::vector<Binding> assigned{{{acts[0], acts[1]}, r1, 0},
                                          {{acts[1], acts[2]}, r2, 0}};
      for (auto r3 : kAllRelations) {
        const Labeling l{int(index_of(r1)), int(index_of(r3)), int(index_of(r2))};
        EXPECT_EQ(is_feasible(assigned, {{acts[0], acts[2]}, r3, 0}),
                  truth.count(l) == 1);
      }
    }
  }
}

TEST(PreAssign, PicksClearPrecedencesOnly) {
  const auto acts = actions(3);
  RelationScoreTable t;
  RelationScores meets{};
  meets[index_of(AllenRelation::kMeets)] = 1.0;
  RelationScores mixed{};
  mixed[index_of(AllenRelation::kBefore)] = 0.6;
  mixed[index_of(AllenRelation::kOverlaps)] = 0.4;
  RelationScores during{};
  during[index_of(AllenRelation::kDuring)] = 1.0;
  t.set({acts[0], acts[1]}, meets);
  t.set({acts[0], acts[2]}, mixed);
  t.set({acts[1], acts[2]}, during);
  const auto pre = pre_assign(t, 0.999);
  ASSERT_EQ(pre.size(), 1u);
  EXPECT_EQ(pre[0].relation, AllenRelation::kMeets);
  EXPECT_EQ(pre_assign(t, 0.5).size(), 2u);
}

namespace {

Dataset two_phase_dataset() {
  // {a, b} overlap, then {c, d} overlap; every a/b action precedes c/d.
  const Action a{"grasp", "bowl"}, b{"grasp", "spoon"}, c{"pour", "milk"},
      d{"stir", "bowl"};
  Dataset ds{"t", {}};
  for (int i = 0; i < 4; ++i) {
    const double s = 0.1 * i;
    ds.demonstrations.push_back(
        {"d" + std::to_string(i), {{a, s, 2 + s}, {c, 4, 6}},
         {{b, 1, 3}, {d, 5, 7 + s}}});
  }
  return ds;
}

}  // namespace

TEST(SegmentSubtasks, SplitsAtUnanimousPrecedence) {
  const auto ds = two_phase_dataset();
  const auto a = assess_all(ds, 0.1, {});
  const auto part = segment_subtasks(ds, a, 0.999);
  ASSERT_EQ(part.groups.size(), 2u);
  EXPECT_EQ(part.groups[0], (std::vector<Action>{{"grasp", "bowl"}, {"grasp", "spoon"}}));
  EXPECT_EQ(part.groups[1], (std::vector<Action>{{"pour", "milk"}, {"stir", "bowl"}}));
  EXPECT_EQ(part.group_of({"stir", "bowl"}), 1u);
  EXPECT_FALSE(part.group_of({"x", "y"}).has_value());
}

TEST(InferAssignments, RecoversObservedRelations) {
  const auto ds = two_phase_dataset();
  const auto a = assess_all(ds, 0.0, {});
  const auto inf = infer_assignments(ds, a, {});
  ASSERT_EQ(inf.subtasks.size(), 2u);
  for (const auto& s : inf.subtasks) {
    ASSERT_FALSE(s.ranked.empty());
    const auto& best = s.ranked.front();
    ASSERT_EQ(best.bindings.size(), 1u);
    EXPECT_EQ(best.bindings[0].relation, AllenRelation::kOverlaps);
    EXPECT_DOUBLE_EQ(best.score, 1.0);
  }
}

TEST(InferAssignments, SameHandPairsStaySequential) {
  // Same-hand actions are always ordered, so no ranked assignment may
  // overlap them.
  const Action a1{"grasp", "bowl"}, a2{"place", "bowl"}, b{"hold", "cup"};
  Dataset ds{"t", {}};
  for (int i = 0; i < 3; ++i) {
    const double s = 0.2 * i;
    ds.demonstrations.push_back(
        {"d" + std::to_string(i), {{a1, 0, 2}, {a2, 2.5 + s, 4}}, {{b, 1, 5}}});
  }
  const auto a = assess_all(ds, 0.0, {});
  InferenceOptions o;
  o.theta_pre = 1.0;  // nothing pre-assigned, only the hand restriction
  const auto inf = infer_assignments(ds, a, o);
  const auto hands = majority_hands(ds);
  ASSERT_EQ(inf.subtasks.size(), 1u);
  EXPECT_GT(inf.subtasks[0].ranked.size(), 1u);
  for (const auto& s : inf.subtasks) {
    for (const auto& t : s.ranked) {
      for (const auto& b : t.bindings) {
        if (hands.at(b.pair.first) != hands.at(b.pair.second)) continue;
        EXPECT_TRUE((RelationSet{AllenRelation::kBefore, AllenRelation::kAfter,
                                 AllenRelation::kMeets, AllenRelation::kMetBy})
                        .contains(b.relation));
      }
    }
  }
}
