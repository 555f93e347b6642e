#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tplan/allen.hpp"
#include "tplan/error.hpp"
#include "tplan/model.hpp"

using namespace tplan;

namespace {

TimeEnrichedAction act(const char* verb, const char* object, double s,
                       double e) {
  return {{verb, object}, s, e};
}

}  // namespace

TEST(Action, OrdersFieldWise) {
  EXPECT_LT((Action{"grasp", "z"}), (Action{"lift", "a"}));
  EXPECT_LT((Action{"lift", "a"}), (Action{"lift", "b"}));
  EXPECT_EQ((Action{"lift", "a"}).label(), "lift a");
}

TEST(RelationNames, RoundTrip) {
  for (auto r : kAllRelations) {
    const auto parsed = parse_relation(to_string(r));
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(*parsed, r);
  }
  EXPECT_EQ(to_string(AllenRelation::kMetBy), "met_by");
  EXPECT_EQ(to_string(AllenRelation::kOverlappedBy), "overlapped_by");
  EXPECT_FALSE(parse_relation("sideways").has_value());
}

TEST(ClassifyRelation, HandPickedCases) {
  EXPECT_EQ(classify_relation({0, 1}, {2, 3}), AllenRelation::kBefore);
  EXPECT_EQ(classify_relation({0, 2}, {2, 3}), AllenRelation::kMeets);
  EXPECT_EQ(classify_relation({0, 2}, {1, 3}), AllenRelation::kOverlaps);
  EXPECT_EQ(classify_relation({0, 1}, {0, 3}), AllenRelation::kStarts);
  EXPECT_EQ(classify_relation({1, 2}, {0, 3}), AllenRelation::kDuring);
  EXPECT_EQ(classify_relation({2, 3}, {0, 3}), AllenRelation::kFinishes);
  EXPECT_EQ(classify_relation({0, 3}, {0, 3}), AllenRelation::kEquals);
  EXPECT_EQ(classify_relation({2, 3}, {0, 1}), AllenRelation::kAfter);
}

TEST(ClassifyRelation, MatchesEndpointDefinitionsOnGrid) {
  const auto ivs = oracle::grid_intervals(6);
  for (const auto& a : ivs) {
    for (const auto& b : ivs) {
      EXPECT_EQ(classify_relation(a, b), oracle::relation(a, b));
      EXPECT_EQ(classify_relation(b, a), inverse(classify_relation(a, b)));
    }
  }
}

TEST(ClassifyRelation, ToleranceTreatsNearGapAsEquality) {
  EXPECT_EQ(classify_relation({0, 1.98}, {2, 3}, 0.05), AllenRelation::kMeets);
  EXPECT_EQ(classify_relation({0, 1.98}, {2, 3}, 0.0), AllenRelation::kBefore);
  EXPECT_EQ(classify_relation({0.01, 3}, {0, 2.99}, 0.05),
            AllenRelation::kEquals);
}

TEST(KeypointOffsets, Definitions) {
  const auto o = keypoint_offsets(Interval{1, 4}, Interval{2, 7});
  EXPECT_EQ(o.start_start, 1);
  EXPECT_EQ(o.end_end, 3);
  EXPECT_EQ(o.start_end, -2);
  EXPECT_EQ(o.end_start, 6);
}

TEST(ValidateDemonstration, CleanDemoHasNoViolations) {
  Demonstration d{"d", {act("a", "x", 0, 1), act("b", "x", 1, 2)},
                  {act("c", "y", 0.5, 3)}};
  EXPECT_TRUE(validate_demonstration(d).empty());
}

TEST(ValidateDemonstration, ReportsEveryRule) {
  Demonstration d{"d",
                  {act("a", "x", 0, 2), act("b", "x", 1, 3),
                   act("", "x", 4, 5)},
                  {act("c", "y", 2, 2), act("a", "x", 6, 7)}};
  const auto v = validate_demonstration(d);
  auto has = [&](Violation::Rule r) {
    return std::any_of(v.begin(), v.end(),
                       [&](const Violation& x) { return x.rule == r; });
  };
  EXPECT_TRUE(has(Violation::Rule::kOverlap));
  EXPECT_TRUE(has(Violation::Rule::kEmptyName));
  EXPECT_TRUE(has(Violation::Rule::kNonPositiveLength));
  EXPECT_TRUE(has(Violation::Rule::kDuplicateAction));
}

TEST(ValidateDataset, ThrowsNamingTheDemo) {
  Dataset ds{"t", {{"ok", {act("a", "x", 0, 1)}, {}},
                   {"broken", {act("a", "x", 1, 0)}, {}}}};
  try {
    validate_dataset(ds);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(MajorityHands, VotesAndBreaksTiesByFirstDemo) {
  Dataset ds{"t",
             {{"d0", {act("a", "x", 0, 1)}, {act("b", "x", 0, 1)}},
              {"d1", {act("b", "x", 0, 1)}, {act("a", "x", 0, 1)}},
              {"d2", {act("a", "x", 0, 1)}, {act("b", "x", 2, 3)}}}};
  const auto h = majority_hands(ds);
  EXPECT_EQ(h.at({"a", "x"}), Hand::kLeft);
  EXPECT_EQ(h.at({"b", "x"}), Hand::kRight);

  Dataset tie{"t", {{"d0", {}, {act("a", "x", 0, 1)}},
                    {"d1", {act("a", "x", 0, 1)}, {}}}};
  EXPECT_EQ(majority_hands(tie).at({"a", "x"}), Hand::kRight);
}

TEST(Vocabulary, SortedAndUnique) {
  Dataset ds{"t", {{"d0", {act("b", "x", 0, 1)}, {act("a", "x", 0, 1)}},
                   {"d1", {act("a", "x", 0, 1)}, {}}}};
  const auto v = action_vocabulary(ds);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (Action{"a", "x"}));
  EXPECT_EQ(v[1], (Action{"b", "x"}));
}
