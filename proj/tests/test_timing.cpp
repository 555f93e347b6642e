#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tplan/timing.hpp"

using namespace tplan;

TEST(Embed, WorkedPairMapsToOnePoint) {
  // (1,2),(3,4) and (2,3),(4,5) differ by a uniform shift.
  const auto t1 = embed(timing_of({1, 2}, {3, 4}));
  const auto t2 = embed(timing_of({2, 3}, {4, 5}));
  EXPECT_EQ(t1, t2);
  EXPECT_NEAR(t1.lam_a, 1 / kSqrt2, 1e-15);
  EXPECT_NEAR(t1.lam_b, 1 / kSqrt2, 1e-15);
  EXPECT_NEAR(t1.omega, 2.0, 1e-15);
}

TEST(Embed, LiftInvertsUpToAnchor) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  std::uniform_real_distribution<double> len(0.01, 5);
  for (int i = 0; i < 1000; ++i) {
    const double as = u(rng);
    const double bs = u(rng);
    const Timing4 t{as, as + len(rng), bs, bs + len(rng)};
    const Timing4 back = lift(embed(t), as);
    EXPECT_NEAR(back.a_start, t.a_start, 1e-12);
    EXPECT_NEAR(back.a_end, t.a_end, 1e-12);
    EXPECT_NEAR(back.b_start, t.b_start, 1e-12);
    EXPECT_NEAR(back.b_end, t.b_end, 1e-12);
  }
}

TEST(Embed, NormEqualsShiftMinimizedKeypointNorm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20, 20);
  std::uniform_real_distribution<double> len(0.01, 8);
  for (int i = 0; i < 2000; ++i) {
    const double as = u(rng);
    const double bs = u(rng);
    const Timing4 t{as, as + len(rng), bs, bs + len(rng)};
    const double searched =
        oracle::shift_min_norm_search({t.a_start, t.a_end, t.b_start, t.b_end});
    EXPECT_NEAR(embed(t).vector().norm(), searched, 1e-6 * (1 + searched));
  }
}

TEST(Embed, DistanceIsShiftMinimizedDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_real_distribution<double> len(0.1, 4);
  auto draw = [&] {
    const double as = u(rng);
    const double bs = u(rng);
    return Timing4{as, as + len(rng), bs, bs + len(rng)};
  };
  for (int i = 0; i < 500; ++i) {
    const Timing4 p = draw();
    const Timing4 q = draw();
    const Eigen::Vector4d d = p.vector() - q.vector();
    const double expected = oracle::shift_min_norm_search({d[0], d[1], d[2], d[3]});
    EXPECT_NEAR(distance(embed(p), embed(q)), expected, 1e-6 * (1 + expected));
  }
}

TEST(ShiftMinimizedNorm, ClosedFormMatchesSearch) {
  Eigen::VectorXd v(5);
  v << 1, -2, 3.5, 0, 7;
  EXPECT_NEAR(shift_minimized_norm(v),
              oracle::shift_min_norm_search({1, -2, 3.5, 0, 7}), 1e-9);
  Eigen::VectorXd c = Eigen::VectorXd::Constant(4, 3.25);
  EXPECT_NEAR(shift_minimized_norm(c), 0.0, 1e-15);
}

TEST(KeypointOffsets, TimingFormAgreesWithIntervalForm) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_real_distribution<double> len(0.1, 4);
  for (int i = 0; i < 1000; ++i) {
    const Interval a{u(rng), 0};
    const Interval b{u(rng), 0};
    const Interval aa{a.start, a.start + len(rng)};
    const Interval bb{b.start, b.start + len(rng)};
    const auto direct = keypoint_offsets(aa, bb);
    const auto via = keypoint_offsets(embed(timing_of(aa, bb)));
    EXPECT_NEAR(direct.start_start, via.start_start, 1e-12);
    EXPECT_NEAR(direct.end_end, via.end_end, 1e-12);
    EXPECT_NEAR(direct.start_end, via.start_end, 1e-12);
    EXPECT_NEAR(direct.end_start, via.end_start, 1e-12);
  }
}
