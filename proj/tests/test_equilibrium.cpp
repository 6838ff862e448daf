// Copyright 2026 The groupgoods Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>

#include "groupgoods/equilibrium.hpp"

namespace {

using namespace groupgoods;

GameConfig cfg(int b, int n, double r, int m = 1) { return GameConfig::make(b, n, m, r); }
double delta_at(double y, double r, const GameConfig& c) { return delta(ForgivenessRate(y), r, c); }

// Regression constants for b=4, n=5 (N=20).
constexpr double kRSharp = 15.5546022660973;
constexpr double kGamma0 = 0.806302675751409;

TEST(DeltaMax, ArgmaxDoesNotDependOnRate) {
  const auto c = cfg(4, 5, 8);
  const auto a = find_delta_max(5.0, c);
  const auto b = find_delta_max(17.0, c);
  EXPECT_EQ(a.gamma0, b.gamma0);
  EXPECT_GT(a.gamma0, 0.0);
  EXPECT_LT(a.gamma0, 1.0);
  EXPECT_GT(a.incentive, 1.0);
  EXPECT_EQ(a.grid_local_maxima, 1);
}

TEST(DeltaMax, SingleMemberGroupsRejected) {
  EXPECT_THROW(find_delta_max(5.0, cfg(10, 1, 5)), std::domain_error);
  EXPECT_THROW(find_r_sharp(cfg(10, 1, 5)), std::domain_error);
}

TEST(RSharp, RegressionValue) {
  const auto rs = find_r_sharp(cfg(4, 5, 8));
  EXPECT_NEAR(rs.value, kRSharp, 1e-9);
  EXPECT_NEAR(rs.peak.gamma0, kGamma0, 1e-7);
  EXPECT_LT(std::abs(rs.residual), 1e-9);
}

// Independent check: brute-force maximum of S on a 10^6-point grid.
TEST(RSharp, DenseGridCrossCheck) {
  const auto c = cfg(4, 5, 8);
  double best = -1.0;
  double arg = 0.0;
  const int points = 1'000'000;
  for (int i = 0; i <= points; ++i) {
    const double y = static_cast<double>(i) / points;
    const double s = incentive_sum(ForgivenessRate(y), c);
    if (s > best) {
      best = s;
      arg = y;
    }
  }
  const auto rs = find_r_sharp(c);
  EXPECT_NEAR(rs.value, 20.0 / best, 1e-9);
  EXPECT_NEAR(rs.peak.gamma0, arg, 2e-6);
}

TEST(RSharp, BelowNFromThreeGroups) {
  for (int b = 3; b <= 8; ++b)
    for (int n = 2; n <= 6; ++n) {
      const auto rs = find_r_sharp(cfg(b, n, 1.5));
      EXPECT_LT(rs.value, b * n) << "b=" << b << " n=" << n;
      EXPECT_LT(std::abs(rs.residual), 1e-9);
    }
}

// With two groups the second group has no successor: S = 1 and r# = N.
TEST(RSharp, TwoGroupsHaveNoInteriorIncentive) {
  for (int n = 2; n <= 6; ++n) {
    const auto c = cfg(2, n, 1.5);
    EXPECT_DOUBLE_EQ(find_r_sharp(c).value, 2.0 * n);
    EXPECT_FALSE(find_mixed_roots(2.0 * n - 0.5, c).present());
  }
}

TEST(MixedRoots, TwoRootsAboveRSharp) {
  const double r = kRSharp + 1.0;
  const auto c = cfg(4, 5, r);
  const auto m = find_mixed_roots(r, c);
  ASSERT_EQ(m.kind, MixedKind::kTwoRoots);
  ASSERT_TRUE(m.present());
  EXPECT_NEAR(m.lower->gamma, 0.644544797319016, 1e-9);
  EXPECT_NEAR(m.upper->gamma, 0.916479375588554, 1e-9);
  EXPECT_LT(m.lower->gamma, m.peak.gamma0);
  EXPECT_LT(m.peak.gamma0, m.upper->gamma);
  EXPECT_LT(std::abs(m.lower->residual), 1e-10);
  EXPECT_LT(std::abs(m.upper->residual), 1e-10);
  for (int i = 1; i <= 99; ++i) {
    const double y = m.lower->gamma + (m.upper->gamma - m.lower->gamma) * i / 100.0;
    EXPECT_GT(delta_at(y, r, c), 0.0);
  }
}

TEST(MixedRoots, NoneBelowRSharp) {
  const auto c = cfg(4, 5, 10);
  EXPECT_EQ(find_mixed_roots(10.0, c).kind, MixedKind::kNone);
  EXPECT_FALSE(find_mixed_roots(kRSharp - 1e-6, c).present());
}

TEST(MixedRoots, TangentAtRSharp) {
  const auto c = cfg(4, 5, 10);
  const auto rs = find_r_sharp(c);
  const auto m = find_mixed_roots(rs.value, c);
  EXPECT_EQ(m.kind, MixedKind::kTangent);
}

TEST(MixedRoots, SmallGroupsAtHighRate) {
  const auto c = cfg(8, 2, 15);
  const auto m = find_mixed_roots(15.0, c);
  ASSERT_EQ(m.kind, MixedKind::kTwoRoots);
  EXPECT_NEAR(m.lower->gamma, 0.01696, 1e-4);
  EXPECT_NEAR(m.upper->gamma, 0.96199, 1e-4);
}

TEST(MixedRoots, RateGuards) {
  const auto c = cfg(4, 5, 10);
  EXPECT_THROW(find_mixed_roots(20.0, c), std::domain_error);
  EXPECT_THROW(find_mixed_roots(16.0, cfg(10, 1, 5)), std::domain_error);
}

// Roots widen as r grows: Delta is increasing in r pointwise.
TEST(MixedRoots, ComparativeStaticInRate) {
  const auto c = cfg(4, 5, 10);
  double lo = 1.0, hi = 0.0;
  for (double r = kRSharp + 0.05; r < 20.0; r += 0.4) {
    const auto m = find_mixed_roots(r, c);
    ASSERT_TRUE(m.present());
    EXPECT_LE(m.lower->gamma, lo);
    EXPECT_GE(m.upper->gamma, hi);
    lo = m.lower->gamma;
    hi = m.upper->gamma;
  }
  EXPECT_LT(lo, 0.4);
  EXPECT_GT(hi, 0.99);
}

TEST(MixedRoots, RateAtNIsPositiveInside) {
  const auto c = cfg(4, 5, 10);
  for (int i = 1; i < 100; ++i) EXPECT_GT(delta_at(i / 100.0, 20.0, c), 0.0);
}

// Fixed b, rate placed at the same fraction between r# and N: both roots
// move right as n grows.
TEST(MixedRoots, GroupSizeShiftAtFixedB) {
  for (double f : {0.1, 0.5, 0.9}) {
    double prev_lo = 0.0, prev_hi = 0.0;
    for (int n = 2; n <= 6; ++n) {
      const auto probe = cfg(4, n, 1.5);
      const double rs = find_r_sharp(probe).value;
      const double r = rs + f * (4 * n - rs);
      const auto m = find_mixed_roots(r, probe.with_rate(r));
      ASSERT_TRUE(m.present());
      EXPECT_GT(m.lower->gamma, prev_lo) << "n=" << n << " f=" << f;
      EXPECT_GT(m.upper->gamma, prev_hi) << "n=" << n << " f=" << f;
      prev_lo = m.lower->gamma;
      prev_hi = m.upper->gamma;
    }
  }
}

TEST(MixedRoots, Deterministic) {
  const auto c = cfg(4, 5, 17);
  const auto a = find_mixed_roots(17.0, c);
  const auto b = find_mixed_roots(17.0, c);
  EXPECT_EQ(a.lower->gamma, b.lower->gamma);
  EXPECT_EQ(a.upper->gamma, b.upper->gamma);
  EXPECT_EQ(a.peak.gamma0, b.peak.gamma0);
}

TEST(SignChanges, SingleMemberGroupsDecreaseToOneRoot) {
  const auto c = cfg(20, 1, 16);
  const auto roots = delta_sign_changes(16.0, c);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_GT(delta_at(1e-9, 16.0, c), 0.0);
  EXPECT_LT(std::abs(roots[0].residual), 1e-10);
}

TEST(Settings, Validation) {
  SolverSettings s;
  s.grid_points = 2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.root_tolerance = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

// ---- pure verdicts

TEST(Pure, BindingAtThreshold) {
  const auto v = verify_pure(cfg(6, 2, 3.0, 2));
  EXPECT_TRUE(v.exists);
  EXPECT_TRUE(v.binding);
}

TEST(Pure, AboveSingleSampleThreshold) {
  const auto v = verify_pure(cfg(4, 5, 4.0));
  EXPECT_TRUE(v.exists);
  ASSERT_TRUE(v.delta_at_zero);
  EXPECT_NEAR(*v.delta_at_zero, 4.0 / 20 - 1, 1e-15);
}

TEST(Pure, BelowThreshold) {
  EXPECT_FALSE(verify_pure(cfg(4, 5, 2.0)).exists);
}

TEST(Pure, SingleMemberGroupsUseLiterature) {
  const auto v = verify_pure(cfg(10, 1, 5.0));
  EXPECT_FALSE(v.exists);
  EXPECT_TRUE(v.literature_sourced);
  EXPECT_TRUE(verify_pure(cfg(10, 1, 2.5)).exists);
}

// ---- Lemma 2 chain

TEST(Lemma2, LimitsAtZero) {
  const auto c = verify_lemma2(ForgivenessRate(0), cfg(4, 5, 8));
  EXPECT_DOUBLE_EQ(c.first_group, 16.0);
  EXPECT_DOUBLE_EQ(c.clean_mean, 6.0);
  EXPECT_DOUBLE_EQ(c.defection_weighted, 1.0);
  EXPECT_TRUE(c.holds());
}

TEST(Lemma2, BoundaryCollapses) {
  const auto c = verify_lemma2(ForgivenessRate(1), cfg(4, 5, 8));
  EXPECT_TRUE(c.boundary);
  EXPECT_TRUE(c.holds());
  EXPECT_DOUBLE_EQ(c.first_group, 1.0);
}

TEST(Lemma2, GridHolds) {
  for (int b : {3, 4, 5})
    for (int n : {2, 3, 5})
      for (int i = 0; i < 101; ++i) {
        const auto c = verify_lemma2(ForgivenessRate(i / 101.0), cfg(b, n, 1.5));
        EXPECT_TRUE(c.strict_first && c.weak_second) << b << " " << n << " " << i;
      }
}

TEST(Lemma2, StrictlyOrderedExample) {
  const auto c = verify_lemma2(ForgivenessRate(0.5), cfg(3, 2, 3));
  EXPECT_GT(c.first_group, c.clean_mean);
  EXPECT_GT(c.clean_mean, c.defection_weighted);
}

// ---- report

TEST(Analyze, FullReport) {
  const auto rep = analyze(cfg(4, 5, kRSharp + 1));
  EXPECT_TRUE(rep.pure.exists);
  ASSERT_TRUE(rep.mixed);
  EXPECT_TRUE(rep.mixed->present());
  EXPECT_TRUE(rep.lemma2_ok);
  EXPECT_EQ(rep.lemma2_points, 101);
}

TEST(Analyze, LowRate) {
  const auto rep = analyze(cfg(4, 5, 2));
  EXPECT_FALSE(rep.pure.exists);
  ASSERT_TRUE(rep.mixed);
  EXPECT_FALSE(rep.mixed->present());
}

TEST(Analyze, SingleMemberGroups) {
  const auto rep = analyze(cfg(10, 1, 5));
  EXPECT_TRUE(rep.pure.literature_sourced);
  EXPECT_FALSE(rep.mixed);
  EXPECT_FALSE(rep.r_sharp);
}

}  // namespace
