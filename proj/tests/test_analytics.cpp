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
#include <random>

#include "groupgoods/analytics.hpp"
#include "groupgoods/numeric.hpp"

namespace {

using namespace groupgoods;

GameConfig cfg(int b, int n, double r = 1.5, int m = 1) { return GameConfig::make(b, n, m, r); }
ForgivenessRate g(double x) { return ForgivenessRate(x); }

// Closed forms with explicit division; only used away from gamma = 0.
double oracle_phi_def(double y, int t, int b, int n) {
  return n * (1 - y) * (1 - std::pow(1 - std::pow(y, n), b - t)) / y + 1;
}
double oracle_phi_clean(double y, int t, int b, int n) {
  return n * (1 - y) * (1 - std::pow(1 - std::pow(y, n), b - t)) / std::pow(y, n) + 1;
}
double oracle_psi(double y, int t, int b, int n) {
  const double yn = std::pow(y, n);
  return (1 - std::pow(1 - yn, t - 1)) /
         (b - 1 - (1 - yn) * (1 - std::pow(1 - yn, b - 1)) / yn);
}

TEST(PhiDefection, LimitAtZero) {
  const auto c = cfg(4, 5);
  for (int t = 2; t < 4; ++t) EXPECT_EQ(phi_defection(g(0), Position(t), c), 1.0);
  EXPECT_EQ(phi_defection(g(0), Position(2), cfg(4, 1)), 3.0);
}

TEST(PhiDefection, SingleMemberGroups) {
  EXPECT_DOUBLE_EQ(phi_defection(g(0.5), Position(2), cfg(4, 1)), 1.75);
}

TEST(PhiClean, LimitsAndBoundary) {
  EXPECT_EQ(phi_clean(g(0), Position(2), cfg(4, 5)), 11.0);
  EXPECT_EQ(phi_clean(g(0), Position(1), cfg(4, 5)), 16.0);
  for (int t = 1; t <= 4; ++t) EXPECT_DOUBLE_EQ(phi_clean(g(1), Position(t), cfg(4, 5)), 1.0);
  EXPECT_DOUBLE_EQ(phi_clean(g(0.3), Position(2), cfg(3, 2)), oracle_phi_clean(0.3, 2, 3, 2));
}

TEST(Phi, MatchesDivisionFormsAwayFromZero) {
  for (int b = 2; b <= 8; ++b)
    for (int n = 1; n <= 5; ++n) {
      const auto c = cfg(b, n);
      for (double y : numeric::linspace(0.05, 1.0, 20))
        for (int t = 2; t <= b; ++t) {
          EXPECT_NEAR(phi_defection(g(y), Position(t), c), oracle_phi_def(y, t, b, n), 1e-11);
          // The division forms cancel badly once gamma^n is small.
          if (std::pow(y, n) >= 1e-3) {
            EXPECT_NEAR(phi_clean(g(y), Position(t), c), oracle_phi_clean(y, t, b, n), 1e-9);
            EXPECT_NEAR(psi(g(y), Position(t), c), oracle_psi(y, t, b, n), 1e-9);
          }
        }
    }
}

TEST(Psi, LimitAtZero) {
  const auto c = cfg(4, 5);
  EXPECT_DOUBLE_EQ(psi(g(0), Position(2), c), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(psi(g(0), Position(3), c), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(psi(g(0), Position(4), c), 0.5);
  EXPECT_THROW(psi(g(0.5), Position(1), c), std::domain_error);
}

TEST(Psi, NormalizationOnGrid) {
  for (int b = 2; b <= 8; ++b)
    for (int n = 1; n <= 5; ++n)
      for (double y : numeric::linspace(0, 1, 101)) {
        double s = 0;
        for (double p : psi_all(g(y), cfg(b, n))) s += p;
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
}

TEST(Delta, BoundaryValues) {
  const auto c = cfg(4, 5, 5.0);
  EXPECT_NEAR(delta(g(0), 5.0, c), -0.75, 1e-15);
  EXPECT_NEAR(delta(g(1), 5.0, c), -0.75, 1e-15);
  EXPECT_NEAR(delta(g(0), 20.0, c), 0.0, 1e-15);
}

TEST(Forgiveness, RangeChecked) {
  EXPECT_THROW(ForgivenessRate(-0.1), std::domain_error);
  EXPECT_THROW(ForgivenessRate(1.1), std::domain_error);
  EXPECT_THROW(ForgivenessRate(std::nan("")), std::domain_error);
}

TEST(Classify, ThreeClasses) {
  const auto c = cfg(4, 5);
  EXPECT_EQ(classify({0, 0}, c), SampleClass::kFirstGroup);
  EXPECT_EQ(classify({1, 5}, c), SampleClass::kCleanFull);
  EXPECT_EQ(classify({1, 4}, c), SampleClass::kContainsDefection);
}

// ---- properties over random configs and grids

struct Case {
  int b, n;
};
std::vector<Case> property_cases() {
  std::vector<Case> cases;
  for (int b = 2; b <= 8; ++b)
    for (int n = 2; n <= 6; ++n) cases.push_back({b, n});
  return cases;
}

TEST(Properties, InteriorDominanceOfDelta) {
  for (auto [b, n] : property_cases()) {
    if (b == 2) continue;  // see TwoGroupsDeltaIsFlat
    const auto c = cfg(b, n);
    const double r = 0.5 * (1 + b * n);
    const double at_zero = delta(g(0), r, c);
    for (double y : numeric::linspace(0, 1, 101)) {
      if (y == 0 || y == 1) continue;
      EXPECT_GT(delta(g(y), r, c), at_zero) << "b=" << b << " n=" << n << " y=" << y;
    }
  }
}

// The second of two groups has no successor, so phi = 1 and Delta = r/N - 1.
TEST(Properties, TwoGroupsDeltaIsFlat) {
  for (int n = 1; n <= 6; ++n) {
    const auto c = cfg(2, n);
    for (double y : numeric::linspace(0, 1, 21)) EXPECT_DOUBLE_EQ(delta(g(y), 3.0, c), 3.0 / (2 * n) - 1);
  }
}

TEST(Properties, DefectionPhiAboveOne) {
  for (auto [b, n] : property_cases()) {
    const auto c = cfg(b, n);
    for (double y : numeric::linspace(0, 1, 101)) {
      if (y == 0 || y == 1) continue;
      for (int t = 2; t < b; ++t) EXPECT_GT(phi_defection(g(y), Position(t), c), 1.0);
    }
  }
}

TEST(Properties, MonotoneInPositionAndCleanDominates) {
  for (auto [b, n] : property_cases()) {
    const auto c = cfg(b, n);
    for (double y : numeric::linspace(0, 1, 51))
      for (int t = 2; t <= b; ++t) {
        const double d = phi_defection(g(y), Position(t), c);
        const double k = phi_clean(g(y), Position(t), c);
        EXPECT_GE(k, d);
        if (t < b) {
          EXPECT_GE(d, phi_defection(g(y), Position(t + 1), c));
          EXPECT_GE(k, phi_clean(g(y), Position(t + 1), c));
        }
      }
  }
}

TEST(Properties, LimitConsistencyNearZero) {
  for (auto [b, n] : property_cases()) {
    const auto c = cfg(b, n);
    for (int t = 2; t <= b; ++t) {
      auto rel = [](double a, double l) { return std::abs(a - l) / std::abs(l); };
      EXPECT_LT(rel(phi_defection(g(1e-8), Position(t), c), phi_defection(g(0), Position(t), c)), 1e-5);
      EXPECT_LT(rel(phi_clean(g(1e-8), Position(t), c), phi_clean(g(0), Position(t), c)), 1e-5);
      EXPECT_LT(rel(psi(g(1e-8), Position(t), c), 2.0 * (t - 1) / (b * (b - 1))), 1e-5);
    }
  }
}

TEST(Properties, SingleMemberReduction) {
  for (int b = 2; b <= 8; ++b) {
    const auto c = cfg(b, 1);
    for (double y : numeric::linspace(0, 1, 101))
      for (int t = 2; t <= b; ++t) {
        const double expected = y == 0 ? b - t + 1 : (1 - std::pow(1 - y, b - t + 1)) / y;
        EXPECT_NEAR(phi_defection(g(y), Position(t), c), expected, 1e-12);
      }
  }
}

// ---- thresholds

TEST(Thresholds, SampledFormula) {
  const auto th = threshold_m_gt_1(cfg(6, 2, 5.0, 2));
  EXPECT_DOUBLE_EQ(th.value, 3.0);
  EXPECT_TRUE(th.feasible);
  EXPECT_THROW(threshold_m_gt_1(cfg(6, 2, 5.0, 1)), std::domain_error);
}

TEST(Thresholds, SampledInfeasible) {
  const auto th = threshold_m_gt_1(cfg(4, 3, 5.0, 3));  // N = 12, denominator 2
  EXPECT_DOUBLE_EQ(th.denominator, 2.0);
  EXPECT_FALSE(th.feasible);
}

// m < b forces n(m+1) <= N, so the denominator is at least 2 on valid
// configs; the largest window gives the threshold N.
TEST(Thresholds, SampledLargestWindowHitsN) {
  const auto th = threshold_m_gt_1(cfg(5, 3, 5.0, 4));
  EXPECT_DOUBLE_EQ(th.denominator, 2.0);
  EXPECT_DOUBLE_EQ(th.value, 15.0);
  EXPECT_FALSE(th.feasible);
}

TEST(Thresholds, SingleSample) {
  EXPECT_NEAR(threshold_m_eq_1(cfg(4, 5, 5.0)).value, 10.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(threshold_m_eq_1(cfg(6, 1, 3.0)).value, 2.0);
  const auto th = threshold_m_eq_1(cfg(2, 3, 2.0));  // N = 6 -> threshold 6
  EXPECT_DOUBLE_EQ(th.value, 6.0);
  EXPECT_FALSE(th.feasible);
  EXPECT_THROW(threshold_m_eq_1(cfg(4, 5, 5.0, 2)), std::domain_error);
}

TEST(Thresholds, SingleMemberSpecialization) {
  std::mt19937_64 gen(3);
  for (int k = 0; k < 10; ++k) {
    const int big_n = std::uniform_int_distribution<int>(3, 40)(gen);
    const int m = std::uniform_int_distribution<int>(2, big_n - 1)(gen);
    const auto th = threshold_m_gt_1(cfg(big_n, 1, 2.0, m));
    EXPECT_NEAR(th.value, 2.0 * big_n / (big_n - m + 1), 1e-12);
  }
}

// ---- on-path gains

TEST(OnPath, FirstGroupAndClean) {
  EXPECT_NEAR(onpath_deviation_gain(g(0), 4.0, cfg(4, 5, 4.0), SampleClass::kFirstGroup), 2.2,
              1e-12);
  const double r = 10.0 / 3.0;
  EXPECT_NEAR(onpath_deviation_gain(g(0), r, cfg(4, 5, r), SampleClass::kCleanFull), 0.0, 1e-12);
  for (auto cls : {SampleClass::kFirstGroup, SampleClass::kCleanFull})
    EXPECT_NEAR(onpath_deviation_gain(g(1), 8.0, cfg(4, 5, 8.0), cls), 8.0 / 20 - 1, 1e-12);
  EXPECT_THROW(onpath_deviation_gain(g(0), 4.0, cfg(4, 5, 4.0), SampleClass::kContainsDefection),
               std::domain_error);
}

}  // namespace
