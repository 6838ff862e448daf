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

// Closed-form incentive functions for the m = 1 forgiveness profile
//
//   sigma(C | zeta) = 1      if zeta is (0,0) or (1,n),
//                     gamma  otherwise,
//
// and the pure-strategy thresholds.
//
//   phi_t(gamma)  expected extra contributions (own unit included) from
//                 contributing rather than defecting at position t;
//   psi_t(gamma)  probability of being at position t given that the sample
//                 shows a defection;
//   Delta(gamma)  = (r/N) sum_{t>=2} psi_t phi_t - 1, the gain from
//                 contributing after a defection.
//
// Every quotient of the form (1 - (1 - gamma^n)^k) / gamma^n is evaluated
// as the geometric sum 1 + x + ... + x^(k-1) with x = 1 - gamma^n, which is
// exact in the limit gamma -> 0 and has no division to guard.

#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "groupgoods/game.hpp"
#include "groupgoods/numeric.hpp"

namespace groupgoods {

enum class SampleClass { kFirstGroup, kCleanFull, kContainsDefection };

inline constexpr std::string_view to_string(SampleClass c) {
  switch (c) {
    case SampleClass::kFirstGroup: return "first";
    case SampleClass::kCleanFull: return "clean";
    case SampleClass::kContainsDefection: return "defection";
  }
  return "?";
}

inline SampleClass classify(const Sample& s, const GameConfig& config) {
  if (s.observed_groups == 0) return SampleClass::kFirstGroup;
  if (s.contains_defection(config)) return SampleClass::kContainsDefection;
  return SampleClass::kCleanFull;
}

/// Off-path probability of contributing after a sample with a defection.
class ForgivenessRate {
 public:
  explicit ForgivenessRate(double gamma) : gamma_(gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
      throw std::domain_error("forgiveness rate must lie in [0, 1]");
  }
  double value() const { return gamma_; }

 private:
  double gamma_;
};

/// phi_t after a sample containing a defection: the other n-1 members of the
/// group forgive independently, so the player's own contribution restores a
/// clean sample only when all of them do.
inline double phi_defection(ForgivenessRate rate, Position t, const GameConfig& config) {
  t.check(config);
  const double g = rate.value();
  const int n = config.group_size();
  const int remaining = config.groups() - t.value();
  if (g == 0.0) return n > 1 ? 1.0 : static_cast<double>(remaining + 1);
  const double x = 1.0 - numeric::ipow(g, n);
  return n * (1.0 - g) * numeric::ipow(g, n - 1) * numeric::geometric_sum(x, remaining) + 1.0;
}

/// phi_t after a clean sample (1, n). At t = 1 this is also the first group's
/// value: a deviation there leaves the same sample (1, n-1) downstream.
inline double phi_clean(ForgivenessRate rate, Position t, const GameConfig& config) {
  t.check(config);
  const double g = rate.value();
  const int n = config.group_size();
  const int remaining = config.groups() - t.value();
  if (g == 0.0) return static_cast<double>(remaining) * n + 1.0;
  const double x = 1.0 - numeric::ipow(g, n);
  return n * (1.0 - g) * numeric::geometric_sum(x, remaining) + 1.0;
}

/// psi_t for every position t = 2..b (index 0 holds t = 2).
inline std::vector<double> psi_all(ForgivenessRate rate, const GameConfig& config) {
  const int b = config.groups();
  std::vector<double> out(static_cast<std::size_t>(b - 1));
  const double g = rate.value();
  if (g == 0.0) {
    const double denom = static_cast<double>(b) * (b - 1);
    for (int t = 2; t <= b; ++t) out[static_cast<std::size_t>(t - 2)] = 2.0 * (t - 1) / denom;
    return out;
  }
  const double x = 1.0 - numeric::ipow(g, config.group_size());
  // partial = sum_{j=0}^{t-2} x^j, built incrementally.
  double partial = 0.0;
  double power = 1.0;
  double total = 0.0;
  for (int t = 2; t <= b; ++t) {
    partial += power;
    power *= x;
    out[static_cast<std::size_t>(t - 2)] = partial;
    total += partial;
  }
  for (double& v : out) v /= total;
  return out;
}

inline double psi(ForgivenessRate rate, Position t, const GameConfig& config) {
  t.check(config);
  if (t.value() < 2)
    throw std::domain_error("psi is undefined at position 1: the first group never sees a defection");
  return psi_all(rate, config)[static_cast<std::size_t>(t.value() - 2)];
}

/// sum_{t=2}^{b} psi_t phi_t: the r-free part of Delta.
inline double incentive_sum(ForgivenessRate rate, const GameConfig& config) {
  const auto weights = psi_all(rate, config);
  double s = 0.0;
  for (int t = 2; t <= config.groups(); ++t)
    s += weights[static_cast<std::size_t>(t - 2)] * phi_defection(rate, Position(t), config);
  return s;
}

/// Gain from contributing rather than defecting after observing a defection,
/// at rate of return `r` (which need not equal config.rate()).
inline double delta(ForgivenessRate rate, double r, const GameConfig& config) {
  return r / config.players() * incentive_sum(rate, config) - 1.0;
}

// ---------------------------------------------------------------------------
// Pure-strategy thresholds on r.

struct Threshold {
  double value = 0.0;        // meaningful only when the denominator is positive
  double denominator = 0.0;
  bool feasible = false;     // denominator > 0 and value < N
  std::string note;
};

namespace detail {

inline Threshold make_threshold(double numerator, double denominator, int players) {
  Threshold th;
  th.denominator = denominator;
  if (!(denominator > 0.0)) {
    th.value = std::numeric_limits<double>::infinity();
    th.note = "infeasible: non-positive denominator, no valid r < N exists";
    return th;
  }
  th.value = numerator / denominator;
  th.feasible = th.value < players;
  th.note = th.feasible ? "feasible" : "infeasible given r < N";
  return th;
}

// 2N / (N - n(m+1) + 2), valid as a formula for any m.
inline Threshold sampled_threshold(const GameConfig& c) {
  const double denom = static_cast<double>(c.players()) -
                       static_cast<double>(c.group_size()) * (c.sample_size() + 1) + 2.0;
  return make_threshold(2.0 * c.players(), denom, c.players());
}

// 2N / (N - 2(n-1)).
inline Threshold single_sample_threshold(const GameConfig& c) {
  const double denom = static_cast<double>(c.players()) - 2.0 * (c.group_size() - 1);
  return make_threshold(2.0 * c.players(), denom, c.players());
}

}  // namespace detail

/// Smallest r sustaining "contribute unless a defection is seen" when m > 1.
inline Threshold threshold_m_gt_1(const GameConfig& config) {
  if (config.sample_size() <= 1) throw std::domain_error("threshold_m_gt_1 requires m > 1");
  return detail::sampled_threshold(config);
}

/// Smallest r sustaining the pure profile when m = 1.
inline Threshold threshold_m_eq_1(const GameConfig& config) {
  if (config.sample_size() != 1) throw std::domain_error("threshold_m_eq_1 requires m = 1");
  return detail::single_sample_threshold(config);
}

/// On-path gain from contributing (positive: contributing strictly
/// preferred) for the first group or after a clean sample, m = 1.
inline double onpath_deviation_gain(ForgivenessRate rate, double r, const GameConfig& config,
                                    SampleClass cls) {
  if (config.sample_size() != 1)
    throw std::domain_error("on-path gains are defined for the m = 1 profile");
  const double scale = r / config.players();
  switch (cls) {
    case SampleClass::kFirstGroup:
      return scale * phi_clean(rate, Position(1), config) - 1.0;
    case SampleClass::kCleanFull: {
      double mean = 0.0;
      for (int t = 2; t <= config.groups(); ++t) mean += phi_clean(rate, Position(t), config);
      mean /= config.groups() - 1;
      return scale * mean - 1.0;
    }
    case SampleClass::kContainsDefection:
      break;
  }
  throw std::domain_error("after a defection use delta(), not onpath_deviation_gain()");
}

}  // namespace groupgoods
