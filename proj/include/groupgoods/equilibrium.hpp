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

// Equilibrium verdicts built on the closed forms in analytics.hpp.
//
// For n > 1, Delta(0) = Delta(1) = r/N - 1 < 0 and Delta is larger inside
// (0, 1), so it has an interior maximum gamma0. Delta is affine in r with
// slope S(gamma)/N where S = sum psi_t phi_t, so gamma0 = argmax S does not
// depend on r and the critical rate is r# = N / S(gamma0). Above r# the
// maximum is positive and Delta has a root on each side of gamma0; those
// roots are the mixed-strategy forgiveness rates.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupgoods/analytics.hpp"
#include "groupgoods/game.hpp"
#include "groupgoods/numeric.hpp"

namespace groupgoods {

struct SolverSettings {
  int grid_points = 2001;
  double root_tolerance = 1e-10;
  int max_iterations = 200;
  double bracket_epsilon = 1e-9;

  void validate() const {
    if (grid_points < 3) throw std::invalid_argument("grid_points must be at least 3");
    if (!(root_tolerance > 0.0)) throw std::invalid_argument("root_tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
    if (!(bracket_epsilon > 0.0 && bracket_epsilon < 0.5))
      throw std::invalid_argument("bracket_epsilon must lie in (0, 0.5)");
  }
};

struct DeltaMax {
  double gamma0 = 0.0;
  double delta_max = 0.0;    // Delta(r, gamma0)
  double incentive = 0.0;    // S(gamma0)
  int grid_local_maxima = 0; // interior local maxima seen on the scan grid
  int iterations = 0;        // golden-section iterations
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

namespace detail {

inline void require_groups_of_two(const GameConfig& config, const char* what) {
  if (config.group_size() < 2)
    throw std::domain_error(std::string(what) +
                            " requires n > 1: with single-player groups Delta(0) != Delta(1), "
                            "so there is no forced interior maximum");
}

inline std::vector<double> scan_grid(const SolverSettings& s) {
  return numeric::linspace(s.bracket_epsilon, 1.0 - s.bracket_epsilon, s.grid_points);
}

}  // namespace detail

/// Global maximizer of Delta(r, .) over (0, 1): grid scan of S, then golden
/// section on the bracket around the best grid node.
inline DeltaMax find_delta_max(double r, const GameConfig& config,
                               const SolverSettings& settings = {}) {
  settings.validate();
  detail::require_groups_of_two(config, "find_delta_max");
  const auto grid = detail::scan_grid(settings);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    values[i] = incentive_sum(ForgivenessRate(grid[i]), config);

  DeltaMax out;
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (values[i] > values[best]) best = i;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (values[i] > values[i - 1] && values[i] >= values[i + 1]) ++out.grid_local_maxima;

  out.bracket_lo = grid[best == 0 ? 0 : best - 1];
  out.bracket_hi = grid[std::min(best + 1, grid.size() - 1)];
  auto s = [&](double g) { return incentive_sum(ForgivenessRate(g), config); };
  auto golden = numeric::golden_section_maximize(s, out.bracket_lo, out.bracket_hi, 1e-13,
                                                 settings.max_iterations);
  out.iterations = golden.iterations;
  if (golden.max >= values[best]) {
    out.gamma0 = golden.argmax;
    out.incentive = golden.max;
  } else {
    out.gamma0 = grid[best];
    out.incentive = values[best];
  }
  out.delta_max = r / config.players() * out.incentive - 1.0;
  return out;
}

struct RSharp {
  double value = 0.0;
  DeltaMax peak;  // evaluated at r = r#
  double residual = 0.0;  // Delta(r#, gamma0)
};

/// Critical rate of return: the unique r with max_gamma Delta(r, gamma) = 0.
inline RSharp find_r_sharp(const GameConfig& config, const SolverSettings& settings = {}) {
  RSharp out;
  out.peak = find_delta_max(config.rate(), config, settings);
  out.value = config.players() / out.peak.incentive;
  out.residual = delta(ForgivenessRate(out.peak.gamma0), out.value, config);
  out.peak.delta_max = out.residual;
  return out;
}

struct Root {
  double gamma = 0.0;
  double residual = 0.0;  // Delta at gamma
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
};

enum class MixedKind { kNone, kTangent, kTwoRoots };

inline constexpr std::string_view to_string(MixedKind k) {
  switch (k) {
    case MixedKind::kNone: return "none";
    case MixedKind::kTangent: return "tangent";
    case MixedKind::kTwoRoots: return "two_roots";
  }
  return "?";
}

struct MixedRoots {
  MixedKind kind = MixedKind::kNone;
  double r = 0.0;
  double r_sharp = 0.0;
  DeltaMax peak;
  std::vector<Root> all_roots;   // every sign change found, ascending
  std::optional<Root> lower;     // gamma^1 (outermost left)
  std::optional<Root> upper;     // gamma^2 (outermost right)

  bool present() const { return kind == MixedKind::kTwoRoots; }
};

namespace detail {

// All sign changes of f over the nodes, each refined by bisection.
template <class F>
std::vector<Root> roots_on_nodes(F&& f, const std::vector<double>& nodes,
                                 const SolverSettings& settings) {
  std::vector<double> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = f(nodes[i]);
  std::vector<Root> roots;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = values[i];
    const double b = values[i + 1];
    if (a == 0.0) {
      if (roots.empty() || roots.back().gamma != nodes[i])
        roots.push_back({nodes[i], 0.0, 0, nodes[i], nodes[i]});
      continue;
    }
    if (b == 0.0 || (a < 0.0) == (b < 0.0)) continue;
    auto res = numeric::bisect(f, nodes[i], nodes[i + 1], settings.max_iterations);
    roots.push_back({res.root, res.value, res.iterations, res.bracket_lo, res.bracket_hi});
  }
  if (!nodes.empty() && values.back() == 0.0) roots.push_back({nodes.back(), 0.0, 0, nodes.back(), nodes.back()});
  return roots;
}

}  // namespace detail

/// Relative band around r# inside which r is classified as tangent.
inline constexpr double kTangencyBand = 1e-12;

/// Forgiveness rates gamma^1 < gamma0 < gamma^2 with Delta(r, gamma) = 0.
inline MixedRoots find_mixed_roots(double r, const GameConfig& config,
                                   const SolverSettings& settings = {}) {
  settings.validate();
  detail::require_groups_of_two(config, "find_mixed_roots");
  if (!(r > 0.0 && r < config.players()))
    throw std::domain_error("find_mixed_roots requires 0 < r < N");

  MixedRoots out;
  out.r = r;
  const RSharp sharp = find_r_sharp(config, settings);
  out.r_sharp = sharp.value;
  out.peak = sharp.peak;
  out.peak.delta_max = delta(ForgivenessRate(out.peak.gamma0), r, config);

  if (std::abs(r - sharp.value) <= kTangencyBand * sharp.value) {
    out.kind = MixedKind::kTangent;
    Root degenerate{out.peak.gamma0, out.peak.delta_max, 0, out.peak.gamma0, out.peak.gamma0};
    out.all_roots = {degenerate};
    out.lower = out.upper = degenerate;
    return out;
  }
  if (r < sharp.value) return out;

  auto f = [&](double g) { return delta(ForgivenessRate(g), r, config); };
  const double eps = settings.bracket_epsilon;
  if (!(f(eps) < 0.0) || !(f(1.0 - eps) < 0.0))
    throw InternalInconsistency(
        "Delta is not negative at the bracket ends; a root lies within bracket_epsilon of 0 or 1");
  if (!(out.peak.delta_max > 0.0))
    throw InternalInconsistency("r > r# but Delta(gamma0) is not positive");

  auto nodes = detail::scan_grid(settings);
  nodes.insert(std::upper_bound(nodes.begin(), nodes.end(), out.peak.gamma0), out.peak.gamma0);
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  out.all_roots = detail::roots_on_nodes(f, nodes, settings);
  if (out.all_roots.size() < 2)
    throw InternalInconsistency("fewer than two sign changes although Delta(gamma0) > 0");
  for (const auto& root : out.all_roots)
    if (!(std::abs(root.residual) < settings.root_tolerance))
      throw InternalInconsistency("root residual " + std::to_string(root.residual) +
                                  " exceeds tolerance");
  out.kind = MixedKind::kTwoRoots;
  out.lower = out.all_roots.front();
  out.upper = out.all_roots.back();
  return out;
}

/// Sign changes of Delta over [0, 1] for any n (used for curves with n = 1,
/// where the boundary values differ).
inline std::vector<Root> delta_sign_changes(double r, const GameConfig& config,
                                            const SolverSettings& settings = {}) {
  settings.validate();
  auto f = [&](double g) { return delta(ForgivenessRate(g), r, config); };
  return detail::roots_on_nodes(f, numeric::linspace(0.0, 1.0, settings.grid_points), settings);
}

// ---------------------------------------------------------------------------

struct PureVerdict {
  bool exists = false;
  std::optional<Threshold> threshold;
  bool binding = false;             // r equals the threshold
  bool literature_sourced = false;  // n = 1, m = 1: interval quoted, not derived
  std::optional<double> delta_at_zero;
  std::optional<double> interval_lo, interval_hi;
  std::string condition;
};

/// Whether the pure conditional-cooperation profile is an equilibrium at the
/// configuration's r.
inline PureVerdict verify_pure(const GameConfig& config) {
  PureVerdict v;
  const double r = config.rate();
  const int n = config.group_size();
  auto at_threshold = [&](const Threshold& th) {
    v.threshold = th;
    v.binding = th.feasible && std::abs(r - th.value) <= 1e-12 * th.value;
    return th.feasible && (r >= th.value || v.binding);
  };
  if (config.sample_size() > 1) {
    v.exists = at_threshold(threshold_m_gt_1(config));
    v.condition =
        "r >= 2N/(N - n(m+1) + 2) on path; defecting after a defection is optimal for every r";
    return v;
  }
  if (n > 1) {
    const bool on_path = at_threshold(threshold_m_eq_1(config));
    v.delta_at_zero = delta(ForgivenessRate(0.0), r, config);
    v.exists = on_path && *v.delta_at_zero < 0.0;
    v.condition = "r >= 2N/(N - 2(n-1)) on path and Delta(0) = r/N - 1 < 0 off path";
    return v;
  }
  // Single-player groups observing one predecessor: a lone player can restore
  // a clean sample, so the off-path argument differs. The interval below is
  // taken from the single-player literature and not derived here.
  v.literature_sourced = true;
  v.interval_lo = 2.0;
  v.interval_hi = 3.0 - 3.0 / (config.players() + 1.0);
  v.exists = r >= *v.interval_lo && r <= *v.interval_hi;
  v.condition = "literature interval r in [2, 3 - 3/(N+1)]; not derived by this library";
  return v;
}

struct Lemma2Check {
  double gamma = 0.0;
  double first_group = 0.0;      // phi_1 after (0,0)
  double clean_mean = 0.0;       // mean_{t>=2} phi_t after (1, n)
  double defection_weighted = 0.0;  // sum_{t>=2} psi_t phi_t after (1, n' < n)
  bool strict_first = false;     // first_group > clean_mean (claimed for gamma < 1)
  bool weak_second = false;      // clean_mean >= defection_weighted
  bool boundary = false;         // gamma == 1: all three coincide

  bool holds() const {
    if (boundary) return weak_second && !strict_first;
    return strict_first && weak_second;
  }
};

/// Ordering of the three contribution incentives: first group, clean sample,
/// sample with a defection.
inline Lemma2Check verify_lemma2(ForgivenessRate rate, const GameConfig& config) {
  Lemma2Check c;
  c.gamma = rate.value();
  c.first_group = phi_clean(rate, Position(1), config);
  for (int t = 2; t <= config.groups(); ++t) c.clean_mean += phi_clean(rate, Position(t), config);
  c.clean_mean /= config.groups() - 1;
  c.defection_weighted = incentive_sum(rate, config);
  const double tol = 1e-12 * std::max(1.0, std::abs(c.clean_mean));
  c.boundary = rate.value() == 1.0;
  c.strict_first = c.first_group > c.clean_mean + (c.boundary ? tol : 0.0);
  c.weak_second = c.clean_mean >= c.defection_weighted - tol;
  if (c.boundary)
    c.weak_second = c.weak_second && std::abs(c.first_group - c.clean_mean) <= tol &&
                    std::abs(c.clean_mean - c.defection_weighted) <= tol;
  return c;
}

// ---------------------------------------------------------------------------

struct EquilibriumReport {
  GameConfig config;
  double r = 0.0;
  PureVerdict pure;
  std::optional<MixedRoots> mixed;  // absent for n = 1
  std::optional<double> r_sharp;
  std::optional<DeltaMax> delta_max;
  bool lemma2_ok = false;
  int lemma2_points = 0;
  SolverSettings settings;
};

/// Full report at the configuration's rate of return.
inline EquilibriumReport analyze(const GameConfig& config, const SolverSettings& settings = {}) {
  EquilibriumReport rep{config, config.rate(), verify_pure(config), std::nullopt, std::nullopt,
                        std::nullopt, true, 0, settings};
  if (config.sample_size() == 1 && config.group_size() > 1) {
    rep.mixed = find_mixed_roots(config.rate(), config, settings);
    rep.r_sharp = rep.mixed->r_sharp;
    rep.delta_max = rep.mixed->peak;
    if (!(*rep.r_sharp < config.players()))
      throw InternalInconsistency("r# is not below N");
  }
  constexpr int kLemmaGrid = 101;
  for (int i = 0; i < kLemmaGrid; ++i) {
    const double g = static_cast<double>(i) / kLemmaGrid;  // [0, 1)
    rep.lemma2_ok = rep.lemma2_ok && verify_lemma2(ForgivenessRate(g), config).holds();
    ++rep.lemma2_points;
  }
  return rep;
}

}  // namespace groupgoods
