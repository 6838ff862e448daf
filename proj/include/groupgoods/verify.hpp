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

// Oracle suite: closed forms against exact enumeration and Monte Carlo,
// plus the structural invariants of the incentive functions.

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "groupgoods/analytics.hpp"
#include "groupgoods/equilibrium.hpp"
#include "groupgoods/simulator.hpp"

namespace groupgoods {

enum class VerifyLevel { kFast, kFull };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::kFast;
  std::uint64_t seed = 20261018;
  unsigned workers = 0;
  // Test hook: "phi_clean", "phi_defection" or "psi" perturbs that closed
  // form inside the suite so the matching checks must fail.
  std::string corrupt;
};

struct CheckResult {
  std::string name;
  std::string scope;
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  double seconds = 0.0;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed && !c.skipped) return false;
    return true;
  }
  std::string table() const {
    std::ostringstream out;
    for (const auto& c : checks) {
      out << (c.skipped ? "SKIP" : c.passed ? "PASS" : "FAIL") << "  " << c.name;
      for (std::size_t pad = c.name.size(); pad < 40; ++pad) out << ' ';
      out << c.scope;
      if (!c.detail.empty()) out << "  (" << c.detail << ")";
      out << "\n";
    }
    return out.str();
  }
};

namespace detail {

inline std::string io_fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

using PhiFn = std::function<double(ForgivenessRate, Position, const GameConfig&)>;

struct Formulas {
  PhiFn phi_clean = groupgoods::phi_clean;
  PhiFn phi_defection = groupgoods::phi_defection;
  PhiFn psi = [](ForgivenessRate g, Position t, const GameConfig& c) {
    return groupgoods::psi(g, t, c);
  };

  double incentive(ForgivenessRate g, const GameConfig& c) const {
    double s = 0.0;
    for (int t = 2; t <= c.groups(); ++t) s += psi(g, Position(t), c) * phi_defection(g, Position(t), c);
    return s;
  }
  double delta(ForgivenessRate g, double r, const GameConfig& c) const {
    return r / c.players() * incentive(g, c) - 1.0;
  }
};

inline Formulas corrupted(const std::string& which) {
  Formulas f;
  if (which.empty()) return f;
  if (which == "phi_clean")
    f.phi_clean = [](ForgivenessRate g, Position t, const GameConfig& c) {
      return groupgoods::phi_clean(g, t, c) + 1e-3;
    };
  else if (which == "phi_defection")
    f.phi_defection = [](ForgivenessRate g, Position t, const GameConfig& c) {
      return groupgoods::phi_defection(g, t, c) * (1.0 + 1e-3);
    };
  else if (which == "psi")
    f.psi = [](ForgivenessRate g, Position t, const GameConfig& c) {
      return groupgoods::psi(g, t, c) * (1.0 + 1e-3);
    };
  else
    throw std::invalid_argument("unknown corruption target: " + which);
  return f;
}

inline std::string scope_of(const GameConfig& c) {
  std::ostringstream s;
  s << "b=" << c.groups() << " n=" << c.group_size();
  return s.str();
}

inline std::vector<double> interior_grid(int points) {
  std::vector<double> g;
  for (int i = 1; i < points - 1; ++i) g.push_back(static_cast<double>(i) / (points - 1));
  return g;
}

}  // namespace detail

/// Runs every check for `config` (simulation checks use the m = 1 profile
/// on the same b, n, r).
inline VerifyReport run_verification(const GameConfig& config, const VerifyOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto f = detail::corrupted(opt.corrupt);
  const bool full = opt.level == VerifyLevel::kFull;
  const GameConfig cfg = GameConfig::make(config.groups(), config.group_size(), 1, config.rate());
  const int b = cfg.groups();
  const int n = cfg.group_size();
  VerifyReport rep;
  auto add = [&](std::string name, std::string scope, bool ok, std::string detail = {}) {
    rep.checks.push_back({std::move(name), std::move(scope), ok, false, std::move(detail)});
  };
  auto skip = [&](std::string name, std::string why) {
    rep.checks.push_back({std::move(name), detail::scope_of(cfg), true, true, std::move(why)});
  };
  const auto grid = numeric::linspace(0.0, 1.0, 101);
  const auto inner = detail::interior_grid(101);

  // --- analytics invariants -------------------------------------------------
  if (n > 1) {
    double worst = 0.0;
    for (double g : {0.0, 1.0})
      worst = std::max(worst, std::abs(f.delta(ForgivenessRate(g), cfg.rate(), cfg) -
                                       (cfg.rate() / cfg.players() - 1.0)));
    add("analytics.boundary_identity", detail::scope_of(cfg), worst < 1e-9,
        "max err " + detail::io_fmt(worst));
    bool dominance = true;
    bool above_one = true;
    const double d0 = f.delta(ForgivenessRate(0.0), cfg.rate(), cfg);
    for (double g : inner) {
      dominance = dominance && f.delta(ForgivenessRate(g), cfg.rate(), cfg) > d0;
      for (int t = 1; t < b; ++t)
        above_one = above_one && f.phi_defection(ForgivenessRate(g), Position(t), cfg) > 1.0;
    }
    if (b > 2)
      add("analytics.interior_dominance", detail::scope_of(cfg), dominance);
    else
      skip("analytics.interior_dominance", "b = 2: Delta is flat");
    add("analytics.defection_phi_above_one", detail::scope_of(cfg), above_one);
  } else {
    skip("analytics.boundary_identity", "n = 1");
    skip("analytics.interior_dominance", "n = 1");
    skip("analytics.defection_phi_above_one", "n = 1");
  }
  {
    bool mono = true;
    bool clean_ge = true;
    double norm_err = 0.0;
    for (double g : grid) {
      const ForgivenessRate rate(g);
      double sum = 0.0;
      for (int t = 1; t <= b; ++t) {
        const double pc = f.phi_clean(rate, Position(t), cfg);
        const double pd = f.phi_defection(rate, Position(t), cfg);
        clean_ge = clean_ge && pc >= pd - 1e-12;
        if (t < b) {
          mono = mono && f.phi_clean(rate, Position(t + 1), cfg) <= pc + 1e-12 &&
                 f.phi_defection(rate, Position(t + 1), cfg) <= pd + 1e-12;
        }
        if (t >= 2) sum += f.psi(rate, Position(t), cfg);
      }
      norm_err = std::max(norm_err, std::abs(sum - 1.0));
    }
    add("analytics.phi_decreasing_in_t", detail::scope_of(cfg), mono);
    add("analytics.clean_ge_defection", detail::scope_of(cfg), clean_ge);
    add("analytics.psi_normalization", detail::scope_of(cfg), norm_err < 1e-12,
        "max err " + detail::io_fmt(norm_err));
  }
  {
    const GameConfig single = GameConfig::make(b, 1, 1, std::min(1.5, b - 0.5));
    double worst = 0.0;
    for (double g : grid)
      for (int t = 1; t <= b; ++t) {
        const double reference =
            g == 0.0 ? b - t + 1.0 : (1.0 - numeric::ipow(1.0 - g, b - t + 1)) / g;
        worst = std::max(worst,
                         std::abs(f.phi_defection(ForgivenessRate(g), Position(t), single) - reference));
      }
    add("analytics.single_player_reduction", detail::scope_of(single), worst < 1e-12,
        "max err " + detail::io_fmt(worst));
  }
  {
    const ForgivenessRate tiny(1e-8);
    double worst = 0.0;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    for (int t = 1; t <= b; ++t) {
      worst = std::max(worst, rel(f.phi_clean(tiny, Position(t), cfg), (b - t) * 1.0 * n + 1.0));
      worst = std::max(worst, rel(f.phi_defection(tiny, Position(t), cfg), n > 1 ? 1.0 : b - t + 1.0));
      if (t >= 2)
        worst = std::max(worst, rel(f.psi(tiny, Position(t), cfg), 2.0 * (t - 1) / (b * (b - 1.0))));
    }
    add("analytics.limit_consistency", detail::scope_of(cfg), worst < 1e-5,
        "max rel err " + detail::io_fmt(worst));
  }

  // --- exact enumeration ----------------------------------------------------
  {
    const int max_b = full ? kExactMaxGroups : 4;
    const int max_n = full ? kExactMaxGroupSize : 3;
    std::vector<GameConfig> configs;
    for (int bb = 2; bb <= max_b; ++bb)
      for (int nn = 1; nn <= max_n; ++nn) configs.push_back(GameConfig::make(bb, nn, 1, 1.5));
    if (b <= kExactMaxGroups && n <= kExactMaxGroupSize && (b > max_b || n > max_n))
      configs.push_back(cfg);
    double worst = 0.0;
    int cases = 0;
    for (const auto& c : configs)
      for (double g : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (int t = 1; t <= c.groups(); ++t) {
          const ForgivenessRate rate(g);
          const auto clean = enumerate_exact(c, g, SampleClass::kCleanFull, Position(t));
          worst = std::max(worst, std::abs(clean.phi - f.phi_clean(rate, Position(t), c)));
          ++cases;
          if (t >= 2) {
            const auto def = enumerate_exact(c, g, SampleClass::kContainsDefection, Position(t));
            worst = std::max(worst, std::abs(def.phi - f.phi_defection(rate, Position(t), c)));
            ++cases;
          }
        }
    add("oracle.exact_enumeration",
        "b<=" + std::to_string(max_b) + " n<=" + std::to_string(max_n), worst < 1e-10,
        std::to_string(cases) + " cases, max err " + detail::io_fmt(worst));
  }

  // --- Monte Carlo ----------------------------------------------------------
  {
    const std::int64_t reps = full ? 100000 : 20000;
    int misses = 0;
    int cases = 0;
    double worst_z = 0.0;
    for (double g : {0.2, 0.5, 0.8})
      for (int t = 1; t <= b; ++t)
        for (auto cls : {SampleClass::kCleanFull, SampleClass::kContainsDefection}) {
          if (cls == SampleClass::kContainsDefection && t < 2) continue;
          const ForgivenessRate rate(g);
          const auto est = estimate_phi(cfg, rate, Position(t), cls, reps,
                                        opt.seed + static_cast<std::uint64_t>(cases), opt.workers);
          const double exact = cls == SampleClass::kCleanFull ? f.phi_clean(rate, Position(t), cfg)
                                                              : f.phi_defection(rate, Position(t), cfg);
          const double gap = std::abs(est.mean - exact);
          if (gap > 3.0 * est.std_error + 1e-12) ++misses;
          if (est.std_error > 0.0) worst_z = std::max(worst_z, gap / est.std_error);
          ++cases;
        }
    add("montecarlo.phi_within_3se", detail::scope_of(cfg), misses == 0,
        std::to_string(cases) + " cases, " + std::to_string(reps) + " reps, max z " +
            detail::io_fmt(worst_z));
  }
  {
    const std::int64_t reps = full ? 2000000 : 1000000;
    const ForgivenessRate rate(0.5);
    std::vector<double> target;
    for (int t = 2; t <= b; ++t) target.push_back(f.psi(rate, Position(t), cfg));
    auto tv = [&](const PsiEstimate& e) {
      double d = 0.0;
      for (std::size_t i = 0; i < target.size(); ++i) d += std::abs(e.frequency[i] - target[i]);
      return 0.5 * d;
    };
    const auto coarse = estimate_psi(cfg, rate, 1e-2, reps, opt.seed, opt.workers);
    const auto fine = estimate_psi(cfg, rate, 1e-3, reps, opt.seed + 1, opt.workers);
    if (!coarse.ok() || !fine.ok()) {
      add("montecarlo.psi_tremble_chain", detail::scope_of(cfg), false, "insufficient data");
      add("montecarlo.psi_tremble_trend", detail::scope_of(cfg), false, "insufficient data");
    } else {
      double worst_z = 0.0;
      bool within = true;
      for (const auto* e : {&coarse, &fine}) {
        const auto exact = psi_under_trembles(cfg, rate, e->epsilon);
        for (std::size_t i = 0; i < exact.size(); ++i) {
          const double gap = std::abs(e->frequency[i] - exact[i]);
          within = within && gap <= 4.0 * e->std_error[i] + 1e-12;
          if (e->std_error[i] > 0.0) worst_z = std::max(worst_z, gap / e->std_error[i]);
        }
      }
      add("montecarlo.psi_tremble_chain", detail::scope_of(cfg), within,
          "max z " + detail::io_fmt(worst_z));
      const double d1 = tv(coarse);
      const double d2 = tv(fine);
      double noise = 0.0;
      for (double se : coarse.std_error) noise += 0.5 * se;
      const std::string note = "TV eps=1e-2: " + detail::io_fmt(d1) + ", eps=1e-3: " + detail::io_fmt(d2);
      if (d1 <= 3.0 * noise)
        skip("montecarlo.psi_tremble_trend", note + " (eps=1e-2 bias within noise)");
      else
        add("montecarlo.psi_tremble_trend", detail::scope_of(cfg), d2 < d1, note);
    }
  }

  // --- equilibrium ----------------------------------------------------------
  if (n > 1 && b == 2) {
    skip("equilibrium.r_sharp_backsubstitution", "b = 2: r# = N");
    skip("equilibrium.mixed_roots", "b = 2: no interior incentive");
  } else if (n > 1) {
    const auto sharp = find_r_sharp(cfg);
    add("equilibrium.r_sharp_backsubstitution", detail::scope_of(cfg),
        sharp.value < cfg.players() && std::abs(sharp.residual) < 1e-9,
        "r#=" + detail::io_fmt(sharp.value));
    const double r = sharp.value + 0.5 * (cfg.players() - sharp.value);
    const auto roots = find_mixed_roots(r, cfg);
    bool ok = roots.present() && roots.lower->gamma < roots.peak.gamma0 &&
              roots.peak.gamma0 < roots.upper->gamma;
    if (ok)
      for (const auto& root : roots.all_roots)
        ok = ok && std::abs(f.delta(ForgivenessRate(root.gamma), r, cfg)) < 1e-10;
    add("equilibrium.mixed_roots", detail::scope_of(cfg), ok, "r=" + detail::io_fmt(r));
  } else {
    skip("equilibrium.r_sharp_backsubstitution", "n = 1");
    skip("equilibrium.mixed_roots", "n = 1");
  }
  {
    bool ok = true;
    for (double g : grid) {
      if (g == 1.0) continue;
      const ForgivenessRate rate(g);
      double first = f.phi_clean(rate, Position(1), cfg);
      double mean = 0.0;
      for (int t = 2; t <= b; ++t) mean += f.phi_clean(rate, Position(t), cfg);
      mean /= b - 1;
      ok = ok && first > mean && mean >= f.incentive(rate, cfg) - 1e-12;
    }
    add("equilibrium.incentive_ordering", detail::scope_of(cfg), ok);
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace groupgoods
