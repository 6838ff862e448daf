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

// Batch commands behind the command-line tool. Each returns its printable
// output and exit code instead of touching stdout, so tests can call them.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "groupgoods/analytics.hpp"
#include "groupgoods/equilibrium.hpp"
#include "groupgoods/io.hpp"
#include "groupgoods/simulator.hpp"
#include "groupgoods/verify.hpp"

namespace groupgoods {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitInternal = 2,
  kExitInsufficientData = 3,
};

enum class Format { kCsv, kJson };

struct CommandOutput {
  int exit_code = kExitOk;
  std::string text;                // what goes to stdout
  std::vector<std::string> files;  // files written
};

namespace detail {

inline std::string fixed(double x, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
  return buf;
}

// Writes to `path` when given, otherwise returns the text for stdout.
inline void emit(CommandOutput& out, const std::optional<std::string>& path,
                 const std::string& text) {
  if (path) {
    io::write_file(*path, text);
    out.files.push_back(*path);
  } else {
    out.text += text;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Both pure-strategy thresholds, which one applies for the configured m,
/// feasibility, and the r-interval on which the pure profile is sustained.
inline CommandOutput cmd_thresholds(const GameConfig& config, Format format = Format::kCsv) {
  const auto sampled = detail::sampled_threshold(config);
  const auto single = detail::single_sample_threshold(config);
  const bool m_gt_1 = config.sample_size() > 1;
  const Threshold& applicable = m_gt_1 ? sampled : single;
  const bool literature = !m_gt_1 && config.group_size() == 1;

  std::string interval;
  double lo = applicable.value;
  double hi = config.players();
  if (literature) {
    lo = 2.0;
    hi = 3.0 - 3.0 / (config.players() + 1.0);
    interval = "[2, " + detail::fixed(hi) + "] (literature, single-player groups)";
  } else if (applicable.feasible) {
    interval = "[" + detail::fixed(lo) + ", " + detail::fixed(hi) + ")";
  } else {
    interval = "empty";
  }

  CommandOutput out;
  if (format == Format::kJson) {
    nlohmann::json j;
    j["config"] = io::to_json(config);
    j["sampled"] = io::to_json(sampled);
    j["sampled"]["formula"] = "2N/(N-n(m+1)+2)";
    j["sampled"]["applies"] = m_gt_1;
    j["single_sample"] = io::to_json(single);
    j["single_sample"]["formula"] = "2N/(N-2(n-1))";
    j["single_sample"]["applies"] = !m_gt_1;
    j["pure_interval"] = interval;
    j["literature_sourced"] = literature;
    j["r_in_interval"] = !interval.empty() && interval != "empty" && config.rate() >= lo &&
                         (literature ? config.rate() <= hi : config.rate() < hi);
    out.text = j.dump(2) + "\n";
    return out;
  }
  std::ostringstream s;
  s << "rule,formula,value,feasible,applies\n";
  auto row = [&](const char* name, const char* formula, const Threshold& th, bool applies) {
    s << name << ',' << formula << ','
      << (std::isfinite(th.value) ? io::exact(th.value) : std::string("inf")) << ','
      << (th.feasible ? "yes" : "no") << ',' << (applies ? "yes" : "no") << '\n';
  };
  row("sampled_m_gt_1", "2N/(N-n(m+1)+2)", sampled, m_gt_1);
  row("single_sample_m_eq_1", "2N/(N-2(n-1))", single, !m_gt_1);
  s << "# pure-equilibrium r interval: " << interval << "\n";
  if (!applicable.feasible && !literature) s << "# infeasible: " << applicable.note << "\n";
  out.text = s.str();
  return out;
}

/// Delta on a grid over [0, 1] plus a summary (gamma0, Delta max, roots).
inline CommandOutput cmd_delta_curve(const GameConfig& config, double r, int grid,
                                     const SolverSettings& settings = {},
                                     const std::optional<std::string>& out_path = std::nullopt,
                                     Format format = Format::kCsv) {
  if (grid < 2) throw std::invalid_argument("--grid must be at least 2");
  RunManifest manifest{"delta-curve", config, settings, std::nullopt, {}, kVersion, {}};
  if (out_path) manifest.outputs.push_back(*out_path);
  manifest.notes.push_back("r=" + io::exact(r));

  std::vector<std::string> summary;
  if (config.group_size() > 1) {
    const auto peak = find_delta_max(r, config, settings);
    summary.push_back("gamma0=" + io::exact(peak.gamma0) + " delta_max=" + io::exact(peak.delta_max));
    if (r > 0.0 && r < config.players()) {
      const auto roots = find_mixed_roots(r, config, settings);
      std::string line = "mixed=" + std::string(to_string(roots.kind)) +
                         " r_sharp=" + io::exact(roots.r_sharp);
      for (const auto& root : roots.all_roots) line += " root=" + io::exact(root.gamma);
      summary.push_back(line);
    }
  } else {
    std::string line = "sign_changes";
    for (const auto& root : delta_sign_changes(r, config, settings))
      line += " root=" + io::exact(root.gamma);
    summary.push_back(line);
  }
  for (const auto& line : summary) manifest.notes.push_back("summary " + line);

  const auto curve = io::delta_curve(r, config, grid);
  CommandOutput out;
  std::string body;
  if (format == Format::kJson) {
    nlohmann::json j;
    j["manifest"] = io::to_json(manifest);
    j["gamma"] = nlohmann::json::array();
    j["delta"] = nlohmann::json::array();
    for (const auto& p : curve) {
      j["gamma"].push_back(p.gamma);
      j["delta"].push_back(p.delta);
    }
    body = j.dump(2) + "\n";
  } else {
    body = io::curve_csv(manifest, curve);
  }
  detail::emit(out, out_path, body);
  if (out_path)
    for (const auto& line : summary) out.text += line + "\n";
  return out;
}

/// Equilibrium report at the configuration's r, as JSON.
inline CommandOutput cmd_equilibria(const GameConfig& config, const SolverSettings& settings = {},
                                    const std::optional<std::string>& out_path = std::nullopt) {
  const auto report = analyze(config, settings);
  RunManifest manifest{"equilibria", config, settings, std::nullopt, {}, kVersion, {}};
  if (out_path) manifest.outputs.push_back(*out_path);
  auto j = io::to_json(report);
  j["manifest"] = io::to_json(manifest);
  CommandOutput out;
  detail::emit(out, out_path, j.dump(2) + "\n");
  return out;
}

/// Oracle suite; exit code 2 when any check fails.
inline CommandOutput cmd_verify(const GameConfig& config, const VerifyOptions& options = {}) {
  const auto report = run_verification(config, options);
  CommandOutput out;
  out.text = report.table();
  const bool ok = report.all_passed();
  out.text += std::string(ok ? "all checks passed" : "verification FAILED") + " in " +
              detail::fixed(report.seconds, 3) + " s\n";
  out.exit_code = ok ? kExitOk : kExitInternal;
  return out;
}

struct Figure1Options {
  int solid_groups = 4;
  int solid_group_size = 5;
  int dashed_groups = 20;
  int dashed_group_size = 1;
  std::optional<double> r;  // default: smallest integer above r# of the solid curve
  int grid = 201;
  std::string out_dir = ".";
  SolverSettings settings;
};

struct Figure1Result {
  double r = 0.0;
  double r_sharp = 0.0;
  std::string solid_path;
  std::string dashed_path;
  MixedRoots solid_roots;
  std::vector<Root> dashed_roots;
};

/// Two Delta curves on a shared r: groups of n = 5 (solid) and single-player
/// groups (dashed), both with N = 20 by default.
inline Figure1Result figure1(const Figure1Options& opt) {
  const auto solid_probe = GameConfig::make(opt.solid_groups, opt.solid_group_size, 1, 1.5);
  const double r_sharp = find_r_sharp(solid_probe, opt.settings).value;
  Figure1Result res;
  res.r = opt.r.value_or(std::floor(r_sharp) + 1.0);
  res.r_sharp = r_sharp;
  const auto solid = solid_probe.with_rate(res.r);
  const auto dashed = GameConfig::make(opt.dashed_groups, opt.dashed_group_size, 1, res.r);
  res.solid_roots = find_mixed_roots(res.r, solid, opt.settings);
  res.dashed_roots = delta_sign_changes(res.r, dashed, opt.settings);

  std::filesystem::create_directories(opt.out_dir);
  const auto dir = std::filesystem::path(opt.out_dir);
  res.solid_path = (dir / ("figure1_solid_n" + std::to_string(opt.solid_group_size) + ".csv")).string();
  res.dashed_path = (dir / ("figure1_dashed_n" + std::to_string(opt.dashed_group_size) + ".csv")).string();
  const std::string note =
      "figure parameters (N, b, r) are chosen here; these defaults are a reconstruction";
  RunManifest ms{"figure1", solid, opt.settings, std::nullopt, {res.solid_path}, kVersion, {note}};
  RunManifest md{"figure1", dashed, opt.settings, std::nullopt, {res.dashed_path}, kVersion, {note}};
  io::write_file(res.solid_path, io::curve_csv(ms, io::delta_curve(res.r, solid, opt.grid)));
  io::write_file(res.dashed_path, io::curve_csv(md, io::delta_curve(res.r, dashed, opt.grid)));
  return res;
}

inline CommandOutput cmd_figure1(const Figure1Options& opt) {
  const auto res = figure1(opt);
  CommandOutput out;
  out.files = {res.solid_path, res.dashed_path};
  std::ostringstream s;
  s << "r=" << io::exact(res.r) << " (r_sharp of solid curve " << io::exact(res.r_sharp) << ")\n";
  s << "solid  n=" << opt.solid_group_size << ": " << to_string(res.solid_roots.kind);
  for (const auto& root : res.solid_roots.all_roots) s << " root=" << io::exact(root.gamma);
  s << " gamma0=" << io::exact(res.solid_roots.peak.gamma0) << "\n";
  s << "dashed n=" << opt.dashed_group_size << ":";
  for (const auto& root : res.dashed_roots) s << " root=" << io::exact(root.gamma);
  s << "\nwrote " << res.solid_path << "\nwrote " << res.dashed_path << "\n";
  s << "note: figure parameters (N, b, r) are reconstruction defaults\n";
  out.text = s.str();
  return out;
}

struct SimulateOptions {
  std::string quantity = "phi-defection";  // phi-clean, phi-defection, psi, payoff
  double gamma = 0.5;
  double epsilon = 0.01;
  std::optional<int> position;
  std::int64_t replications = 100000;
  std::uint64_t seed = 20261018;
  unsigned workers = 0;
  Format format = Format::kCsv;
  std::optional<std::string> out_path;
};

inline CommandOutput cmd_simulate(const GameConfig& config, const SimulateOptions& opt) {
  const ForgivenessRate rate(opt.gamma);
  std::vector<io::SimRow> rows;
  auto row = [&](std::optional<int> t, double mean, double se, double eps) {
    rows.push_back({config, opt.quantity, opt.gamma, eps, t, mean, se, opt.replications, opt.seed});
  };
  CommandOutput out;
  if (opt.quantity == "phi-clean" || opt.quantity == "phi-defection") {
    const bool clean = opt.quantity == "phi-clean";
    const int first = opt.position.value_or(clean ? 1 : 2);
    const int last = opt.position.value_or(config.groups());
    for (int t = first; t <= last; ++t) {
      const auto cls = clean ? SampleClass::kCleanFull : SampleClass::kContainsDefection;
      const auto est = estimate_phi(config, rate, Position(t, config), cls, opt.replications,
                                    opt.seed, opt.workers);
      row(t, est.mean, est.std_error, 0.0);
    }
  } else if (opt.quantity == "psi") {
    const auto est = estimate_psi(config, rate, opt.epsilon, opt.replications, opt.seed, opt.workers);
    if (!est.ok()) {
      out.exit_code = kExitInsufficientData;
      out.text = "insufficient data: no player observed a defection in " +
                 std::to_string(opt.replications) + " games\n";
      return out;
    }
    for (std::size_t i = 0; i < est.frequency.size(); ++i)
      row(static_cast<int>(i) + 2, est.frequency[i], est.std_error[i], opt.epsilon);
  } else if (opt.quantity == "payoff") {
    const auto est = tremble_payoff(config, rate, opt.epsilon, opt.replications, opt.seed, opt.workers);
    row(std::nullopt, est.mean, est.std_error, opt.epsilon);
  } else {
    throw std::invalid_argument("unknown quantity '" + opt.quantity +
                                "' (expected phi-clean, phi-defection, psi or payoff)");
  }

  RunManifest manifest{"simulate", config, {}, opt.seed, {}, kVersion, {"quantity=" + opt.quantity}};
  if (opt.out_path) manifest.outputs.push_back(*opt.out_path);
  std::string body;
  if (opt.format == Format::kJson) {
    nlohmann::json j;
    j["manifest"] = io::to_json(manifest);
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
      j["rows"].push_back({{"quantity", r.quantity}, {"gamma", r.gamma}, {"epsilon", r.epsilon},
                           {"t", r.position ? nlohmann::json(*r.position) : nlohmann::json(nullptr)},
                           {"mean", r.mean}, {"std_error", r.std_error},
                           {"replications", r.replications}, {"seed", r.seed}});
    body = j.dump(2) + "\n";
  } else {
    body = io::sim_csv(manifest, rows);
  }
  detail::emit(out, opt.out_path, body);
  return out;
}

}  // namespace groupgoods
