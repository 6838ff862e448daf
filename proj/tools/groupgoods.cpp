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

// groupgoods: command-line front end.
//
//   groupgoods thresholds  --N 20 --b 4 --n 5 --m 1
//   groupgoods delta-curve --b 4 --n 5 --r 16 --grid 201 --out delta.csv
//   groupgoods equilibria  --b 4 --n 5 --r 16.5546
//   groupgoods verify      --level full
//   groupgoods figure1     --out figures/
//   groupgoods simulate    --quantity psi --gamma 0.5 --epsilon 0.01 --reps 100000
//
// Exit codes: 0 ok, 1 invalid input, 2 internal inconsistency or failed
// verification, 3 insufficient simulation data.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "groupgoods/commands.hpp"

namespace gg = groupgoods;

namespace {

struct Options {
  std::optional<long long> players, groups, group_size, sample_size;
  std::optional<std::string> rate;
  std::optional<std::string> config_path;
  double gamma = 0.5;
  double epsilon = 0.01;
  std::int64_t reps = 100000;
  std::uint64_t seed = 20261018;
  int grid = 201;
  std::optional<std::string> out;
  std::string format = "csv";
  std::string level = "fast";
  std::string quantity = "phi-defection";
  std::optional<int> position;
  unsigned workers = 0;
  std::string corrupt;
};

void print_violations(const std::vector<gg::Violation>& violations) {
  std::cerr << "invalid configuration:\n";
  for (const auto& v : violations) std::cerr << "  " << v.field << ": " << v.message << "\n";
}

// Config file first, then explicit flags on top, then defaults b=4 n=5 m=1
// and r=16 (or (N+1)/2 when N <= 16).
gg::ValidationResult resolve_config(const Options& o) {
  gg::RawConfig raw;
  std::vector<gg::Violation> problems;
  if (o.config_path) {
    try {
      raw = gg::parse_config_text(gg::io::read_file(*o.config_path), problems);
    } catch (const std::exception& e) {
      return {std::nullopt, {{"config", e.what()}}};
    }
  }
  if (o.players) raw.players = *o.players;
  if (o.groups) raw.groups = *o.groups;
  if (o.group_size) raw.group_size = *o.group_size;
  if (o.sample_size) raw.sample_size = *o.sample_size;
  if (o.rate) {
    if (auto v = gg::detail::parse_double(*o.rate)) {
      raw.rate = *v;
      raw.rate_text = *o.rate;
    } else {
      problems.push_back({"r", "not a decimal number: '" + *o.rate + "'"});
    }
  }
  if (!raw.groups) raw.groups = 4;
  if (!raw.group_size) raw.group_size = 5;
  if (!raw.sample_size) raw.sample_size = 1;
  if (!raw.rate && problems.empty()) {
    const long long players = raw.players.value_or(*raw.groups * *raw.group_size);
    raw.rate = players > 16 ? 16.0 : (static_cast<double>(players) + 1.0) / 2.0;
    raw.rate_text = gg::detail::shortest_decimal(*raw.rate);
  }
  return gg::validate_raw(raw, std::move(problems));
}

gg::Format parse_format(const std::string& s) {
  return s == "json" ? gg::Format::kJson : gg::Format::kCsv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential public goods game with group sampling: thresholds, "
               "equilibria, Delta curves and simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gg::kVersion));

  Options o;
  app.add_option("--N", o.players, "total players N (default n*b)");
  app.add_option("--b", o.groups, "number of groups b (default 4)");
  app.add_option("--n", o.group_size, "group size n (default 5)");
  app.add_option("--m", o.sample_size, "sample size m, 1 <= m < b (default 1)");
  app.add_option("--r", o.rate, "rate of return r, 1 < r < N (default 16, or (N+1)/2 if N <= 16)");
  app.add_option("--config", o.config_path, "key = value config file; explicit flags override it");
  app.add_option("--gamma", o.gamma, "forgiveness probability")->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "tremble probability")->capture_default_str();
  app.add_option("--reps", o.reps, "replications")->capture_default_str();
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--grid", o.grid, "number of gamma grid points")->capture_default_str();
  app.add_option("--out", o.out, "output file (figure1: output directory)");
  app.add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--workers", o.workers, "worker threads (0 = hardware)");

  auto* thresholds = app.add_subcommand("thresholds", "pure-strategy thresholds and feasibility");
  auto* curve = app.add_subcommand("delta-curve", "Delta(gamma) on a grid plus gamma0, max and roots");
  auto* equilibria = app.add_subcommand("equilibria", "equilibrium report as JSON");
  auto* verify = app.add_subcommand("verify", "oracle and invariant suite");
  verify->add_option("--level", o.level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}))
      ->capture_default_str();
  verify->add_option("--corrupt", o.corrupt)->group("");  // negative-control hook
  auto* fig = app.add_subcommand("figure1", "the two Delta curves (n=5 solid, n=1 dashed)");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates");
  sim->add_option("--quantity", o.quantity, "phi-clean, phi-defection, psi or payoff")
      ->check(CLI::IsMember({"phi-clean", "phi-defection", "psi", "payoff"}))
      ->capture_default_str();
  sim->add_option("--t", o.position, "position (phi only; default all)");
  for (auto* sub : {thresholds, curve, equilibria, verify, fig, sim}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? gg::kExitOk : gg::kExitValidation;
  }

  try {
    gg::CommandOutput out;
    if (fig->parsed()) {
      gg::Figure1Options f;
      if (o.rate) {
        auto r = gg::detail::parse_double(*o.rate);
        if (!r) throw std::invalid_argument("--r: not a decimal number");
        f.r = *r;
      }
      f.grid = o.grid;
      if (o.out) f.out_dir = *o.out;
      out = gg::cmd_figure1(f);
    } else {
      const auto resolved = resolve_config(o);
      if (!resolved.ok()) {
        print_violations(resolved.violations);
        return gg::kExitValidation;
      }
      const auto& cfg = resolved.value();
      const auto format = parse_format(o.format);
      if (thresholds->parsed()) {
        out = gg::cmd_thresholds(cfg, format);
      } else if (curve->parsed()) {
        out = gg::cmd_delta_curve(cfg, cfg.rate(), o.grid, {}, o.out, format);
      } else if (equilibria->parsed()) {
        out = gg::cmd_equilibria(cfg, {}, o.out);
      } else if (verify->parsed()) {
        gg::VerifyOptions v;
        v.level = o.level == "full" ? gg::VerifyLevel::kFull : gg::VerifyLevel::kFast;
        v.seed = o.seed;
        v.workers = o.workers;
        v.corrupt = o.corrupt;
        out = gg::cmd_verify(cfg, v);
      } else if (sim->parsed()) {
        gg::SimulateOptions s;
        s.quantity = o.quantity;
        s.gamma = o.gamma;
        s.epsilon = o.epsilon;
        s.position = o.position;
        s.replications = o.reps;
        s.seed = o.seed;
        s.workers = o.workers;
        s.format = format;
        s.out_path = o.out;
        out = gg::cmd_simulate(cfg, s);
      }
    }
    std::cout << out.text;
    for (const auto& f : out.files)
      if (out.text.find(f) == std::string::npos) std::cerr << "wrote " << f << "\n";
    return out.exit_code;
  } catch (const gg::ConfigError& e) {
    print_violations(e.violations());
    return gg::kExitValidation;
  } catch (const gg::InternalInconsistency& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return gg::kExitInternal;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return gg::kExitValidation;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return gg::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gg::kExitInternal;
  }
}
