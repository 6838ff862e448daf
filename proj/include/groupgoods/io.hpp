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

// Output formats: CSV with '#' provenance header lines (17 significant
// digits, exact round trip) and JSON reports (15 significant digits).

#pragma once

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "groupgoods/analytics.hpp"
#include "groupgoods/equilibrium.hpp"
#include "groupgoods/game.hpp"
#include "groupgoods/simulator.hpp"

namespace groupgoods {

inline constexpr const char* kVersion = "1.0.0";

/// Provenance stamped into every output file.
struct RunManifest {
  std::string command;
  std::optional<GameConfig> config;
  SolverSettings settings;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
  std::string version = kVersion;
  std::vector<std::string> notes;
};

namespace io {

/// %.17g: parses back to the identical double.
inline std::string exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// x rounded to 15 significant digits (what JSON reports carry).
inline double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return std::strtod(buf, nullptr);
}

inline nlohmann::json real(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round15(x);
}

inline nlohmann::json to_json(const GameConfig& c) {
  return {{"N", c.players()}, {"b", c.groups()}, {"n", c.group_size()},
          {"m", c.sample_size()}, {"r", real(c.rate())}};
}

inline nlohmann::json to_json(const SolverSettings& s) {
  return {{"grid_points", s.grid_points}, {"root_tolerance", real(s.root_tolerance)},
          {"max_iterations", s.max_iterations}, {"bracket_epsilon", real(s.bracket_epsilon)}};
}

inline nlohmann::json to_json(const RunManifest& m) {
  nlohmann::json j = {{"command", m.command}, {"version", m.version},
                      {"settings", to_json(m.settings)}, {"outputs", m.outputs}};
  j["config"] = m.config ? to_json(*m.config) : nlohmann::json(nullptr);
  j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
  if (!m.notes.empty()) j["notes"] = m.notes;
  return j;
}

inline nlohmann::json to_json(const Threshold& t) {
  return {{"value", real(t.value)}, {"denominator", real(t.denominator)},
          {"feasible", t.feasible}, {"note", t.note}};
}

inline nlohmann::json to_json(const Root& r) {
  return {{"gamma", real(r.gamma)}, {"residual", real(r.residual)},
          {"iterations", r.iterations}, {"bracket", {real(r.bracket_lo), real(r.bracket_hi)}}};
}

inline nlohmann::json to_json(const DeltaMax& d) {
  return {{"gamma0", real(d.gamma0)}, {"delta_max", real(d.delta_max)},
          {"incentive_sum", real(d.incentive)}, {"grid_local_maxima", d.grid_local_maxima},
          {"iterations", d.iterations}, {"bracket", {real(d.bracket_lo), real(d.bracket_hi)}}};
}

inline nlohmann::json to_json(const PureVerdict& v) {
  nlohmann::json j = {{"exists", v.exists}, {"binding", v.binding},
                      {"literature_sourced", v.literature_sourced}, {"condition", v.condition}};
  j["threshold"] = v.threshold ? to_json(*v.threshold) : nlohmann::json(nullptr);
  j["delta_at_zero"] = v.delta_at_zero ? real(*v.delta_at_zero) : nlohmann::json(nullptr);
  if (v.interval_lo) j["interval"] = {real(*v.interval_lo), real(*v.interval_hi)};
  return j;
}

/// Stable field names; reals carry 15 significant digits.
inline nlohmann::json to_json(const EquilibriumReport& rep) {
  nlohmann::json j;
  j["config"] = to_json(rep.config);
  j["r"] = real(rep.r);
  j["pure"] = to_json(rep.pure);
  nlohmann::json mixed = nullptr;
  if (rep.mixed) {
    const auto& m = *rep.mixed;
    mixed = {{"status", std::string(to_string(m.kind))}};
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : m.all_roots) all.push_back(to_json(r));
    mixed["all_roots"] = all;
    mixed["gamma1"] = m.lower ? to_json(*m.lower) : nlohmann::json(nullptr);
    mixed["gamma2"] = m.upper ? to_json(*m.upper) : nlohmann::json(nullptr);
  }
  j["mixed_roots"] = mixed;
  j["r_sharp"] = rep.r_sharp ? real(*rep.r_sharp) : nlohmann::json(nullptr);
  j["delta_max"] = rep.delta_max ? to_json(*rep.delta_max) : nlohmann::json(nullptr);
  j["lemma2_ok"] = rep.lemma2_ok;
  j["lemma2_points"] = rep.lemma2_points;
  j["settings"] = to_json(rep.settings);
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string manifest_header(const RunManifest& m) {
  std::ostringstream out;
  out << "# groupgoods " << m.version << " command=" << m.command << "\n";
  if (m.config) {
    const auto& c = *m.config;
    out << "# config N=" << c.players() << " b=" << c.groups() << " n=" << c.group_size()
        << " m=" << c.sample_size() << " r=" << exact(c.rate()) << "\n";
  }
  out << "# settings grid_points=" << m.settings.grid_points
      << " root_tolerance=" << exact(m.settings.root_tolerance)
      << " max_iterations=" << m.settings.max_iterations
      << " bracket_epsilon=" << exact(m.settings.bracket_epsilon) << "\n";
  if (m.seed) out << "# seed " << *m.seed << "\n";
  for (const auto& o : m.outputs) out << "# output " << o << "\n";
  for (const auto& note : m.notes) out << "# note " << note << "\n";
  return out.str();
}

struct CurvePoint {
  double gamma = 0.0;
  double delta = 0.0;
};

/// Delta on `points` equally spaced nodes of [0, 1], endpoints exact.
inline std::vector<CurvePoint> delta_curve(double r, const GameConfig& config, int points) {
  std::vector<CurvePoint> curve;
  for (double g : numeric::linspace(0.0, 1.0, points))
    curve.push_back({g, delta(ForgivenessRate(g), r, config)});
  return curve;
}

inline std::string curve_csv(const RunManifest& m, const std::vector<CurvePoint>& curve) {
  std::string out = manifest_header(m);
  out += "gamma,delta\n";
  for (const auto& p : curve) out += exact(p.gamma) + "," + exact(p.delta) + "\n";
  return out;
}

/// Reads the data rows of a gamma,delta CSV (comment lines skipped).
inline std::vector<CurvePoint> parse_curve_csv(const std::string& text) {
  std::vector<CurvePoint> curve;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line != "gamma,delta") throw std::runtime_error("unexpected curve header: " + line);
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed curve row: " + line);
    auto g = detail::parse_double(std::string_view(line).substr(0, comma));
    auto d = detail::parse_double(std::string_view(line).substr(comma + 1));
    if (!g || !d) throw std::runtime_error("malformed curve row: " + line);
    curve.push_back({*g, *d});
  }
  return curve;
}

/// One simulation estimate as a CSV row.
struct SimRow {
  GameConfig config;
  std::string quantity;  // phi_clean, phi_defection, psi, payoff
  double gamma = 0.0;
  double epsilon = 0.0;
  std::optional<int> position;
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kSimHeader =
    "N,b,n,m,r,quantity,gamma,epsilon,t,mean,std_error,replications,seed";

inline std::string sim_row_csv(const SimRow& row) {
  std::ostringstream out;
  const auto& c = row.config;
  out << c.players() << ',' << c.groups() << ',' << c.group_size() << ',' << c.sample_size()
      << ',' << exact(c.rate()) << ',' << row.quantity << ',' << exact(row.gamma) << ','
      << exact(row.epsilon) << ',' << (row.position ? std::to_string(*row.position) : "") << ','
      << exact(row.mean) << ',' << exact(row.std_error) << ',' << row.replications << ','
      << row.seed;
  return out.str();
}

inline std::string sim_csv(const RunManifest& m, const std::vector<SimRow>& rows) {
  std::string out = manifest_header(m);
  out += kSimHeader;
  out += "\n";
  for (const auto& r : rows) out += sim_row_csv(r) + "\n";
  return out;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

}  // namespace io
}  // namespace groupgoods
