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

// Domain types of the grouped public-goods game: configuration, actions,
// group histories, samples and the one-shot payoff.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace groupgoods {

enum class Action : std::uint8_t { kContribute, kDefect };

inline constexpr std::string_view to_string(Action a) {
  return a == Action::kContribute ? "C" : "D";
}

/// One violated configuration invariant.
struct Violation {
  std::string field;
  std::string message;
};

/// Raised when a configuration is constructed from invalid values.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<Violation> violations)
      : std::invalid_argument(describe(violations)),
        violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

  static std::string describe(const std::vector<Violation>& v) {
    std::string out = "invalid game configuration:";
    for (const auto& x : v) out += " [" + x.field + "] " + x.message + ";";
    return out;
  }

 private:
  std::vector<Violation> violations_;
};

namespace detail {

// Shortest decimal text that parses back to exactly `x`.
inline std::string shortest_decimal(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace detail

struct ValidationResult;

ValidationResult validate_config(long long players, long long groups,
                                 long long group_size, long long sample_size,
                                 double rate, std::string rate_text = {});

/// The tuple (N, b, n, m, r). Only obtainable through validate_config, so a
/// GameConfig value always satisfies N = n*b, b >= 2, 1 <= m < b, 1 < r < N.
class GameConfig {
 public:
  /// Throwing convenience constructor; N is derived as n*b.
  static GameConfig make(int groups, int group_size, int sample_size, double rate);

  int players() const { return players_; }
  int groups() const { return groups_; }
  int group_size() const { return group_size_; }
  int sample_size() const { return sample_size_; }
  double rate() const { return rate_; }
  /// Decimal text of r exactly as supplied (or its shortest round-trip form).
  const std::string& rate_text() const { return rate_text_; }

  /// Same game with a different rate of return (re-validated).
  GameConfig with_rate(double rate) const;

  friend bool operator==(const GameConfig& a, const GameConfig& b) {
    return a.players_ == b.players_ && a.groups_ == b.groups_ &&
           a.group_size_ == b.group_size_ && a.sample_size_ == b.sample_size_ &&
           a.rate_ == b.rate_;
  }

 private:
  friend ValidationResult validate_config(long long, long long, long long, long long,
                                          double, std::string);
  GameConfig(int players, int groups, int group_size, int sample_size, double rate,
             std::string rate_text)
      : players_(players),
        groups_(groups),
        group_size_(group_size),
        sample_size_(sample_size),
        rate_(rate),
        rate_text_(std::move(rate_text)) {}

  int players_;
  int groups_;
  int group_size_;
  int sample_size_;
  double rate_;
  std::string rate_text_;
};

/// Outcome of validate_config: either a configuration or every violated
/// invariant, never both.
struct ValidationResult {
  std::optional<GameConfig> config;
  std::vector<Violation> violations;

  bool ok() const { return config.has_value(); }
  const GameConfig& value() const;
};

inline const GameConfig& ValidationResult::value() const {
  if (!config) throw ConfigError(violations);
  return *config;
}

inline ValidationResult validate_config(long long players, long long groups,
                                        long long group_size, long long sample_size,
                                        double rate, std::string rate_text) {
  constexpr long long kMaxCount = 1'000'000;
  ValidationResult out;
  auto& v = out.violations;
  if (players < 1 || players > kMaxCount) v.push_back({"N", "must be in [1, 1e6]"});
  if (groups < 2 || groups > kMaxCount) v.push_back({"b", "must be at least 2"});
  if (group_size < 1 || group_size > kMaxCount) v.push_back({"n", "must be a positive integer"});
  if (sample_size < 1) v.push_back({"m", "must be at least 1"});
  if (sample_size >= groups)
    v.push_back({"m", "must be smaller than b (otherwise positions are revealed)"});
  if (players != group_size * groups) v.push_back({"N", "must equal n*b"});
  if (!std::isfinite(rate)) {
    v.push_back({"r", "must be finite"});
  } else {
    if (!(rate > 1.0)) v.push_back({"r", "must satisfy r > 1"});
    if (!(rate < static_cast<double>(players))) v.push_back({"r", "must satisfy r < N"});
  }
  if (!v.empty()) return out;
  if (rate_text.empty()) rate_text = detail::shortest_decimal(rate);
  out.config = GameConfig(static_cast<int>(players), static_cast<int>(groups),
                          static_cast<int>(group_size), static_cast<int>(sample_size),
                          rate, std::move(rate_text));
  return out;
}

inline GameConfig GameConfig::make(int groups, int group_size, int sample_size, double rate) {
  return validate_config(static_cast<long long>(groups) * group_size, groups, group_size,
                         sample_size, rate)
      .value();
}

inline GameConfig GameConfig::with_rate(double rate) const {
  return validate_config(players_, groups_, group_size_, sample_size_, rate).value();
}

/// 1-based position of a group in the realized sequence.
class Position {
 public:
  explicit Position(int t) : t_(t) {
    if (t < 1) throw std::domain_error("position must be >= 1");
  }
  Position(int t, const GameConfig& config) : Position(t) { check(config); }

  int value() const { return t_; }
  void check(const GameConfig& config) const {
    if (t_ > config.groups()) throw std::domain_error("position exceeds number of groups");
  }
  friend bool operator==(Position, Position) = default;

 private:
  int t_;
};

/// Observed pair (groups sampled, contributions in those groups).
struct Sample {
  int observed_groups = 0;
  int observed_contributions = 0;

  bool contains_defection(const GameConfig& config) const {
    return observed_contributions < observed_groups * config.group_size();
  }
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Contribution totals g_1, g_2, ... of the groups that have already played.
class GroupHistory {
 public:
  GroupHistory() = default;
  GroupHistory(std::vector<int> contributions, const GameConfig& config) {
    contributions_.reserve(contributions.size());
    for (int g : contributions) push_back(g, config);
  }

  void push_back(int contributions, const GameConfig& config) {
    if (contributions < 0 || contributions > config.group_size())
      throw std::domain_error("group contribution outside [0, n]");
    if (static_cast<int>(contributions_.size()) >= config.groups())
      throw std::domain_error("history longer than the number of groups");
    contributions_.push_back(contributions);
  }

  std::size_t size() const { return contributions_.size(); }
  bool empty() const { return contributions_.empty(); }
  int operator[](std::size_t i) const { return contributions_[i]; }
  const std::vector<int>& contributions() const { return contributions_; }
  int total() const {
    int s = 0;
    for (int g : contributions_) s += g;
    return s;
  }

 private:
  std::vector<int> contributions_;
};

/// Stage payoff of one player: the common fund (own unit included when
/// contributing) returned at rate r/N, less the unit contributed.
inline double payoff(Action action, int others_contributing, const GameConfig& config) {
  if (others_contributing < 0 || others_contributing > config.players() - 1)
    throw std::domain_error("number of other contributors outside [0, N-1]");
  const double n_players = config.players();
  if (action == Action::kContribute)
    return config.rate() * (others_contributing + 1) / n_players - 1.0;
  return config.rate() * others_contributing / n_players;
}

/// Sample handed to every player of group t: the number of groups in the
/// window of the last min(m, t-1) predecessors and their summed contributions.
inline Sample sample_of(const GroupHistory& history, Position t, const GameConfig& config) {
  t.check(config);
  const auto before = static_cast<std::size_t>(t.value() - 1);
  if (history.size() != before)
    throw std::domain_error("history must contain exactly t-1 groups");
  const int window = std::min(config.sample_size(), t.value() - 1);
  Sample s;
  s.observed_groups = window;
  for (std::size_t k = before - static_cast<std::size_t>(window); k < before; ++k)
    s.observed_contributions += history[k];
  return s;
}

// ---------------------------------------------------------------------------
// Flat key-value configuration files:
//
//   # comment
//   N = 20
//   b = 4
//   n = 5
//   m = 1
//   r = 16.5
//
// N may be omitted (it is then n*b). Unknown keys are violations.

struct RawConfig {
  std::optional<long long> players, groups, group_size, sample_size;
  std::optional<double> rate;
  std::string rate_text;
};

/// Parses key-value text into raw (unvalidated) fields. Syntax problems are
/// appended to `problems`.
inline RawConfig parse_config_text(std::string_view text, std::vector<Violation>& problems) {
  RawConfig raw;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back({"line " + std::to_string(lineno), "expected key = value"});
      continue;
    }
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t\r");
      auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto integer = [&](std::optional<long long>& slot) {
      if (auto v = detail::parse_integer(value)) slot = *v;
      else problems.push_back({key, "not an integer: '" + value + "'"});
    };
    if (key == "N") integer(raw.players);
    else if (key == "b") integer(raw.groups);
    else if (key == "n") integer(raw.group_size);
    else if (key == "m") integer(raw.sample_size);
    else if (key == "r") {
      if (auto v = detail::parse_double(value)) {
        raw.rate = *v;
        raw.rate_text = value;
      } else {
        problems.push_back({"r", "not a decimal number: '" + value + "'"});
      }
    } else {
      problems.push_back({key, "unknown key"});
    }
  }
  return raw;
}

/// Validates raw fields; missing required keys are reported as violations.
inline ValidationResult validate_raw(const RawConfig& raw, std::vector<Violation> problems = {}) {
  if (!raw.groups) problems.push_back({"b", "missing"});
  if (!raw.group_size) problems.push_back({"n", "missing"});
  if (!raw.sample_size) problems.push_back({"m", "missing"});
  if (!raw.rate) problems.push_back({"r", "missing"});
  if (!problems.empty()) return ValidationResult{std::nullopt, std::move(problems)};
  const long long players = raw.players.value_or(*raw.groups * *raw.group_size);
  return validate_config(players, *raw.groups, *raw.group_size, *raw.sample_size, *raw.rate,
                         raw.rate_text);
}

inline ValidationResult read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return ValidationResult{std::nullopt, {{"config", "cannot open " + path}}};
  std::stringstream buf;
  buf << in.rdbuf();
  std::vector<Violation> problems;
  RawConfig raw = parse_config_text(buf.str(), problems);
  return validate_raw(raw, std::move(problems));
}

inline std::string to_config_text(const GameConfig& c) {
  std::ostringstream out;
  out << "N = " << c.players() << "\n"
      << "b = " << c.groups() << "\n"
      << "n = " << c.group_size() << "\n"
      << "m = " << c.sample_size() << "\n"
      << "r = " << c.rate_text() << "\n";
  return out.str();
}

}  // namespace groupgoods
