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

// Verification engine independent of the closed forms: Monte Carlo play of
// the full protocol, paired-branch estimates of phi, tremble-conditioned
// position frequencies (psi), exact enumeration on small instances, and
// ex-ante payoffs under mistakes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "groupgoods/analytics.hpp"
#include "groupgoods/game.hpp"
#include "groupgoods/rng.hpp"

namespace groupgoods {

/// Contribution probabilities by sample class, plus a one-sided tremble that
/// turns an intended contribution into a defection with probability eps.
struct StrategyProfile {
  double clean_response = 1.0;
  double forgiveness = 0.0;
  double tremble = 0.0;

  void validate() const {
    auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!unit(clean_response) || !unit(forgiveness))
      throw std::domain_error("strategy probabilities must lie in [0, 1]");
    if (!(tremble >= 0.0 && tremble < 1.0)) throw std::domain_error("tremble must lie in [0, 1)");
  }

  double contribute_probability(SampleClass c) const {
    const double intended = c == SampleClass::kContainsDefection ? forgiveness : clean_response;
    return intended * (1.0 - tremble);
  }

  static StrategyProfile forgiving(double gamma, double eps = 0.0) { return {1.0, gamma, eps}; }
};

struct DeviationTarget {
  Position position;
  int member = 0;  // index within the group, 0-based
};

/// Forces one player's action. With a target, the player at that slot
/// deviates; without one, player 0 deviates wherever Nature places them.
struct DeviationSpec {
  std::optional<DeviationTarget> target;
  Action forced_action = Action::kDefect;
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
  bool low_replications = false;  // fewer than 100 replications
};

struct GameOutcome {
  GroupHistory history;
  std::vector<int> position_of;     // 1-based group position of each player
  std::vector<Action> actions;      // per player
  std::vector<Sample> samples;      // sample each player observed
  std::vector<double> payoffs;      // per player
  int total_contributions = 0;
};

namespace detail {

struct Forced {
  int position;
  int member;
  Action action;
};

// Plays positions history.size()+1 .. b in order. Every member consumes one
// uniform even when forced, so coupled branches stay aligned.
template <class Draw, class OnGroup>
void play_groups(const GameConfig& config, const StrategyProfile& profile, GroupHistory& history,
                 const std::optional<Forced>& forced, Draw&& draw, OnGroup&& on_group) {
  const int n = config.group_size();
  std::vector<Action> acts(static_cast<std::size_t>(n));
  for (int t = static_cast<int>(history.size()) + 1; t <= config.groups(); ++t) {
    const Position pos(t);
    const Sample s = sample_of(history, pos, config);
    const double p = profile.contribute_probability(classify(s, config));
    int g = 0;
    for (int k = 0; k < n; ++k) {
      const double u = draw();
      Action a = u < p ? Action::kContribute : Action::kDefect;
      if (forced && forced->position == t && forced->member == k) a = forced->action;
      acts[static_cast<std::size_t>(k)] = a;
      g += a == Action::kContribute;
    }
    history.push_back(g, config);
    on_group(pos, s, std::span<const Action>(acts));
  }
}

inline SimEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  SimEstimate est;
  est.replications = static_cast<std::int64_t>(values.size());
  est.seed = seed;
  est.low_replications = est.replications < 100;
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(values.size() - 1) /
                              static_cast<double>(values.size()));
  }
  return est;
}

inline GameOutcome simulate_game(const GameConfig& config, const StrategyProfile& profile,
                                 const std::optional<DeviationSpec>& deviation, Stream& rng) {
  profile.validate();
  const int big_n = config.players();
  const int n = config.group_size();
  // Nature: a uniform permutation of players, cut into consecutive groups,
  // is a uniform assignment to groups together with a uniform group order.
  std::vector<int> seat(static_cast<std::size_t>(big_n));
  std::iota(seat.begin(), seat.end(), 0);
  for (int i = big_n - 1; i > 0; --i)
    std::swap(seat[static_cast<std::size_t>(i)],
              seat[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i) + 1))]);

  GameOutcome out;
  out.position_of.resize(static_cast<std::size_t>(big_n));
  out.actions.resize(static_cast<std::size_t>(big_n));
  out.samples.resize(static_cast<std::size_t>(big_n));
  out.payoffs.resize(static_cast<std::size_t>(big_n));
  std::vector<int> slot_of(static_cast<std::size_t>(big_n));
  for (int s = 0; s < big_n; ++s) {
    const int player = seat[static_cast<std::size_t>(s)];
    out.position_of[static_cast<std::size_t>(player)] = s / n + 1;
    slot_of[static_cast<std::size_t>(player)] = s;
  }

  std::optional<Forced> forced;
  if (deviation) {
    if (deviation->target) {
      deviation->target->position.check(config);
      if (deviation->target->member < 0 || deviation->target->member >= n)
        throw std::domain_error("deviation member index outside the group");
      forced = Forced{deviation->target->position.value(), deviation->target->member,
                      deviation->forced_action};
    } else {
      const int s = slot_of[0];
      forced = Forced{s / n + 1, s % n, deviation->forced_action};
    }
  }

  play_groups(config, profile, out.history, forced, [&] { return rng.uniform(); },
              [&](Position pos, const Sample& sample, std::span<const Action> acts) {
                for (int k = 0; k < n; ++k) {
                  const auto player =
                      static_cast<std::size_t>(seat[static_cast<std::size_t>((pos.value() - 1) * n + k)]);
                  out.actions[player] = acts[static_cast<std::size_t>(k)];
                  out.samples[player] = sample;
                }
              });
  out.total_contributions = out.history.total();
  for (int i = 0; i < big_n; ++i) {
    const auto a = out.actions[static_cast<std::size_t>(i)];
    const int others = out.total_contributions - (a == Action::kContribute ? 1 : 0);
    out.payoffs[static_cast<std::size_t>(i)] = payoff(a, others, config);
  }
  return out;
}

}  // namespace detail

/// One play of the game from Nature's draw to payoffs.
inline GameOutcome simulate_game(const GameConfig& config, const StrategyProfile& profile,
                                 const std::optional<DeviationSpec>& deviation,
                                 std::uint64_t seed) {
  Stream rng(seed, 0);
  return detail::simulate_game(config, profile, deviation, rng);
}

/// Paired Monte Carlo estimate of phi_t: a player at position t is forced to
/// contribute in one branch and to defect in the other, both branches driven
/// by the same uniforms. Each replication records the difference in total
/// contributions of positions t..b, the player's own unit included.
///
/// `cls` selects the sample the player holds: kCleanFull (t >= 2) or
/// kFirstGroup / kCleanFull at t = 1, or kContainsDefection (t >= 2), where
/// the group at t-1 is set to n-1 contributions.
inline SimEstimate estimate_phi(const GameConfig& config, ForgivenessRate rate, Position t,
                                SampleClass cls, std::int64_t replications, std::uint64_t seed,
                                unsigned workers = 0) {
  t.check(config);
  if (config.sample_size() != 1) throw std::domain_error("estimate_phi requires m = 1");
  if (replications < 1) throw std::domain_error("replications must be at least 1");
  if (cls == SampleClass::kFirstGroup && t.value() != 1)
    throw std::domain_error("the first-group sample only occurs at position 1");
  if (cls == SampleClass::kContainsDefection && t.value() < 2)
    throw std::domain_error("a sample with a defection needs t >= 2");

  const int n = config.group_size();
  GroupHistory prefix;
  for (int k = 1; k < t.value(); ++k) prefix.push_back(n, config);
  if (cls == SampleClass::kContainsDefection) {
    std::vector<int> g = prefix.contributions();
    g.back() = n - 1;
    prefix = GroupHistory(g, config);
  }
  const auto profile = StrategyProfile::forgiving(rate.value());
  const int draws = (config.groups() - t.value() + 1) * n;

  std::vector<double> diffs(static_cast<std::size_t>(replications));
  parallel_for(replications, workers, [&](std::int64_t rep, unsigned) {
    Stream rng(seed, static_cast<std::uint64_t>(rep));
    std::vector<double> u(static_cast<std::size_t>(draws));
    for (double& x : u) x = rng.uniform();
    auto branch = [&](Action a) {
      GroupHistory h = prefix;
      std::size_t next = 0;
      detail::play_groups(config, profile, h, detail::Forced{t.value(), 0, a},
                          [&] { return u[next++]; }, [](Position, const Sample&, auto) {});
      return h.total();
    };
    diffs[static_cast<std::size_t>(rep)] =
        static_cast<double>(branch(Action::kContribute) - branch(Action::kDefect));
  });
  return detail::summarize(diffs, seed);
}

struct PsiEstimate {
  enum class Status { kOk, kInsufficientData };
  Status status = Status::kOk;
  std::vector<double> frequency;       // index 0 holds t = 2
  std::vector<double> std_error;       // ratio-estimator standard errors
  std::vector<std::int64_t> events;    // player observations per position
  std::int64_t total_events = 0;
  double epsilon = 0.0;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;

  bool ok() const { return status == Status::kOk; }
};

/// Position distribution given a sample with a defection under tremble eps,
/// m = 1, computed exactly from the chain of "group t holds a defection"
/// probabilities. Converges to psi as eps -> 0. Index 0 holds t = 2.
inline std::vector<double> psi_under_trembles(const GameConfig& config, ForgivenessRate rate,
                                              double epsilon) {
  if (config.sample_size() != 1) throw std::domain_error("psi_under_trembles requires m = 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("psi_under_trembles needs a tremble in (0, 1)");
  const int n = config.group_size();
  const double all_clean = numeric::ipow(1.0 - epsilon, n);
  const double all_forgive = numeric::ipow(rate.value() * (1.0 - epsilon), n);
  std::vector<double> d{1.0 - all_clean};
  for (int t = 2; t < config.groups(); ++t)
    d.push_back(d.back() * (1.0 - all_forgive) + (1.0 - d.back()) * (1.0 - all_clean));
  double total = 0.0;
  for (double x : d) total += x;
  for (double& x : d) x /= total;
  return d;
}

/// Empirical distribution of a player's position given that the player's
/// sample shows a defection, under the forgiveness profile with tremble eps.
/// Each player-observation counts once. All accumulators are integers, so
/// the result does not depend on the number of workers.
inline PsiEstimate estimate_psi(const GameConfig& config, ForgivenessRate rate, double epsilon,
                                std::int64_t replications, std::uint64_t seed,
                                unsigned workers = 0) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("estimate_psi needs a tremble in (0, 1)");
  if (replications < 1) throw std::domain_error("replications must be at least 1");
  if (workers == 0) workers = default_workers();
  const auto profile = StrategyProfile::forgiving(rate.value(), epsilon);
  const auto slots = static_cast<std::size_t>(config.groups() - 1);
  const int n = config.group_size();

  // Per game: a_t events at position t, B = sum_t a_t. Kept: sum a_t,
  // sum a_t^2, sum a_t B, sum B^2.
  struct Sums {
    std::vector<std::int64_t> a, aa, ab;
    std::int64_t bb = 0;
  };
  std::vector<Sums> per_worker(workers, Sums{std::vector<std::int64_t>(slots, 0),
                                             std::vector<std::int64_t>(slots, 0),
                                             std::vector<std::int64_t>(slots, 0), 0});

  parallel_for(replications, workers, [&](std::int64_t rep, unsigned w) {
    Stream rng(seed, static_cast<std::uint64_t>(rep));
    GroupHistory h;
    std::vector<std::int64_t> game(slots, 0);
    detail::play_groups(config, profile, h, std::nullopt, [&] { return rng.uniform(); },
                        [&](Position pos, const Sample& s, auto) {
                          if (pos.value() >= 2 && s.contains_defection(config))
                            game[static_cast<std::size_t>(pos.value() - 2)] += n;
                        });
    std::int64_t total = 0;
    for (auto e : game) total += e;
    if (total == 0) return;
    auto& acc = per_worker[w];
    for (std::size_t i = 0; i < slots; ++i) {
      acc.a[i] += game[i];
      acc.aa[i] += game[i] * game[i];
      acc.ab[i] += game[i] * total;
    }
    acc.bb += total * total;
  });

  Sums sum{std::vector<std::int64_t>(slots, 0), std::vector<std::int64_t>(slots, 0),
           std::vector<std::int64_t>(slots, 0), 0};
  for (const auto& acc : per_worker) {
    for (std::size_t i = 0; i < slots; ++i) {
      sum.a[i] += acc.a[i];
      sum.aa[i] += acc.aa[i];
      sum.ab[i] += acc.ab[i];
    }
    sum.bb += acc.bb;
  }

  PsiEstimate est;
  est.epsilon = epsilon;
  est.replications = replications;
  est.seed = seed;
  est.events = sum.a;
  for (auto e : est.events) est.total_events += e;
  if (est.total_events == 0) {
    est.status = PsiEstimate::Status::kInsufficientData;
    return est;
  }
  const double big_b = static_cast<double>(est.total_events);
  for (std::size_t i = 0; i < slots; ++i) {
    const double p = static_cast<double>(sum.a[i]) / big_b;
    // sum over games of (a_t - p B)^2, divided by B^2.
    const double resid = static_cast<double>(sum.aa[i]) - 2.0 * p * static_cast<double>(sum.ab[i]) +
                         p * p * static_cast<double>(sum.bb);
    est.frequency.push_back(p);
    est.std_error.push_back(std::sqrt(std::max(0.0, resid)) / big_b);
  }
  return est;
}

/// Mean realized payoff per player under the forgiveness profile with
/// tremble eps, at the configuration's rate of return.
inline SimEstimate tremble_payoff(const GameConfig& config, ForgivenessRate rate, double epsilon,
                                  std::int64_t replications, std::uint64_t seed,
                                  unsigned workers = 0) {
  if (!(epsilon >= 0.0 && epsilon <= 0.1))
    throw std::domain_error("tremble_payoff expects eps in [0, 0.1]");
  if (replications < 1) throw std::domain_error("replications must be at least 1");
  const auto profile = StrategyProfile::forgiving(rate.value(), epsilon);
  std::vector<double> per_game(static_cast<std::size_t>(replications));
  parallel_for(replications, workers, [&](std::int64_t rep, unsigned) {
    Stream rng(seed, static_cast<std::uint64_t>(rep));
    const auto game = detail::simulate_game(config, profile, std::nullopt, rng);
    double sum = 0.0;
    for (double p : game.payoffs) sum += p;
    per_game[static_cast<std::size_t>(rep)] = sum / config.players();
  });
  return detail::summarize(per_game, seed);
}

// ---------------------------------------------------------------------------
// Exact enumeration.

template <class Scalar = double>
struct ExactContinuation {
  Scalar phi{};                   // sum over positions t..b of the branch gap
  std::vector<Scalar> contribute; // E[g_{t+k}] when the player contributes, k = 0..b-t
  std::vector<Scalar> defect;     // same when the player defects
};

inline constexpr int kExactMaxGroups = 6;
inline constexpr int kExactMaxGroupSize = 4;

/// Expected group contributions from position t onwards under both branches,
/// by propagating the exact distribution of each group's contribution count.
/// Every individual action vector of every group is enumerated, so no
/// binomial or geometric identity is assumed. Scalar may be a rational type.
template <class Scalar = double>
ExactContinuation<Scalar> enumerate_exact(const GameConfig& config, Scalar gamma,
                                          SampleClass initial, Position t) {
  t.check(config);
  const int b = config.groups();
  const int n = config.group_size();
  if (b > kExactMaxGroups || n > kExactMaxGroupSize)
    throw std::domain_error("enumerate_exact is limited to b <= 6 and n <= 4");
  if (config.sample_size() != 1) throw std::domain_error("enumerate_exact requires m = 1");
  const Scalar zero(0);
  const Scalar one(1);
  if (gamma < zero || gamma > one) throw std::domain_error("gamma must lie in [0, 1]");
  if (initial == SampleClass::kFirstGroup && t.value() != 1)
    throw std::domain_error("the first-group sample only occurs at position 1");
  if (initial == SampleClass::kContainsDefection && t.value() < 2)
    throw std::domain_error("a sample with a defection needs t >= 2");

  // Distribution of a group's count when each of `members` players
  // contributes with probability p, offset by `fixed` forced contributions.
  auto enumerate_group = [&](int members, const Scalar& p, int fixed, const Scalar& weight,
                             std::vector<Scalar>& into) {
    for (unsigned mask = 0; mask < (1u << members); ++mask) {
      Scalar prob = weight;
      int count = fixed;
      for (int k = 0; k < members; ++k) {
        if (mask & (1u << k)) {
          prob = prob * p;
          ++count;
        } else {
          prob = prob * (one - p);
        }
      }
      into[static_cast<std::size_t>(count)] = into[static_cast<std::size_t>(count)] + prob;
    }
  };
  auto mean = [&](const std::vector<Scalar>& dist) {
    Scalar e = zero;
    for (int g = 0; g <= n; ++g) e = e + Scalar(g) * dist[static_cast<std::size_t>(g)];
    return e;
  };

  const Scalar p_at_t = initial == SampleClass::kContainsDefection ? gamma : one;
  auto branch = [&](Action own) {
    std::vector<Scalar> expected;
    std::vector<Scalar> dist(static_cast<std::size_t>(n + 1), zero);
    enumerate_group(n - 1, p_at_t, own == Action::kContribute ? 1 : 0, one, dist);
    expected.push_back(mean(dist));
    for (int pos = t.value() + 1; pos <= b; ++pos) {
      std::vector<Scalar> next(static_cast<std::size_t>(n + 1), zero);
      for (int g = 0; g <= n; ++g) {
        const Scalar& w = dist[static_cast<std::size_t>(g)];
        if (w == zero) continue;
        enumerate_group(n, g == n ? one : gamma, 0, w, next);
      }
      dist = std::move(next);
      expected.push_back(mean(dist));
    }
    return expected;
  };

  ExactContinuation<Scalar> out;
  out.contribute = branch(Action::kContribute);
  out.defect = branch(Action::kDefect);
  out.phi = zero;
  for (std::size_t k = 0; k < out.contribute.size(); ++k)
    out.phi = out.phi + (out.contribute[k] - out.defect[k]);
  return out;
}

}  // namespace groupgoods
