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


// Walks through one configuration: thresholds, r#, the two forgiveness
// equilibria just above r#, and a tremble check of which one pays more.

#include <cstdio>

#include "groupgoods/equilibrium.hpp"
#include "groupgoods/simulator.hpp"

int main() {
  using namespace groupgoods;
  const auto probe = GameConfig::make(4, 5, 1, 10.0);
  const auto th = threshold_m_eq_1(probe);
  std::printf("N=%d b=%d n=%d: pure profile needs r >= %.6f\n", probe.players(), probe.groups(),
              probe.group_size(), th.value);

  const auto sharp = find_r_sharp(probe);
  std::printf("r# = %.10f (gamma0 = %.6f)\n", sharp.value, sharp.peak.gamma0);

  const double r = sharp.value + 1.0;
  const auto game = probe.with_rate(r);
  const auto roots = find_mixed_roots(r, game);
  std::printf("r = %.4f: gamma1 = %.6f, gamma2 = %.6f\n", r, roots.lower->gamma, roots.upper->gamma);

  for (double gamma : {0.0, roots.lower->gamma, roots.upper->gamma}) {
    const auto est = tremble_payoff(game, ForgivenessRate(gamma), 0.01, 20000, 1);
    std::printf("  forgive %.4f -> payoff %.4f +- %.4f\n", gamma, est.mean, est.std_error);
  }
  return 0;
}
