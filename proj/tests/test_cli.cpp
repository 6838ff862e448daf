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

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "groupgoods/commands.hpp"

namespace {

using namespace groupgoods;

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GROUPGOODS_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp(const std::string& name) {
  std::filesystem::create_directories(GROUPGOODS_TMP);
  return std::string(GROUPGOODS_TMP) + "/" + name;
}

// ---- commands in-process

TEST(Commands, ThresholdTable) {
  const auto out = cmd_thresholds(GameConfig::make(6, 2, 2, 5));
  EXPECT_NE(out.text.find("sampled_m_gt_1,2N/(N-n(m+1)+2),3,yes,yes"), std::string::npos);
  const auto prop = cmd_thresholds(GameConfig::make(4, 5, 1, 5));
  EXPECT_NE(prop.text.find("single_sample_m_eq_1,2N/(N-2(n-1)),3.3333333333333335,yes,yes"),
            std::string::npos);
  const auto bad = cmd_thresholds(GameConfig::make(2, 3, 1, 2));
  EXPECT_NE(bad.text.find("single_sample_m_eq_1,2N/(N-2(n-1)),6,no,yes"), std::string::npos);
  EXPECT_NE(bad.text.find("interval: empty"), std::string::npos);
}

TEST(Commands, ThresholdJsonMarksLiterature) {
  const auto out = cmd_thresholds(GameConfig::make(10, 1, 1, 2.5), Format::kJson);
  const auto j = nlohmann::json::parse(out.text);
  EXPECT_TRUE(j["literature_sourced"]);
  EXPECT_TRUE(j["r_in_interval"]);
  EXPECT_TRUE(j["single_sample"]["applies"]);
}

TEST(Commands, DeltaCurveFileAndSummary) {
  const auto c = GameConfig::make(4, 5, 1, 16);
  const auto path = tmp("curve.csv");
  const auto out = cmd_delta_curve(c, 16.0, 101, {}, path);
  ASSERT_EQ(out.files.size(), 1u);
  EXPECT_NE(out.text.find("two_roots"), std::string::npos);
  const auto text = io::read_file(path);
  EXPECT_NE(text.find("# config N=20 b=4 n=5 m=1 r=16"), std::string::npos);
  const auto curve = io::parse_curve_csv(text);
  ASSERT_EQ(curve.size(), 101u);
  for (const auto& p : curve)
    EXPECT_LE(std::abs(delta(ForgivenessRate(p.gamma), 16.0, c) - p.delta), 1e-12);
  EXPECT_THROW(cmd_delta_curve(c, 16.0, 1), std::invalid_argument);
}

TEST(Commands, EquilibriaJson) {
  const auto out = cmd_equilibria(GameConfig::make(4, 5, 1, 2));
  const auto j = nlohmann::json::parse(out.text);
  EXPECT_FALSE(j["pure"]["exists"]);
  EXPECT_EQ(j["mixed_roots"]["status"], "none");
  EXPECT_EQ(j["manifest"]["command"], "equilibria");
}

TEST(Commands, VerifyDefaultPasses) {
  const auto out = cmd_verify(GameConfig::make(4, 5, 1, 16));
  EXPECT_EQ(out.exit_code, kExitOk) << out.text;
}

TEST(Commands, VerifyCatchesCorruptedFormula) {
  for (const char* which : {"phi_clean", "phi_defection", "psi"}) {
    VerifyOptions opt;
    opt.corrupt = which;
    const auto out = cmd_verify(GameConfig::make(4, 5, 1, 16), opt);
    EXPECT_EQ(out.exit_code, kExitInternal) << which;
    EXPECT_NE(out.text.find("FAIL"), std::string::npos);
  }
}

TEST(Commands, SimulateInsufficientData) {
  SimulateOptions s;
  s.quantity = "psi";
  s.epsilon = 1e-15;
  s.replications = 5;
  EXPECT_EQ(cmd_simulate(GameConfig::make(4, 5, 1, 16), s).exit_code, kExitInsufficientData);
}

TEST(Commands, SimulateRows) {
  SimulateOptions s;
  s.quantity = "phi-clean";
  s.replications = 300;
  const auto out = cmd_simulate(GameConfig::make(4, 5, 1, 16), s);
  EXPECT_NE(out.text.find(io::kSimHeader), std::string::npos);
  EXPECT_NE(out.text.find("20,4,5,1,16,phi-clean,0.5,0,1,"), std::string::npos);
  EXPECT_NE(out.text.find("20,4,5,1,16,phi-clean,0.5,0,4,"), std::string::npos);
  s.quantity = "nonsense";
  EXPECT_THROW(cmd_simulate(GameConfig::make(4, 5, 1, 16), s), std::invalid_argument);
}

TEST(Commands, Figure1Files) {
  Figure1Options f;
  f.out_dir = tmp("fig");
  const auto out = cmd_figure1(f);
  ASSERT_EQ(out.files.size(), 2u);
  for (const auto& path : out.files) {
    const auto text = io::read_file(path);
    EXPECT_NE(text.find("reconstruction"), std::string::npos);
    EXPECT_EQ(io::parse_curve_csv(text).size(), 201u);
  }
}

// ---- the binary

TEST(Cli, ThresholdsSubcommand) {
  const auto r = run("thresholds --N 12 --b 6 --n 2 --m 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2N/(N-n(m+1)+2),3,yes,yes"), std::string::npos);
}

TEST(Cli, SharedFlagsBeforeOrAfterSubcommand) {
  EXPECT_EQ(run("--b 8 --n 2 thresholds").out, run("thresholds --b 8 --n 2").out);
}

TEST(Cli, ValidationExitCode) {
  EXPECT_EQ(run("thresholds --N 20 --b 4 --n 4").code, 1);
  EXPECT_EQ(run("equilibria --r 25").code, 1);
  EXPECT_EQ(run("thresholds --r abc").code, 1);
  EXPECT_EQ(run("thresholds --format xml").code, 1);
  EXPECT_EQ(run("simulate --quantity psi --epsilon 0").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST(Cli, VerifyFailureExitCode) {
  EXPECT_EQ(run("verify --corrupt phi_defection").code, 2);
}

TEST(Cli, InsufficientDataExitCode) {
  EXPECT_EQ(run("simulate --quantity psi --epsilon 1e-15 --reps 5").code, 3);
}

TEST(Cli, ConfigFileWithOverride) {
  const auto path = tmp("game.cfg");
  io::write_file(path, "# small groups\nb = 8\nn = 2\nm = 1\nr = 15\n");
  const auto plain = run("equilibria --config " + path);
  ASSERT_EQ(plain.code, 0);
  const auto j = nlohmann::json::parse(plain.out);
  EXPECT_EQ(j["config"]["N"], 16);
  EXPECT_EQ(j["r"], 15.0);
  const auto over = nlohmann::json::parse(run("equilibria --config " + path + " --r 12").out);
  EXPECT_EQ(over["r"], 12.0);
  EXPECT_EQ(over["config"]["b"], 8);
  io::write_file(path, "b = 8\nq = 2\n");
  EXPECT_EQ(run("equilibria --config " + path).code, 1);
}

TEST(Cli, DeltaCurveOutputRoundTrips) {
  const auto path = tmp("cli_curve.csv");
  const auto r = run("delta-curve --b 20 --n 1 --r 16 --grid 51 --out " + path);
  ASSERT_EQ(r.code, 0);
  const auto c = GameConfig::make(20, 1, 1, 16);
  for (const auto& p : io::parse_curve_csv(io::read_file(path)))
    EXPECT_LE(std::abs(delta(ForgivenessRate(p.gamma), 16.0, c) - p.delta), 1e-12);
}

TEST(Cli, SimulateJsonIsDeterministic) {
  const std::string args = "simulate --quantity payoff --gamma 0.7 --epsilon 0.01 --reps 2000 --format json";
  const auto a = run(args + " --workers 1");
  const auto b = run(args + " --workers 3");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NO_THROW(nlohmann::json::parse(a.out));
}

TEST(Cli, HelpListsSubcommands) {
  const auto r = run("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"thresholds", "delta-curve", "equilibria", "verify", "figure1", "simulate"})
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  EXPECT_EQ(r.out.find("corrupt"), std::string::npos);
}

}  // namespace
