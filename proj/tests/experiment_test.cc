// Copyright 2026 The nsgame Authors.
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

#include "nsgame/experiment.h"

#include <cmath>
#include <cstdint>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "nsgame/errors.h"
#include "nsgame/strategy.h"
#include "test_util.h"

namespace nsgame {
namespace {

ExperimentConfig Config(const std::string& strategy, std::uint64_t players, std::uint64_t trials,
                        std::uint64_t seed = 7) {
  ExperimentConfig cfg;
  cfg.strategy = ParseStrategySpec(strategy);
  cfg.players = players;
  cfg.trials = trials;
  cfg.master_seed = seed;
  return cfg;
}

TEST(AzumaBoundTest, ClosedForm) {
  // 2 e^{-900/100} = 2 e^{-9}.
  EXPECT_NEAR(AzumaBound(50, 30), 0.0002468196081733591, 1e-18);
  EXPECT_NEAR(AzumaBound(1, 2), 0.2706705664732254, 1e-15);
  EXPECT_NEAR(AzumaBound(100, 1e-9), 2.0, 1e-12);
}

TEST(AzumaBoundTest, SingleStepNeverReachesTwo) {
  ExperimentConfig cfg = Config("local-random:0.5", 1, 500);
  cfg.azuma.n = {1};
  cfg.azuma.epsilon = {2};
  const ExperimentResult r = RunExperiment(cfg);
  ASSERT_EQ(r.azuma.points.size(), 1u);
  EXPECT_EQ(r.azuma.points[0].exceed, 0u);
  EXPECT_FALSE(r.azuma.points[0].violation);
}

TEST(RunExperimentTest, HalfCoinPooledRate) {
  const ExperimentResult r = RunExperiment(Config("local-random:0.5", 64, 10000));
  EXPECT_GE(r.win_rate.pooled, 0.494);
  EXPECT_LE(r.win_rate.pooled, 0.506);
  EXPECT_EQ(r.win_rate.valid_trials, 10000u);
  EXPECT_EQ(r.azuma.violations, 0u);
  EXPECT_GT(r.win_rate.homogeneity.p_value, 1e-3);
}

TEST(RunExperimentTest, FnsOnPristineRootsIsPerfect) {
  const ExperimentResult r = RunExperiment(Config("fns", 64, 200));
  EXPECT_EQ(r.win_rate.pooled, 1.0);
  ASSERT_EQ(r.win_rate.threshold_histogram.size(), 1u);
  EXPECT_EQ(r.win_rate.threshold_histogram.at(0), 200u);
  EXPECT_EQ(r.win_rate.threshold_none, 0u);
  for (const TrialRecord& t : r.log) {
    for (std::uint64_t k = 1; k <= 64; ++k) ASSERT_EQ(t.outputs[k - 1], t.root.At(k));
  }
}

TEST(RunExperimentTest, FnsWithOverrideDepthEight) {
  ExperimentConfig cfg = Config("fns", 64, 300);
  cfg.root_override_depth = 8;
  const ExperimentResult r = RunExperiment(cfg);
  for (const PlayerRate& p : r.win_rate.per_player) {
    if (p.player > 8) {
      EXPECT_EQ(p.rate, 1.0) << p.player;
    } else {
      // Sampled roots flip every bit up to d, so the representative misses it.
      EXPECT_EQ(p.rate, 0.0) << p.player;
    }
  }
  for (const auto& [t, count] : r.win_rate.threshold_histogram) EXPECT_LE(t, 8u);
}

TEST(RunExperimentTest, FnsBeatsEveryLocalUpperBound) {
  const ExperimentResult fns = RunExperiment(Config("fns", 64, 500));
  for (const char* local : {"constant:0", "local-table:0110", "local-random:0.9"}) {
    const ExperimentResult r = RunExperiment(Config(local, 64, 500));
    EXPECT_GT(fns.win_rate.pooled, r.win_rate.pooled_interval.hi) << local;
  }
}

TEST(RunExperimentTest, HatGameMatchesBakerGame) {
  ExperimentConfig baker = Config("local-table:01101001", 32, 300);
  ExperimentConfig hat = baker;
  hat.game = GameVariant::kHat;
  const ExperimentResult a = RunExperiment(baker);
  const ExperimentResult b = RunExperiment(hat);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t t = 0; t < a.log.size(); ++t) EXPECT_EQ(a.log[t].success, b.log[t].success);
}

TEST(RunExperimentTest, FixedRootIsUsedForEveryTrial) {
  ExperimentConfig cfg = Config("constant:0", 16, 5);
  cfg.fixed_root = BitStream();
  const ExperimentResult r = RunExperiment(cfg);
  EXPECT_EQ(r.win_rate.pooled, 1.0);
}

TEST(RunExperimentTest, ReportsAreIdenticalAcrossParallelism) {
  for (const char* strategy : {"local-random:0.3", "fns", "local-table:0110"}) {
    ExperimentConfig serial = Config(strategy, 64, 800, 11);
    serial.root_override_depth = 2;
    ExperimentConfig parallel = serial;
    parallel.parallelism = 8;
    EXPECT_EQ(ReportToJson(RunExperiment(serial)).dump(), ReportToJson(RunExperiment(parallel)).dump()) << strategy;
  }
}

TEST(RunExperimentTest, SeedChangesTheReport) {
  EXPECT_NE(ReportToJson(RunExperiment(Config("local-random:0.5", 8, 50, 1))).dump(),
            ReportToJson(RunExperiment(Config("local-random:0.5", 8, 50, 2))).dump());
}

#if NSGAME_ENABLE_CHEAT_STRATEGY
TEST(RunExperimentTest, CheatTrialsAreQuarantined) {
  const ExperimentResult r = RunExperiment(Config("cheat", 16, 40));
  EXPECT_EQ(r.quarantine.invalid_trials, 40u);
  ASSERT_TRUE(r.quarantine.raw_success_rate.has_value());
  EXPECT_EQ(*r.quarantine.raw_success_rate, 1.0);
  EXPECT_EQ(r.win_rate.valid_trials, 0u);
  EXPECT_FALSE(r.martingale.has_value());
  EXPECT_THROW(MartingaleAudit(r.log, 3.0), Error);
}
#endif

TEST(MartingaleAuditTest, LocalTablePasses) {
  const ExperimentResult r = RunExperiment(Config("local-table:0110", 64, 10000, 3));
  ASSERT_TRUE(r.martingale.has_value());
  EXPECT_TRUE(r.martingale->increments_ok);
  EXPECT_TRUE(r.martingale->bins_ok) << r.martingale->verdict;
  EXPECT_TRUE(r.martingale->consistent);
}

TEST(MartingaleAuditTest, FnsLogFailsExplicitly) {
  const ExperimentResult r = RunExperiment(Config("fns", 64, 1000));
  ASSERT_TRUE(r.martingale.has_value());
  EXPECT_TRUE(r.martingale->increments_ok);
  EXPECT_FALSE(r.martingale->consistent);
  EXPECT_NE(r.martingale->verdict.find("FAILS"), std::string::npos);
}

TEST(MartingaleAuditTest, SingleTrialChecksIncrementsOnly) {
  const ExperimentResult r = RunExperiment(Config("fns", 64, 1));
  ASSERT_TRUE(r.martingale.has_value());
  EXPECT_TRUE(r.martingale->increments_ok);
  for (const MartingaleBin& b : r.martingale->bins) EXPECT_FALSE(b.tested);
  EXPECT_TRUE(r.martingale->consistent);
}

TEST(MartingaleAuditTest, DetectsBrokenIncrements) {
  TrialRecord t;
  t.success = {1, 1, -1};
  t.walk = {1, 3, 2};
  const TrialRecord records[] = {t};
  const MartingaleReport r = MartingaleAudit(records, 3.0);
  EXPECT_EQ(r.bad_increments, 1u);
  EXPECT_FALSE(r.consistent);
}

TEST(InvarianceTest, UniformRootsPass) {
  InvarianceConfig cfg;
  cfg.seed = 1;
  const InvarianceReport r = InvarianceTest(cfg);
  EXPECT_EQ(r.counts.size(), 256u);
  EXPECT_EQ(r.chi_square.dof, 255.0);
  EXPECT_GT(r.chi_square.p_value, 1e-3);
}

TEST(InvarianceTest, SixteenShiftsPass) {
  InvarianceConfig cfg;
  cfg.seed = 2;
  cfg.shifts = 16;
  EXPECT_GT(InvarianceTest(cfg).chi_square.p_value, 1e-3);
}

TEST(InvarianceTest, SquaredSamplerIsRejected) {
  InvarianceConfig cfg;
  cfg.seed = 3;
  cfg.sampler = RootSampler::kSquaredUniform;
  EXPECT_LT(InvarianceTest(cfg).chi_square.p_value, 1e-6);
}

TEST(InvarianceTest, Preconditions) {
  InvarianceConfig cfg;
  cfg.bins = 100;
  EXPECT_THROW(InvarianceTest(cfg), ConfigError);
  cfg.bins = 256;
  cfg.samples = 25599;
  EXPECT_THROW(InvarianceTest(cfg), ConfigError);
}

TEST(ValidateConfigTest, Rejections) {
  ExperimentConfig cfg;
  cfg.oracle_mode = OracleMode::kMemoized;
  cfg.parallelism = 4;
  EXPECT_THROW(ValidateConfig(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.trials = 0;
  EXPECT_THROW(ValidateConfig(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.azuma.epsilon = {4, 0};
  EXPECT_THROW(ValidateConfig(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.players = 0;
  EXPECT_THROW(ValidateConfig(cfg), ConfigError);
  cfg = ExperimentConfig{};
  cfg.strategy = {{"name", "unknown"}};
  EXPECT_THROW(ValidateConfig(cfg), ConfigError);
}

TEST(ConfigJsonTest, RoundTripAndPrecedence) {
  ExperimentConfig cfg = Config("local-table:0110", 12, 34, 56);
  cfg.root_override_depth = 3;
  cfg.game = GameVariant::kHat;
  const nlohmann::json j = ConfigToJson(cfg);
  const ExperimentConfig back = ConfigFromJson(j);
  EXPECT_EQ(ConfigToJson(back), j);
  EXPECT_FALSE(j.contains("parallelism"));
  // Keys present in the file win over the base; absent keys keep it.
  ExperimentConfig base;
  base.trials = 99;
  const ExperimentConfig merged = ConfigFromJson(nlohmann::json{{"players", 5}}, base);
  EXPECT_EQ(merged.players, 5u);
  EXPECT_EQ(merged.trials, 99u);
}

TEST(ConfigJsonTest, UnknownKeyIsNamed) {
  try {
    ConfigFromJson(nlohmann::json{{"player", 5}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("player"), std::string::npos);
  }
}

TEST(MemoizedRunTest, TableIsReplayable) {
  ExperimentConfig cfg = Config("fns", 16, 20);
  cfg.oracle_mode = OracleMode::kMemoized;
  const ExperimentResult first = RunExperiment(cfg);
  EXPECT_EQ(first.memo_table.size(), 20u);
  EXPECT_EQ(first.win_rate.pooled, 1.0);
  EXPECT_EQ(RunExperiment(cfg).memo_table, first.memo_table);
  cfg.memo_table = first.memo_table;
  EXPECT_EQ(ReportToJson(RunExperiment(cfg)).dump(), ReportToJson(first).dump());
}

TEST(ReportTest, SchemaAndCsv) {
  const ExperimentResult r = RunExperiment(Config("constant:1", 16, 10));
  const nlohmann::json j = ReportToJson(r);
  EXPECT_EQ(j.at("schema_version"), kReportSchemaVersion);
  EXPECT_EQ(j.at("config").at("seed"), 7);
  EXPECT_TRUE(j.at("config").contains("strategy"));
  EXPECT_EQ(j.at("azuma").at("points").size(), 3u);  // n = 16 only
  const std::string players = PlayersCsv(r.win_rate);
  EXPECT_EQ(players.substr(0, players.find('\n')), "schema_version,player,wins,trials,rate,lo,hi");
  EXPECT_EQ(std::count(players.begin(), players.end(), '\n'), 17);
  const std::string azuma = AzumaCsv(r.azuma);
  EXPECT_EQ(azuma.substr(0, azuma.find('\n')), "schema_version,n,epsilon,exceed,trials,frequency,bound,margin,violation");
}

}  // namespace
}  // namespace nsgame
