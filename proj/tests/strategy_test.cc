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

#include "nsgame/strategy.h"

#include <cmath>
#include <cstdint>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "exact_oracle.h"
#include "nsgame/errors.h"
#include "nsgame/experiment.h"
#include "nsgame/game.h"
#include "test_util.h"

namespace nsgame {
namespace {

using ::nsgame::testing::AllTables;
using ::nsgame::testing::ExactTableWinRate;
using ::nsgame::testing::FlippedRoot;

Bit GuessWith(const Strategy& s, const BitStream& root, std::uint64_t k, std::uint64_t seed = 0) {
  ChoiceOracle oracle;
  PlayerView view(k, root.Shifted(k));
  GuessContext ctx{view, CounterRng(seed), 0, &oracle};
  return s.Guess(ctx);
}

TEST(FnsGuessTest, ExactAgreementGivesTrueBits) {
  const FnsStrategy fns;
  const BitStream root = BitStream::Generator(8);
  for (std::uint64_t k = 1; k <= 64; ++k) EXPECT_EQ(GuessWith(fns, root, k), root.At(k));
}

TEST(FnsGuessTest, CorrectBeyondTheFlippedPrefix) {
  const FnsStrategy fns;
  for (std::uint64_t d = 1; d <= 10; ++d) {
    const BitStream root = FlippedRoot(d, d);
    for (std::uint64_t k = d + 1; k <= 64; ++k) EXPECT_EQ(GuessWith(fns, root, k), root.At(k));
  }
}

TEST(FnsGuessTest, FirstPlayerReadsFirstBitOfRepresentative) {
  const FnsStrategy fns;
  ChoiceOracle oracle;
  const BitStream root = BitStream::Periodic({1, 1}, {0, 1, 1});
  const BitStream rep = oracle.Representative(PadPrefixZeros(root.Shifted(1), 1));
  EXPECT_EQ(GuessWith(fns, root, 1), FirstFractionBit(rep));
}

TEST(FnsGuessTest, NeedsAnOracle) {
  PlayerView view(1, BitStream());
  GuessContext ctx{view, CounterRng(0), 0, nullptr};
  EXPECT_THROW(FnsGuess(ctx), Error);
}

TEST(LocalTableTest, ConstantTable) {
  const LocalTableStrategy zero(LookupTable{0, {0}});
  for (std::uint64_t k = 1; k <= 10; ++k) EXPECT_EQ(GuessWith(zero, BitStream::Generator(k), k), 0);
}

TEST(LocalTableTest, IdentityTableEchoesTheNeighbour) {
  const LocalTableStrategy identity(LookupTable{1, {0, 1}});
  const BitStream root = BitStream::Generator(3);
  for (std::uint64_t k = 1; k <= 64; ++k) EXPECT_EQ(GuessWith(identity, root, k), root.At(k + 1));
}

TEST(LocalTableTest, ValidateRejectsBadTables) {
  EXPECT_THROW((LookupTable{2, {0, 1}}.Validate()), ConfigError);
  EXPECT_THROW((LookupTable{1, {0, 2}}.Validate()), ConfigError);
  EXPECT_THROW((LookupTable{21, {}}.Validate()), ConfigError);
}

TEST(LocalTableTest, ExactWinRateIsOneHalfForEveryTableUpToThreeBits) {
  for (unsigned m = 0; m <= 3; ++m) {
    for (const LookupTable& table : AllTables(m)) {
      for (std::uint64_t k : {1, 2, 5}) {
        for (Bit prefix : {0, 1}) ASSERT_EQ(ExactTableWinRate(table, k, prefix), Rational(1, 2));
      }
    }
  }
}

TEST(LocalRandomTest, ExtremesAreConstant) {
  const LocalRandomStrategy never(0.0);
  const LocalRandomStrategy always(1.0);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    EXPECT_EQ(GuessWith(never, BitStream::Generator(seed), 1, seed), 0);
    EXPECT_EQ(GuessWith(always, BitStream::Generator(seed), 1, seed), 1);
  }
}

TEST(LocalRandomTest, HalfCoinWinsHalfTheTime) {
  ExperimentConfig cfg;
  cfg.strategy = ParseStrategySpec("local-random:0.5");
  cfg.players = 1;
  cfg.trials = 100000;
  cfg.master_seed = 5;
  cfg.azuma.n = {1};
  const ExperimentResult r = RunExperiment(cfg);
  // 3 sigma for 1e5 Bernoulli(1/2) draws is 0.0047.
  EXPECT_NEAR(r.win_rate.pooled, 0.5, 0.005);
}

TEST(LocalRandomTest, MixtureUsesTheTableSometimes) {
  const LocalRandomStrategy mixed(0.0, 1.0, LookupTable{1, {1, 0}});
  const BitStream root = BitStream::Generator(6);
  for (std::uint64_t k = 1; k <= 30; ++k) EXPECT_EQ(GuessWith(mixed, root, k), 1 - root.At(k + 1));
  EXPECT_EQ(mixed.view_budget(), 1u);
}

TEST(SharedMixtureTest, AllPlayersOfATrialShareOneTable) {
  const SharedMixtureStrategy mix({LookupTable{0, {0}}, LookupTable{0, {1}}});
  std::set<Bit> across_trials;
  for (std::uint64_t shared = 0; shared < 20; ++shared) {
    std::set<Bit> outputs;
    for (std::uint64_t k = 1; k <= 16; ++k) {
      PlayerView view(k, BitStream::Generator(1).Shifted(k));
      GuessContext ctx{view, CounterRng(k), shared, nullptr};
      outputs.insert(mix.Guess(ctx));
    }
    EXPECT_EQ(outputs.size(), 1u);
    across_trials.insert(*outputs.begin());
  }
  EXPECT_EQ(across_trials.size(), 2u);
}

TEST(ParseStrategySpecTest, Shorthands) {
  EXPECT_EQ(ParseStrategySpec("fns"), nlohmann::json({{"name", "fns"}}));
  EXPECT_EQ(ParseStrategySpec("constant:1"), nlohmann::json({{"name", "constant"}, {"bit", 1}}));
  EXPECT_EQ(ParseStrategySpec("local-random:0.3").at("p"), 0.3);
  const nlohmann::json table = ParseStrategySpec("local-table:0110");
  EXPECT_EQ(table.at("table"), nlohmann::json({0, 1, 1, 0}));
  EXPECT_EQ(MakeStrategy(table)->view_budget(), 2u);
}

TEST(ParseStrategySpecTest, JsonObject) {
  const auto s = MakeStrategy(ParseStrategySpec(R"({"name":"local-table","m":2,"table":[0,1,1,0]})"));
  EXPECT_EQ(s->name(), "local-table");
  EXPECT_EQ(s->view_budget(), 2u);
  EXPECT_EQ(s->contract(), AccessContract::kLocalView);
}

TEST(ParseStrategySpecTest, Errors) {
  EXPECT_THROW(MakeStrategy(ParseStrategySpec("teleport")), ConfigError);
  EXPECT_THROW(MakeStrategy(nlohmann::json{{"name", "local-table"}, {"m", -1}, {"table", {0}}}), ConfigError);
  EXPECT_THROW(ParseStrategySpec("constant:7"), ConfigError);
  EXPECT_THROW(MakeStrategy(ParseStrategySpec("local-random:1.5")), ConfigError);
  EXPECT_THROW(MakeStrategy(ParseStrategySpec("local-table:011")), ConfigError);
  EXPECT_THROW(MakeStrategy(nlohmann::json{{"name", "local-table"}, {"m", 1}}), ConfigError);
  EXPECT_THROW(MakeStrategy(nlohmann::json::array()), ConfigError);
}

TEST(MakeStrategyTest, ParamsRoundTrip) {
  for (const char* text : {"fns", "constant:0", "local-random:0.9", "local-table:01101001",
                           R"({"name":"local-random","p":0.25,"mix":{"weight":0.5,"m":1,"table":[1,0]}})",
                           R"({"name":"shared-mixture","tables":[{"m":0,"table":[1]},{"m":1,"table":[0,1]}]})"}) {
    const auto s = MakeStrategy(ParseStrategySpec(text));
    EXPECT_EQ(MakeStrategy(s->Params())->Params(), s->Params()) << text;
  }
}

TEST(AccessContractTest, Declared) {
  EXPECT_EQ(FnsStrategy().contract(), AccessContract::kLocalViewWithOracle);
  EXPECT_EQ(ConstantStrategy(0).contract(), AccessContract::kLocalView);
#if NSGAME_ENABLE_CHEAT_STRATEGY
  EXPECT_EQ(CheatStrategy().contract(), AccessContract::kForbiddenAccess);
  EXPECT_EQ(MakeStrategy(ParseStrategySpec("cheat"))->name(), "cheat");
#endif
}

}  // namespace
}  // namespace nsgame
