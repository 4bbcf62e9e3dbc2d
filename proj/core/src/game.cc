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

#include "nsgame/game.h"

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nsgame/errors.h"
#include "nsgame/rng.h"

namespace nsgame {

const char* GameVariantName(GameVariant v) { return v == GameVariant::kBaker ? "baker" : "hat"; }

GameVariant ParseGameVariant(std::string_view name) {
  if (name == "baker") return GameVariant::kBaker;
  if (name == "hat") return GameVariant::kHat;
  throw ConfigError("unknown game \"" + std::string(name) + "\" (expected baker|hat)");
}

std::vector<BitStream> GenerateInputs(const BitStream& root, std::uint64_t players) {
  std::vector<BitStream> inputs;
  inputs.reserve(players);
  BitStream x = root;
  for (std::uint64_t k = 1; k <= players; ++k) {
    x = BakerShift(x);
    inputs.push_back(x);
  }
  return inputs;
}

PlayerView MakePlayerView(const GameSpec& spec, std::uint64_t k) {
  if (k == 0 || k > spec.players) throw std::out_of_range("player index out of range");
  if (spec.variant == GameVariant::kBaker) return PlayerView(k, GenerateInputs(spec.root, k).back());
  return PlayerView(k, spec.root.Shifted(k));
}

std::uint64_t TrialRecord::wins() const {
  std::uint64_t n = 0;
  for (auto s : success) n += s > 0 ? 1 : 0;
  return n;
}

TrialRecord RunTrial(const GameSpec& spec, std::uint64_t trial_seed, const TrialOptions& options) {
  if (spec.strategy == nullptr) throw ConfigError("game has no strategy");
  if (spec.players == 0) throw ConfigError("game needs at least one player");
  const Strategy& strategy = *spec.strategy;
  const AccessContract contract = strategy.contract();
  if (contract == AccessContract::kLocalViewWithOracle && spec.oracle == nullptr) {
    throw ConfigError("strategy \"" + strategy.name() + "\" needs a choice oracle");
  }

  TrialRecord record;
  record.root = spec.root;
  record.outputs.reserve(spec.players);
  record.success.reserve(spec.players);
  record.walk.reserve(spec.players);

  const std::uint64_t shared_seed = DeriveSeed(trial_seed, SeedTag::kShared, 0);
#if NSGAME_ENABLE_CHEAT_STRATEGY
  RootBackdoor backdoor(spec.root);
#endif

  BitStream baker_input = spec.root;
  std::int64_t walk = 0;
  std::uint64_t last_loss = 0;
  for (std::uint64_t k = 1; k <= spec.players; ++k) {
    BitStream tail;
    if (spec.variant == GameVariant::kBaker) {
      baker_input = BakerShift(baker_input);
      tail = baker_input;
    } else {
      tail = spec.root.Shifted(k);
    }
    PlayerView view(k, std::move(tail));
    GuessContext ctx{view, CounterRng(DeriveSeed(trial_seed, SeedTag::kPlayer, k)), shared_seed,
                     contract == AccessContract::kLocalViewWithOracle ? spec.oracle : nullptr};
#if NSGAME_ENABLE_CHEAT_STRATEGY
    if (contract == AccessContract::kForbiddenAccess) ctx.backdoor = &backdoor;
#endif

    const Bit out = strategy.Guess(ctx);
    if (out > 1) throw StrategyFault("strategy \"" + strategy.name() + "\" returned a non-bit");
    if (contract == AccessContract::kLocalView) {
      if (view.structure_accessed()) {
        throw StrategyFault("local strategy \"" + strategy.name() + "\" accessed view structure");
      }
      if (view.max_index_read() > strategy.view_budget()) {
        throw StrategyFault("local strategy \"" + strategy.name() + "\" read view bit " +
                            std::to_string(view.max_index_read()) + " beyond its budget of " +
                            std::to_string(strategy.view_budget()));
      }
    }

    const std::int8_t s = out == TargetBit(spec.root, k) ? 1 : -1;
    if (s < 0) last_loss = k;
    walk += s;
    record.outputs.push_back(out);
    record.success.push_back(s);
    record.walk.push_back(walk);
  }

  bool signaled = contract == AccessContract::kForbiddenAccess;
#if NSGAME_ENABLE_CHEAT_STRATEGY
  signaled = signaled || backdoor.attempts() > 0;
#endif
  record.valid = !(signaled && options.enforce_no_signaling);
  if (record.valid && last_loss < spec.players) record.threshold = last_loss;
  return record;
}

void to_json(nlohmann::json& j, const TrialRecord& r) {
  std::vector<int> s(r.success.begin(), r.success.end());
  j = nlohmann::json{
      {"root", r.root},
      {"outputs", r.outputs},
      {"s", std::move(s)},
      {"S", r.walk},
      {"threshold", r.threshold ? nlohmann::json(*r.threshold) : nlohmann::json(nullptr)},
      {"valid", r.valid},
  };
}

}  // namespace nsgame
