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

// Referee for the hat game and the baker game.
//
// Players are numbered 1..K. Player k must output bit k of the root, and
// sees only bits k+1, k+2, ... of it. In the baker game that view arrives as
// x_k, the root pushed through the doubling map k times; in the hat game it
// is the row of hats in front of the player. The two games carry the same
// information and score identically.

#ifndef NSGAME_GAME_H_
#define NSGAME_GAME_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nsgame/bitstream.h"
#include "nsgame/oracle.h"
#include "nsgame/strategy.h"

namespace nsgame {

enum class GameVariant : std::uint8_t { kBaker, kHat };

const char* GameVariantName(GameVariant v);
// Throws ConfigError for anything but "baker" / "hat".
GameVariant ParseGameVariant(std::string_view name);

struct GameSpec {
  GameVariant variant = GameVariant::kBaker;
  std::uint64_t players = 1;
  BitStream root;
  const Strategy* strategy = nullptr;
  // Shared by every player; may be null for strategies that never use it.
  ChoiceOracle* oracle = nullptr;
};

// [x_1, ..., x_K] with x_k = BakerShift^k(root).
std::vector<BitStream> GenerateInputs(const BitStream& root, std::uint64_t players);

// The bit player k must output: bit k of the root, which is 2 x_{k-1} - x_k.
inline Bit TargetBit(const BitStream& root, std::uint64_t k) { return root.At(k); }

// Throws std::out_of_range unless 1 <= k <= spec.players.
PlayerView MakePlayerView(const GameSpec& spec, std::uint64_t k);

struct TrialOptions {
  // When off, forbidden-access strategies are scored like any other. Only
  // the harness self-tests turn this off.
  bool enforce_no_signaling = true;
};

struct TrialRecord {
  BitStream root;
  std::vector<Bit> outputs;
  std::vector<std::int8_t> success;  // s_k = +1 win, -1 loss
  std::vector<std::int64_t> walk;    // S_n = s_1 + ... + s_n
  // Last losing player, 0 if nobody lost. Absent when the last simulated
  // player lost (no winning tail inside the window) or the trial is invalid.
  std::optional<std::uint64_t> threshold;
  // False for trials quarantined as signaling. outputs/success still hold the
  // raw results.
  bool valid = true;

  std::uint64_t wins() const;
};

// Plays one round. Player private randomness and the shared seed are derived
// from trial_seed. Throws StrategyFault if a local strategy exceeds its
// declared view budget or touches view structure.
TrialRecord RunTrial(const GameSpec& spec, std::uint64_t trial_seed, const TrialOptions& options = {});

// {"root": stream, "outputs": [...], "s": [...], "S": [...],
//  "threshold": t|null, "valid": bool}
void to_json(nlohmann::json& j, const TrialRecord& r);

}  // namespace nsgame

#endif  // NSGAME_GAME_H_
