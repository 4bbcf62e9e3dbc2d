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

// Player strategies.
//
// Every strategy declares an access contract. Local strategies read a bounded
// number of bits from their own view, oracle strategies may additionally
// consult the shared choice oracle, and the forbidden contract exists only
// for the signaling negative control.

#ifndef NSGAME_STRATEGY_H_
#define NSGAME_STRATEGY_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsgame/bitstream.h"
#include "nsgame/oracle.h"
#include "nsgame/rng.h"

namespace nsgame {

// What player k receives: bits k+1, k+2, ... of the root, re-indexed from 1.
// Bits 1..k of the root are not reachable through the bit-level API. Reads
// are tracked so the referee can audit declared contracts afterwards.
class PlayerView {
 public:
  PlayerView(std::uint64_t player, BitStream tail) : player_(player), tail_(std::move(tail)) {}

  std::uint64_t player() const { return player_; }

  // View bit i (root bit player + i), i >= 1.
  Bit bit(std::uint64_t i) const;
  // Bits 1..m packed most-significant-first: bit 1 is the high bit.
  std::uint64_t Prefix(unsigned m) const;

  // The structural stream, for strategies that hand it to the oracle.
  const BitStream& stream() const {
    structure_accessed_ = true;
    return tail_;
  }

  std::uint64_t max_index_read() const { return max_index_read_; }
  bool structure_accessed() const { return structure_accessed_; }

 private:
  std::uint64_t player_;
  BitStream tail_;
  mutable std::uint64_t max_index_read_ = 0;
  mutable bool structure_accessed_ = false;
};

#if NSGAME_ENABLE_CHEAT_STRATEGY
// Test-only channel to the referee's root. Every Peek is recorded; the
// referee quarantines the trial when enforcement is on.
class RootBackdoor {
 public:
  explicit RootBackdoor(const BitStream& root) : root_(&root) {}

  Bit Peek(std::uint64_t index) {
    ++attempts_;
    return root_->At(index);
  }
  std::uint64_t attempts() const { return attempts_; }

 private:
  const BitStream* root_;
  std::uint64_t attempts_ = 0;
};
#endif

struct GuessContext {
  PlayerView& view;
  // Private randomness, unique to (trial, player).
  CounterRng private_rng;
  // Shared randomness, identical for every player of a trial.
  std::uint64_t shared_seed = 0;
  ChoiceOracle* oracle = nullptr;
#if NSGAME_ENABLE_CHEAT_STRATEGY
  RootBackdoor* backdoor = nullptr;
#endif

  std::uint64_t player() const { return view.player(); }
};

// Deterministic response to the first m view bits. outputs has 2^m entries,
// indexed by PlayerView::Prefix(m).
struct LookupTable {
  unsigned m = 0;
  std::vector<Bit> outputs{0};

  // Throws ConfigError unless outputs.size() == 2^m and all entries are bits.
  void Validate() const;
  Bit operator()(std::uint64_t prefix) const { return outputs[prefix]; }
};

// Pad the view with k zeros, ask the oracle for the representative of that
// class, and answer with its bit k.
Bit FnsGuess(GuessContext& ctx);
Bit LocalDeterministicGuess(GuessContext& ctx, const LookupTable& table);
// 1 with probability p from private randomness.
Bit LocalRandomGuess(GuessContext& ctx, double p);
#if NSGAME_ENABLE_CHEAT_STRATEGY
// Reads the player's own target bit through the backdoor.
Bit CheatSignalingGuess(GuessContext& ctx);
#endif

enum class AccessContract : std::uint8_t { kLocalView, kLocalViewWithOracle, kForbiddenAccess };

const char* AccessContractName(AccessContract c);

class Strategy {
 public:
  virtual ~Strategy() = default;

  virtual std::string name() const = 0;
  virtual AccessContract contract() const = 0;
  // Largest view index a local strategy may read.
  virtual std::uint64_t view_budget() const { return 0; }
  virtual Bit Guess(GuessContext& ctx) const = 0;
  // Round-trips through MakeStrategy.
  virtual nlohmann::json Params() const = 0;
};

class FnsStrategy final : public Strategy {
 public:
  std::string name() const override { return "fns"; }
  AccessContract contract() const override { return AccessContract::kLocalViewWithOracle; }
  Bit Guess(GuessContext& ctx) const override { return FnsGuess(ctx); }
  nlohmann::json Params() const override { return {{"name", name()}}; }
};

class ConstantStrategy final : public Strategy {
 public:
  explicit ConstantStrategy(Bit bit);
  std::string name() const override { return "constant"; }
  AccessContract contract() const override { return AccessContract::kLocalView; }
  Bit Guess(GuessContext&) const override { return bit_; }
  nlohmann::json Params() const override { return {{"name", name()}, {"bit", bit_}}; }

 private:
  Bit bit_;
};

class LocalTableStrategy final : public Strategy {
 public:
  explicit LocalTableStrategy(LookupTable table);
  std::string name() const override { return "local-table"; }
  AccessContract contract() const override { return AccessContract::kLocalView; }
  std::uint64_t view_budget() const override { return table_.m; }
  Bit Guess(GuessContext& ctx) const override { return LocalDeterministicGuess(ctx, table_); }
  nlohmann::json Params() const override;

 private:
  LookupTable table_;
};

// Bernoulli(p) guess, optionally mixed with a lookup table: with probability
// `mix_weight` the table answers, otherwise the coin does.
class LocalRandomStrategy final : public Strategy {
 public:
  explicit LocalRandomStrategy(double p, double mix_weight = 0.0, LookupTable table = {});
  std::string name() const override { return "local-random"; }
  AccessContract contract() const override { return AccessContract::kLocalView; }
  std::uint64_t view_budget() const override { return mix_weight_ > 0.0 ? table_.m : 0; }
  Bit Guess(GuessContext& ctx) const override;
  nlohmann::json Params() const override;

 private:
  double p_;
  double mix_weight_;
  LookupTable table_;
};

// All players of a trial use the shared seed to pick the same table from a
// list, so their answers are correlated through pre-shared randomness only.
class SharedMixtureStrategy final : public Strategy {
 public:
  explicit SharedMixtureStrategy(std::vector<LookupTable> tables);
  std::string name() const override { return "shared-mixture"; }
  AccessContract contract() const override { return AccessContract::kLocalView; }
  std::uint64_t view_budget() const override;
  Bit Guess(GuessContext& ctx) const override;
  nlohmann::json Params() const override;

 private:
  std::vector<LookupTable> tables_;
};

#if NSGAME_ENABLE_CHEAT_STRATEGY
class CheatStrategy final : public Strategy {
 public:
  std::string name() const override { return "cheat"; }
  AccessContract contract() const override { return AccessContract::kForbiddenAccess; }
  Bit Guess(GuessContext& ctx) const override { return CheatSignalingGuess(ctx); }
  nlohmann::json Params() const override { return {{"name", name()}}; }
};
#endif

// Builds a strategy from {"name": ..., params...}. Throws ConfigError naming
// the bad field.
std::unique_ptr<Strategy> MakeStrategy(const nlohmann::json& spec);

// Accepts a JSON object, or the shorthands "fns", "constant:<bit>",
// "local-random:<p>", "local-table:<bits>" (e.g. "local-table:0110"),
// and "cheat" in test builds. Returns the JSON form.
nlohmann::json ParseStrategySpec(std::string_view text);

}  // namespace nsgame

#endif  // NSGAME_STRATEGY_H_
