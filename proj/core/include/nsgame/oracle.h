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

// Choice function over eventual-equality classes of representable streams.
//
// Genuinely arbitrary infinite sequences admit no computable choice function.
// What we can do is pick representatives for the classes our streams live
// in, because the class is carried structurally: a generator class is its
// (seed, shift) pair, a periodic class is its phase-aligned period word.
// Finite overrides never change the class.

#ifndef NSGAME_ORACLE_H_
#define NSGAME_ORACLE_H_

#include <atomic>
#include <compare>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nsgame/bitstream.h"

namespace nsgame {

struct ClassHandle {
  StreamKind kind = StreamKind::kPeriodic;
  std::uint64_t seed = 0;   // generator classes
  std::int64_t shift = 0;   // generator classes
  std::vector<Bit> tail;    // periodic classes: PhaseAlignedPeriod

  friend auto operator<=>(const ClassHandle&, const ClassHandle&) = default;
};

ClassHandle ClassOf(const BitStream& s);

// The zero-preperiod member of a periodic class, or the override-free base of
// a generator class.
BitStream CanonicalRepresentative(const ClassHandle& c);

enum class OracleMode : std::uint8_t { kCanonical, kMemoized };

// One oracle is shared by all players of an experiment.
//
// Canonical mode is stateless. Memoized mode keeps the first member seen for
// each class (with overrides stripped) and returns it for every later query,
// so its answers depend on query order. Memoized lookups must be serialized by
// the caller; overlapping calls raise OracleFault.
class ChoiceOracle {
 public:
  explicit ChoiceOracle(OracleMode mode = OracleMode::kCanonical) : mode_(mode) {}

  ChoiceOracle(const ChoiceOracle&) = delete;
  ChoiceOracle& operator=(const ChoiceOracle&) = delete;

  OracleMode mode() const { return mode_; }

  BitStream Representative(const BitStream& member);
  // `query` must belong to class `c`; memoized mode stores it on a miss.
  BitStream Representative(const ClassHandle& c, const BitStream& query);

  std::size_t table_size() const { return table_.size(); }
  const std::map<ClassHandle, BitStream>& table() const { return table_; }

  // [{"class": handle, "representative": stream}, ...] in handle order.
  nlohmann::json MemoTableJson() const;
  // Replaces the memo table. Throws FormatError if an entry's representative
  // is not a member of its class.
  void LoadMemoTable(const nlohmann::json& j);

 private:
  OracleMode mode_;
  std::map<ClassHandle, BitStream> table_;
  std::atomic<int> active_{0};
};

// Least t such that member and rep agree at every index > t. Throws Error
// unless EventuallyEqual proves the two streams equivalent.
std::uint64_t DisagreementBound(const BitStream& member, const BitStream& rep);

void to_json(nlohmann::json& j, const ClassHandle& c);
ClassHandle ClassHandleFromJson(const nlohmann::json& j);

const char* OracleModeName(OracleMode mode);
// Throws ConfigError for anything but "canonical" / "memoized".
OracleMode ParseOracleMode(std::string_view name);

}  // namespace nsgame

#endif  // NSGAME_ORACLE_H_
