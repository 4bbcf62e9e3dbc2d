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

// Lazy infinite binary sequences.
//
// A BitStream is the binary expansion 0.b1 b2 b3 ... of a point in [0,1],
// stored structurally so that bit i can be computed for any i and so that
// eventual equality of two streams is decidable from structure alone.
//
// Two base families are representable:
//
//   * eventually periodic: a finite preperiod followed by a repeating period
//     word (every rational). The period is kept minimal.
//   * generator backed: bit j of the base is a pure hash of (seed, j) for any
//     signed j. These stand in for generic reals.
//
// On top of the base sit a shift (stream bit i is base bit i + shift) and a
// finite set of overrides that replace individual bits. Periodic streams fold
// shifts into their preperiod/period, so their shift is always zero.
//
// Each stream is one fixed expansion. 1/2 is (1,0,0,...) and never
// (0,1,1,...), so the doubling map has no branch ambiguity here.

#ifndef NSGAME_BITSTREAM_H_
#define NSGAME_BITSTREAM_H_

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace nsgame {

using Bit = std::uint8_t;

enum class StreamKind : std::uint8_t { kPeriodic, kGenerator };

struct Override {
  std::uint64_t index;  // 1-based
  Bit bit;

  friend auto operator<=>(const Override&, const Override&) = default;
};

class BitStream {
 public:
  // The all-zero stream, 0.000...
  BitStream();

  // Throws std::invalid_argument on an empty period or a non-binary digit.
  static BitStream Periodic(std::vector<Bit> preperiod, std::vector<Bit> period);
  static BitStream Generator(std::uint64_t seed, std::int64_t shift = 0);
  // Terminating expansion of num/den, 0 <= num < den <= 2^62.
  static BitStream FromRational(std::uint64_t num, std::uint64_t den);

  // Bit i of the sequence, i >= 1. Overrides take precedence.
  Bit At(std::uint64_t i) const;

  // Same as applying BakerShift n times.
  BitStream Shifted(std::uint64_t n) const;

  BitStream WithOverride(std::uint64_t index, Bit bit) const;
  BitStream WithOverrides(std::span<const Override> overrides) const;
  BitStream WithoutOverrides() const;

  StreamKind kind() const { return kind_; }
  bool is_periodic() const { return kind_ == StreamKind::kPeriodic; }
  bool is_generator() const { return kind_ == StreamKind::kGenerator; }
  const std::vector<Bit>& preperiod() const { return preperiod_; }
  const std::vector<Bit>& period() const { return period_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t shift() const { return shift_; }
  const std::vector<Override>& overrides() const { return overrides_; }
  // 0 when there are no overrides.
  std::uint64_t max_override_index() const;

  // Structural equality. Equal structure implies equal bits; the converse
  // only holds between streams in normal form (e.g. canonical
  // representatives).
  friend bool operator==(const BitStream&, const BitStream&) = default;

 private:
  Bit BaseAt(std::uint64_t i) const;
  void SetOverride(std::uint64_t index, Bit bit);

  StreamKind kind_ = StreamKind::kPeriodic;
  std::vector<Bit> preperiod_;
  std::vector<Bit> period_;
  std::uint64_t seed_ = 0;
  std::int64_t shift_ = 0;
  std::vector<Override> overrides_;  // sorted by index, unique
};

// The doubling map x -> 2x mod 1: drops the most significant bit.
BitStream BakerShift(const BitStream& s);

// (b1, b2, ...) -> (0, ..., 0, b1, b2, ...) with k leading zeros. Generator
// streams are re-based by moving the shift back by k (it may go negative);
// the k zeros are recorded as overrides. Periodic streams get the zeros
// prepended to their preperiod. Either way the base structure survives, so
// class identity is preserved.
BitStream PadPrefixZeros(const BitStream& s, std::uint64_t k);

// floor(2x) for x in [0,1), i.e. bit 1.
inline Bit FirstFractionBit(const BitStream& s) { return s.At(1); }

// Period word of a periodic stream rotated so that it lines up with index 1:
// the tail agrees with the purely periodic stream built from this word.
std::vector<Bit> PhaseAlignedPeriod(const BitStream& s);

enum class Verdict : std::uint8_t { kEquivalent, kNotEquivalent, kUnknown };

// Outcome of the eventual-equality test.
//   kEquivalent:    bits agree at every index > index.
//   kNotEquivalent: index is a position where the bits differ.
//   kUnknown:       no structural decision (index unused).
struct EquivalenceWitness {
  Verdict verdict = Verdict::kUnknown;
  std::uint64_t index = 0;

  bool equivalent() const { return verdict == Verdict::kEquivalent; }
  friend bool operator==(const EquivalenceWitness&, const EquivalenceWitness&) = default;
};

EquivalenceWitness EventuallyEqual(const BitStream& a, const BitStream& b);

// JSON descriptor:
//   {"kind": "periodic"|"generator", "preperiod": [...], "period": [...],
//    "seed": n, "shift": n, "overrides": {"<index>": bit}}
void to_json(nlohmann::json& j, const BitStream& s);
// Throws FormatError naming the offending field.
BitStream BitStreamFromJson(const nlohmann::json& j);

}  // namespace nsgame

#endif  // NSGAME_BITSTREAM_H_
