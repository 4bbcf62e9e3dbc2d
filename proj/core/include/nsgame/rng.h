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

// Counter-based hashing and hierarchical seed derivation.
//
// Nothing here carries mutable shared state: every value is a pure function
// of (key, counter). A master seed is split into trial seeds, a trial seed
// into per-player and shared seeds, and so on, so any subtree of an
// experiment can be regenerated independently and in any order.

#ifndef NSGAME_RNG_H_
#define NSGAME_RNG_H_

#include <cstdint>
#include <limits>

namespace nsgame {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Pure keyed hash of a 64-bit counter.
constexpr std::uint64_t HashWord(std::uint64_t key, std::uint64_t counter) {
  return Mix64(Mix64(key) ^ Mix64(counter * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

// Tags keep sibling subtrees of the seed hierarchy apart.
enum class SeedTag : std::uint64_t {
  kTrial = 0x7472,
  kRoot = 0x726f,
  kPlayer = 0x706c,
  kShared = 0x7368,
  kSample = 0x736d,
};

constexpr std::uint64_t DeriveSeed(std::uint64_t parent, SeedTag tag, std::uint64_t index) {
  return HashWord(HashWord(parent, static_cast<std::uint64_t>(tag)), index);
}

// A stateless-at-heart generator: the n-th output is HashWord(key, n).
// Satisfies UniformRandomBitGenerator so it can drive std algorithms, but the
// library itself only uses NextUnit() to stay platform independent.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return HashWord(key_, counter_++); }

  // Uniform double in [0, 1) with 53 bits of resolution.
  double NextUnit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return NextUnit() < p; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace nsgame

#endif  // NSGAME_RNG_H_
