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

#include "nsgame/bitstream.h"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nsgame/errors.h"
#include "nsgame/rng.h"

namespace nsgame {
namespace {

// Beyond this many bits two distinct generator classes are treated as
// undecided. A 64-bit hash agreeing on 2^16 consecutive bits does not happen
// for distinct (seed, shift) pairs in practice.
constexpr std::uint64_t kGeneratorScanLimit = 1u << 16;

void CheckBits(const std::vector<Bit>& bits, const char* what) {
  for (Bit b : bits) {
    if (b > 1) throw std::invalid_argument(std::string(what) + " contains a non-binary digit");
  }
}

std::vector<Bit> MinimalPeriod(std::vector<Bit> period) {
  const std::size_t n = period.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i) repeats = period[i] == period[i % d];
    if (repeats) {
      period.resize(d);
      break;
    }
  }
  return period;
}

void RotateLeft(std::vector<Bit>& word, std::uint64_t n) {
  if (word.empty()) return;
  std::rotate(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(n % word.size()), word.end());
}

std::uint64_t Lcm(std::uint64_t a, std::uint64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

BitStream::BitStream() : period_{0} {}

BitStream BitStream::Periodic(std::vector<Bit> preperiod, std::vector<Bit> period) {
  if (period.empty()) throw std::invalid_argument("period must be nonempty");
  CheckBits(preperiod, "preperiod");
  CheckBits(period, "period");
  BitStream s;
  s.kind_ = StreamKind::kPeriodic;
  s.preperiod_ = std::move(preperiod);
  s.period_ = MinimalPeriod(std::move(period));
  return s;
}

BitStream BitStream::Generator(std::uint64_t seed, std::int64_t shift) {
  BitStream s;
  s.kind_ = StreamKind::kGenerator;
  s.period_.clear();
  s.seed_ = seed;
  s.shift_ = shift;
  return s;
}

BitStream BitStream::FromRational(std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num >= den || den > (std::uint64_t{1} << 62)) {
    throw std::invalid_argument("FromRational expects 0 <= num < den <= 2^62");
  }
  // Long division; the expansion becomes periodic once a remainder repeats.
  std::map<std::uint64_t, std::size_t> seen;
  std::vector<Bit> digits;
  std::uint64_t r = num;
  while (!seen.contains(r)) {
    seen.emplace(r, digits.size());
    r *= 2;
    const Bit bit = r >= den ? 1 : 0;
    if (bit) r -= den;
    digits.push_back(bit);
  }
  const auto start = static_cast<std::ptrdiff_t>(seen.at(r));
  return Periodic(std::vector<Bit>(digits.begin(), digits.begin() + start),
                  std::vector<Bit>(digits.begin() + start, digits.end()));
}

Bit BitStream::BaseAt(std::uint64_t i) const {
  if (kind_ == StreamKind::kGenerator) {
    const std::int64_t j = static_cast<std::int64_t>(i) + shift_;
    const std::uint64_t block = static_cast<std::uint64_t>(j >> 6);
    return static_cast<Bit>((HashWord(seed_, block) >> (static_cast<std::uint64_t>(j) & 63)) & 1);
  }
  if (i <= preperiod_.size()) return preperiod_[i - 1];
  return period_[(i - preperiod_.size() - 1) % period_.size()];
}

Bit BitStream::At(std::uint64_t i) const {
  if (i == 0) throw std::out_of_range("bit indices are 1-based");
  if (!overrides_.empty()) {
    auto it = std::lower_bound(overrides_.begin(), overrides_.end(), i,
                               [](const Override& o, std::uint64_t idx) { return o.index < idx; });
    if (it != overrides_.end() && it->index == i) return it->bit;
  }
  return BaseAt(i);
}

BitStream BitStream::Shifted(std::uint64_t n) const {
  if (n == 0) return *this;
  BitStream out = *this;
  if (kind_ == StreamKind::kGenerator) {
    out.shift_ += static_cast<std::int64_t>(n);
  } else {
    const std::uint64_t dropped = std::min<std::uint64_t>(n, preperiod_.size());
    out.preperiod_.erase(out.preperiod_.begin(), out.preperiod_.begin() + static_cast<std::ptrdiff_t>(dropped));
    RotateLeft(out.period_, n - dropped);
  }
  out.overrides_.clear();
  for (const Override& o : overrides_) {
    if (o.index > n) out.overrides_.push_back({o.index - n, o.bit});
  }
  return out;
}

void BitStream::SetOverride(std::uint64_t index, Bit bit) {
  if (index == 0) throw std::invalid_argument("override index must be >= 1");
  if (bit > 1) throw std::invalid_argument("override bit must be 0 or 1");
  auto it = std::lower_bound(overrides_.begin(), overrides_.end(), index,
                             [](const Override& o, std::uint64_t idx) { return o.index < idx; });
  if (it != overrides_.end() && it->index == index) {
    it->bit = bit;
  } else {
    overrides_.insert(it, Override{index, bit});
  }
}

BitStream BitStream::WithOverride(std::uint64_t index, Bit bit) const {
  BitStream out = *this;
  out.SetOverride(index, bit);
  return out;
}

BitStream BitStream::WithOverrides(std::span<const Override> overrides) const {
  BitStream out = *this;
  for (const Override& o : overrides) out.SetOverride(o.index, o.bit);
  return out;
}

BitStream BitStream::WithoutOverrides() const {
  BitStream out = *this;
  out.overrides_.clear();
  return out;
}

std::uint64_t BitStream::max_override_index() const {
  return overrides_.empty() ? 0 : overrides_.back().index;
}

BitStream BakerShift(const BitStream& s) { return s.Shifted(1); }

BitStream PadPrefixZeros(const BitStream& s, std::uint64_t k) {
  if (k == 0) return s;
  BitStream base;
  if (s.is_generator()) {
    base = BitStream::Generator(s.seed(), s.shift() - static_cast<std::int64_t>(k));
  } else {
    std::vector<Bit> pre(k, 0);
    pre.insert(pre.end(), s.preperiod().begin(), s.preperiod().end());
    base = BitStream::Periodic(std::move(pre), s.period());
  }
  std::vector<Override> moved;
  moved.reserve(s.overrides().size() + (s.is_generator() ? k : 0));
  if (s.is_generator()) {
    for (std::uint64_t i = 1; i <= k; ++i) moved.push_back({i, 0});
  }
  for (const Override& o : s.overrides()) moved.push_back({o.index + k, o.bit});
  return base.WithOverrides(moved);
}

std::vector<Bit> PhaseAlignedPeriod(const BitStream& s) {
  if (!s.is_periodic()) throw std::invalid_argument("PhaseAlignedPeriod needs a periodic stream");
  // Tail bit i (i > P) is period[(i - P - 1) mod L]; the aligned word w must
  // satisfy w[(i - 1) mod L] = period[(i - P - 1) mod L], i.e. a right
  // rotation by P.
  std::vector<Bit> word = s.period();
  const std::uint64_t len = word.size();
  const std::uint64_t p = s.preperiod().size() % len;
  RotateLeft(word, (len - p) % len);
  return word;
}

EquivalenceWitness EventuallyEqual(const BitStream& a, const BitStream& b) {
  const std::uint64_t override_bound = std::max(a.max_override_index(), b.max_override_index());

  auto find_disagreement = [&](std::uint64_t from, std::uint64_t count) -> EquivalenceWitness {
    for (std::uint64_t i = from; i < from + count; ++i) {
      if (a.At(i) != b.At(i)) return {Verdict::kNotEquivalent, i};
    }
    return {Verdict::kUnknown, 0};
  };

  if (a.is_generator() && b.is_generator()) {
    if (a.seed() == b.seed() && a.shift() == b.shift()) return {Verdict::kEquivalent, override_bound};
    return find_disagreement(override_bound + 1, kGeneratorScanLimit);
  }
  if (a.is_periodic() && b.is_periodic()) {
    const std::uint64_t start =
        std::max<std::uint64_t>({override_bound, a.preperiod().size(), b.preperiod().size()});
    if (PhaseAlignedPeriod(a) == PhaseAlignedPeriod(b)) return {Verdict::kEquivalent, start};
    // Distinct tails differ somewhere in every window of lcm(L_a, L_b) bits
    // past both preperiods.
    EquivalenceWitness w = find_disagreement(start + 1, Lcm(a.period().size(), b.period().size()));
    if (w.verdict != Verdict::kNotEquivalent) throw std::logic_error("periodic tails differ but no witness found");
    return w;
  }
  return {Verdict::kUnknown, 0};
}

void to_json(nlohmann::json& j, const BitStream& s) {
  nlohmann::json overrides = nlohmann::json::object();
  for (const Override& o : s.overrides()) overrides[std::to_string(o.index)] = o.bit;
  j = nlohmann::json{
      {"kind", s.is_periodic() ? "periodic" : "generator"},
      {"preperiod", s.preperiod()},
      {"period", s.period()},
      {"seed", s.seed()},
      {"shift", s.shift()},
      {"overrides", std::move(overrides)},
  };
}

namespace {

std::vector<Bit> ReadBits(const nlohmann::json& j, const char* field) {
  std::vector<Bit> bits;
  if (!j.contains(field)) return bits;
  const auto& arr = j.at(field);
  if (!arr.is_array()) throw FormatError(std::string("stream field '") + field + "' must be an array");
  for (const auto& v : arr) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 1) {
      throw FormatError(std::string("stream field '") + field + "' must hold bits 0/1");
    }
    bits.push_back(static_cast<Bit>(v.get<int>()));
  }
  return bits;
}

}  // namespace

BitStream BitStreamFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("stream descriptor must be a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw FormatError("stream field 'kind' missing");
  const std::string kind = j.at("kind").get<std::string>();

  BitStream s;
  if (kind == "periodic") {
    std::vector<Bit> period = ReadBits(j, "period");
    if (period.empty()) throw FormatError("stream field 'period' must be nonempty");
    s = BitStream::Periodic(ReadBits(j, "preperiod"), std::move(period));
    if (j.contains("shift")) {
      if (!j.at("shift").is_number_integer() || j.at("shift").get<std::int64_t>() < 0) {
        throw FormatError("stream field 'shift' must be a nonnegative integer for periodic streams");
      }
      s = s.Shifted(j.at("shift").get<std::uint64_t>());
    }
  } else if (kind == "generator") {
    if (!j.contains("seed") || !j.at("seed").is_number_integer()) {
      throw FormatError("stream field 'seed' must be an integer");
    }
    std::int64_t shift = 0;
    if (j.contains("shift")) {
      if (!j.at("shift").is_number_integer()) throw FormatError("stream field 'shift' must be an integer");
      shift = j.at("shift").get<std::int64_t>();
    }
    s = BitStream::Generator(j.at("seed").get<std::uint64_t>(), shift);
  } else {
    throw FormatError("stream field 'kind' must be \"periodic\" or \"generator\", got \"" + kind + "\"");
  }

  if (j.contains("overrides")) {
    const auto& ov = j.at("overrides");
    if (!ov.is_object()) throw FormatError("stream field 'overrides' must be an object");
    std::vector<Override> list;
    for (const auto& [key, value] : ov.items()) {
      std::uint64_t index = 0;
      try {
        std::size_t used = 0;
        index = std::stoull(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw FormatError("override key '" + key + "' is not an index");
      }
      if (index == 0) throw FormatError("override indices are 1-based");
      if (!value.is_number_integer() || value.get<std::int64_t>() < 0 || value.get<std::int64_t>() > 1) {
        throw FormatError("override " + key + " must be a bit");
      }
      list.push_back({index, static_cast<Bit>(value.get<int>())});
    }
    s = s.WithOverrides(list);
  }
  return s;
}

}  // namespace nsgame
