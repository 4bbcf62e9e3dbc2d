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

#include "nsgame/oracle.h"

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nsgame/errors.h"

namespace nsgame {

ClassHandle ClassOf(const BitStream& s) {
  ClassHandle c;
  c.kind = s.kind();
  if (s.is_generator()) {
    c.seed = s.seed();
    c.shift = s.shift();
  } else {
    c.tail = PhaseAlignedPeriod(s);
  }
  return c;
}

BitStream CanonicalRepresentative(const ClassHandle& c) {
  if (c.kind == StreamKind::kGenerator) return BitStream::Generator(c.seed, c.shift);
  return BitStream::Periodic({}, c.tail);
}

namespace {

class ActiveGuard {
 public:
  explicit ActiveGuard(std::atomic<int>& active) : active_(active) {
    if (active_.fetch_add(1, std::memory_order_acq_rel) != 0) {
      active_.fetch_sub(1, std::memory_order_acq_rel);
      throw OracleFault("memoized oracle queried concurrently; memoized runs must be serial");
    }
  }
  ~ActiveGuard() { active_.fetch_sub(1, std::memory_order_acq_rel); }

  ActiveGuard(const ActiveGuard&) = delete;
  ActiveGuard& operator=(const ActiveGuard&) = delete;

 private:
  std::atomic<int>& active_;
};

}  // namespace

BitStream ChoiceOracle::Representative(const BitStream& member) {
  return Representative(ClassOf(member), member);
}

BitStream ChoiceOracle::Representative(const ClassHandle& c, const BitStream& query) {
  if (mode_ == OracleMode::kCanonical) return CanonicalRepresentative(c);

  ActiveGuard guard(active_);
  auto it = table_.find(c);
  if (it != table_.end()) return it->second;
  BitStream rep = query.WithoutOverrides();
  table_.emplace(c, rep);
  return rep;
}

nlohmann::json ChoiceOracle::MemoTableJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [handle, rep] : table_) {
    out.push_back({{"class", handle}, {"representative", rep}});
  }
  return out;
}

void ChoiceOracle::LoadMemoTable(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("memo table must be a JSON array");
  std::map<ClassHandle, BitStream> table;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& entry = j[i];
    if (!entry.is_object() || !entry.contains("class") || !entry.contains("representative")) {
      throw FormatError("memo entry " + std::to_string(i) + " needs 'class' and 'representative'");
    }
    ClassHandle handle = ClassHandleFromJson(entry.at("class"));
    BitStream rep = BitStreamFromJson(entry.at("representative"));
    if (ClassOf(rep) != handle) {
      throw FormatError("memo entry " + std::to_string(i) + ": representative is not in its class");
    }
    table.insert_or_assign(std::move(handle), std::move(rep));
  }
  table_ = std::move(table);
}

std::uint64_t DisagreementBound(const BitStream& member, const BitStream& rep) {
  const EquivalenceWitness w = EventuallyEqual(member, rep);
  if (!w.equivalent()) throw Error("DisagreementBound: streams are not provably equivalent");
  for (std::uint64_t t = w.index; t > 0; --t) {
    if (member.At(t) != rep.At(t)) return t;
  }
  return 0;
}

void to_json(nlohmann::json& j, const ClassHandle& c) {
  if (c.kind == StreamKind::kGenerator) {
    j = nlohmann::json{{"kind", "generator"}, {"seed", c.seed}, {"shift", c.shift}};
  } else {
    j = nlohmann::json{{"kind", "periodic"}, {"tail", c.tail}};
  }
}

ClassHandle ClassHandleFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw FormatError("class descriptor needs a string 'kind'");
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "generator") {
    if (!j.contains("seed") || !j.at("seed").is_number_integer() || !j.contains("shift") ||
        !j.at("shift").is_number_integer()) {
      throw FormatError("generator class descriptor needs integer 'seed' and 'shift'");
    }
    return ClassOf(BitStream::Generator(j.at("seed").get<std::uint64_t>(), j.at("shift").get<std::int64_t>()));
  }
  if (kind == "periodic") {
    if (!j.contains("tail") || !j.at("tail").is_array() || j.at("tail").empty()) {
      throw FormatError("periodic class descriptor needs a nonempty 'tail'");
    }
    std::vector<Bit> tail;
    for (const auto& v : j.at("tail")) {
      if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 1) {
        throw FormatError("periodic class 'tail' must hold bits");
      }
      tail.push_back(static_cast<Bit>(v.get<int>()));
    }
    // Normalizes to the minimal period.
    return ClassOf(BitStream::Periodic({}, std::move(tail)));
  }
  throw FormatError("unknown class kind \"" + kind + "\"");
}

const char* OracleModeName(OracleMode mode) {
  return mode == OracleMode::kCanonical ? "canonical" : "memoized";
}

OracleMode ParseOracleMode(std::string_view name) {
  if (name == "canonical") return OracleMode::kCanonical;
  if (name == "memoized") return OracleMode::kMemoized;
  throw ConfigError("unknown oracle mode \"" + std::string(name) + "\" (expected canonical|memoized)");
}

}  // namespace nsgame
