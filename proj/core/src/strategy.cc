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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "nsgame/errors.h"

namespace nsgame {
namespace {

constexpr unsigned kMaxTableBits = 20;

LookupTable TableFromJson(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object with 'm' and 'table'");
  if (!j.contains("table") || !j.at("table").is_array()) throw ConfigError(where + ".table must be an array of bits");
  LookupTable t;
  t.outputs.clear();
  for (const auto& v : j.at("table")) {
    if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > 1) {
      throw ConfigError(where + ".table must hold bits 0/1");
    }
    t.outputs.push_back(static_cast<Bit>(v.get<int>()));
  }
  if (j.contains("m")) {
    if (!j.at("m").is_number_integer() || j.at("m").get<std::int64_t>() < 0) throw ConfigError(where + ".m must be a nonnegative integer");
    t.m = j.at("m").get<unsigned>();
  } else {
    // Infer m from the table length.
    while (t.m < kMaxTableBits && (std::size_t{1} << t.m) < t.outputs.size()) ++t.m;
  }
  try {
    t.Validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return t;
}

nlohmann::json TableToJson(const LookupTable& t) { return {{"m", t.m}, {"table", t.outputs}}; }

double ProbabilityField(const nlohmann::json& spec, const char* field, double fallback) {
  if (!spec.contains(field)) return fallback;
  const auto& v = spec.at(field);
  if (!v.is_number()) throw ConfigError(std::string("strategy.") + field + " must be a number");
  const double p = v.get<double>();
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string("strategy.") + field + " must lie in [0,1]");
  return p;
}

}  // namespace

Bit PlayerView::bit(std::uint64_t i) const {
  if (i == 0) throw std::out_of_range("view indices are 1-based");
  max_index_read_ = std::max(max_index_read_, i);
  return tail_.At(i);
}

std::uint64_t PlayerView::Prefix(unsigned m) const {
  std::uint64_t packed = 0;
  for (unsigned i = 1; i <= m; ++i) packed = (packed << 1) | bit(i);
  return packed;
}

void LookupTable::Validate() const {
  if (m > kMaxTableBits) throw ConfigError("table width m=" + std::to_string(m) + " exceeds 20");
  if (outputs.size() != (std::size_t{1} << m)) {
    throw ConfigError("table needs 2^m = " + std::to_string(std::size_t{1} << m) + " entries, got " +
                      std::to_string(outputs.size()));
  }
  for (Bit b : outputs) {
    if (b > 1) throw ConfigError("table entries must be bits");
  }
}

Bit FnsGuess(GuessContext& ctx) {
  if (ctx.oracle == nullptr) throw StrategyFault("fns strategy needs a choice oracle");
  const std::uint64_t k = ctx.player();
  const BitStream padded = PadPrefixZeros(ctx.view.stream(), k);
  const BitStream rep = ctx.oracle->Representative(padded);
  return FirstFractionBit(rep.Shifted(k - 1));
}

Bit LocalDeterministicGuess(GuessContext& ctx, const LookupTable& table) {
  return table(ctx.view.Prefix(table.m));
}

Bit LocalRandomGuess(GuessContext& ctx, double p) { return ctx.private_rng.Bernoulli(p) ? 1 : 0; }

#if NSGAME_ENABLE_CHEAT_STRATEGY
Bit CheatSignalingGuess(GuessContext& ctx) {
  if (ctx.backdoor == nullptr) throw StrategyFault("cheat strategy invoked without a backdoor");
  return ctx.backdoor->Peek(ctx.player());
}
#endif

const char* AccessContractName(AccessContract c) {
  switch (c) {
    case AccessContract::kLocalView:
      return "local-view";
    case AccessContract::kLocalViewWithOracle:
      return "local-view+oracle";
    case AccessContract::kForbiddenAccess:
      return "forbidden-access";
  }
  return "?";
}

ConstantStrategy::ConstantStrategy(Bit bit) : bit_(bit) {
  if (bit > 1) throw ConfigError("constant strategy bit must be 0 or 1");
}

LocalTableStrategy::LocalTableStrategy(LookupTable table) : table_(std::move(table)) { table_.Validate(); }

nlohmann::json LocalTableStrategy::Params() const {
  nlohmann::json j = TableToJson(table_);
  j["name"] = name();
  return j;
}

LocalRandomStrategy::LocalRandomStrategy(double p, double mix_weight, LookupTable table)
    : p_(p), mix_weight_(mix_weight), table_(std::move(table)) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("local-random p must lie in [0,1]");
  if (!(mix_weight >= 0.0 && mix_weight <= 1.0)) throw ConfigError("local-random mix weight must lie in [0,1]");
  table_.Validate();
}

Bit LocalRandomStrategy::Guess(GuessContext& ctx) const {
  if (mix_weight_ > 0.0 && ctx.private_rng.Bernoulli(mix_weight_)) return LocalDeterministicGuess(ctx, table_);
  return LocalRandomGuess(ctx, p_);
}

nlohmann::json LocalRandomStrategy::Params() const {
  nlohmann::json j = {{"name", name()}, {"p", p_}};
  if (mix_weight_ > 0.0) {
    nlohmann::json mix = TableToJson(table_);
    mix["weight"] = mix_weight_;
    j["mix"] = std::move(mix);
  }
  return j;
}

SharedMixtureStrategy::SharedMixtureStrategy(std::vector<LookupTable> tables) : tables_(std::move(tables)) {
  if (tables_.empty()) throw ConfigError("shared-mixture needs at least one table");
  for (const auto& t : tables_) t.Validate();
}

std::uint64_t SharedMixtureStrategy::view_budget() const {
  unsigned m = 0;
  for (const auto& t : tables_) m = std::max(m, t.m);
  return m;
}

Bit SharedMixtureStrategy::Guess(GuessContext& ctx) const {
  const std::uint64_t pick = HashWord(ctx.shared_seed, 0) % tables_.size();
  return LocalDeterministicGuess(ctx, tables_[pick]);
}

nlohmann::json SharedMixtureStrategy::Params() const {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : tables_) tables.push_back(TableToJson(t));
  return {{"name", name()}, {"tables", std::move(tables)}};
}

std::unique_ptr<Strategy> MakeStrategy(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("name") || !spec.at("name").is_string()) {
    throw ConfigError("strategy must be an object with a string 'name'");
  }
  const std::string name = spec.at("name").get<std::string>();
  if (name == "fns") return std::make_unique<FnsStrategy>();
  if (name == "constant") {
    int bit = 0;
    if (spec.contains("bit")) {
      if (!spec.at("bit").is_number_integer()) throw ConfigError("strategy.bit must be 0 or 1");
      bit = spec.at("bit").get<int>();
    }
    if (bit != 0 && bit != 1) throw ConfigError("strategy.bit must be 0 or 1");
    return std::make_unique<ConstantStrategy>(static_cast<Bit>(bit));
  }
  if (name == "local-table") return std::make_unique<LocalTableStrategy>(TableFromJson(spec, "strategy"));
  if (name == "local-random") {
    const double p = ProbabilityField(spec, "p", 0.5);
    if (spec.contains("mix")) {
      const auto& mix = spec.at("mix");
      const double w = ProbabilityField(mix, "weight", 0.5);
      return std::make_unique<LocalRandomStrategy>(p, w, TableFromJson(mix, "strategy.mix"));
    }
    return std::make_unique<LocalRandomStrategy>(p);
  }
  if (name == "shared-mixture") {
    if (!spec.contains("tables") || !spec.at("tables").is_array()) {
      throw ConfigError("strategy.tables must be an array of {m, table}");
    }
    std::vector<LookupTable> tables;
    const auto& arr = spec.at("tables");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      tables.push_back(TableFromJson(arr[i], "strategy.tables[" + std::to_string(i) + "]"));
    }
    return std::make_unique<SharedMixtureStrategy>(std::move(tables));
  }
#if NSGAME_ENABLE_CHEAT_STRATEGY
  if (name == "cheat") return std::make_unique<CheatStrategy>();
#endif
  throw ConfigError("unknown strategy \"" + name + "\"");
}

nlohmann::json ParseStrategySpec(std::string_view text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("strategy JSON: ") + e.what());
    }
  }
  const auto colon = text.find(':');
  const std::string name(text.substr(0, colon));
  const std::string arg = colon == std::string_view::npos ? "" : std::string(text.substr(colon + 1));

  if (name == "constant") {
    if (arg != "" && arg != "0" && arg != "1") throw ConfigError("constant:<bit> expects 0 or 1");
    return {{"name", name}, {"bit", arg == "1" ? 1 : 0}};
  }
  if (name == "local-random") {
    double p = 0.5;
    if (!arg.empty()) {
      auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
      if (ec != std::errc() || ptr != arg.data() + arg.size()) {
        throw ConfigError("local-random:<p> expects a number, got \"" + arg + "\"");
      }
    }
    return {{"name", name}, {"p", p}};
  }
  if (name == "local-table") {
    if (arg.empty()) throw ConfigError("local-table:<bits> expects a table such as 0110");
    std::vector<int> table;
    for (char c : arg) {
      if (c != '0' && c != '1') throw ConfigError("local-table:<bits> expects only 0/1 characters");
      table.push_back(c - '0');
    }
    return {{"name", name}, {"table", table}};
  }
  if (!arg.empty()) throw ConfigError("strategy \"" + name + "\" takes no inline parameter");
  return {{"name", name}};
}

}  // namespace nsgame
