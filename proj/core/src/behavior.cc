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

#include "nsgame/behavior.h"

#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nsgame/errors.h"

namespace nsgame {

Alphabet::Alphabet(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  strides_.assign(sizes_.size(), 1);
  count_ = 1;
  for (std::size_t k = sizes_.size(); k-- > 0;) {
    if (sizes_[k] < 1) throw std::invalid_argument("alphabet sizes must be positive");
    strides_[k] = count_;
    count_ *= static_cast<std::size_t>(sizes_[k]);
  }
}

std::size_t Alphabet::Encode(std::span<const int> symbols) const {
  if (symbols.size() != sizes_.size()) throw std::invalid_argument("symbol vector has the wrong length");
  std::size_t index = 0;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (symbols[k] < 0 || symbols[k] >= sizes_[k]) throw std::out_of_range("symbol outside its alphabet");
    index += static_cast<std::size_t>(symbols[k]) * strides_[k];
  }
  return index;
}

std::vector<int> Alphabet::Decode(std::size_t index) const {
  std::vector<int> out(sizes_.size());
  for (std::size_t k = 0; k < sizes_.size(); ++k) out[k] = Digit(index, k);
  return out;
}

int Alphabet::Digit(std::size_t index, std::size_t party) const {
  return static_cast<int>((index / strides_[party]) % static_cast<std::size_t>(sizes_[party]));
}

template <typename Scalar>
BasicBehavior<Scalar>::BasicBehavior(std::vector<int> input_sizes, std::vector<int> output_sizes)
    : inputs_(std::move(input_sizes)), outputs_(std::move(output_sizes)) {
  if (inputs_.parties() != outputs_.parties()) throw std::invalid_argument("input/output party counts differ");
  if (inputs_.parties() == 0) throw std::invalid_argument("a behavior needs at least one party");
  table_.assign(inputs_.count() * outputs_.count(), Scalar(0));
}

namespace {

bool Near(const Rational& a, const Rational& b, double /*tol*/) { return a == b; }
bool Near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string Show(const Rational& r) { return ToString(r); }
std::string Show(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

std::vector<int> Pick(const std::vector<int>& v, const std::vector<int>& parties) {
  std::vector<int> out;
  out.reserve(parties.size());
  for (int k : parties) out.push_back(v[static_cast<std::size_t>(k)]);
  return out;
}

bool IsFnsFast(const FunctionTuple& ft) {
  const Alphabet& in = ft.inputs;
  for (std::size_t k = 0; k < ft.f.size(); ++k) {
    // First value seen for each own input.
    std::vector<int> seen(static_cast<std::size_t>(in.sizes()[k]), -1);
    for (std::size_t x = 0; x < in.count(); ++x) {
      int& ref = seen[static_cast<std::size_t>(in.Digit(x, k))];
      if (ref < 0) {
        ref = ft.f[k][x];
      } else if (ref != ft.f[k][x]) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

template <typename Scalar>
void CheckNormalized(const BasicBehavior<Scalar>& b, double tol) {
  const std::size_t nx = b.inputs().count();
  const std::size_t na = b.outputs().count();
  for (std::size_t x = 0; x < nx; ++x) {
    Scalar sum(0);
    for (std::size_t a = 0; a < na; ++a) {
      const Scalar& p = b.at(x, a);
      if (!(p >= Scalar(0) || Near(p, Scalar(0), tol)) || !(p <= Scalar(1) || Near(p, Scalar(1), tol))) {
        throw NotNormalizedError("entry P(a=" + std::to_string(a) + "|x=" + std::to_string(x) + ") = " + Show(p) +
                                 " lies outside [0,1]");
      }
      sum += p;
    }
    if (!Near(sum, Scalar(1), tol)) {
      std::ostringstream os;
      os << "row for inputs [";
      const auto xs = b.inputs().Decode(x);
      for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
      os << "] sums to " << Show(sum);
      throw NotNormalizedError(os.str());
    }
  }
}

template <typename Scalar>
NsReport CheckNoSignaling(const BasicBehavior<Scalar>& b, double tol, bool strict) {
  CheckNormalized(b, tol);
  const std::size_t n = b.parties();
  const Alphabet& in = b.inputs();
  const Alphabet& out = b.outputs();

  std::vector<std::vector<int>> subsets;
  if (strict) {
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
      std::vector<int> s;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (std::uint64_t{1} << k)) s.push_back(static_cast<int>(k));
      }
      subsets.push_back(std::move(s));
    }
  } else if (n > 1) {
    for (std::size_t k = 0; k < n; ++k) subsets.push_back({static_cast<int>(k)});
  }

  NsReport report;
  report.strict = strict;
  for (const auto& parties : subsets) {
    std::vector<int> sub_out_sizes;
    for (int k : parties) sub_out_sizes.push_back(out.sizes()[static_cast<std::size_t>(k)]);
    const Alphabet sub_out(sub_out_sizes);

    // marginal[x][a_S] = sum over outputs of the other parties.
    std::vector<std::vector<Scalar>> marginal(in.count(), std::vector<Scalar>(sub_out.count(), Scalar(0)));
    for (std::size_t x = 0; x < in.count(); ++x) {
      for (std::size_t a = 0; a < out.count(); ++a) {
        marginal[x][sub_out.Encode(Pick(out.Decode(a), parties))] += b.at(x, a);
      }
    }
    // Compare every input vector against the first one sharing its x_S.
    std::map<std::vector<int>, std::size_t> reference;
    for (std::size_t x = 0; x < in.count(); ++x) {
      const std::vector<int> xs = in.Decode(x);
      auto [it, inserted] = reference.emplace(Pick(xs, parties), x);
      if (inserted) continue;
      const std::size_t ref = it->second;
      for (std::size_t as = 0; as < sub_out.count(); ++as) {
        if (Near(marginal[ref][as], marginal[x][as], tol)) continue;
        report.pass = false;
        std::vector<int> numbered = parties;
        for (int& k : numbered) ++k;
        report.violations.push_back(NsViolation{std::move(numbered), it->first, sub_out.Decode(as), in.Decode(ref), xs,
                                                Show(marginal[ref][as]), Show(marginal[x][as])});
      }
    }
  }
  return report;
}

template <typename Scalar>
bool IsDeterministicExtremal(const BasicBehavior<Scalar>& b, double tol) {
  for (std::size_t x = 0; x < b.inputs().count(); ++x) {
    for (std::size_t a = 0; a < b.outputs().count(); ++a) {
      const Scalar& p = b.at(x, a);
      if (!Near(p, Scalar(0), tol) && !Near(p, Scalar(1), tol)) return false;
    }
  }
  return true;
}

template <typename Scalar>
FunctionTuple FunctionsFromDeterministic(const BasicBehavior<Scalar>& b, double tol) {
  if (!IsDeterministicExtremal(b, tol)) throw Error("behavior is not deterministic");
  CheckNormalized(b, tol);
  FunctionTuple ft;
  ft.inputs = b.inputs();
  ft.output_sizes = b.outputs().sizes();
  ft.f.assign(b.parties(), std::vector<int>(b.inputs().count(), 0));
  for (std::size_t x = 0; x < b.inputs().count(); ++x) {
    for (std::size_t a = 0; a < b.outputs().count(); ++a) {
      if (!Near(b.at(x, a), Scalar(1), tol)) continue;
      for (std::size_t k = 0; k < b.parties(); ++k) ft.f[k][x] = b.outputs().Digit(a, k);
    }
  }
  return ft;
}

Behavior BehaviorFromFunctions(const FunctionTuple& ft) {
  Behavior b(ft.inputs.sizes(), ft.output_sizes);
  std::vector<int> a(ft.f.size());
  for (std::size_t x = 0; x < ft.inputs.count(); ++x) {
    for (std::size_t k = 0; k < ft.f.size(); ++k) a[k] = ft.f[k][x];
    b.at(x, b.outputs().Encode(a)) = 1;
  }
  return b;
}

FnsReport CheckFns(const FunctionTuple& ft) {
  FnsReport report;
  const Alphabet& in = ft.inputs;
  for (std::size_t k = 0; k < ft.f.size(); ++k) {
    std::vector<std::ptrdiff_t> reference(static_cast<std::size_t>(in.sizes()[k]), -1);
    for (std::size_t x = 0; x < in.count(); ++x) {
      const int own = in.Digit(x, k);
      auto& ref = reference[static_cast<std::size_t>(own)];
      if (ref < 0) {
        ref = static_cast<std::ptrdiff_t>(x);
        continue;
      }
      const auto rx = static_cast<std::size_t>(ref);
      if (ft.f[k][rx] != ft.f[k][x]) {
        report.pass = false;
        report.violations.push_back(
            FnsViolation{static_cast<int>(k) + 1, own, in.Decode(rx), in.Decode(x), ft.f[k][rx], ft.f[k][x]});
      }
    }
  }
  return report;
}

bool FactorsIntoLocalFunctions(const FunctionTuple& ft) {
  const Alphabet& in = ft.inputs;
  for (std::size_t k = 0; k < ft.f.size(); ++k) {
    const auto own_size = static_cast<std::size_t>(in.sizes()[k]);
    const int out_size = ft.output_sizes[k];
    // Odometer over all candidate F_k : X_k -> A_k.
    std::vector<int> candidate(own_size, 0);
    bool found = false;
    while (!found) {
      found = true;
      for (std::size_t x = 0; x < in.count() && found; ++x) {
        found = ft.f[k][x] == candidate[static_cast<std::size_t>(in.Digit(x, k))];
      }
      if (found) break;
      std::size_t i = 0;
      while (i < own_size && ++candidate[i] == out_size) candidate[i++] = 0;
      if (i == own_size) break;
    }
    if (!found) return false;
  }
  return true;
}

LocalityEquivalenceReport CheckFunctionalLocalityEquivalence(const std::vector<int>& input_sizes,
                                                             const std::vector<int>& output_sizes,
                                                             double budget) {
  if (input_sizes.size() != output_sizes.size() || input_sizes.empty()) {
    throw ConfigError("need matching, nonempty input and output alphabet lists");
  }
  for (int s : output_sizes) {
    if (s < 1) throw ConfigError("alphabet sizes must be positive");
  }
  FunctionTuple ft;
  ft.inputs = Alphabet(input_sizes);
  ft.output_sizes = output_sizes;
  const std::size_t grid = ft.inputs.count();

  double required = 1.0;
  for (int s : output_sizes) required *= std::pow(static_cast<double>(s), static_cast<double>(grid));
  if (required > budget) throw EnumerationBudgetExceeded(required, budget);

  ft.f.assign(output_sizes.size(), std::vector<int>(grid, 0));
  LocalityEquivalenceReport report;
  while (true) {
    const bool fns = IsFnsFast(ft);
    const bool factored = FactorsIntoLocalFunctions(ft);
    ++report.total;
    report.fns += fns ? 1 : 0;
    report.factored += factored ? 1 : 0;
    report.mismatched += fns != factored ? 1 : 0;

    // Next tuple: odometer over every (party, input) digit.
    std::size_t k = 0;
    std::size_t x = 0;
    while (k < ft.f.size()) {
      if (++ft.f[k][x] < output_sizes[k]) break;
      ft.f[k][x] = 0;
      if (++x == grid) {
        x = 0;
        ++k;
      }
    }
    if (k == ft.f.size()) break;
  }
  report.equal = report.mismatched == 0;
  return report;
}

std::string ToString(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational ParseRational(const std::string& text) {
  const auto slash = text.find('/');
  auto parse_int = [&](const std::string& s) {
    if (s.empty()) throw FormatError("empty number in \"" + text + "\"");
    std::size_t start = s[0] == '-' || s[0] == '+' ? 1 : 0;
    if (start == s.size()) throw FormatError("bad number in \"" + text + "\"");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') throw FormatError("bad number in \"" + text + "\"");
    }
    return boost::multiprecision::cpp_int(s);
  };
  if (slash == std::string::npos) return Rational(parse_int(text));
  const auto num = parse_int(text.substr(0, slash));
  const auto den = parse_int(text.substr(slash + 1));
  if (den == 0) throw FormatError("zero denominator in \"" + text + "\"");
  return Rational(num, den);
}

namespace {

std::vector<int> ReadSizes(const nlohmann::json& j, const char* field, std::size_t parties) {
  if (!j.contains(field) || !j.at(field).is_array()) {
    throw FormatError(std::string("behavior field '") + field + "' must be an array");
  }
  std::vector<int> sizes;
  for (const auto& v : j.at(field)) {
    if (!v.is_number_integer() || v.get<int>() < 1) {
      throw FormatError(std::string("behavior field '") + field + "' must hold positive integers");
    }
    sizes.push_back(v.get<int>());
  }
  if (sizes.size() != parties) {
    throw FormatError(std::string("behavior field '") + field + "' must list one size per party");
  }
  return sizes;
}

std::vector<int> ReadSymbols(const nlohmann::json& entry, const char* field, const std::vector<int>& sizes,
                             const std::string& where) {
  if (!entry.contains(field) || !entry.at(field).is_array()) {
    throw FormatError(where + "." + field + " must be an array");
  }
  const auto& arr = entry.at(field);
  if (arr.size() != sizes.size()) throw FormatError(where + "." + field + " must have one symbol per party");
  std::vector<int> out;
  for (std::size_t k = 0; k < arr.size(); ++k) {
    if (!arr[k].is_number_integer() || arr[k].get<int>() < 0 || arr[k].get<int>() >= sizes[k]) {
      throw FormatError(where + "." + field + "[" + std::to_string(k) + "] is outside its alphabet");
    }
    out.push_back(arr[k].get<int>());
  }
  return out;
}

template <typename Scalar, typename Convert>
BasicBehavior<Scalar> FillTable(const nlohmann::json& table, std::vector<int> in, std::vector<int> out,
                                Convert convert) {
  BasicBehavior<Scalar> b(in, out);
  std::vector<bool> seen(b.inputs().count() * b.outputs().count(), false);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::string where = "table[" + std::to_string(i) + "]";
    const auto& entry = table[i];
    if (!entry.is_object()) throw FormatError(where + " must be an object");
    const std::size_t x = b.inputs().Encode(ReadSymbols(entry, "x", in, where));
    const std::size_t a = b.outputs().Encode(ReadSymbols(entry, "a", out, where));
    if (!entry.contains("p")) throw FormatError(where + ".p is missing");
    const std::size_t slot = x * b.outputs().count() + a;
    if (seen[slot]) throw FormatError(where + " duplicates an earlier (x, a) entry");
    seen[slot] = true;
    b.at(x, a) = convert(entry.at("p"), where + ".p");
  }
  return b;
}

}  // namespace

AnyBehavior BehaviorFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("behavior must be a JSON object");
  if (!j.contains("parties") || !j.at("parties").is_number_integer() || j.at("parties").get<int>() < 1) {
    throw FormatError("behavior field 'parties' must be a positive integer");
  }
  const auto parties = static_cast<std::size_t>(j.at("parties").get<int>());
  if (parties > 16) throw FormatError("behavior field 'parties' is limited to 16");
  std::vector<int> in = ReadSizes(j, "inputs", parties);
  std::vector<int> out = ReadSizes(j, "outputs", parties);
  if (!j.contains("table") || !j.at("table").is_array()) throw FormatError("behavior field 'table' must be an array");
  const auto& table = j.at("table");

  bool floating = false;
  for (const auto& entry : table) {
    if (entry.is_object() && entry.contains("p") && entry.at("p").is_number_float()) floating = true;
  }
  if (floating) {
    return FillTable<double>(table, in, out, [](const nlohmann::json& p, const std::string& where) {
      if (!p.is_number()) throw FormatError(where + " must be a number in a floating table");
      return p.get<double>();
    });
  }
  return FillTable<Rational>(table, in, out, [](const nlohmann::json& p, const std::string& where) {
    if (p.is_number_integer()) return Rational(p.get<std::int64_t>());
    if (!p.is_string()) throw FormatError(where + " must be \"num/den\" or an integer");
    try {
      return ParseRational(p.get<std::string>());
    } catch (const FormatError& e) {
      throw FormatError(where + ": " + e.what());
    }
  });
}

nlohmann::json BehaviorToJson(const Behavior& b) {
  nlohmann::json table = nlohmann::json::array();
  for (std::size_t x = 0; x < b.inputs().count(); ++x) {
    for (std::size_t a = 0; a < b.outputs().count(); ++a) {
      if (b.at(x, a) == 0) continue;
      table.push_back({{"x", b.inputs().Decode(x)}, {"a", b.outputs().Decode(a)}, {"p", ToString(b.at(x, a))}});
    }
  }
  return {{"parties", b.parties()},
          {"inputs", b.inputs().sizes()},
          {"outputs", b.outputs().sizes()},
          {"table", std::move(table)}};
}

void to_json(nlohmann::json& j, const NsViolation& v) {
  j = nlohmann::json{{"parties", v.parties},
                     {"fixed_inputs", v.fixed_inputs},
                     {"fixed_outputs", v.fixed_outputs},
                     {"reference_inputs", v.reference_inputs},
                     {"other_inputs", v.other_inputs},
                     {"reference_p", v.reference_probability},
                     {"other_p", v.other_probability}};
}

void to_json(nlohmann::json& j, const NsReport& r) {
  j = nlohmann::json{{"pass", r.pass}, {"strict", r.strict}, {"violations", r.violations}};
}

void to_json(nlohmann::json& j, const FnsViolation& v) {
  j = nlohmann::json{{"party", v.party}, {"own_input", v.own_input}, {"y", v.y},
                     {"z", v.z},         {"f_y", v.f_y},             {"f_z", v.f_z}};
}

void to_json(nlohmann::json& j, const FnsReport& r) {
  j = nlohmann::json{{"pass", r.pass}, {"violations", r.violations}};
}

void to_json(nlohmann::json& j, const LocalityEquivalenceReport& r) {
  j = nlohmann::json{{"total", r.total},       {"fns", r.fns},     {"factored", r.factored},
                     {"mismatched", r.mismatched}, {"equal", r.equal}};
}

template class BasicBehavior<Rational>;
template class BasicBehavior<double>;
template void CheckNormalized(const Behavior&, double);
template void CheckNormalized(const FloatBehavior&, double);
template NsReport CheckNoSignaling(const Behavior&, double, bool);
template NsReport CheckNoSignaling(const FloatBehavior&, double, bool);
template bool IsDeterministicExtremal(const Behavior&, double);
template bool IsDeterministicExtremal(const FloatBehavior&, double);
template FunctionTuple FunctionsFromDeterministic(const Behavior&, double);
template FunctionTuple FunctionsFromDeterministic(const FloatBehavior&, double);

}  // namespace nsgame
