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

// Finite conditional probability tables P(a | x) for N parties and checks of
// the no-signaling and functional no-signaling conditions on them.
//
// Tables are exact rationals by default. Floating tables exist for inputs
// that arrive as decimals; every comparison on them takes an explicit
// tolerance.

#ifndef NSGAME_BEHAVIOR_H_
#define NSGAME_BEHAVIOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json_fwd.hpp>

namespace nsgame {

using Rational = boost::multiprecision::cpp_rational;

// Mixed-radix indexing over a vector of alphabet sizes. Party 0 is the most
// significant digit.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<int> sizes);

  const std::vector<int>& sizes() const { return sizes_; }
  std::size_t parties() const { return sizes_.size(); }
  std::size_t count() const { return count_; }
  std::size_t Encode(std::span<const int> symbols) const;
  std::vector<int> Decode(std::size_t index) const;
  int Digit(std::size_t index, std::size_t party) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 1;
};

template <typename Scalar>
class BasicBehavior {
 public:
  BasicBehavior(std::vector<int> input_sizes, std::vector<int> output_sizes);

  std::size_t parties() const { return inputs_.parties(); }
  const Alphabet& inputs() const { return inputs_; }
  const Alphabet& outputs() const { return outputs_; }

  Scalar& at(std::size_t x, std::size_t a) { return table_[x * outputs_.count() + a]; }
  const Scalar& at(std::size_t x, std::size_t a) const { return table_[x * outputs_.count() + a]; }
  Scalar& at(std::span<const int> x, std::span<const int> a) { return at(inputs_.Encode(x), outputs_.Encode(a)); }
  const Scalar& at(std::span<const int> x, std::span<const int> a) const {
    return at(inputs_.Encode(x), outputs_.Encode(a));
  }

 private:
  Alphabet inputs_;
  Alphabet outputs_;
  std::vector<Scalar> table_;
};

using Behavior = BasicBehavior<Rational>;
using FloatBehavior = BasicBehavior<double>;

// Throws NotNormalizedError if an entry leaves [0,1] or a row misses 1.
// Rational tables are checked exactly and ignore tol.
template <typename Scalar>
void CheckNormalized(const BasicBehavior<Scalar>& b, double tol = 0.0);

// One failed marginal comparison: with the inputs of `parties` fixed to
// `fixed_inputs`, the probability of `fixed_outputs` differs between the
// two full input vectors. Parties are numbered from 1.
struct NsViolation {
  std::vector<int> parties;
  std::vector<int> fixed_inputs;
  std::vector<int> fixed_outputs;
  std::vector<int> reference_inputs;
  std::vector<int> other_inputs;
  std::string reference_probability;
  std::string other_probability;
};

struct NsReport {
  bool pass = true;
  bool strict = false;
  std::vector<NsViolation> violations;
};

// Single-party marginals by default. With strict, every nonempty proper
// subset of parties is checked.
template <typename Scalar>
NsReport CheckNoSignaling(const BasicBehavior<Scalar>& b, double tol = 0.0, bool strict = false);

// Every entry is 0 or 1 (within tol for floating tables).
template <typename Scalar>
bool IsDeterministicExtremal(const BasicBehavior<Scalar>& b, double tol = 0.0);

// Output functions f_k(x) of a deterministic behavior.
struct FunctionTuple {
  Alphabet inputs;
  std::vector<int> output_sizes;
  // f[k][x] with x the encoded input vector.
  std::vector<std::vector<int>> f;
};

// Throws Error unless the behavior is deterministic.
template <typename Scalar>
FunctionTuple FunctionsFromDeterministic(const BasicBehavior<Scalar>& b, double tol = 0.0);

Behavior BehaviorFromFunctions(const FunctionTuple& ft);

// f_k(y with x_k) != f_k(z with x_k), with party k numbered from 1.
struct FnsViolation {
  int party = 0;
  int own_input = 0;
  std::vector<int> y;
  std::vector<int> z;
  int f_y = 0;
  int f_z = 0;
};

struct FnsReport {
  bool pass = true;
  std::vector<FnsViolation> violations;
};

FnsReport CheckFns(const FunctionTuple& ft);

// Searches every single-argument F_k : X_k -> A_k for one with
// f_k(x) = F_k(x_k) on the whole grid.
bool FactorsIntoLocalFunctions(const FunctionTuple& ft);

struct LocalityEquivalenceReport {
  std::uint64_t total = 0;     // all deterministic function tuples
  std::uint64_t fns = 0;       // tuples passing CheckFns
  std::uint64_t factored = 0;  // tuples with a local factorization
  std::uint64_t mismatched = 0;
  bool equal = true;           // the two sets coincide
};

// Enumerates every deterministic FunctionTuple on the given alphabets.
// Throws EnumerationBudgetExceeded when the tuple count exceeds budget.
LocalityEquivalenceReport CheckFunctionalLocalityEquivalence(const std::vector<int>& input_sizes,
                                                             const std::vector<int>& output_sizes,
                                                             double budget = 1e6);

using AnyBehavior = std::variant<Behavior, FloatBehavior>;

// {"parties": N, "inputs": [...], "outputs": [...],
//  "table": [{"x": [...], "a": [...], "p": "num/den"}]}
// Missing entries are zero. A table holding any JSON float becomes a
// FloatBehavior; strings and integers stay rational. Throws FormatError with
// the offending location.
AnyBehavior BehaviorFromJson(const nlohmann::json& j);
nlohmann::json BehaviorToJson(const Behavior& b);

std::string ToString(const Rational& r);
Rational ParseRational(const std::string& text);

void to_json(nlohmann::json& j, const NsViolation& v);
void to_json(nlohmann::json& j, const NsReport& r);
void to_json(nlohmann::json& j, const FnsViolation& v);
void to_json(nlohmann::json& j, const FnsReport& r);
void to_json(nlohmann::json& j, const LocalityEquivalenceReport& r);

}  // namespace nsgame

#endif  // NSGAME_BEHAVIOR_H_
