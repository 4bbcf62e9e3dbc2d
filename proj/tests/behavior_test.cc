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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "nsgame/errors.h"

namespace nsgame {
namespace {

Behavior LoadFixture(const std::string& name) {
  std::ifstream in(std::string(NSGAME_TEST_FIXTURES) + "/" + name);
  return std::get<Behavior>(BehaviorFromJson(nlohmann::json::parse(in)));
}

// Bipartite binary behavior from a rule p(a, b, x, y).
template <typename F>
Behavior Bipartite(F p) {
  Behavior b({2, 2}, {2, 2});
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) {
          const int xs[] = {x, y};
          const int as[] = {a, bb};
          b.at(xs, as) = p(a, bb, x, y);
        }
  return b;
}

// Independent marginal check for bipartite binary tables: party 1's marginal
// must not depend on y and party 2's must not depend on x.
bool BruteForceBipartiteNs(const Behavior& b) {
  for (int own = 0; own < 2; ++own) {
    for (int out = 0; out < 2; ++out) {
      Rational m1[2], m2[2];
      for (int other = 0; other < 2; ++other) {
        m1[other] = 0;
        m2[other] = 0;
        for (int o = 0; o < 2; ++o) {
          const int x1[] = {own, other}, a1[] = {out, o};
          const int x2[] = {other, own}, a2[] = {o, out};
          m1[other] += b.at(x1, a1);
          m2[other] += b.at(x2, a2);
        }
      }
      if (m1[0] != m1[1] || m2[0] != m2[1]) return false;
    }
  }
  return true;
}

TEST(AlphabetTest, MixedRadix) {
  const Alphabet alpha({3, 2});
  EXPECT_EQ(alpha.count(), 6u);
  const int symbols[] = {2, 1};
  EXPECT_EQ(alpha.Encode(symbols), 5u);
  EXPECT_EQ(alpha.Decode(3), (std::vector<int>{1, 1}));
  EXPECT_EQ(alpha.Digit(4, 0), 2);
}

TEST(CheckNoSignalingTest, PrBoxPasses) {
  const Behavior pr = LoadFixture("pr_box.json");
  CheckNormalized(pr);
  EXPECT_TRUE(BruteForceBipartiteNs(pr));
  const NsReport r = CheckNoSignaling(pr);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_TRUE(CheckNoSignaling(pr, 0.0, true).pass);
}

TEST(CheckNoSignalingTest, SignalingBoxFailsAtPartyTwo) {
  const Behavior sig = LoadFixture("signaling_b_eq_x.json");
  EXPECT_FALSE(BruteForceBipartiteNs(sig));
  const NsReport r = CheckNoSignaling(sig);
  ASSERT_FALSE(r.pass);
  ASSERT_FALSE(r.violations.empty());
  for (const NsViolation& v : r.violations) {
    EXPECT_EQ(v.parties, std::vector<int>{2});
    EXPECT_NE(v.reference_probability, v.other_probability);
    // The witness inputs differ only in party 1's input.
    EXPECT_EQ(v.reference_inputs[1], v.other_inputs[1]);
    EXPECT_NE(v.reference_inputs[0], v.other_inputs[0]);
    // Recompute the two marginals from the table.
    Rational ref = 0, other = 0;
    for (int a = 0; a < 2; ++a) {
      const int out[] = {a, v.fixed_outputs[0]};
      ref += sig.at(v.reference_inputs, out);
      other += sig.at(v.other_inputs, out);
    }
    EXPECT_EQ(ToString(ref), v.reference_probability);
    EXPECT_EQ(ToString(other), v.other_probability);
  }
}

TEST(CheckNoSignalingTest, LocalProductPasses) {
  const Behavior local = LoadFixture("local_a_eq_x_b_eq_y.json");
  EXPECT_TRUE(CheckNoSignaling(local).pass);
  EXPECT_TRUE(IsDeterministicExtremal(local));
}

TEST(CheckNoSignalingTest, StrictCatchesPairSignaling) {
  // a, b uniform with a xor b = z; c = 0. Every single-party marginal is
  // flat, but the (1,2) pair marginal depends on party 3's input.
  Behavior b({1, 1, 2}, {2, 2, 1});
  for (int z = 0; z < 2; ++z)
    for (int a = 0; a < 2; ++a) {
      const int x[] = {0, 0, z};
      const int out[] = {a, a ^ z, 0};
      b.at(x, out) = Rational(1, 2);
    }
  CheckNormalized(b);
  EXPECT_TRUE(CheckNoSignaling(b).pass);
  const NsReport strict = CheckNoSignaling(b, 0.0, true);
  ASSERT_FALSE(strict.pass);
  EXPECT_EQ(strict.violations.front().parties, (std::vector<int>{1, 2}));
}

TEST(CheckNoSignalingTest, InvariantUnderRelabeling) {
  std::mt19937 rng(3);
  for (const char* name : {"pr_box.json", "signaling_b_eq_x.json", "local_a_eq_x_b_eq_y.json"}) {
    const Behavior b = LoadFixture(name);
    const bool expected = CheckNoSignaling(b).pass;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<int>> in_perm(2, {0, 1}), out_perm(2, {0, 1});
      for (auto& p : in_perm) std::shuffle(p.begin(), p.end(), rng);
      for (auto& p : out_perm) std::shuffle(p.begin(), p.end(), rng);
      const bool swap_parties = rng() & 1;
      Behavior relabeled({2, 2}, {2, 2});
      for (std::size_t x = 0; x < 4; ++x) {
        for (std::size_t a = 0; a < 4; ++a) {
          auto xs = b.inputs().Decode(x);
          auto as = b.outputs().Decode(a);
          std::vector<int> nx{in_perm[0][xs[0]], in_perm[1][xs[1]]};
          std::vector<int> na{out_perm[0][as[0]], out_perm[1][as[1]]};
          if (swap_parties) {
            std::swap(nx[0], nx[1]);
            std::swap(na[0], na[1]);
          }
          relabeled.at(nx, na) = b.at(x, a);
        }
      }
      EXPECT_EQ(CheckNoSignaling(relabeled).pass, expected) << name;
    }
  }
}

TEST(CheckNormalizedTest, RejectsBadRows) {
  Behavior b = Bipartite([](int a, int bb, int, int) { return Rational(a == 0 && bb == 0 ? 1 : 0); });
  CheckNormalized(b);
  const int x[] = {1, 1}, out[] = {1, 1};
  b.at(x, out) = Rational(1, 3);
  EXPECT_THROW(CheckNormalized(b), NotNormalizedError);
  EXPECT_THROW(CheckNoSignaling(b), NotNormalizedError);
  Behavior neg = Bipartite([](int a, int, int, int) { return Rational(a == 0 ? 1 : 0); });
  const int o1[] = {0, 0}, o2[] = {1, 0};
  neg.at(x, o1) = Rational(3, 2);
  neg.at(x, o2) = Rational(-1, 2);
  EXPECT_THROW(CheckNormalized(neg), NotNormalizedError);
}

TEST(FloatBehaviorTest, ToleranceIsHonoured) {
  FloatBehavior b({2, 2}, {2, 2});
  for (std::size_t x = 0; x < 4; ++x) {
    const auto xs = b.inputs().Decode(x);
    for (std::size_t a = 0; a < 4; ++a) {
      const auto as = b.outputs().Decode(a);
      if ((as[0] ^ as[1]) == (xs[0] & xs[1])) b.at(x, a) = 0.5;
    }
  }
  const int x[] = {1, 0}, o1[] = {0, 0}, o2[] = {1, 1};
  b.at(x, o1) += 1e-12;
  b.at(x, o2) -= 1e-12;
  EXPECT_TRUE(CheckNoSignaling(b, 1e-9).pass);
  EXPECT_FALSE(CheckNoSignaling(b, 1e-14).pass);
  EXPECT_FALSE(IsDeterministicExtremal(b, 1e-9));
}

TEST(DeterminismTest, Examples) {
  EXPECT_FALSE(IsDeterministicExtremal(LoadFixture("pr_box.json")));
  EXPECT_FALSE(IsDeterministicExtremal(Bipartite([](int, int, int, int) { return Rational(1, 4); })));
  EXPECT_TRUE(IsDeterministicExtremal(LoadFixture("local_a_eq_x_b_eq_y.json")));
}

TEST(FunctionsFromDeterministicTest, ProductBox) {
  const FunctionTuple ft = FunctionsFromDeterministic(LoadFixture("local_a_eq_x_b_eq_y.json"));
  ASSERT_EQ(ft.f.size(), 2u);
  for (std::size_t x = 0; x < 4; ++x) {
    const auto xs = ft.inputs.Decode(x);
    EXPECT_EQ(ft.f[0][x], xs[0]);
    EXPECT_EQ(ft.f[1][x], xs[1]);
  }
  EXPECT_TRUE(CheckFns(ft).pass);
  EXPECT_TRUE(FactorsIntoLocalFunctions(ft));
}

TEST(FunctionsFromDeterministicTest, ConstantBox) {
  const Behavior zero = Bipartite([](int a, int bb, int, int) { return Rational(a == 0 && bb == 0 ? 1 : 0); });
  const FunctionTuple ft = FunctionsFromDeterministic(zero);
  for (const auto& fk : ft.f) EXPECT_TRUE(std::all_of(fk.begin(), fk.end(), [](int v) { return v == 0; }));
  EXPECT_TRUE(CheckFns(ft).pass);
}

TEST(FunctionsFromDeterministicTest, DeterministicSignalingBox) {
  const Behavior sig = Bipartite([](int a, int bb, int x, int) { return Rational(a == 0 && bb == x ? 1 : 0); });
  EXPECT_FALSE(CheckNoSignaling(sig).pass);
  const FunctionTuple ft = FunctionsFromDeterministic(sig);
  for (std::size_t x = 0; x < 4; ++x) EXPECT_EQ(ft.f[1][x], ft.inputs.Decode(x)[0]);
  const FnsReport r = CheckFns(ft);
  ASSERT_FALSE(r.pass);
  const FnsViolation& v = r.violations.front();
  EXPECT_EQ(v.party, 2);
  EXPECT_NE(v.f_y, v.f_z);
  EXPECT_EQ(v.y[1], v.own_input);
  EXPECT_EQ(v.z[1], v.own_input);
  EXPECT_NE(v.y[0], v.z[0]);
  EXPECT_FALSE(FactorsIntoLocalFunctions(ft));
}

TEST(FunctionsFromDeterministicTest, RejectsNonDeterministic) {
  EXPECT_THROW(FunctionsFromDeterministic(LoadFixture("pr_box.json")), Error);
}

TEST(LocalityEquivalenceTest, BinaryTwoParty) {
  const auto r = CheckFunctionalLocalityEquivalence({2, 2}, {2, 2});
  EXPECT_EQ(r.total, 256u);
  EXPECT_EQ(r.fns, 16u);
  EXPECT_EQ(r.factored, 16u);
  EXPECT_EQ(r.mismatched, 0u);
  EXPECT_TRUE(r.equal);
}

TEST(LocalityEquivalenceTest, SingleParty) {
  const auto r = CheckFunctionalLocalityEquivalence({2}, {2});
  EXPECT_EQ(r.total, 4u);
  EXPECT_EQ(r.fns, 4u);
  EXPECT_TRUE(r.equal);
}

TEST(LocalityEquivalenceTest, CountsMatchClosedForm) {
  // total = prod_k |A_k|^(prod |X|), FNS = prod_k |A_k|^|X_k|.
  struct Case {
    std::vector<int> in, out;
  };
  for (const Case& c : {Case{{3, 2}, {2, 2}}, Case{{2, 2}, {3, 2}}, Case{{2, 2, 2}, {2, 2, 1}}, Case{{1, 3}, {2, 2}}}) {
    const double grid = std::accumulate(c.in.begin(), c.in.end(), 1.0, std::multiplies<>());
    double total = 1, fns = 1;
    for (std::size_t k = 0; k < c.in.size(); ++k) {
      total *= std::pow(c.out[k], grid);
      fns *= std::pow(c.out[k], c.in[k]);
    }
    const auto r = CheckFunctionalLocalityEquivalence(c.in, c.out);
    EXPECT_EQ(r.total, static_cast<std::uint64_t>(total));
    EXPECT_EQ(r.fns, static_cast<std::uint64_t>(fns));
    EXPECT_EQ(r.factored, r.fns);
    EXPECT_TRUE(r.equal);
  }
  EXPECT_EQ(CheckFunctionalLocalityEquivalence({3, 2}, {2, 2}).fns, 32u);
}

TEST(LocalityEquivalenceTest, BudgetExceeded) {
  try {
    CheckFunctionalLocalityEquivalence({3, 3}, {2, 2}, 1000);
    FAIL() << "expected EnumerationBudgetExceeded";
  } catch (const EnumerationBudgetExceeded& e) {
    EXPECT_EQ(e.required(), 262144.0);
  }
}

TEST(NsFnsAgreementTest, ExhaustiveOnBinaryTwoParty) {
  // Deterministic tables: NS pass <=> FNS pass, both directions.
  for (int code = 0; code < 256; ++code) {
    FunctionTuple ft;
    ft.inputs = Alphabet({2, 2});
    ft.output_sizes = {2, 2};
    ft.f.assign(2, std::vector<int>(4));
    for (int k = 0; k < 2; ++k)
      for (int x = 0; x < 4; ++x) ft.f[k][x] = (code >> (4 * k + x)) & 1;
    const Behavior b = BehaviorFromFunctions(ft);
    CheckNormalized(b);
    ASSERT_TRUE(IsDeterministicExtremal(b));
    EXPECT_EQ(CheckNoSignaling(b).pass, CheckFns(ft).pass) << code;
    EXPECT_EQ(BruteForceBipartiteNs(b), CheckFns(ft).pass) << code;
    EXPECT_EQ(FunctionsFromDeterministic(b).f, ft.f);
  }
}

TEST(BehaviorJsonTest, RoundTrip) {
  const Behavior pr = LoadFixture("pr_box.json");
  const AnyBehavior again = BehaviorFromJson(BehaviorToJson(pr));
  const Behavior& b = std::get<Behavior>(again);
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t a = 0; a < 4; ++a) EXPECT_EQ(b.at(x, a), pr.at(x, a));
}

TEST(BehaviorJsonTest, FloatsSelectFloatingTable) {
  const auto j = nlohmann::json::parse(R"({"parties":1,"inputs":[1],"outputs":[2],
      "table":[{"x":[0],"a":[0],"p":0.25},{"x":[0],"a":[1],"p":0.75}]})");
  EXPECT_TRUE(std::holds_alternative<FloatBehavior>(BehaviorFromJson(j)));
}

std::string ParseError(const std::string& text) {
  try {
    BehaviorFromJson(nlohmann::json::parse(text));
  } catch (const FormatError& e) {
    return e.what();
  }
  return "no error";
}

TEST(BehaviorJsonTest, ErrorsCarryLocation) {
  const std::string head = R"({"parties":2,"inputs":[2,2],"outputs":[2,2],"table":[)";
  EXPECT_NE(ParseError(head + R"({"x":[0,0],"a":[0,0],"p":"1"},{"x":[0,0],"a":[0,0],"p":"0"}]})")
                .find("table[1]"),
            std::string::npos);
  EXPECT_NE(ParseError(head + R"({"x":[0,2],"a":[0,0],"p":"1"}]})").find("table[0].x[1]"), std::string::npos);
  EXPECT_NE(ParseError(head + R"({"x":[0,0],"a":[0,0],"p":"1/0"}]})").find("table[0].p"), std::string::npos);
  EXPECT_NE(ParseError(head + R"({"x":[0,0],"a":[0,0]}]})").find("table[0].p"), std::string::npos);
  EXPECT_NE(ParseError(R"({"parties":0})").find("parties"), std::string::npos);
  EXPECT_NE(ParseError(R"({"parties":2,"inputs":[2],"outputs":[2,2],"table":[]})").find("inputs"), std::string::npos);
}

TEST(RationalTest, ParseAndPrint) {
  EXPECT_EQ(ParseRational("2/4"), Rational(1, 2));
  EXPECT_EQ(ParseRational("-3"), Rational(-3));
  EXPECT_EQ(ToString(Rational(1, 2)), "1/2");
  EXPECT_EQ(ToString(Rational(2)), "2");
  EXPECT_THROW(ParseRational("0.5"), FormatError);
  EXPECT_THROW(ParseRational("1/"), FormatError);
}

}  // namespace
}  // namespace nsgame
