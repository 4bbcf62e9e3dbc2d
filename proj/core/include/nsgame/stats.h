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

// Small statistical helpers shared by the experiment harness and tests.

#ifndef NSGAME_STATS_H_
#define NSGAME_STATS_H_

#include <cstdint>
#include <span>

namespace nsgame {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool Contains(double v) const { return lo <= v && v <= hi; }
};

// Wilson score interval for a binomial proportion at z standard deviations.
// n == 0 yields [0, 1].
Interval WilsonInterval(std::uint64_t successes, std::uint64_t n, double z);

// Upper tail Pr[X >= statistic] for X ~ chi-square(dof).
double ChiSquarePValue(double statistic, double dof);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

// Goodness of fit of observed counts against equal expected counts.
ChiSquareResult ChiSquareUniform(std::span<const std::uint64_t> observed);

// Homogeneity of success probabilities across groups that each saw
// trials_per_group Bernoulli trials (a 2 x G contingency table). Returns
// p = 1 when every group is all-success or all-failure identically.
ChiSquareResult ChiSquareHomogeneity(std::span<const std::uint64_t> successes, std::uint64_t trials_per_group);

}  // namespace nsgame

#endif  // NSGAME_STATS_H_
