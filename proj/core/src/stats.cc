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

#include "nsgame/stats.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace nsgame {

Interval WilsonInterval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  if (successes > n) throw std::invalid_argument("more successes than trials");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double ChiSquarePValue(double statistic, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("chi-square needs positive degrees of freedom");
  if (statistic <= 0.0) return 1.0;
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

ChiSquareResult ChiSquareUniform(std::span<const std::uint64_t> observed) {
  if (observed.size() < 2) throw std::invalid_argument("need at least two bins");
  double total = 0.0;
  for (auto c : observed) total += static_cast<double>(c);
  if (total <= 0.0) throw std::invalid_argument("no observations");
  const double expected = total / static_cast<double>(observed.size());
  ChiSquareResult r;
  for (auto c : observed) {
    const double d = static_cast<double>(c) - expected;
    r.statistic += d * d / expected;
  }
  r.dof = static_cast<double>(observed.size() - 1);
  r.p_value = ChiSquarePValue(r.statistic, r.dof);
  return r;
}

ChiSquareResult ChiSquareHomogeneity(std::span<const std::uint64_t> successes, std::uint64_t trials_per_group) {
  if (successes.size() < 2) throw std::invalid_argument("need at least two groups");
  if (trials_per_group == 0) throw std::invalid_argument("groups are empty");
  const double groups = static_cast<double>(successes.size());
  const double n = static_cast<double>(trials_per_group);
  double total_success = 0.0;
  for (auto s : successes) total_success += static_cast<double>(s);
  const double pooled = total_success / (groups * n);
  ChiSquareResult r;
  r.dof = groups - 1.0;
  if (pooled <= 0.0 || pooled >= 1.0) return r;
  const double expect_win = n * pooled;
  const double expect_loss = n * (1.0 - pooled);
  for (auto s : successes) {
    const double w = static_cast<double>(s);
    const double l = n - w;
    r.statistic += (w - expect_win) * (w - expect_win) / expect_win + (l - expect_loss) * (l - expect_loss) / expect_loss;
  }
  r.p_value = ChiSquarePValue(r.statistic, r.dof);
  return r;
}

}  // namespace nsgame
