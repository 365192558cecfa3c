// Copyright 2026 The sparseforest Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sparseforest {

/// Binomial(N, p) mass function, entries k = 0..N.
std::vector<double> binomial_pmf(std::size_t N, double p);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t count = 0;
};
MeanSe mean_se(std::span<const double> values);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  bool passes(double alpha) const { return p_value >= alpha; }
};

/// Goodness of fit of observed value counts (index = value) against a
/// probability vector over the same values. Adjacent bins are pooled left to
/// right until each expects at least `min_expected`; a short remainder joins
/// the last bin.
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probs, double min_expected = 5.0);

/// Quartiles by linear interpolation between order statistics.
struct Quartiles {
  double min, q1, median, q3, max;
};
Quartiles quartiles(std::vector<double> values);

}  // namespace sparseforest
