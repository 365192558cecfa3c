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

#include "sparseforest/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "sparseforest/errors.hpp"

namespace sparseforest {

std::vector<double> binomial_pmf(std::size_t N, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial probability outside [0,1]");
  std::vector<double> pmf(N + 1, 0.0);
  if (p == 0.0) {
    pmf[0] = 1.0;
    return pmf;
  }
  if (p == 1.0) {
    pmf[N] = 1.0;
    return pmf;
  }
  const boost::math::binomial_distribution<double> law(static_cast<double>(N), p);
  for (std::size_t k = 0; k <= N; ++k) pmf[k] = boost::math::pdf(law, static_cast<double>(k));
  return pmf;
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  out.count = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double var = ss / static_cast<double>(values.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> observed,
                               std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size()) throw DimensionError("observed/probability size mismatch");
  double total = 0.0;
  for (auto o : observed) total += static_cast<double>(o);
  if (total <= 0.0) throw DomainError("chi-square test with no observations");

  struct Bin {
    double obs = 0.0, expected = 0.0;
  };
  // Left-to-right pooling: a bin closes once it expects min_expected
  // observations; a short remainder joins the last closed bin.
  std::vector<Bin> bins;
  Bin run;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    run.obs += static_cast<double>(observed[k]);
    run.expected += total * probs[k];
    if (run.expected >= min_expected) {
      bins.push_back(run);
      run = Bin{};
    }
  }
  if (run.obs > 0.0 || run.expected > 0.0) {
    if (bins.empty()) {
      bins.push_back(run);
    } else {
      bins.back().obs += run.obs;
      bins.back().expected += run.expected;
    }
  }

  ChiSquareResult result;
  for (const auto& b : bins) {
    if (b.expected > 0.0)
      result.statistic += (b.obs - b.expected) * (b.obs - b.expected) / b.expected;
    else if (b.obs > 0.0)
      result.statistic = INFINITY;
  }
  if (bins.size() < 2) {
    result.dof = 0;
    result.p_value = 1.0;
    return result;
  }
  result.dof = bins.size() - 1;
  if (!std::isfinite(result.statistic)) {
    result.p_value = 0.0;
    return result;
  }
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(result.dof));
  result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
  return result;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw DomainError("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + frac * (values[i + 1] - values[i]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

}  // namespace sparseforest
