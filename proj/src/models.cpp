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

#include "sparseforest/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sparseforest/errors.hpp"

namespace sparseforest {

namespace {
constexpr double kPi = std::numbers::pi;

double tree_model_value(std::span<const double> x) {
  using T = TreeModelSpec;
  std::size_t node = 0;
  while (node < T::coordinate.size()) {
    const bool left = x[static_cast<std::size_t>(T::coordinate[node])] < T::threshold[node];
    node = 2 * node + (left ? 1 : 2);
  }
  return T::leaf_value[node - T::coordinate.size()];
}
}  // namespace

SyntheticModel SyntheticModel::sinus(std::size_t d, double noise_sd) {
  return {ModelKind::Sinus, d, noise_sd};
}
SyntheticModel SyntheticModel::friedman1(std::size_t d, double center, double noise_sd) {
  return {ModelKind::Friedman1, d, noise_sd, center};
}
SyntheticModel SyntheticModel::tree(std::size_t d, double noise_sd) {
  return {ModelKind::Tree, d, noise_sd};
}
SyntheticModel SyntheticModel::sinus_linear(std::size_t d, double noise_sd) {
  return {ModelKind::SinusLinear, d, noise_sd};
}
SyntheticModel SyntheticModel::constant(std::size_t d, double level, double noise_sd) {
  SyntheticModel m{ModelKind::Constant, d, noise_sd};
  m.level = level;
  return m;
}

void SyntheticModel::validate() const {
  std::size_t min_d = 1;
  switch (kind) {
    case ModelKind::Sinus:
    case ModelKind::Constant: min_d = 1; break;
    case ModelKind::SinusLinear: min_d = 2; break;
    case ModelKind::Friedman1:
    case ModelKind::Tree: min_d = 5; break;
  }
  if (d < min_d)
    throw ConfigError("model " + name() + " needs d >= " + std::to_string(min_d) + ", got " +
                      std::to_string(d));
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be nonnegative");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Sinus: return "sinus";
    case ModelKind::Friedman1: return "friedman1";
    case ModelKind::Tree: return "tree";
    case ModelKind::SinusLinear: return "sinus_linear";
    case ModelKind::Constant: return "constant";
  }
  return "?";
}

ModelKind model_from_string(const std::string& name) {
  for (auto k : {ModelKind::Sinus, ModelKind::Friedman1, ModelKind::Tree, ModelKind::SinusLinear,
                 ModelKind::Constant})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown model '" + name +
                    "' (sinus, friedman1, tree, sinus_linear, constant)");
}

std::string SyntheticModel::name() const { return to_string(kind); }

std::vector<std::size_t> SyntheticModel::strong() const {
  switch (kind) {
    case ModelKind::Sinus: return {0};
    case ModelKind::SinusLinear: return {0, 1};
    case ModelKind::Friedman1:
    case ModelKind::Tree: return {0, 1, 2, 3, 4};
    case ModelKind::Constant: return {};
  }
  return {};
}

double SyntheticModel::lipschitz() const {
  switch (kind) {
    case ModelKind::Sinus: return 100.0 * kPi;
    case ModelKind::SinusLinear: return std::hypot(100.0 * kPi, 1.0);
    case ModelKind::Friedman1: {
      // |grad r| <= sqrt((10 pi)^2 + (10 pi)^2 + (40 max|x3-c|)^2 + 10^2 + 5^2)
      const double g3 = 40.0 * std::max(std::abs(friedman_center), std::abs(1.0 - friedman_center));
      return std::sqrt(2.0 * 100.0 * kPi * kPi + g3 * g3 + 125.0);
    }
    case ModelKind::Tree: return INFINITY;  // discontinuous
    case ModelKind::Constant: return 0.0;
  }
  return 0.0;
}

double SyntheticModel::sup_square() const {
  switch (kind) {
    case ModelKind::Sinus: return 100.0;
    case ModelKind::SinusLinear: {
      // max of 10 sin(10 pi t) + s over [0,1]^2 is 11, min is -10
      return 121.0;
    }
    case ModelKind::Friedman1: {
      const double c = std::max(friedman_center * friedman_center,
                                (1.0 - friedman_center) * (1.0 - friedman_center));
      const double hi = 10.0 + 20.0 * c + 15.0;
      return hi * hi;
    }
    case ModelKind::Tree: {
      double m = 0.0;
      for (double v : TreeModelSpec::leaf_value) m = std::max(m, v * v);
      return m;
    }
    case ModelKind::Constant: return level * level;
  }
  return 0.0;
}

double truth(const SyntheticModel& model, std::span<const double> x) {
  switch (model.kind) {
    case ModelKind::Sinus: return 10.0 * std::sin(10.0 * kPi * x[0]);
    case ModelKind::SinusLinear: return 10.0 * std::sin(10.0 * kPi * x[0]) + x[1];
    case ModelKind::Friedman1: {
      const double t = x[2] - model.friedman_center;
      return 10.0 * std::sin(kPi * x[0] * x[1]) + 20.0 * t * t + 10.0 * x[3] + 5.0 * x[4];
    }
    case ModelKind::Tree: return tree_model_value(x);
    case ModelKind::Constant: return model.level;
  }
  return 0.0;
}

namespace {
Dataset draw(const SyntheticModel& model, std::size_t n, Rng& rng, bool noisy) {
  model.validate();
  if (n < 1) throw ConfigError("sample size must be at least 1");
  std::vector<double> x(n * model.d);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::span<double> row(x.data() + i * model.d, model.d);
    for (auto& v : row) v = rng.uniform();
    y[i] = truth(model, row);
    if (noisy && model.noise_sd > 0.0) y[i] += model.noise_sd * rng.normal();
  }
  return Dataset(std::move(x), std::move(y), model.d);
}
}  // namespace

Dataset generate(const SyntheticModel& model, std::size_t n, Rng& rng) {
  return draw(model, n, rng, true);
}

Dataset generate_noiseless(const SyntheticModel& model, std::size_t n, Rng& rng) {
  return draw(model, n, rng, false);
}

}  // namespace sparseforest
