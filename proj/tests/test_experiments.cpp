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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "sparseforest/errors.hpp"
#include "sparseforest/experiments.hpp"

using namespace sparseforest;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sparseforest_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentSpec small_mse(SyntheticModel model) {
  ExperimentSpec s;
  s.model = model;
  s.policy = PolicyKind::CartEmpirical;
  s.d_values = {10};
  s.n_values = {50, 500};
  s.replicates = 3;
  s.trees = 40;
  s.test_size = 400;
  return s;
}

}  // namespace

TEST_CASE("rate arithmetic") {
  CHECK(rate_exponent(2) == doctest::Approx(0.3510752140013299).epsilon(1e-14));
  CHECK(kn_exponent(2) == doctest::Approx(0.64892478599867).epsilon(1e-13));
  CHECK(kn_exponent(1) == doctest::Approx(0.48030248743652193).epsilon(1e-14));
  for (std::size_t S = 1; S < 50; ++S) REQUIRE(kn_exponent(S) == doctest::Approx(1 - rate_exponent(S)));
  CHECK(minimax_exponent(100) == doctest::Approx(2.0 / 102.0));
  CHECK(optimal_kn(1000000, 2, 1.0, 1.0) == 7826);
  CHECK_THROWS_AS(optimal_kn(1000, 1, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(optimal_kn(1000, 2, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(optimal_kn(1, 2, 1.0, 1.0), DomainError);
  for (std::size_t S = 1; S < 40; ++S) REQUIRE(rate_exponent(S + 1) < rate_exponent(S));
}

TEST_CASE("sparsity rule is sufficient, with 20 converse exceptions up to d = 200") {
  const std::vector<std::pair<std::size_t, std::size_t>> expected{
      {37, 20},  {61, 33},  {74, 40},  {87, 47},   {98, 53},   {111, 60},  {122, 66},
      {124, 67}, {135, 73}, {137, 74}, {148, 80},  {159, 86},  {161, 87},  {172, 93},
      {174, 94}, {183, 99}, {185, 100}, {187, 101}, {196, 106}, {198, 107}};
  std::vector<std::pair<std::size_t, std::size_t>> exceptions;
  for (std::size_t d = 2; d <= 200; ++d)
    for (std::size_t S = 1; S <= d; ++S) {
      const bool wins = sparse_rate_wins(S, d);
      if (sparsity_rule(S, d)) REQUIRE(wins);
      if (wins && !sparsity_rule(S, d)) exceptions.emplace_back(d, S);
      // exact crossover S < 0.75 d / (2 log 2)
      REQUIRE(wins == (static_cast<double>(S) < 0.75 * static_cast<double>(d) / (2 * std::log(2.0))));
    }
  CHECK(exceptions == expected);
}

TEST_CASE("purely random cut ratios estimate the split probabilities") {
  ExperimentSpec s;
  s.model = SyntheticModel::sinus(4);
  s.policy = PolicyKind::PurelyRandom;
  s.d_values = {4};
  s.n_values = {100};
  s.replicates = 3;
  s.trees = 200;
  s.k_n = 16;
  const auto table = run_cut_probability(s);
  CHECK_FALSE(table.warnings.empty());
  for (std::size_t j = 1; j <= 4; ++j) CHECK(std::abs(table.mean_ratio(100, 4, j) - 0.25) < 0.03);
}

TEST_CASE("guided cut ratios favour the strong coordinate") {
  ExperimentSpec s;
  s.model = SyntheticModel::sinus(10);
  s.d_values = {10};
  s.n_values = {50, 1000};
  s.replicates = 5;
  s.trees = 100;
  const auto a = run_cut_probability(s, 1);
  const auto b = run_cut_probability(s, 4);
  REQUIRE(a.rows.size() == 2 * 5 * 10);
  CHECK(a.warnings.empty());
  // rows of one replicate sum to one
  for (std::size_t i = 0; i < a.rows.size(); i += 10) {
    double total = 0.0;
    for (std::size_t j = 0; j < 10; ++j) total += a.rows[i + j].ratio;
    REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  const double strong = a.mean_ratio(1000, 10, 1);
  for (std::size_t j = 2; j <= 10; ++j) CHECK(strong > a.mean_ratio(1000, 10, j));
  // more data concentrates the splits on the strong coordinate
  CHECK(strong > a.mean_ratio(50, 10, 1));
  // identical for any thread count
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) REQUIRE(a.rows[i].ratio == b.rows[i].ratio);

  const auto dir = scratch("cut");
  write_cut_probs_csv(a, dir / "cut_probs.csv");
  const auto back = read_cut_probs_csv(dir / "cut_probs.csv");
  REQUIRE(back.rows.size() == a.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    REQUIRE(back.rows[i].ratio == a.rows[i].ratio);
    REQUIRE(back.rows[i].coordinate == a.rows[i].coordinate);
    REQUIRE(back.rows[i].n == a.rows[i].n);
  }
  const auto plots = plot_cut_probs(a, dir);
  CHECK(plots.size() == 2);
  for (const auto& p : plots) CHECK(slurp(p).rfind("<svg", 0) == 0);
}

TEST_CASE("CART learns a constant exactly") {
  auto s = small_mse(SyntheticModel::constant(10, 2.5));
  const auto curve = run_mse_curve(s);
  for (const auto& p : curve.points) CHECK(p.mse_mean < 1e-24);
}

TEST_CASE("MSE falls with n for every model") {
  for (auto model : {SyntheticModel::sinus(10), SyntheticModel::friedman1(10),
                     SyntheticModel::tree(10)}) {
    const auto curve = run_mse_curve(small_mse(model));
    CAPTURE(to_string(model.kind));
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.at(500, 10).mse_mean < curve.at(50, 10).mse_mean);
    CHECK(curve.at(500, 10).replicates == 3);
    CHECK(curve.at(50, 10).mse_stderr > 0.0);
  }
}

TEST_CASE("MSE curve is reproducible and round-trips") {
  auto s = small_mse(SyntheticModel::friedman1(10));
  s.d_values = {5, 10};
  s.replicates = 2;
  s.trees = 10;
  const auto one = run_mse_curve(s, 1);
  const auto four = run_mse_curve(s, 4);
  const auto dir = scratch("mse");
  write_mse_curve_csv(one, dir / "a.csv");
  write_mse_curve_csv(four, dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  const auto back = read_mse_curve_csv(dir / "a.csv");
  REQUIRE(back.points.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.points[i].mse_mean == one.points[i].mse_mean);
    CHECK(back.points[i].model == one.points[i].model);
  }
  CHECK(std::is_sorted(one.points.begin(), one.points.end(), [](const auto& a, const auto& b) {
    return std::pair{a.d, a.n} < std::pair{b.d, b.n};
  }));
  CHECK(plot_mse_curve(one, dir).size() == 2);
  s.seed = 2;
  CHECK(run_mse_curve(s, 1).points[0].mse_mean != one.points[0].mse_mean);
}

TEST_CASE("experiment validation") {
  ExperimentSpec s;
  s.model = SyntheticModel::sinus(10);
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.n_values = {100, 50};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.d_values = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.k_n = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.model = SyntheticModel::friedman1(10);
  bad.d_values = {4};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.policy = PolicyKind::CartEmpirical;
  bad.m_try = 11;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = s;
  bad.replicates = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(s.resolved_k_n(1000, true) == 32);
  CHECK(s.resolved_k_n(1000, false) == 200);
  CHECK(s.resolved_k_n(3, false) == 2);
  CHECK(s.resolved_m_try(10, true) == 10);
  bad = s;
  bad.policy = PolicyKind::CartEmpirical;
  CHECK(bad.resolved_m_try(10, false) == 3);
  CHECK(bad.resolved_m_try(2, false) == 1);
}

TEST_CASE("CSV readers reject malformed files") {
  const auto dir = scratch("bad");
  {
    std::ofstream out(dir / "x.csv");
    out << "n,d,replicate,coordinate\n1,2,3,4\n";
  }
  CHECK_THROWS_AS(read_cut_probs_csv(dir / "x.csv"), DataError);
  CHECK_THROWS_AS(read_mse_curve_csv(dir / "missing.csv"), DataError);
}
