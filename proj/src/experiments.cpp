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

#include "sparseforest/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>

#include "sparseforest/csv.hpp"
#include "sparseforest/errors.hpp"
#include "sparseforest/forest.hpp"
#include "sparseforest/parallel.hpp"
#include "sparseforest/plot.hpp"
#include "sparseforest/stats.hpp"

namespace sparseforest {

void ExperimentSpec::validate() const {
  if (d_values.empty() || n_values.empty()) throw ConfigError("d_values and n_values must be non-empty");
  if (replicates < 1 || trees < 1 || test_size < 1)
    throw ConfigError("replicates, trees and test_size must be >= 1");
  if (!std::is_sorted(n_values.begin(), n_values.end()))
    throw ConfigError("n_values must be sorted ascending");
  for (auto n : n_values)
    if (n < 1) throw ConfigError("every n must be >= 1");
  for (auto d : d_values) {
    if (d < 2) throw ConfigError("every d must be >= 2");
    SyntheticModel m = model;
    m.d = d;
    m.validate();
    if (m_try > d && (policy == PolicyKind::CartEmpirical))
      throw ConfigError("m_try exceeds d = " + std::to_string(d));
  }
  if (k_n == 1) throw ConfigError("k_n must be >= 2");
}

std::size_t ExperimentSpec::resolved_m_try(std::size_t d, bool cut_probability) const {
  if (m_try) return m_try;
  if (!cut_probability && policy == PolicyKind::CartEmpirical)
    return std::max<std::size_t>(d / 3, 1);
  return d;
}

std::size_t ExperimentSpec::resolved_k_n(std::size_t n, bool cut_probability) const {
  if (k_n) return k_n;
  const auto nd = static_cast<double>(n);
  const auto k = cut_probability ? std::ceil(std::sqrt(nd)) : std::ceil(nd / 5.0);
  return std::max<std::size_t>(2, static_cast<std::size_t>(k));
}

namespace {

struct Job {
  std::size_t n, d, replicate;
};

std::vector<Job> jobs_of(const ExperimentSpec& spec) {
  std::vector<Job> jobs;
  for (auto d : spec.d_values)
    for (auto n : spec.n_values)
      for (std::size_t r = 0; r < spec.replicates; ++r) jobs.push_back({n, d, r});
  return jobs;
}

ForestConfig config_for(const ExperimentSpec& spec, const Job& job, Rng& data_rng,
                        const SyntheticModel& model, bool cut_probability) {
  ForestConfig config;
  config.trees = spec.trees;
  config.k_n = spec.resolved_k_n(job.n, cut_probability);
  config.m_try = spec.resolved_m_try(job.d, cut_probability);
  config.probs = SplitProbabilities::uniform(job.d);
  config.seed = derive_seed(spec.seed, {job.n, job.d, job.replicate, 1});
  switch (spec.policy) {
    case PolicyKind::PurelyRandom:
      config.policy = SplitPolicy::purely_random();
      break;
    case PolicyKind::SecondSampleGuided:
      config.policy = SplitPolicy::guided(generate(model, job.n, data_rng));
      break;
    case PolicyKind::CartEmpirical:
      config.policy = SplitPolicy::cart();
      config.with_replacement = false;
      break;
  }
  return config;
}

}  // namespace

double CutProbabilityTable::mean_ratio(std::size_t n, std::size_t d, std::size_t coordinate) const {
  const auto values = ratios(n, d, coordinate);
  if (values.empty()) throw DataError("no cut-probability rows for the requested cell");
  return mean_se(values).mean;
}

std::vector<double> CutProbabilityTable::ratios(std::size_t n, std::size_t d,
                                                std::size_t coordinate) const {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r.n == n && r.d == d && r.coordinate == coordinate) out.push_back(r.ratio);
  return out;
}

const MsePoint& MseCurve::at(std::size_t n, std::size_t d) const {
  for (const auto& p : points)
    if (p.n == n && p.d == d) return p;
  throw DataError("no MSE point for n=" + std::to_string(n) + ", d=" + std::to_string(d));
}

CutProbabilityTable run_cut_probability(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  CutProbabilityTable table;
  if (spec.policy == PolicyKind::PurelyRandom)
    table.warnings.push_back(
        "purely random policy: split ratios only estimate the split probabilities");

  const auto jobs = jobs_of(spec);
  std::vector<std::vector<std::uint64_t>> counts(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t t) {
    const Job& job = jobs[t];
    SyntheticModel model = spec.model;
    model.d = job.d;
    Rng data_rng(derive_seed(spec.seed, {job.n, job.d, job.replicate, 0}));
    const Dataset train = generate(model, job.n, data_rng);
    const auto config = config_for(spec, job, data_rng, model, true);
    counts[t] = fit(config, train).split_counts();
  });

  for (std::size_t t = 0; t < jobs.size(); ++t) {
    const Job& job = jobs[t];
    std::uint64_t total = 0;
    for (auto c : counts[t]) total += c;
    if (total == 0) {
      table.warnings.push_back("n=" + std::to_string(job.n) + " d=" + std::to_string(job.d) +
                               " replicate " + std::to_string(job.replicate) +
                               ": forest has no splits, replicate skipped");
      continue;
    }
    for (std::size_t j = 0; j < job.d; ++j)
      table.rows.push_back({job.n, job.d, job.replicate, j + 1,
                            static_cast<double>(counts[t][j]) / static_cast<double>(total)});
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.n, a.d, a.replicate, a.coordinate) <
           std::tie(b.n, b.d, b.replicate, b.coordinate);
  });
  return table;
}

MseCurve run_mse_curve(const ExperimentSpec& spec, unsigned threads) {
  spec.validate();
  const auto jobs = jobs_of(spec);
  std::vector<double> mse(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t t) {
    const Job& job = jobs[t];
    SyntheticModel model = spec.model;
    model.d = job.d;
    Rng data_rng(derive_seed(spec.seed, {job.n, job.d, job.replicate, 0}));
    const Dataset train = generate(model, job.n, data_rng);
    const auto config = config_for(spec, job, data_rng, model, false);
    const Forest forest = fit(config, train);
    Rng test_rng(derive_seed(spec.seed, {job.n, job.d, job.replicate, 2}));
    const Dataset test = generate_noiseless(model, spec.test_size, test_rng);
    const auto predictions = forest.predict_all(test);
    double acc = 0.0;
    for (std::size_t i = 0; i < test.n(); ++i) {
      const double e = predictions[i] - test.y(i);
      acc += e * e;
    }
    mse[t] = acc / static_cast<double>(test.n());
  });

  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> grouped;
  for (std::size_t t = 0; t < jobs.size(); ++t) grouped[{jobs[t].d, jobs[t].n}].push_back(mse[t]);
  MseCurve curve;
  for (const auto& [key, values] : grouped) {
    const auto s = mean_se(values);
    curve.points.push_back({spec.model.name(), key.second, key.first, s.mean,
                            values.size() > 1 ? s.se : 0.0, values.size()});
  }
  return curve;
}

// ---- rate arithmetic ----------------------------------------------------------

double rate_exponent(std::size_t S) {
  if (S < 1) throw DomainError("rate exponent needs S >= 1");
  return 0.75 / (static_cast<double>(S) * std::numbers::ln2 + 0.75);
}

double minimax_exponent(std::size_t dim) {
  return 2.0 / (static_cast<double>(dim) + 2.0);
}

double kn_exponent(std::size_t S) {
  if (S < 1) throw DomainError("k_n exponent needs S >= 1");
  return 1.0 / (1.0 + 0.75 / (static_cast<double>(S) * std::numbers::ln2));
}

std::size_t optimal_kn(std::size_t n, std::size_t S, double L, double Xi) {
  if (S < 2) throw DomainError("optimal k_n needs S >= 2");
  if (n < 2) throw DomainError("optimal k_n needs n >= 2");
  if (!(L > 0.0 && Xi > 0.0)) throw DomainError("optimal k_n needs L > 0 and Xi > 0");
  const double e = kn_exponent(S);
  const double k = std::round(std::pow(L * L / Xi, e) * std::pow(static_cast<double>(n), e));
  return std::max<std::size_t>(2, static_cast<std::size_t>(k));
}

bool sparse_rate_wins(std::size_t S, std::size_t d) {
  return rate_exponent(S) > minimax_exponent(d);
}

bool sparsity_rule(std::size_t S, std::size_t d) {
  return S <= static_cast<std::size_t>(std::floor(0.54 * static_cast<double>(d)));
}

// ---- CSV ----------------------------------------------------------------------

namespace {

std::size_t column(const csv::Table& t, const std::string& name) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw DataError("missing column " + name);
  return static_cast<std::size_t>(it - t.header.begin());
}

std::size_t parse_count(const std::string& s) {
  const double v = csv::parse_double(s);
  if (!(v >= 0.0) || v != std::floor(v)) throw DataError("expected a count, got " + s);
  return static_cast<std::size_t>(v);
}

csv::Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return csv::read(in);
}

}  // namespace

void write_cut_probs_csv(const CutProbabilityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  csv::write_row(out, {"n", "d", "replicate", "coordinate", "ratio"});
  for (const auto& r : table.rows)
    csv::write_row(out, {std::to_string(r.n), std::to_string(r.d), std::to_string(r.replicate),
                         std::to_string(r.coordinate), csv::format_double(r.ratio)});
}

CutProbabilityTable read_cut_probs_csv(const std::filesystem::path& path) {
  const auto t = read_table(path);
  const auto cn = column(t, "n"), cd = column(t, "d"), cr = column(t, "replicate"),
             cc = column(t, "coordinate"), cv = column(t, "ratio");
  CutProbabilityTable table;
  for (const auto& row : t.rows)
    table.rows.push_back({parse_count(row[cn]), parse_count(row[cd]), parse_count(row[cr]),
                          parse_count(row[cc]), csv::parse_double(row[cv])});
  return table;
}

void write_mse_curve_csv(const MseCurve& curve, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  csv::write_row(out, {"model", "n", "d", "mse_mean", "mse_stderr", "replicates"});
  for (const auto& p : curve.points)
    csv::write_row(out, {p.model, std::to_string(p.n), std::to_string(p.d),
                         csv::format_double(p.mse_mean), csv::format_double(p.mse_stderr),
                         std::to_string(p.replicates)});
}

MseCurve read_mse_curve_csv(const std::filesystem::path& path) {
  const auto t = read_table(path);
  const auto cm = column(t, "model"), cn = column(t, "n"), cd = column(t, "d"),
             cv = column(t, "mse_mean"), cs = column(t, "mse_stderr"),
             cr = column(t, "replicates");
  MseCurve curve;
  for (const auto& row : t.rows)
    curve.points.push_back({row[cm], parse_count(row[cn]), parse_count(row[cd]),
                            csv::parse_double(row[cv]), csv::parse_double(row[cs]),
                            parse_count(row[cr])});
  return curve;
}

// ---- plots --------------------------------------------------------------------

std::vector<std::filesystem::path> plot_cut_probs(const CutProbabilityTable& table,
                                                  const std::filesystem::path& dir,
                                                  std::size_t max_coordinates) {
  std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, std::vector<double>>> cells;
  for (const auto& r : table.rows)
    if (r.coordinate <= max_coordinates) cells[{r.d, r.n}][r.coordinate].push_back(r.ratio);
  std::vector<std::filesystem::path> written;
  for (const auto& [key, by_coordinate] : cells) {
    std::vector<plot::Box> boxes;
    for (const auto& [j, values] : by_coordinate) boxes.push_back({std::to_string(j), values});
    const auto path =
        dir / ("cut_probs_d" + std::to_string(key.first) + "_n" + std::to_string(key.second) + ".svg");
    plot::boxplot_svg("Split ratio per coordinate, n = " + std::to_string(key.second) +
                          ", d = " + std::to_string(key.first),
                      "ratio", boxes, path);
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> plot_mse_curve(const MseCurve& curve,
                                                  const std::filesystem::path& dir) {
  std::map<std::size_t, plot::Series> by_d;
  for (const auto& p : curve.points) {
    auto& s = by_d[p.d];
    s.name = p.model + ", d = " + std::to_string(p.d);
    s.x.push_back(static_cast<double>(p.n));
    s.y.push_back(p.mse_mean);
    s.err.push_back(p.mse_stderr);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [d, series] : by_d) {
    const auto path = dir / ("mse_curve_d" + std::to_string(d) + ".svg");
    plot::line_chart_svg("MSE against n, d = " + std::to_string(d), "n", "MSE", {series}, true,
                         path);
    written.push_back(path);
  }
  return written;
}

}  // namespace sparseforest
