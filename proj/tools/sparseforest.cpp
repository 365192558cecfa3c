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

// Command-line front end: data generation, forest fit/predict, the split
// ratio and MSE experiments, and the bound checks.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "sparseforest/config.hpp"
#include "sparseforest/csv.hpp"
#include "sparseforest/dataset.hpp"
#include "sparseforest/errors.hpp"
#include "sparseforest/experiments.hpp"
#include "sparseforest/forest.hpp"
#include "sparseforest/models.hpp"
#include "sparseforest/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sparseforest;

namespace {

constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out = ".";
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--config", c.config, "JSON config or manifest to start from");
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--threads", c.threads, "worker threads (0: hardware concurrency)")
      ->capture_default_str();
}

json base_config(const Common& c) {
  return c.config.empty() ? json::object() : config::load(c.config);
}

fs::path prepare_out(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw DataError("cannot create output directory " + c.out + ": " + ec.message());
  return fs::path(c.out);
}

// Takes `key` out of the object so the remaining keys can go to a strict reader.
template <class T>
std::optional<T> take(json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  try {
    T v = j.at(key).get<T>();
    j.erase(key);
    return v;
  } catch (const json::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

// ---- generate -----------------------------------------------------------------

struct GenerateArgs {
  Common common;
  std::string model;
  std::optional<std::size_t> d, n;
  std::optional<double> noise_sd, friedman_center, level;
};

int run_generate(const GenerateArgs& a) {
  json cfg = base_config(a.common);
  json model = cfg.contains("model") ? cfg.at("model") : json::object();
  if (model.is_string()) model = json{{"name", model}};
  if (!a.model.empty()) model["name"] = a.model;
  if (a.d) model["d"] = *a.d;
  if (a.noise_sd) model["noise_sd"] = *a.noise_sd;
  if (a.friedman_center) model["friedman_center"] = *a.friedman_center;
  if (a.level) model["level"] = *a.level;
  cfg.erase("model");
  std::size_t n = take<std::size_t>(cfg, "n").value_or(1000);
  std::uint64_t seed = take<std::uint64_t>(cfg, "seed").value_or(1);
  if (!cfg.empty()) throw ConfigError("unknown key '" + cfg.begin().key() + "' in generate config");
  if (a.n) n = *a.n;
  if (a.common.seed) seed = *a.common.seed;
  if (n < 1) throw ConfigError("n must be >= 1");

  const SyntheticModel m = config::model_from_json(model);
  m.validate();
  Rng rng(seed);
  const Dataset data = generate(m, n, rng);
  const auto out = prepare_out(a.common);
  write_csv(data, out / "data.csv");
  config::write_manifest(out / "manifest.json", "generate",
                         json{{"model", config::to_json(m)}, {"n", n}, {"seed", seed}});
  std::cout << "wrote " << (out / "data.csv").string() << " (" << n << " rows, d=" << m.d << ")\n";
  return 0;
}

// ---- fit / predict ------------------------------------------------------------

struct FitArgs {
  Common common;
  std::string data, split_sample, policy;
  std::optional<std::size_t> k_n, trees, m_try, target_leaves;
};

int run_fit(const FitArgs& a) {
  json cfg = base_config(a.common);
  std::string data_path = take<std::string>(cfg, "data").value_or("");
  std::string split_path = take<std::string>(cfg, "split_sample").value_or("");
  if (!a.data.empty()) data_path = a.data;
  if (!a.split_sample.empty()) split_path = a.split_sample;
  if (!a.policy.empty()) cfg["policy"] = a.policy;
  if (a.k_n) cfg["k_n"] = *a.k_n;
  if (a.trees) cfg["trees"] = *a.trees;
  if (a.m_try) cfg["m_try"] = *a.m_try;
  if (a.target_leaves) cfg["target_leaves"] = *a.target_leaves;
  if (a.common.seed) cfg["seed"] = *a.common.seed;
  ForestConfig config = config::forest_from_json(cfg);
  if (data_path.empty()) throw ConfigError("fit needs --data");

  const Dataset data = read_csv(data_path);
  if (config.policy.kind == PolicyKind::SecondSampleGuided) {
    if (split_path.empty()) throw ConfigError("guided policy needs --split-sample");
    config.policy = SplitPolicy::guided(read_csv(split_path));
  } else if (!split_path.empty()) {
    throw ConfigError("--split-sample is only used by the guided policy");
  }
  const Forest forest = fit(config, data, a.common.threads);
  const auto out = prepare_out(a.common);
  save_forest(forest, out / "forest.json");
  json resolved = config::to_json(config);
  resolved["data"] = fs::absolute(data_path).string();
  if (!split_path.empty()) resolved["split_sample"] = fs::absolute(split_path).string();
  config::write_manifest(out / "manifest.json", "fit", resolved);

  const auto counts = forest.split_counts();
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::cout << "fitted " << config.trees << " trees on " << data.n() << " rows, " << total
            << " splits; wrote " << (out / "forest.json").string() << '\n';
  return 0;
}

struct PredictArgs {
  Common common;
  std::string forest, data;
};

int run_predict(const PredictArgs& a) {
  json cfg = base_config(a.common);
  std::string forest_path = take<std::string>(cfg, "forest").value_or("");
  std::string data_path = take<std::string>(cfg, "data").value_or("");
  take<std::uint64_t>(cfg, "seed");
  if (!cfg.empty()) throw ConfigError("unknown key '" + cfg.begin().key() + "' in predict config");
  if (!a.forest.empty()) forest_path = a.forest;
  if (!a.data.empty()) data_path = a.data;
  if (forest_path.empty() || data_path.empty()) throw ConfigError("predict needs --forest and --data");

  const StoredForest forest = load_forest(forest_path);
  std::ifstream in(data_path);
  if (!in) throw DataError("cannot open " + data_path);
  const csv::Table table = csv::read(in);
  std::vector<std::size_t> xcols;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c] == "x" + std::to_string(xcols.size() + 1)) xcols.push_back(c);
  if (xcols.size() != forest.d)
    throw DimensionError("query file has " + std::to_string(xcols.size()) +
                         " covariate columns, forest expects " + std::to_string(forest.d));

  const auto out = prepare_out(a.common);
  std::ofstream pred(out / "predictions.csv");
  if (!pred) throw DataError("cannot write predictions.csv");
  csv::write_row(pred, {"prediction"});
  std::vector<double> x(forest.d);
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < forest.d; ++j) x[j] = csv::parse_double(row[xcols[j]]);
    if (!in_unit_cube(x)) throw DataError("query point outside [0,1]^d");
    csv::write_row(pred, {csv::format_double(forest.predict(x))});
  }
  config::write_manifest(out / "manifest.json", "predict",
                         json{{"forest", fs::absolute(forest_path).string()},
                              {"data", fs::absolute(data_path).string()}});
  std::cout << "wrote " << table.rows.size() << " predictions to "
            << (out / "predictions.csv").string() << '\n';
  return 0;
}

// ---- experiments --------------------------------------------------------------

struct ExperimentArgs {
  Common common;
  std::string model, policy;
  std::vector<std::size_t> d_values, n_values;
  std::optional<std::size_t> replicates, trees, test_size, m_try, k_n;
  std::optional<double> noise_sd;
};

ExperimentSpec resolve_experiment(const ExperimentArgs& a, PolicyKind default_policy) {
  json cfg = base_config(a.common);
  if (!cfg.contains("policy")) cfg["policy"] = to_string(default_policy);
  if (!a.model.empty() || a.noise_sd) {
    json model = cfg.contains("model") ? cfg.at("model") : json::object();
    if (model.is_string()) model = json{{"name", model}};
    if (!a.model.empty()) model["name"] = a.model;
    if (a.noise_sd) model["noise_sd"] = *a.noise_sd;
    cfg["model"] = model;
  }
  if (!a.policy.empty()) cfg["policy"] = a.policy;
  if (!a.d_values.empty()) cfg["d_values"] = a.d_values;
  if (!a.n_values.empty()) cfg["n_values"] = a.n_values;
  if (a.replicates) cfg["replicates"] = *a.replicates;
  if (a.trees) cfg["trees"] = *a.trees;
  if (a.test_size) cfg["test_size"] = *a.test_size;
  if (a.m_try) cfg["m_try"] = *a.m_try;
  if (a.k_n) cfg["k_n"] = *a.k_n;
  if (a.common.seed) cfg["seed"] = *a.common.seed;
  ExperimentSpec spec = config::experiment_from_json(cfg);
  spec.model.d = std::max(spec.model.d, spec.d_values.empty() ? 1 : spec.d_values.front());
  spec.validate();
  return spec;
}

int run_cut_probs(const ExperimentArgs& a) {
  const ExperimentSpec spec = resolve_experiment(a, PolicyKind::SecondSampleGuided);
  const auto table = run_cut_probability(spec, a.common.threads);
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
  const auto out = prepare_out(a.common);
  write_cut_probs_csv(table, out / "cut_probs.csv");
  plot_cut_probs(table, out);
  config::write_manifest(out / "manifest.json", "cut-probs", config::to_json(spec));
  for (auto d : spec.d_values)
    for (auto n : spec.n_values)
      if (!table.ratios(n, d, 1).empty())
        std::cout << "n=" << n << " d=" << d << " mean ratio x1=" << table.mean_ratio(n, d, 1)
                  << '\n';
  return 0;
}

int run_mse(const ExperimentArgs& a) {
  const ExperimentSpec spec = resolve_experiment(a, PolicyKind::CartEmpirical);
  const auto curve = run_mse_curve(spec, a.common.threads);
  const auto out = prepare_out(a.common);
  write_mse_curve_csv(curve, out / "mse_curve.csv");
  plot_mse_curve(curve, out);
  config::write_manifest(out / "manifest.json", "mse-curve", config::to_json(spec));
  for (const auto& p : curve.points)
    std::cout << p.model << " n=" << p.n << " d=" << p.d << " mse=" << p.mse_mean << " +- "
              << p.mse_stderr << '\n';
  return 0;
}

// ---- theory-check -------------------------------------------------------------

struct TheoryArgs {
  Common common;
  bool quick = false;
};

int run_theory(const TheoryArgs& a) {
  json cfg = base_config(a.common);
  if (a.common.seed) cfg["seed"] = *a.common.seed;
  if (a.quick) cfg["monte_carlo"] = false;
  theory::SuiteOptions options = config::suite_from_json(cfg);
  options.threads = a.common.threads;
  const auto reports = theory::run_suite(options);
  const auto out = prepare_out(a.common);
  theory::write_reports(reports, (out / "bound_report.csv").string());
  config::write_manifest(out / "manifest.json", "theory-check", config::to_json(options));
  std::size_t failed = 0;
  for (const auto& r : reports)
    if (!r.pass) {
      ++failed;
      std::cerr << "FAIL " << r.name << " " << r.params << " lhs=" << r.lhs << " rhs=" << r.rhs
                << " stderr=" << r.std_error << '\n';
    }
  std::cout << reports.size() - failed << "/" << reports.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random forests with midpoint splits: fitting, experiments and bound checks"};
  app.set_version_flag("--version", config::kVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "sample a synthetic regression dataset");
  add_common(g, gen.common);
  g->add_option("--model", gen.model, "sinus, friedman1, tree, sinus_linear, constant");
  g->add_option("--d", gen.d, "ambient dimension");
  g->add_option("--n", gen.n, "sample size");
  g->add_option("--noise-sd", gen.noise_sd, "standard deviation of the Gaussian noise");
  g->add_option("--friedman-center", gen.friedman_center, "center of the quadratic Friedman term");
  g->add_option("--level", gen.level, "constant model value");

  FitArgs fa;
  auto* f = app.add_subcommand("fit", "grow a forest and save it as JSON");
  add_common(f, fa.common);
  f->add_option("--data", fa.data, "training CSV (x1..xd,y)");
  f->add_option("--split-sample", fa.split_sample, "second sample CSV for the guided policy");
  f->add_option("--policy", fa.policy, "purely_random, guided, cart");
  f->add_option("--k-n", fa.k_n, "target leaf count (depth ceil(log2 k_n))");
  f->add_option("--trees", fa.trees, "number of trees");
  f->add_option("--m-try", fa.m_try, "candidate coordinates per node");
  f->add_option("--target-leaves", fa.target_leaves, "CART leaf count (0: ceil(n/5))");

  PredictArgs pa;
  auto* p = app.add_subcommand("predict", "predict with a saved forest");
  add_common(p, pa.common);
  p->add_option("--forest", pa.forest, "forest.json written by fit");
  p->add_option("--data", pa.data, "query CSV with columns x1..xd");

  ExperimentArgs ca, ma;
  auto add_experiment = [](CLI::App* cmd, ExperimentArgs& e) {
    add_common(cmd, e.common);
    cmd->add_option("--model", e.model, "sinus, friedman1, tree, sinus_linear, constant");
    cmd->add_option("--policy", e.policy, "purely_random, guided, cart");
    cmd->add_option("--d-values", e.d_values, "comma-separated dimensions")->delimiter(',');
    cmd->add_option("--n-values", e.n_values, "comma-separated sample sizes, ascending")->delimiter(',');
    cmd->add_option("--replicates", e.replicates, "Monte-Carlo replicates per grid point");
    cmd->add_option("--trees", e.trees, "trees per forest");
    cmd->add_option("--test-size", e.test_size, "test points per replicate");
    cmd->add_option("--m-try", e.m_try, "0: automatic");
    cmd->add_option("--k-n", e.k_n, "0: automatic");
    cmd->add_option("--noise-sd", e.noise_sd, "standard deviation of the Gaussian noise");
  };
  auto* c = app.add_subcommand("cut-probs", "per-coordinate split ratios over a (n, d) grid");
  add_experiment(c, ca);
  auto* m = app.add_subcommand("mse-curve", "Monte-Carlo test MSE over a (n, d) grid");
  add_experiment(m, ma);

  TheoryArgs ta;
  auto* t = app.add_subcommand("theory-check", "evaluate every bound and write bound_report.csv");
  add_common(t, ta.common);
  t->add_flag("--quick", ta.quick, "exact checks only, skip Monte Carlo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (*g) return run_generate(gen);
    if (*f) return run_fit(fa);
    if (*p) return run_predict(pa);
    if (*c) return run_cut_probs(ca);
    if (*m) return run_mse(ma);
    if (*t) return run_theory(ta);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataExit;
  }
  return kConfigExit;
}
