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

#include "sparseforest/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "sparseforest/errors.hpp"

namespace sparseforest::config {

using nlohmann::json;

namespace {

// Reads typed fields from a JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j_.is_object()) throw ConfigError(what_ + " must be a JSON object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(what_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void skip(const char* key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in " + what_);
  }

 private:
  const json& j_;
  std::string what_;
  std::set<std::string> seen_;
};

template <class T>
void require_positive(const char* name, T value) {
  if (value < 1) throw ConfigError(std::string(name) + " must be >= 1");
}

}  // namespace

json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config " + path.string() + " must be a JSON object");
  if (j.contains("command") && j.contains("version") && j.contains("config"))
    return j.at("config");
  return j;
}

SyntheticModel model_from_json(const json& j) {
  if (j.is_string()) return model_from_json(json{{"name", j}});
  Reader r(j, "model");
  std::string name = "sinus";
  r.get("name", name);
  SyntheticModel m;
  m.kind = model_from_string(name);
  m.d = m.kind == ModelKind::Friedman1 || m.kind == ModelKind::Tree ? 5 : 2;
  if (m.kind == ModelKind::Constant) m.noise_sd = 0.0;
  r.get("d", m.d);
  r.get("noise_sd", m.noise_sd);
  r.get("friedman_center", m.friedman_center);
  r.get("level", m.level);
  r.finish();
  if (!(m.noise_sd >= 0.0)) throw ConfigError("noise_sd must be >= 0");
  return m;
}

json to_json(const SyntheticModel& m) {
  json j{{"name", to_string(m.kind)}, {"d", m.d}, {"noise_sd", m.noise_sd}};
  if (m.kind == ModelKind::Friedman1) j["friedman_center"] = m.friedman_center;
  if (m.kind == ModelKind::Constant) j["level"] = m.level;
  return j;
}

ExperimentSpec experiment_from_json(const json& j) {
  Reader r(j, "experiment");
  ExperimentSpec s;
  if (const auto* m = r.sub("model")) s.model = model_from_json(*m);
  r.get("d_values", s.d_values);
  r.get("n_values", s.n_values);
  r.get("replicates", s.replicates);
  r.get("trees", s.trees);
  r.get("test_size", s.test_size);
  std::string policy = to_string(s.policy);
  r.get("policy", policy);
  s.policy = policy_from_string(policy);
  r.get("m_try", s.m_try);
  r.get("k_n", s.k_n);
  r.get("seed", s.seed);
  r.finish();
  return s;
}

json to_json(const ExperimentSpec& s) {
  return json{{"model", to_json(s.model)},   {"d_values", s.d_values},
              {"n_values", s.n_values},      {"replicates", s.replicates},
              {"trees", s.trees},            {"test_size", s.test_size},
              {"policy", to_string(s.policy)}, {"m_try", s.m_try},
              {"k_n", s.k_n},                {"seed", s.seed}};
}

ForestConfig forest_from_json(const json& j, std::initializer_list<const char*> extra) {
  Reader r(j, "forest");
  for (const char* key : extra) r.skip(key);
  ForestConfig c;
  r.get("k_n", c.k_n);
  r.get("trees", c.trees);
  std::string policy = to_string(c.policy.kind);
  r.get("policy", policy);
  c.policy.kind = policy_from_string(policy);
  std::vector<double> probs;
  r.get("probs", probs);
  try {
    if (!probs.empty()) c.probs = SplitProbabilities(std::move(probs));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("forest.probs: ") + e.what());
  }
  r.get("m_try", c.m_try);
  r.get("seed", c.seed);
  r.get("target_leaves", c.target_leaves);
  r.get("with_replacement", c.with_replacement);
  r.finish();
  require_positive("k_n", c.k_n);
  require_positive("trees", c.trees);
  require_positive("m_try", c.m_try);
  return c;
}

json to_json(const ForestConfig& c) {
  json j{{"k_n", c.k_n},
         {"trees", c.trees},
         {"policy", to_string(c.policy.kind)},
         {"m_try", c.m_try},
         {"seed", c.seed},
         {"target_leaves", c.target_leaves},
         {"with_replacement", c.with_replacement}};
  if (!c.probs.empty())
    j["probs"] = std::vector<double>(c.probs.values().begin(), c.probs.values().end());
  return j;
}

theory::SuiteOptions suite_from_json(const json& j) {
  Reader r(j, "theory");
  theory::SuiteOptions o;
  r.get("lemma51_max_N", o.lemma51_max_N);
  r.get("prop53_max_N", o.prop53_max_N);
  r.get("prop53_max_d", o.prop53_max_d);
  r.get("inversion_max_N", o.inversion_max_N);
  r.get("monte_carlo", o.monte_carlo);
  r.get("decomposition_trees", o.decomposition_trees);
  r.get("decomposition_replicates", o.decomposition_replicates);
  r.get("decomposition_queries", o.decomposition_queries);
  r.get("consistency_replicates", o.consistency_replicates);
  r.get("seed", o.seed);
  r.finish();
  require_positive("prop53_max_N", o.prop53_max_N);
  require_positive("prop53_max_d", o.prop53_max_d);
  if (o.decomposition_replicates < 2 || o.consistency_replicates < 2)
    throw ConfigError("Monte-Carlo checks need at least 2 replicates");
  require_positive("decomposition_trees", o.decomposition_trees);
  require_positive("decomposition_queries", o.decomposition_queries);
  return o;
}

json to_json(const theory::SuiteOptions& o) {
  return json{{"lemma51_max_N", o.lemma51_max_N},
              {"prop53_max_N", o.prop53_max_N},
              {"prop53_max_d", o.prop53_max_d},
              {"inversion_max_N", o.inversion_max_N},
              {"monte_carlo", o.monte_carlo},
              {"decomposition_trees", o.decomposition_trees},
              {"decomposition_replicates", o.decomposition_replicates},
              {"decomposition_queries", o.decomposition_queries},
              {"consistency_replicates", o.consistency_replicates},
              {"seed", o.seed}};
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const json& resolved) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const json manifest{{"command", command}, {"version", kVersion}, {"config", resolved}};
  out << manifest.dump(2) << '\n';
}

}  // namespace sparseforest::config
