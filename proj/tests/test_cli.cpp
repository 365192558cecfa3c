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
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SPARSEFOREST_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("sparseforest_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("generate, fit and predict") {
  const auto dir = scratch("pipeline");
  const auto d = dir.string();
  REQUIRE(run("generate --model friedman1 --d 6 --n 300 --seed 3 --out " + d + "/train") == 0);
  REQUIRE(fs::exists(dir / "train/data.csv"));
  REQUIRE(fs::exists(dir / "train/manifest.json"));
  CHECK(lines(dir / "train/data.csv") == 301);
  REQUIRE(run("generate --model friedman1 --d 6 --n 50 --seed 4 --out " + d + "/query") == 0);
  REQUIRE(run("fit --data " + d + "/train/data.csv --policy cart --trees 20 --m-try 2 --out " + d +
              "/fit") == 0);
  REQUIRE(fs::exists(dir / "fit/forest.json"));
  REQUIRE(run("predict --forest " + d + "/fit/forest.json --data " + d +
              "/query/data.csv --out " + d + "/pred") == 0);
  CHECK(lines(dir / "pred/predictions.csv") == 51);

  REQUIRE(run("generate --model friedman1 --d 6 --n 300 --seed 9 --out " + d + "/second") == 0);
  CHECK(run("fit --data " + d + "/train/data.csv --policy guided --k-n 16 --trees 5 --split-sample " +
            d + "/second/data.csv --out " + d + "/guided") == 0);
  CHECK(run("fit --data " + d + "/train/data.csv --policy guided --out " + d + "/g2") == 2);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  const auto d = dir.string();
  REQUIRE(run("generate --model sinus --d 3 --n 40 --out " + d) == 0);
  CHECK(run("fit --data " + d + "/data.csv --policy purely_random --k-n 1 --out " + d + "/f") == 2);
  CHECK(run("fit --data " + d + "/nope.csv --policy purely_random --k-n 4 --out " + d + "/f") == 3);
  CHECK(run("generate --model friedman1 --d 3 --n 40 --out " + d + "/g") == 2);
  CHECK(run("generate --model friedman9 --d 6 --n 40 --out " + d + "/g") == 2);
  CHECK(run("frobnicate") != 0);
  CHECK(run("generate --bogus 1") == 2);
  write(dir / "bad.json", R"({"model": "sinus", "d": 3, "n": 10, "colour": "red"})");
  CHECK(run("generate --config " + d + "/bad.json --out " + d + "/g") == 2);
  write(dir / "broken.json", "{ not json");
  CHECK(run("generate --config " + d + "/broken.json --out " + d + "/g") == 2);
  write(dir / "ragged.csv", "x1,x2,y\n0.1,0.2,1\n0.3,4\n");
  CHECK(run("fit --data " + d + "/ragged.csv --policy purely_random --k-n 2 --out " + d + "/f") == 3);
}

TEST_CASE("a manifest replays the run") {
  const auto dir = scratch("replay");
  const auto d = dir.string();
  REQUIRE(run("generate --model tree --d 7 --n 120 --seed 42 --out " + d + "/a") == 0);
  REQUIRE(run("generate --config " + d + "/a/manifest.json --out " + d + "/b") == 0);
  CHECK(slurp(dir / "a/data.csv") == slurp(dir / "b/data.csv"));
  CHECK(slurp(dir / "a/manifest.json") == slurp(dir / "b/manifest.json"));
  REQUIRE(run("generate --model tree --d 7 --n 120 --seed 43 --out " + d + "/c") == 0);
  CHECK(slurp(dir / "a/data.csv") != slurp(dir / "c/data.csv"));
}

TEST_CASE("experiment subcommands write their tables and plots") {
  const auto dir = scratch("experiments");
  const auto d = dir.string();
  REQUIRE(run("cut-probs --model sinus --d-values 5 --n-values 50,200 --replicates 2 --trees 10 "
              "--out " + d + "/cut") == 0);
  CHECK(lines(dir / "cut/cut_probs.csv") == 1 + 2 * 2 * 5);
  CHECK(fs::exists(dir / "cut/cut_probs_d5_n200.svg"));
  REQUIRE(run("mse-curve --model sinus --d-values 5 --n-values 50,100 --replicates 2 --trees 5 "
              "--test-size 100 --out " + d + "/mse") == 0);
  CHECK(lines(dir / "mse/mse_curve.csv") == 3);
  CHECK(fs::exists(dir / "mse/mse_curve_d5.svg"));
  CHECK(fs::exists(dir / "mse/manifest.json"));
  CHECK(run("mse-curve --n-values 100,50 --out " + d + "/bad") == 2);
}

TEST_CASE("quick theory check passes") {
  const auto dir = scratch("theory");
  REQUIRE(run("theory-check --quick --out " + dir.string()) == 0);
  const auto report = slurp(dir / "bound_report.csv");
  CHECK(report.rfind("name,params,lhs,stderr,rhs,margin,pass\n", 0) == 0);
  CHECK(report.find(",false\n") == std::string::npos);
}
