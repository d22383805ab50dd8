// Copyright 2026 The dpident Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::string& args) {
  const std::string command =
      std::string(DPIDENT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream out;
  out << file.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("dpident_cli_" + tag);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("calibrate exits cleanly and rejects bad input") {
  CHECK(run_cli("calibrate --rho-beta 0.9 --delta 0.01") == 0);
  // Over-specified target is a configuration error.
  CHECK(run_cli("calibrate --rho-beta 0.9 --epsilon 1.0 --delta 0.01") == 2);
  // epsilon = 0 rejected.
  CHECK(run_cli("calibrate --epsilon 0 --delta 0.01") == 2);
  // Unknown flag.
  CHECK(run_cli("calibrate --no-such-flag 1") == 2);
  // Missing data file is a data error.
  CHECK(run_cli("sensitivity --csv /no/such/file.csv --label y") == 3);
}

TEST_CASE("synthetic run writes manifest before results and is reproducible") {
  const fs::path dir = fresh_dir("synth");
  const std::string args = "synthetic --epsilon 5 --delta 0.01 --steps 50 "
                           "--runs 300 --seed 11 --out " + dir.string();
  REQUIRE(run_cli(args) == 0);
  REQUIRE(fs::exists(dir / "manifest.json"));
  REQUIRE(fs::exists(dir / "synthetic.json"));
  REQUIRE(fs::exists(dir / "belief_histogram.csv"));
  REQUIRE(fs::exists(dir / "sample_run.csv"));

  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "synthetic");
  CHECK(manifest["status"] == "complete");
  CHECK(manifest["master_seed"].get<long>() == 11);
  CHECK(manifest["toolkit_version"].is_string());

  const json summary = json::parse(slurp(dir / "synthetic.json"));
  CHECK(summary["manifest"] == "manifest.json");
  CHECK(summary["runs"].get<long>() == 300);

  // Same seed, fresh directory: byte-identical result files.
  const fs::path dir2 = fresh_dir("synth2");
  REQUIRE(run_cli("synthetic --epsilon 5 --delta 0.01 --steps 50 --runs 300 "
                  "--seed 11 --out " + dir2.string()) == 0);
  CHECK(slurp(dir / "synthetic.json") == slurp(dir2 / "synthetic.json"));
  CHECK(slurp(dir / "belief_histogram.csv") ==
        slurp(dir2 / "belief_histogram.csv"));

  // Different seed changes the outputs.
  const fs::path dir3 = fresh_dir("synth3");
  REQUIRE(run_cli("synthetic --epsilon 5 --delta 0.01 --steps 50 --runs 300 "
                  "--seed 12 --out " + dir3.string()) == 0);
  CHECK(slurp(dir / "synthetic.json") != slurp(dir3 / "synthetic.json"));

  fs::remove_all(dir);
  fs::remove_all(dir2);
  fs::remove_all(dir3);
}

TEST_CASE("train-audit consumes a config file with flag overrides") {
  const fs::path dir = fresh_dir("audit");
  fs::create_directories(dir);
  const fs::path config_path = dir / "config.json";
  {
    std::ofstream config(config_path);
    config << R"({
      "target": {"rho_beta": 0.9},
      "delta": 0.01,
      "neighbor_mode": "unbounded",
      "sensitivity_source": "local",
      "n_exp": 15,
      "train": {"clipping_norm": 3.0, "learning_rate": 0.1, "steps": 5,
                "hidden_layers": [6]},
      "dataset": {"type": "blobs", "n": 30, "d": 5, "classes": 3,
                  "separation": 3.0, "seed": 21}
    })";
  }
  const fs::path out = dir / "out";
  REQUIRE(run_cli("train-audit --config " + config_path.string() +
                  " --seed 99 --out " + out.string()) == 0);
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["config"]["seed"].get<long>() == 99);
  const json report = json::parse(slurp(out / "train_audit.json"));
  CHECK(report["n_exp"].get<long>() == 15);
  CHECK(report["config"]["seed"].get<long>() == 99);
  CHECK(fs::exists(out / "epsilon_audit.csv"));
  CHECK(fs::exists(out / "belief_distribution.csv"));
  CHECK(fs::exists(out / "sensitivity_steps.csv"));
  fs::remove_all(dir);
}

TEST_CASE("environment seed is the fallback") {
  const fs::path a = fresh_dir("env_a");
  const fs::path b = fresh_dir("env_b");
  const std::string base = "synthetic --epsilon 2 --delta 0.01 --steps 10 "
                           "--runs 50 --out ";
  const std::string cli = DPIDENT_CLI_PATH;
  REQUIRE(std::system(("DPIDENT_SEED=31 " + cli + " " + base + a.string() +
                       " > /dev/null 2>&1")
                          .c_str()) == 0);
  REQUIRE(std::system(("DPIDENT_SEED=31 " + cli + " " + base + b.string() +
                       " > /dev/null 2>&1")
                          .c_str()) == 0);
  const json manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["master_seed"].get<long>() == 31);
  CHECK(slurp(a / "synthetic.json") == slurp(b / "synthetic.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a failing run leaves a manifest without result files") {
  const fs::path dir = fresh_dir("failed");
  fs::create_directories(dir);
  const fs::path config_path = dir / "config.json";
  {
    std::ofstream config(config_path);
    config << R"({"target": {"rho_beta": 0.9}, "delta": 0.01,
                  "dataset": {"type": "csv", "path": "/no/such.csv",
                              "label_column": "y"}})";
  }
  const fs::path out = dir / "out";
  CHECK(run_cli("train-audit --config " + config_path.string() + " --out " +
                out.string()) == 3);
  REQUIRE(fs::exists(out / "manifest.json"));
  const json manifest = json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"] == "failed");
  CHECK_FALSE(fs::exists(out / "train_audit.json"));
  fs::remove_all(dir);
}

TEST_CASE("bounds grid prints the reference row") {
  const fs::path dir = fresh_dir("bounds");
  REQUIRE(run_cli("bounds --eps-min 1.1 --eps-max 4.6 --eps-step 1.1 "
                  "--delta 0.01 --delta 0.001 --out " + dir.string()) == 0);
  const std::string csv = slurp(dir / "bounds.csv");
  CHECK(csv.find("2.2,0.01,0.900") != std::string::npos);
  // rho_beta must not depend on delta: both delta rows at eps=2.2 share it.
  CHECK(csv.find("2.2,0.001,0.900") != std::string::npos);
  fs::remove_all(dir);
}
