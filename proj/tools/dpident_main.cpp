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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dpident.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Exit codes: 0 success, 2 configuration error, 3 data error, 4 runtime
// failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

int exit_code_for(dpident_status status) {
  switch (status) {
    case DPIDENT_OK:
      return kExitOk;
    case DPIDENT_ERROR_INVALID_ARGUMENT:
      return kExitConfig;
    case DPIDENT_ERROR_DATA:
      return kExitData;
    default:
      return kExitRuntime;
  }
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool paper_scale = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions* options) {
  cmd->add_option("--config", options->config_path,
                  "JSON configuration file; flags override its values");
  cmd->add_option("--out", options->out_dir,
                  "output directory (manifest.json plus result files)");
  cmd->add_option("--seed", options->seed,
                  "master seed (fallback: config value, then DPIDENT_SEED)");
  cmd->add_option("--threads", options->threads,
                  "worker cap for repetitions; does not change results");
  cmd->add_flag("--paper-scale", options->paper_scale,
                "full-size repetition counts instead of the quick defaults");
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open config file: " + path);
  }
  try {
    return json::parse(file);
  } catch (const json::exception& error) {
    throw std::runtime_error("config file " + path + ": " + error.what());
  }
}

void resolve_seed(json& config, const CommonOptions& options) {
  if (options.seed.has_value()) {
    config["seed"] = *options.seed;
    return;
  }
  if (config.contains("seed")) return;
  if (const char* env = std::getenv("DPIDENT_SEED")) {
    config["seed"] = static_cast<std::uint64_t>(std::strtoull(env, nullptr, 10));
    return;
  }
  config["seed"] = 1;
}

void resolve_threads(json& config, const CommonOptions& options) {
  if (options.threads.has_value()) config["threads"] = *options.threads;
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
  char buffer[32];
  std::tm parts{};
  gmtime_r(&seconds, &parts);
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw IoError("cannot write " + path.string());
  }
  file << content;
  if (!file) {
    throw IoError("short write to " + path.string());
  }
}

// The manifest lands before any result file so an interrupted run is
// recognizable: manifest present, status "running", outputs missing.
class RunManifest {
 public:
  RunManifest(const fs::path& dir, const std::string& command,
              const json& config, const std::vector<std::string>& outputs)
      : path_(dir / "manifest.json") {
    doc_["command"] = command;
    doc_["config"] = config;
    doc_["master_seed"] = config.contains("seed") ? config["seed"] : json(0);
    doc_["toolkit_version"] = dpident_version();
    doc_["created_at"] = timestamp_utc();
    doc_["outputs"] = outputs;
    doc_["status"] = "running";
    write_file(path_, doc_.dump(2) + "\n");
    start_ = std::chrono::steady_clock::now();
  }

  void complete() { finish("complete"); }
  void fail() { finish("failed"); }

 private:
  void finish(const char* status) {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    doc_["status"] = status;
    doc_["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    write_file(path_, doc_.dump(2) + "\n");
  }

  fs::path path_;
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

struct CommandSpec {
  const char* name;
  dpident_status (*run)(const char*, dpident_result**);
  const char* summary_file;
  std::vector<const char*> tables;  // fixed per command
};

// Runs one API command, writing manifest and outputs when --out was given.
int execute(const CommandSpec& spec, const json& config,
            const CommonOptions& options, bool print_tables) {
  std::vector<std::string> planned{spec.summary_file};
  for (const char* table : spec.tables) {
    planned.push_back(std::string(table) + ".csv");
  }

  dpident_result* result = nullptr;
  std::optional<RunManifest> manifest;
  if (!options.out_dir.empty()) {
    fs::create_directories(options.out_dir);
    manifest.emplace(options.out_dir, spec.name, config, planned);
  }

  const dpident_status status = spec.run(config.dump().c_str(), &result);
  if (status != DPIDENT_OK) {
    std::cerr << "error: " << dpident_last_error() << "\n";
    if (manifest.has_value()) manifest->fail();
    return exit_code_for(status);
  }

  const std::string summary = dpident_result_summary_json(result);
  if (!options.out_dir.empty()) {
    json summary_doc = json::parse(summary);
    summary_doc["manifest"] = "manifest.json";
    write_file(fs::path(options.out_dir) / spec.summary_file,
               summary_doc.dump(2) + "\n");
    for (size_t i = 0; i < dpident_result_table_count(result); ++i) {
      const std::string name = dpident_result_table_name(result, i);
      write_file(fs::path(options.out_dir) / (name + ".csv"),
                 dpident_result_table_csv(result, i));
    }
    manifest->complete();
  }

  // Human-readable echo on stdout.
  const json parsed = json::parse(summary);
  if (parsed.is_object()) {
    for (const auto& [key, value] : parsed.items()) {
      if (value.is_structured()) continue;
      std::cout << key << ": " << value.dump() << "\n";
    }
  }
  if (print_tables && options.out_dir.empty()) {
    for (size_t i = 0; i < dpident_result_table_count(result); ++i) {
      std::cout << dpident_result_table_csv(result, i);
    }
  }
  if (!options.out_dir.empty()) {
    std::cout << "outputs written to " << options.out_dir << "\n";
  }
  dpident_result_free(result);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dpident - identifiability bounds and privacy-loss audits "
               "for Gaussian-mechanism training"};
  app.require_subcommand(1);

  CommonOptions calibrate_opts;
  std::optional<double> cal_epsilon, cal_rho_beta, cal_rho_alpha, cal_delta,
      cal_sensitivity;
  std::optional<int> cal_steps;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "noise calibration from epsilon, rho_beta, or rho_alpha");
  add_common_flags(calibrate, &calibrate_opts);
  calibrate->add_option("--epsilon", cal_epsilon, "target privacy loss");
  calibrate->add_option("--rho-beta", cal_rho_beta,
                        "target maximum posterior belief");
  calibrate->add_option("--rho-alpha", cal_rho_alpha,
                        "target expected membership advantage");
  calibrate->add_option("--delta", cal_delta, "target delta");
  calibrate->add_option("--sensitivity", cal_sensitivity, "query sensitivity");
  calibrate->add_option("--steps", cal_steps, "composition steps");

  CommonOptions bounds_opts;
  std::optional<double> b_eps_min, b_eps_max, b_eps_step;
  std::vector<double> b_deltas;
  std::optional<int> b_steps;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "plot-ready rho_beta / rho_alpha grid over (epsilon, delta)");
  add_common_flags(bounds, &bounds_opts);
  bounds->add_option("--eps-min", b_eps_min, "epsilon grid start");
  bounds->add_option("--eps-max", b_eps_max, "epsilon grid end");
  bounds->add_option("--eps-step", b_eps_step, "epsilon grid step");
  bounds->add_option("--delta", b_deltas, "delta values (repeatable)");
  bounds->add_option("--steps", b_steps, "composition steps");

  CommonOptions synth_opts;
  std::optional<double> s_epsilon, s_delta;
  std::optional<int> s_steps;
  std::optional<long> s_runs;
  CLI::App* synthetic = app.add_subcommand(
      "synthetic", "wage-universe sum-query identification campaign");
  add_common_flags(synthetic, &synth_opts);
  synthetic->add_option("--epsilon", s_epsilon, "total privacy budget");
  synthetic->add_option("--delta", s_delta, "target delta");
  synthetic->add_option("--steps", s_steps, "queries per run");
  synthetic->add_option("--runs", s_runs, "number of repetitions");

  CommonOptions audit_opts;
  CLI::App* train_audit = app.add_subcommand(
      "train-audit", "DPSGD identification campaign and epsilon audit");
  add_common_flags(train_audit, &audit_opts);

  CommonOptions mi_opts;
  CLI::App* mi_compare = app.add_subcommand(
      "mi-compare",
      "identification vs membership-inference advantage per epsilon");
  add_common_flags(mi_compare, &mi_opts);

  CommonOptions sens_opts;
  std::optional<std::string> sens_csv, sens_label, sens_measure, sens_mode;
  CLI::App* sensitivity = app.add_subcommand(
      "sensitivity", "dataset-sensitivity ranking of neighbor candidates");
  add_common_flags(sensitivity, &sens_opts);
  sensitivity->add_option("--csv", sens_csv, "CSV dataset path");
  sensitivity->add_option("--label", sens_label, "label column name");
  sensitivity->add_option("--measure", sens_measure,
                          "euclidean|manhattan|hamming|cosine|negative_ssim");
  sensitivity->add_option("--mode", sens_mode, "unbounded|bounded");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (calibrate->parsed()) {
      json config = load_config_file(calibrate_opts.config_path);
      if (cal_epsilon) config["epsilon"] = *cal_epsilon;
      if (cal_rho_beta) config["rho_beta"] = *cal_rho_beta;
      if (cal_rho_alpha) config["rho_alpha"] = *cal_rho_alpha;
      if (cal_delta) config["delta"] = *cal_delta;
      if (cal_sensitivity) config["sensitivity"] = *cal_sensitivity;
      if (cal_steps) config["steps"] = *cal_steps;
      resolve_seed(config, calibrate_opts);
      return execute({"calibrate", &dpident_calibrate, "calibrate.json",
                      {"calibration"}},
                     config, calibrate_opts, true);
    }
    if (bounds->parsed()) {
      json config = load_config_file(bounds_opts.config_path);
      if (b_eps_min) config["epsilon_min"] = *b_eps_min;
      if (b_eps_max) config["epsilon_max"] = *b_eps_max;
      if (b_eps_step) config["epsilon_step"] = *b_eps_step;
      if (!b_deltas.empty()) config["deltas"] = b_deltas;
      if (b_steps) config["steps"] = *b_steps;
      resolve_seed(config, bounds_opts);
      return execute({"bounds", &dpident_bounds_table, "bounds.json",
                      {"bounds"}},
                     config, bounds_opts, true);
    }
    if (synthetic->parsed()) {
      json config = load_config_file(synth_opts.config_path);
      if (s_epsilon) config["epsilon"] = *s_epsilon;
      if (s_delta) config["delta"] = *s_delta;
      if (s_steps) config["steps"] = *s_steps;
      if (s_runs) {
        config["runs"] = *s_runs;
      } else if (!config.contains("runs")) {
        config["runs"] = synth_opts.paper_scale ? 10000 : 2000;
      }
      resolve_seed(config, synth_opts);
      resolve_threads(config, synth_opts);
      return execute({"synthetic", &dpident_synthetic_audit,
                      "synthetic.json",
                      {"belief_histogram", "sample_run"}},
                     config, synth_opts, false);
    }
    if (train_audit->parsed()) {
      json config = load_config_file(audit_opts.config_path);
      if (!config.contains("n_exp")) {
        config["n_exp"] = audit_opts.paper_scale ? 1000 : 250;
      }
      resolve_seed(config, audit_opts);
      resolve_threads(config, audit_opts);
      return execute({"train-audit", &dpident_train_audit,
                      "train_audit.json",
                      {"epsilon_audit", "belief_distribution",
                       "sensitivity_steps"}},
                     config, audit_opts, false);
    }
    if (mi_compare->parsed()) {
      json config = load_config_file(mi_opts.config_path);
      if (!config.contains("n_exp")) {
        config["n_exp"] = mi_opts.paper_scale ? 1000 : 250;
      }
      resolve_seed(config, mi_opts);
      resolve_threads(config, mi_opts);
      return execute({"mi-compare", &dpident_mi_compare, "mi_compare.json",
                      {"mi_comparison"}},
                     config, mi_opts, false);
    }
    if (sensitivity->parsed()) {
      json config = load_config_file(sens_opts.config_path);
      if (sens_csv) {
        config["dataset"] = {{"type", "csv"},
                             {"path", *sens_csv},
                             {"label_column",
                              sens_label.value_or("label")}};
      }
      if (sens_measure) config["dissimilarity"] = *sens_measure;
      if (sens_mode) config["neighbor_mode"] = *sens_mode;
      resolve_seed(config, sens_opts);
      return execute({"sensitivity", &dpident_rank_sensitivity,
                      "sensitivity.json", {"ranking"}},
                     config, sens_opts, true);
    }
  } catch (const IoError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
