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

#include "dpident/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dpident/bounds.hpp"
#include "dpident/errors.hpp"
#include "json.hpp"

namespace dpident {
namespace {

using nlohmann::json;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

json parse_config(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& error) {
    throw std::invalid_argument(std::string("invalid configuration JSON: ") +
                                error.what());
  }
}

double get_number(const json& config, const char* key) {
  require(config.contains(key) && config[key].is_number(),
          std::string("configuration needs numeric field '") + key + "'");
  return config[key].get<double>();
}

double get_number_or(const json& config, const char* key, double fallback) {
  if (!config.contains(key)) return fallback;
  require(config[key].is_number(),
          std::string("configuration field '") + key + "' must be numeric");
  return config[key].get<double>();
}

long get_integer_or(const json& config, const char* key, long fallback) {
  if (!config.contains(key)) return fallback;
  require(config[key].is_number_integer(),
          std::string("configuration field '") + key + "' must be an integer");
  return config[key].get<long>();
}

std::uint64_t get_seed_or(const json& config, const char* key,
                          std::uint64_t fallback) {
  if (!config.contains(key)) return fallback;
  require(config[key].is_number_integer(),
          std::string("configuration field '") + key + "' must be an integer");
  return config[key].get<std::uint64_t>();
}

std::string get_string(const json& config, const char* key) {
  require(config.contains(key) && config[key].is_string(),
          std::string("configuration needs string field '") + key + "'");
  return config[key].get<std::string>();
}

std::string get_string_or(const json& config, const char* key,
                          const std::string& fallback) {
  if (!config.contains(key)) return fallback;
  require(config[key].is_string(),
          std::string("configuration field '") + key + "' must be a string");
  return config[key].get<std::string>();
}

NeighborMode parse_mode(const std::string& text) {
  if (text == "unbounded") return NeighborMode::kUnbounded;
  if (text == "bounded") return NeighborMode::kBounded;
  throw std::invalid_argument("unknown neighbor_mode '" + text + "'");
}

SensitivitySource parse_source(const std::string& text) {
  if (text == "global") return SensitivitySource::kGlobal;
  if (text == "local") return SensitivitySource::kLocal;
  if (text == "dataset_heuristic") return SensitivitySource::kDatasetHeuristic;
  throw std::invalid_argument("unknown sensitivity_source '" + text + "'");
}

Dissimilarity parse_measure(const std::string& text) {
  if (text == "euclidean") return Dissimilarity::kEuclidean;
  if (text == "manhattan") return Dissimilarity::kManhattan;
  if (text == "hamming") return Dissimilarity::kHamming;
  if (text == "cosine") return Dissimilarity::kCosine;
  if (text == "negative_ssim") return Dissimilarity::kNegativeSsim;
  throw std::invalid_argument("unknown dissimilarity '" + text + "'");
}

std::string mode_name(NeighborMode mode) {
  return mode == NeighborMode::kBounded ? "bounded" : "unbounded";
}

std::string source_name(SensitivitySource source) {
  switch (source) {
    case SensitivitySource::kGlobal:
      return "global";
    case SensitivitySource::kLocal:
      return "local";
    case SensitivitySource::kDatasetHeuristic:
      return "dataset_heuristic";
  }
  return "unknown";
}

std::string format_number(double value) {
  char buffer[32];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

class CsvTable {
 public:
  explicit CsvTable(const std::string& header) { text_ = header + "\n"; }

  void add_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) text_ += ',';
      text_ += cells[i];
    }
    text_ += '\n';
  }

  std::string take() { return std::move(text_); }

 private:
  std::string text_;
};

// Resolves exactly one of epsilon / rho_beta / rho_alpha into epsilon.
double resolve_epsilon(const json& target, double delta) {
  int given = 0;
  for (const char* key : {"epsilon", "rho_beta", "rho_alpha"}) {
    if (target.contains(key)) ++given;
  }
  require(given == 1,
          "exactly one of epsilon, rho_beta, rho_alpha must be given");
  if (target.contains("epsilon")) {
    const double epsilon = get_number(target, "epsilon");
    require(std::isfinite(epsilon) && epsilon > 0.0,
            "epsilon must be positive");
    return epsilon;
  }
  if (target.contains("rho_beta")) {
    return eps_from_posterior_bound(get_number(target, "rho_beta"));
  }
  return eps_from_advantage(get_number(target, "rho_alpha"), delta);
}

struct ResolvedDataset {
  CampaignInputs inputs;
  json echo;  // resolved dataset description for the summary
};

ResolvedDataset resolve_dataset(const json& spec) {
  require(spec.is_object(), "configuration needs a 'dataset' object");
  const std::string type = get_string(spec, "type");
  ResolvedDataset resolved;
  if (type == "blobs") {
    BlobSpec blob;
    blob.n = get_integer_or(spec, "n", blob.n);
    blob.d = get_integer_or(spec, "d", blob.d);
    blob.classes = get_integer_or(spec, "classes", blob.classes);
    blob.separation = get_number_or(spec, "separation", blob.separation);
    blob.seed = get_seed_or(spec, "seed", blob.seed);
    const long universe_n = get_integer_or(spec, "universe_n", blob.n);
    require(universe_n >= blob.n, "universe_n must be at least n");
    BlobSpec universe_spec = blob;
    universe_spec.n = universe_n;
    const TabularDataset universe = synth_blobs(universe_spec);
    resolved.inputs.dataset = universe.head(blob.n);
    resolved.inputs.universe_rest = universe.tail_from(blob.n);
    resolved.inputs.generator = universe_spec;
    resolved.echo = {{"type", "blobs"},       {"n", blob.n},
                     {"d", blob.d},           {"classes", blob.classes},
                     {"separation", blob.separation},
                     {"seed", blob.seed},     {"universe_n", universe_n}};
    return resolved;
  }
  if (type == "csv") {
    const std::string path = get_string(spec, "path");
    const std::string label = get_string(spec, "label_column");
    const TabularDataset all = load_csv(path, label);
    const long n = get_integer_or(spec, "n", all.rows());
    require(n >= 1 && n <= all.rows(), "dataset n out of range");
    resolved.inputs.dataset = all.head(n);
    resolved.inputs.universe_rest = all.tail_from(n);
    resolved.echo = {{"type", "csv"},
                     {"path", path},
                     {"label_column", label},
                     {"n", n},
                     {"rows_total", all.rows()}};
    return resolved;
  }
  throw std::invalid_argument("unknown dataset type '" + type + "'");
}

CampaignConfig campaign_from_json(const json& config, double epsilon,
                                  double delta) {
  CampaignConfig campaign;
  campaign.epsilon = epsilon;
  campaign.delta = delta;
  campaign.mode = parse_mode(get_string_or(config, "neighbor_mode",
                                           "unbounded"));
  campaign.source = parse_source(
      get_string_or(config, "sensitivity_source", "local"));
  campaign.measure = parse_measure(
      get_string_or(config, "dissimilarity", "euclidean"));
  campaign.n_exp = get_integer_or(config, "n_exp", 1000);
  campaign.master_seed = get_seed_or(config, "seed", 1);
  campaign.threads = static_cast<int>(get_integer_or(config, "threads", 0));
  if (config.contains("train")) {
    const json& train = config["train"];
    campaign.clipping_norm =
        get_number_or(train, "clipping_norm", campaign.clipping_norm);
    campaign.learning_rate =
        get_number_or(train, "learning_rate", campaign.learning_rate);
    campaign.steps =
        static_cast<int>(get_integer_or(train, "steps", campaign.steps));
    if (train.contains("hidden_layers")) {
      require(train["hidden_layers"].is_array(),
              "train.hidden_layers must be an array");
      campaign.hidden_layers.clear();
      for (const json& h : train["hidden_layers"]) {
        require(h.is_number_integer(),
                "train.hidden_layers entries must be integers");
        campaign.hidden_layers.push_back(h.get<int>());
      }
    }
  }
  return campaign;
}

json campaign_echo(const CampaignConfig& campaign) {
  return {{"epsilon", campaign.epsilon},
          {"delta", campaign.delta},
          {"steps", campaign.steps},
          {"neighbor_mode", mode_name(campaign.mode)},
          {"sensitivity_source", source_name(campaign.source)},
          {"n_exp", campaign.n_exp},
          {"clipping_norm", campaign.clipping_norm},
          {"learning_rate", campaign.learning_rate},
          {"hidden_layers", campaign.hidden_layers},
          {"seed", campaign.master_seed}};
}

CsvTable histogram_table(const AuditReport& report) {
  CsvTable table("bin_low,bin_high,count");
  const double width = 1.0 / kBeliefHistogramBins;
  for (int bin = 0; bin < kBeliefHistogramBins; ++bin) {
    table.add_row({format_number(bin * width),
                   format_number((bin + 1) * width),
                   std::to_string(report.belief_histogram[
                       static_cast<std::size_t>(bin)])});
  }
  return table;
}

CsvTable sample_run_table(const AuditReport& report) {
  CsvTable table("step,observed,belief_d,belief_d_prime");
  for (std::size_t i = 0; i < report.sample_belief_trajectory.size(); ++i) {
    const std::string observed =
        i < report.sample_observations.size()
            ? format_number(report.sample_observations[i])
            : "";
    const double belief = report.sample_belief_trajectory[i];
    table.add_row({std::to_string(i + 1), observed, format_number(belief),
                   format_number(1.0 - belief)});
  }
  return table;
}

double quantile(std::vector<double> sorted, double q) {
  const double position = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lower = static_cast<std::size_t>(position);
  const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
  const double fraction = position - static_cast<double>(lower);
  return sorted[lower] * (1.0 - fraction) + sorted[upper] * fraction;
}

CsvTable sensitivity_steps_table(const AuditReport& report) {
  CsvTable table("step,mean,min,q1,median,q3,max");
  for (int step = 0; step < report.steps; ++step) {
    std::vector<double> values;
    values.reserve(report.repetitions.size());
    for (const RepetitionRecord& rep : report.repetitions) {
      const std::vector<double>& ls = rep.local_sensitivity.empty()
                                          ? report.shared_local_sensitivity
                                          : rep.local_sensitivity;
      values.push_back(ls[static_cast<std::size_t>(step)]);
    }
    std::sort(values.begin(), values.end());
    double mean = 0.0;
    for (const double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    table.add_row({std::to_string(step + 1), format_number(mean),
                   format_number(values.front()),
                   format_number(quantile(values, 0.25)),
                   format_number(quantile(values, 0.5)),
                   format_number(quantile(values, 0.75)),
                   format_number(values.back())});
  }
  return table;
}

json report_to_json_value(const AuditReport& report) {
  json doc;
  doc["target_epsilon"] = report.target_epsilon;
  doc["target_delta"] = report.target_delta;
  doc["steps"] = report.steps;
  doc["n_exp"] = report.n_exp;
  doc["wins"] = report.wins;
  doc["rho_beta"] = report.rho_beta;
  doc["rho_alpha"] = report.rho_alpha;
  doc["rho_alpha_composed"] = report.rho_alpha_composed;
  doc["advantage"] = report.advantage;
  doc["advantage_std_error"] = report.advantage_std_error;
  doc["delta_prime"] = report.delta_prime;
  doc["eps_from_sensitivities"] = report.eps_from_sensitivities;
  doc["eps_from_beliefs"] = report.eps_from_beliefs;
  doc["eps_from_advantage"] = report.eps_from_advantage;
  doc["advantage_estimate_vacuous"] = report.advantage_estimate_vacuous;
  doc["degenerate_ls_steps"] = report.degenerate_ls_steps;
  doc["belief_histogram"] = report.belief_histogram;
  doc["shared_local_sensitivity"] = report.shared_local_sensitivity;
  doc["shared_sigma"] = report.shared_sigma;
  json reps = json::array();
  for (const RepetitionRecord& rep : report.repetitions) {
    json entry;
    entry["final_belief_d"] = rep.final_belief_d;
    entry["secret_bit"] = rep.secret_bit;
    entry["win"] = rep.win;
    if (!rep.local_sensitivity.empty()) {
      entry["local_sensitivity"] = rep.local_sensitivity;
      entry["sigma"] = rep.sigma;
    }
    reps.push_back(std::move(entry));
  }
  doc["repetitions"] = std::move(reps);
  doc["sample_belief_trajectory"] = report.sample_belief_trajectory;
  doc["sample_observations"] = report.sample_observations;
  return doc;
}

}  // namespace

std::string audit_report_to_json(const AuditReport& report) {
  return report_to_json_value(report).dump();
}

CommandResult cmd_calibrate(const std::string& config_json) {
  const json config = parse_config(config_json);
  const double delta = get_number(config, "delta");
  const double sensitivity = get_number_or(config, "sensitivity", 1.0);
  const int steps = static_cast<int>(get_integer_or(config, "steps", 1));
  const double epsilon = resolve_epsilon(config, delta);

  const PrivacyParams target{epsilon, delta, sensitivity, steps};
  const BudgetSplit split = budget_split(target);
  const double rho_beta = 1.0 / (1.0 + std::exp(-epsilon));
  const double rho_alpha = advantage_bound_gaussian(epsilon, delta).rho_alpha;
  const double rho_alpha_composed =
      advantage_bound_rdp(split.composed_rdp()).rho_alpha;

  json summary;
  summary["epsilon"] = epsilon;
  summary["delta"] = delta;
  summary["sensitivity"] = sensitivity;
  summary["steps"] = steps;
  summary["rho_beta"] = rho_beta;
  summary["rho_alpha"] = rho_alpha;
  summary["rho_alpha_composed"] = rho_alpha_composed;
  summary["sigma_per_step"] = split.per_step_sigma.sigma;
  summary["noise_multiplier"] = split.noise_multiplier;
  summary["alpha_star"] = split.alpha_star;
  summary["per_step_epsilon"] = split.per_step_epsilon;
  summary["per_step_delta"] = split.per_step_delta;

  CsvTable table(
      "epsilon,delta,sensitivity,steps,rho_beta,rho_alpha,"
      "rho_alpha_composed,sigma_per_step,noise_multiplier,alpha_star,"
      "per_step_epsilon,per_step_delta");
  table.add_row({format_number(epsilon), format_number(delta),
                 format_number(sensitivity), std::to_string(steps),
                 format_number(rho_beta), format_number(rho_alpha),
                 format_number(rho_alpha_composed),
                 format_number(split.per_step_sigma.sigma),
                 format_number(split.noise_multiplier),
                 format_number(split.alpha_star),
                 format_number(split.per_step_epsilon),
                 format_number(split.per_step_delta)});

  CommandResult result;
  result.summary_json = summary.dump();
  result.tables.emplace_back("calibration", table.take());
  return result;
}

CommandResult cmd_bounds(const std::string& config_json) {
  const json config = parse_config(config_json);
  const double eps_min = get_number(config, "epsilon_min");
  const double eps_max = get_number(config, "epsilon_max");
  const double eps_step = get_number(config, "epsilon_step");
  require(eps_min > 0.0 && eps_max >= eps_min && eps_step > 0.0,
          "invalid epsilon grid");
  require(config.contains("deltas") && config["deltas"].is_array() &&
              !config["deltas"].empty(),
          "configuration needs a nonempty 'deltas' array");
  const int steps = static_cast<int>(get_integer_or(config, "steps", 1));
  require(steps >= 1, "steps must be >= 1");
  std::vector<double> deltas;
  for (const json& d : config["deltas"]) {
    require(d.is_number(), "'deltas' entries must be numeric");
    deltas.push_back(d.get<double>());
  }

  CsvTable table("epsilon,delta,rho_beta,rho_alpha,rho_alpha_composed");
  long rows = 0;
  for (double epsilon = eps_min; epsilon <= eps_max + 1e-12;
       epsilon += eps_step) {
    const double rho_beta = 1.0 / (1.0 + std::exp(-epsilon));
    for (const double delta : deltas) {
      const double rho_alpha =
          advantage_bound_gaussian(epsilon, delta).rho_alpha;
      const BudgetSplit split =
          budget_split(PrivacyParams{epsilon, delta, 1.0, steps});
      const double composed =
          advantage_bound_rdp(split.composed_rdp()).rho_alpha;
      table.add_row({format_number(epsilon), format_number(delta),
                     format_number(rho_beta), format_number(rho_alpha),
                     format_number(composed)});
      ++rows;
    }
  }

  json summary;
  summary["rows"] = rows;
  summary["epsilon_min"] = eps_min;
  summary["epsilon_max"] = eps_max;
  summary["epsilon_step"] = eps_step;
  summary["deltas"] = deltas;
  summary["steps"] = steps;

  CommandResult result;
  result.summary_json = summary.dump();
  result.tables.emplace_back("bounds", table.take());
  return result;
}

CommandResult cmd_synthetic(const std::string& config_json) {
  const json config = parse_config(config_json);
  SyntheticConfig synthetic;
  synthetic.epsilon = get_number_or(config, "epsilon", synthetic.epsilon);
  synthetic.delta = get_number_or(config, "delta", synthetic.delta);
  synthetic.steps =
      static_cast<int>(get_integer_or(config, "steps", synthetic.steps));
  synthetic.runs = get_integer_or(config, "runs", synthetic.runs);
  synthetic.master_seed = get_seed_or(config, "seed", synthetic.master_seed);
  synthetic.threads =
      static_cast<int>(get_integer_or(config, "threads", synthetic.threads));

  const AuditReport report = run_synthetic_campaign(synthetic);
  const WageUniverse world = wage_universe();

  json summary;
  summary["epsilon"] = synthetic.epsilon;
  summary["delta"] = synthetic.delta;
  summary["steps"] = synthetic.steps;
  summary["runs"] = synthetic.runs;
  summary["seed"] = synthetic.master_seed;
  summary["query_sensitivity"] = world.query_sensitivity();
  summary["sigma_per_step"] =
      report.shared_sigma.empty() ? 0.0 : report.shared_sigma.front();
  summary["wins"] = report.wins;
  summary["win_rate"] = static_cast<double>(report.wins) /
                        static_cast<double>(report.n_exp);
  summary["advantage"] = report.advantage;
  summary["advantage_std_error"] = report.advantage_std_error;
  summary["delta_prime"] = report.delta_prime;
  summary["rho_beta"] = report.rho_beta;
  summary["rho_alpha"] = report.rho_alpha;
  summary["rho_alpha_composed"] = report.rho_alpha_composed;
  summary["eps_from_sensitivities"] = report.eps_from_sensitivities;
  summary["eps_from_beliefs"] = report.eps_from_beliefs;
  summary["eps_from_advantage"] = report.eps_from_advantage;
  summary["advantage_estimate_vacuous"] = report.advantage_estimate_vacuous;

  CommandResult result;
  result.summary_json = summary.dump();
  result.tables.emplace_back("belief_histogram",
                             histogram_table(report).take());
  result.tables.emplace_back("sample_run", sample_run_table(report).take());
  return result;
}

CommandResult cmd_train_audit(const std::string& config_json) {
  const json config = parse_config(config_json);
  const double delta = get_number(config, "delta");
  require(config.contains("target") && config["target"].is_object(),
          "configuration needs a 'target' object");
  const double epsilon = resolve_epsilon(config["target"], delta);
  CampaignConfig campaign = campaign_from_json(config, epsilon, delta);
  require(config.contains("dataset"),
          "configuration needs a 'dataset' object");
  ResolvedDataset resolved = resolve_dataset(config["dataset"]);

  const AuditReport report = run_campaign(campaign, resolved.inputs);

  json summary = report_to_json_value(report);
  summary["config"] = campaign_echo(campaign);
  summary["config"]["dissimilarity"] =
      get_string_or(config, "dissimilarity", "euclidean");
  summary["config"]["dataset"] = resolved.echo;

  CsvTable eps_table("method,target_epsilon,empirical_epsilon");
  eps_table.add_row({"sensitivities", format_number(report.target_epsilon),
                     format_number(report.eps_from_sensitivities)});
  eps_table.add_row({"beliefs", format_number(report.target_epsilon),
                     format_number(report.eps_from_beliefs)});
  eps_table.add_row({"advantage", format_number(report.target_epsilon),
                     format_number(report.eps_from_advantage)});

  CommandResult result;
  result.summary_json = summary.dump();
  result.tables.emplace_back("epsilon_audit", eps_table.take());
  result.tables.emplace_back("belief_distribution",
                             histogram_table(report).take());
  result.tables.emplace_back("sensitivity_steps",
                             sensitivity_steps_table(report).take());
  return result;
}

CommandResult cmd_mi_compare(const std::string& config_json) {
  const json config = parse_config(config_json);
  const double delta = get_number(config, "delta");
  std::vector<double> epsilons;
  if (config.contains("epsilons")) {
    require(config["epsilons"].is_array() && !config["epsilons"].empty(),
            "'epsilons' must be a nonempty array");
    for (const json& e : config["epsilons"]) {
      require(e.is_number(), "'epsilons' entries must be numeric");
      epsilons.push_back(e.get<double>());
    }
  } else if (config.contains("rho_betas")) {
    require(config["rho_betas"].is_array() && !config["rho_betas"].empty(),
            "'rho_betas' must be a nonempty array");
    for (const json& r : config["rho_betas"]) {
      require(r.is_number(), "'rho_betas' entries must be numeric");
      epsilons.push_back(eps_from_posterior_bound(r.get<double>()));
    }
  } else {
    throw std::invalid_argument(
        "configuration needs 'epsilons' or 'rho_betas'");
  }
  require(config.contains("dataset"),
          "configuration needs a 'dataset' object");
  ResolvedDataset resolved = resolve_dataset(config["dataset"]);
  const std::uint64_t master_seed = get_seed_or(config, "seed", 1);
  const RandomStream seed_stream(master_seed);

  CsvTable table(
      "epsilon,adv_di,adv_di_std_error,adv_mi,adv_mi_std_error,rho_alpha,"
      "rho_alpha_composed,loose_bound");
  json rows = json::array();
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    CampaignConfig campaign = campaign_from_json(config, epsilons[i], delta);
    campaign.master_seed = seed_stream.substream(2 * i).key();
    const AuditReport di = run_campaign(campaign, resolved.inputs);
    campaign.master_seed = seed_stream.substream(2 * i + 1).key();
    const MiCampaignResult mi = run_mi_campaign(campaign, resolved.inputs);
    const double rho_alpha =
        advantage_bound_gaussian(epsilons[i], delta).rho_alpha;
    const double loose =
        std::min(advantage_bound_general(epsilons[i], 1.0), 1.0);
    table.add_row({format_number(epsilons[i]), format_number(di.advantage),
                   format_number(di.advantage_std_error),
                   format_number(mi.advantage), format_number(mi.std_error),
                   format_number(rho_alpha),
                   format_number(di.rho_alpha_composed),
                   format_number(loose)});
    json row;
    row["epsilon"] = epsilons[i];
    row["adv_di"] = di.advantage;
    row["adv_di_std_error"] = di.advantage_std_error;
    row["adv_mi"] = mi.advantage;
    row["adv_mi_std_error"] = mi.std_error;
    row["rho_alpha"] = rho_alpha;
    row["rho_alpha_composed"] = di.rho_alpha_composed;
    row["loose_bound"] = loose;
    rows.push_back(std::move(row));
  }

  json summary;
  summary["delta"] = delta;
  summary["seed"] = master_seed;
  summary["dataset"] = resolved.echo;
  summary["rows"] = std::move(rows);

  CommandResult result;
  result.summary_json = summary.dump();
  result.tables.emplace_back("mi_comparison", table.take());
  return result;
}

CommandResult cmd_sensitivity(const std::string& config_json) {
  const json config = parse_config(config_json);
  require(config.contains("dataset"),
          "configuration needs a 'dataset' object");
  ResolvedDataset resolved = resolve_dataset(config["dataset"]);
  const Dissimilarity measure = parse_measure(
      get_string_or(config, "dissimilarity", "euclidean"));
  const NeighborMode mode = parse_mode(
      get_string_or(config, "neighbor_mode", "unbounded"));
  const TabularDataset& dataset = resolved.inputs.dataset;

  json summary;
  summary["dissimilarity"] = get_string_or(config, "dissimilarity",
                                           "euclidean");
  summary["neighbor_mode"] = mode_name(mode);
  summary["dataset"] = resolved.echo;

  CommandResult result;
  if (mode == NeighborMode::kUnbounded) {
    require(dataset.rows() >= 2, "dataset needs at least two rows");
    struct Entry {
      long row;
      double value;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(dataset.rows()));
    for (long i = 0; i < dataset.rows(); ++i) {
      const Eigen::VectorXd a = dataset.features.row(i).transpose();
      double sum = 0.0;
      for (long j = 0; j < dataset.rows(); ++j) {
        if (i == j) continue;
        const Eigen::VectorXd b = dataset.features.row(j).transpose();
        sum += dissimilarity(
            std::span<const double>(a.data(),
                                    static_cast<std::size_t>(a.size())),
            std::span<const double>(b.data(),
                                    static_cast<std::size_t>(b.size())),
            measure);
      }
      entries.push_back({i, sum});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) {
                       if (a.value != b.value) return a.value > b.value;
                       return a.row < b.row;
                     });
    CsvTable table("rank,row,dataset_sensitivity");
    for (std::size_t r = 0; r < entries.size(); ++r) {
      table.add_row({std::to_string(r + 1), std::to_string(entries[r].row),
                     format_number(entries[r].value)});
    }
    summary["rows"] = dataset.rows();
    summary["top_row"] = entries.front().row;
    summary["top_value"] = entries.front().value;
    result.tables.emplace_back("ranking", table.take());
  } else {
    const TabularDataset& rest = resolved.inputs.universe_rest;
    require(rest.rows() >= 1,
            "bounded ranking needs records outside the dataset");
    struct PairEntry {
      long row_d;
      long row_u;
      double value;
    };
    std::vector<PairEntry> entries;
    entries.reserve(
        static_cast<std::size_t>(dataset.rows() * rest.rows()));
    for (long i = 0; i < dataset.rows(); ++i) {
      const Eigen::VectorXd a = dataset.features.row(i).transpose();
      for (long j = 0; j < rest.rows(); ++j) {
        const Eigen::VectorXd b = rest.features.row(j).transpose();
        entries.push_back(
            {i, j,
             dissimilarity(
                 std::span<const double>(a.data(),
                                         static_cast<std::size_t>(a.size())),
                 std::span<const double>(b.data(),
                                         static_cast<std::size_t>(b.size())),
                 measure)});
      }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const PairEntry& a, const PairEntry& b) {
                       if (a.value != b.value) return a.value > b.value;
                       if (a.row_d != b.row_d) return a.row_d < b.row_d;
                       return a.row_u < b.row_u;
                     });
    CsvTable table("rank,row_d,row_u,dissimilarity");
    for (std::size_t r = 0; r < entries.size(); ++r) {
      table.add_row({std::to_string(r + 1), std::to_string(entries[r].row_d),
                     std::to_string(entries[r].row_u),
                     format_number(entries[r].value)});
    }
    summary["pairs"] = static_cast<long>(entries.size());
    summary["top_row_d"] = entries.front().row_d;
    summary["top_row_u"] = entries.front().row_u;
    summary["top_value"] = entries.front().value;
    result.tables.emplace_back("ranking", table.take());
  }
  result.summary_json = summary.dump();
  return result;
}

}  // namespace dpident
