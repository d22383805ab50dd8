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

#include "dpident/audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "dpident/bounds.hpp"

namespace dpident {
namespace {

// Substream tags inside one repetition stream. 0 is the secret bit and
// 1..steps the per-step noise (see run_di_experiment); the rest must not
// collide with those.
constexpr std::uint64_t kInitStream = 1'000'003;
constexpr std::uint64_t kChallengeStream = 2'000'003;

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

// Runs fn(rep) for every repetition index, spreading work over workers.
// Results must be written into per-index slots so the schedule cannot
// influence the aggregate.
void parallel_repetitions(long n, int threads,
                          const std::function<void(long)>& fn) {
  long worker_count = threads > 0
                          ? threads
                          : static_cast<long>(std::max(
                                1u, std::thread::hardware_concurrency()));
  worker_count = std::max(1L, std::min(worker_count, n));
  if (worker_count == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const long index = next.fetch_add(1);
      if (index >= n) return;
      try {
        fn(index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(worker_count));
  for (long i = 0; i < worker_count; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  // A failed repetition aborts the whole campaign; partial results would
  // bias delta'.
  if (failure) std::rethrow_exception(failure);
}

// Full-batch DPSGD mechanism under identification audit. Hypothesis centers
// and noise live on the clipped-gradient-sum scale rescaled by 1/|D|, so the
// released value is directly the gradient applied to the weights and the
// recorded (sigma, local sensitivity) pairs share one scale.
class DpsgdMechanism : public DiMechanism {
 public:
  DpsgdMechanism(const TabularDataset& d, const TabularDataset& d_prime,
                 const CampaignConfig& config, double noise_multiplier,
                 std::optional<std::pair<long, long>> heuristic_rows,
                 Network initial)
      : d_(d),
        d_prime_(d_prime),
        config_(config),
        multiplier_(noise_multiplier),
        heuristic_rows_(heuristic_rows),
        net_(std::move(initial)),
        n_(static_cast<double>(d.rows())),
        n_prime_(static_cast<double>(d_prime.rows())) {}

  DiStepHypotheses hypotheses(int /*step*/) override {
    const BatchGradient batch_d = batch_clipped_gradient(
        net_, d_.features, d_.labels, config_.clipping_norm);
    const BatchGradient batch_d_prime = batch_clipped_gradient(
        net_, d_prime_.features, d_prime_.labels, config_.clipping_norm);
    const double ls = local_sensitivity_step(
        batch_d.mean, batch_d_prime.mean, d_.rows(), config_.mode);

    double sensitivity = 0.0;
    switch (config_.source) {
      case SensitivitySource::kGlobal:
        sensitivity = config_.mode == NeighborMode::kBounded
                          ? 2.0 * config_.clipping_norm
                          : config_.clipping_norm;
        break;
      case SensitivitySource::kLocal:
        sensitivity = ls;
        break;
      case SensitivitySource::kDatasetHeuristic: {
        require(heuristic_rows_.has_value(),
                "campaign: heuristic source without selected rows");
        const Eigen::VectorXd g_x =
            batch_d.per_example.row(heuristic_rows_->first).transpose();
        if (config_.mode == NeighborMode::kBounded) {
          const Eigen::VectorXd g_x_prime =
              batch_d_prime.per_example.row(heuristic_rows_->second)
                  .transpose();
          sensitivity =
              approx_local_sensitivity(g_x, g_x_prime, config_.mode);
        } else {
          sensitivity = approx_local_sensitivity(g_x, std::nullopt,
                                                 config_.mode);
        }
        break;
      }
    }
    const double sigma_sum_scale = sensitivity * multiplier_;
    local_sensitivity_.push_back(ls);
    sigma_.push_back(sigma_sum_scale);

    DiStepHypotheses hyp;
    hyp.center_d = to_vector(batch_d.mean);
    hyp.center_d_prime = to_vector((n_prime_ / n_) * batch_d_prime.mean);
    hyp.sigma = {sigma_sum_scale / n_};
    return hyp;
  }

  void observe(int /*step*/, std::span<const double> released) override {
    const Eigen::Map<const Eigen::VectorXd> gradient(
        released.data(), static_cast<long>(released.size()));
    set_parameters(net_,
                   flatten_parameters(net_) - config_.learning_rate * gradient);
  }

  std::vector<double> take_local_sensitivity() {
    return std::move(local_sensitivity_);
  }
  std::vector<double> take_sigma() { return std::move(sigma_); }
  Network take_network() { return std::move(net_); }

 private:
  const TabularDataset& d_;
  const TabularDataset& d_prime_;
  const CampaignConfig& config_;
  double multiplier_;
  std::optional<std::pair<long, long>> heuristic_rows_;
  Network net_;
  double n_;
  double n_prime_;
  std::vector<double> local_sensitivity_;
  std::vector<double> sigma_;
};

// Constant-center scalar mechanism for the wage sum query.
class ConstantMechanism : public DiMechanism {
 public:
  ConstantMechanism(double center_d, double center_d_prime, double sigma)
      : hypotheses_{{center_d}, {center_d_prime}, {sigma}} {}

  DiStepHypotheses hypotheses(int) override { return hypotheses_; }

  void observe(int, std::span<const double> released) override {
    observations_.push_back(released[0]);
  }

  const std::vector<double>& observations() const { return observations_; }

 private:
  DiStepHypotheses hypotheses_;
  std::vector<double> observations_;
};

std::vector<int> network_architecture(const CampaignConfig& config,
                                      const TabularDataset& dataset) {
  std::vector<int> sizes;
  sizes.push_back(static_cast<int>(dataset.feature_count()));
  for (int h : config.hidden_layers) sizes.push_back(h);
  sizes.push_back(static_cast<int>(dataset.class_count()));
  return sizes;
}

std::vector<long> histogram(std::span<const double> beliefs) {
  std::vector<long> bins(kBeliefHistogramBins, 0);
  for (const double b : beliefs) {
    const double clamped = std::clamp(b, 0.0, 1.0);
    const int bin = std::min(kBeliefHistogramBins - 1,
                             static_cast<int>(clamped * kBeliefHistogramBins));
    bins[static_cast<std::size_t>(bin)] += 1;
  }
  return bins;
}

double advantage_standard_error(long wins, long n) {
  const double p = static_cast<double>(wins) / static_cast<double>(n);
  return 2.0 * std::sqrt(std::max(p * (1.0 - p), 0.0) /
                         static_cast<double>(n));
}

// Builds all aggregates from per-repetition outcomes.
AuditReport aggregate_report(const PrivacyParams& target,
                             const BudgetSplit& split,
                             double global_sensitivity,
                             std::vector<RepetitionRecord> repetitions,
                             std::vector<double> shared_ls,
                             std::vector<double> shared_sigma,
                             std::vector<double> sample_trajectory,
                             std::vector<double> sample_observations) {
  AuditReport report;
  report.target_epsilon = target.epsilon;
  report.target_delta = target.delta;
  report.steps = target.steps;
  report.n_exp = static_cast<long>(repetitions.size());
  report.rho_beta = 1.0 / (1.0 + std::exp(-target.epsilon));
  report.rho_alpha =
      advantage_bound_gaussian(target.epsilon, target.delta).rho_alpha;
  report.rho_alpha_composed =
      advantage_bound_rdp(split.composed_rdp()).rho_alpha;

  std::vector<double> beliefs;
  beliefs.reserve(repetitions.size());
  for (const RepetitionRecord& rep : repetitions) {
    if (rep.win) ++report.wins;
    beliefs.push_back(rep.final_belief_d);
  }
  report.advantage = estimate_advantage(report.wins, report.n_exp);
  report.advantage_std_error =
      advantage_standard_error(report.wins, report.n_exp);
  report.delta_prime = empirical_delta(beliefs, report.rho_beta);
  report.belief_histogram = histogram(beliefs);
  report.eps_from_beliefs = audit_eps_from_beliefs(beliefs);
  const AdvantageEps adv_eps =
      audit_eps_from_advantage(report.advantage, target.delta);
  report.eps_from_advantage = adv_eps.epsilon;
  report.advantage_estimate_vacuous = adv_eps.vacuous;
  report.shared_local_sensitivity = std::move(shared_ls);
  report.shared_sigma = std::move(shared_sigma);
  report.repetitions = std::move(repetitions);
  const SensitivityAudit sens =
      eps_from_recorded_noise(report, global_sensitivity, target.delta,
                              target.steps);
  report.eps_from_sensitivities = sens.epsilon_max;
  report.degenerate_ls_steps = sens.degenerate_steps;
  report.sample_belief_trajectory = std::move(sample_trajectory);
  report.sample_observations = std::move(sample_observations);
  return report;
}

}  // namespace

void CampaignConfig::validate() const {
  PrivacyParams{epsilon, delta, 1.0, steps}.validate();
  require(n_exp >= 1, "CampaignConfig: n_exp must be >= 1");
  require(clipping_norm > 0.0, "CampaignConfig: clipping norm must be positive");
  require(learning_rate >= 0.0, "CampaignConfig: learning rate must be >= 0");
  for (int h : hidden_layers) {
    require(h >= 1, "CampaignConfig: hidden layer sizes must be positive");
  }
  require(threads >= 0, "CampaignConfig: threads must be >= 0");
}

void SyntheticConfig::validate() const {
  PrivacyParams{epsilon, delta, 1.0, steps}.validate();
  require(runs >= 1, "SyntheticConfig: runs must be >= 1");
  require(threads >= 0, "SyntheticConfig: threads must be >= 0");
}

Algorithm1Result run_algorithm1(
    const TabularDataset& dataset_d, const TabularDataset& dataset_d_prime,
    const CampaignConfig& config, double noise_multiplier,
    std::optional<std::pair<long, long>> heuristic_rows, int secret_bit,
    const RandomStream& rep_stream) {
  require(dataset_d.rows() >= 1 && dataset_d_prime.rows() >= 1,
          "run_algorithm1: empty dataset");
  require(noise_multiplier >= 0.0,
          "run_algorithm1: noise multiplier must be >= 0");
  RandomStream init_rng = rep_stream.substream(kInitStream);
  Network initial =
      make_network(network_architecture(config, dataset_d), init_rng);
  DpsgdMechanism mechanism(dataset_d, dataset_d_prime, config,
                           noise_multiplier, heuristic_rows,
                           std::move(initial));
  Algorithm1Result result;
  result.outcome = run_di_experiment_with_bit(mechanism, config.steps,
                                              secret_bit, rep_stream);
  result.local_sensitivity = mechanism.take_local_sensitivity();
  result.sigma = mechanism.take_sigma();
  result.final_network = mechanism.take_network();
  return result;
}

SensitivityAudit eps_from_recorded_noise(const AuditReport& report,
                                         double global_sensitivity,
                                         double target_delta, int steps) {
  require(global_sensitivity > 0.0,
          "eps_from_recorded_noise: global sensitivity must be positive");
  SensitivityAudit audit;
  std::vector<double> multipliers;
  multipliers.reserve(static_cast<std::size_t>(steps));
  for (const RepetitionRecord& rep : report.repetitions) {
    const std::vector<double>& ls = rep.local_sensitivity.empty()
                                        ? report.shared_local_sensitivity
                                        : rep.local_sensitivity;
    const std::vector<double>& sigma =
        rep.sigma.empty() ? report.shared_sigma : rep.sigma;
    require(ls.size() == sigma.size() &&
                ls.size() == static_cast<std::size_t>(steps),
            "eps_from_recorded_noise: per-step records do not match steps");
    multipliers.clear();
    for (std::size_t i = 0; i < ls.size(); ++i) {
      if (ls[i] == 0.0) {
        // Indistinguishable hypotheses at this step: no privacy loss.
        audit.degenerate_steps += 1;
        multipliers.push_back(std::numeric_limits<double>::infinity());
        continue;
      }
      const double effective = sigma[i] / global_sensitivity;
      multipliers.push_back(effective * (global_sensitivity / ls[i]));
    }
    audit.epsilon_max = std::max(
        audit.epsilon_max, accountant_epsilon(multipliers, target_delta));
  }
  return audit;
}

SensitivityAudit audit_eps_from_sensitivities(const AuditReport& report,
                                              double clipping_norm,
                                              NeighborMode mode,
                                              double target_delta, int steps) {
  const double gs = mode == NeighborMode::kBounded ? 2.0 * clipping_norm
                                                   : clipping_norm;
  return eps_from_recorded_noise(report, gs, target_delta, steps);
}

double audit_eps_from_beliefs(std::span<const double> final_beliefs) {
  require(!final_beliefs.empty(), "audit_eps_from_beliefs: empty belief list");
  double best = 0.0;
  for (const double b : final_beliefs) best = std::max(best, b);
  // Finite-precision beliefs can round to exactly 1.
  best = std::min(best, 1.0 - 1e-12);
  if (best <= 0.5) return 0.0;
  return eps_from_posterior_bound(best);
}

AdvantageEps audit_eps_from_advantage(double advantage, double delta) {
  if (advantage <= 0.0) return {0.0, true};
  if (advantage >= 1.0) advantage = 1.0 - 1e-12;
  return {eps_from_advantage(advantage, delta), false};
}

double empirical_delta(std::span<const double> final_beliefs,
                       double rho_beta) {
  require(!final_beliefs.empty(), "empirical_delta: empty belief list");
  long exceedances = 0;
  for (const double b : final_beliefs) {
    if (b > rho_beta) ++exceedances;
  }
  return static_cast<double>(exceedances) /
         static_cast<double>(final_beliefs.size());
}

AuditReport run_campaign(const CampaignConfig& config,
                         const CampaignInputs& inputs) {
  config.validate();
  require(inputs.dataset.rows() >= 2, "run_campaign: dataset too small");

  // The most dissimilar neighbor is fixed once per campaign.
  NeighborSelection selection;
  std::optional<std::pair<long, long>> heuristic_rows;
  if (config.mode == NeighborMode::kUnbounded) {
    selection.index = select_removal_candidate(inputs.dataset.features,
                                               config.measure);
    heuristic_rows = {{static_cast<long>(selection.index), -1}};
  } else {
    require(inputs.universe_rest.rows() >= 1,
            "run_campaign: bounded mode needs records outside the dataset");
    const auto [inside, outside] = select_replacement_pair(
        inputs.dataset.features, inputs.universe_rest.features,
        config.measure);
    selection.index = inside;
    selection.replacement_features =
        inputs.universe_rest.features.row(static_cast<long>(outside))
            .transpose();
    selection.replacement_label =
        inputs.universe_rest.labels.row(static_cast<long>(outside))
            .transpose();
    // Replaced position holds x' in the neighbor.
    heuristic_rows = {{static_cast<long>(inside), static_cast<long>(inside)}};
  }
  const TabularDataset d_prime =
      neighboring_dataset(inputs.dataset, config.mode, selection);

  const PrivacyParams target{config.epsilon, config.delta, 1.0, config.steps};
  const BudgetSplit split = budget_split(target);

  std::vector<RepetitionRecord> records(
      static_cast<std::size_t>(config.n_exp));
  std::vector<double> sample_trajectory;
  std::mutex sample_mutex;
  parallel_repetitions(
      config.n_exp, config.threads, [&](long rep) {
        const RandomStream rep_stream(config.master_seed,
                                      static_cast<std::uint64_t>(rep));
        RandomStream bit_stream = rep_stream.substream(0);
        const int secret_bit = bit_stream.fair_bit();
        Algorithm1Result result = run_algorithm1(
            inputs.dataset, d_prime, config, split.noise_multiplier,
            heuristic_rows, secret_bit, rep_stream);
        RepetitionRecord& record = records[static_cast<std::size_t>(rep)];
        record.final_belief_d = result.outcome.final_state.belief_d();
        record.secret_bit = secret_bit;
        record.win = result.outcome.win;
        record.local_sensitivity = std::move(result.local_sensitivity);
        record.sigma = std::move(result.sigma);
        if (rep == 0) {
          std::lock_guard<std::mutex> lock(sample_mutex);
          sample_trajectory = std::move(result.outcome.belief_trajectory);
        }
      });

  const double gs = config.mode == NeighborMode::kBounded
                        ? 2.0 * config.clipping_norm
                        : config.clipping_norm;
  return aggregate_report(target, split, gs, std::move(records), {}, {},
                          std::move(sample_trajectory), {});
}

MiCampaignResult run_mi_campaign(const CampaignConfig& config,
                                 const CampaignInputs& inputs) {
  config.validate();
  require(inputs.dataset.rows() >= 2, "run_mi_campaign: dataset too small");
  require(inputs.generator.has_value() || inputs.universe_rest.rows() >= 1,
          "run_mi_campaign: need a distribution to sample non-members from");

  // The model is always trained on D; only the challenge record depends on
  // the bit. Reuse the identification run with the bit pinned to D so the
  // noise mechanism matches the identification campaign exactly.
  const PrivacyParams target{config.epsilon, config.delta, 1.0, config.steps};
  const BudgetSplit split = budget_split(target);

  NeighborSelection selection;
  std::optional<std::pair<long, long>> heuristic_rows;
  if (config.mode == NeighborMode::kUnbounded) {
    selection.index = select_removal_candidate(inputs.dataset.features,
                                               config.measure);
    heuristic_rows = {{static_cast<long>(selection.index), -1}};
  } else {
    require(inputs.universe_rest.rows() >= 1,
            "run_mi_campaign: bounded mode needs outside records");
    const auto [inside, outside] = select_replacement_pair(
        inputs.dataset.features, inputs.universe_rest.features,
        config.measure);
    selection.index = inside;
    selection.replacement_features =
        inputs.universe_rest.features.row(static_cast<long>(outside))
            .transpose();
    selection.replacement_label =
        inputs.universe_rest.labels.row(static_cast<long>(outside))
            .transpose();
    heuristic_rows = {{static_cast<long>(inside), static_cast<long>(inside)}};
  }
  const TabularDataset d_prime =
      neighboring_dataset(inputs.dataset, config.mode, selection);

  DistributionSampler sampler;
  if (inputs.generator.has_value()) {
    const BlobSpec spec = *inputs.generator;
    const TabularDataset& reference = inputs.dataset;
    sampler = [spec, &reference](RandomStream& rng) {
      return sample_blob(spec, reference, rng);
    };
  } else {
    const TabularDataset& rest = inputs.universe_rest;
    sampler = [&rest](RandomStream& rng) {
      const long row = static_cast<long>(
          rng.next_u64() % static_cast<std::uint64_t>(rest.rows()));
      return rest.example(row);
    };
  }

  std::vector<char> wins(static_cast<std::size_t>(config.n_exp), 0);
  parallel_repetitions(
      config.n_exp, config.threads, [&](long rep) {
        const RandomStream rep_stream(config.master_seed,
                                      static_cast<std::uint64_t>(rep));
        Algorithm1Result trained = run_algorithm1(
            inputs.dataset, d_prime, config, split.noise_multiplier,
            heuristic_rows, /*secret_bit=*/1, rep_stream);
        const double threshold =
            mean_loss(trained.final_network, inputs.dataset.features,
                      inputs.dataset.labels);
        RandomStream challenge_rng = rep_stream.substream(kChallengeStream);
        wins[static_cast<std::size_t>(rep)] =
            run_mi_experiment(trained.final_network, inputs.dataset, sampler,
                              threshold, challenge_rng)
                ? 1
                : 0;
      });

  MiCampaignResult result;
  result.n_exp = config.n_exp;
  for (const char w : wins) result.wins += w;
  result.advantage = estimate_advantage(result.wins, result.n_exp);
  result.std_error = advantage_standard_error(result.wins, result.n_exp);
  return result;
}

AuditReport run_synthetic_campaign(const SyntheticConfig& config) {
  config.validate();
  const WageUniverse world = wage_universe();
  const double sensitivity = world.query_sensitivity();
  const double center_d = sum_query(world.survey, world.lo, world.hi);
  const double center_d_prime =
      sum_query(world.alternative, world.lo, world.hi);

  const PrivacyParams target{config.epsilon, config.delta, sensitivity,
                             config.steps};
  const BudgetSplit split = budget_split(target);
  const double sigma = split.per_step_sigma.sigma;

  std::vector<RepetitionRecord> records(static_cast<std::size_t>(config.runs));
  std::vector<double> sample_trajectory;
  std::vector<double> sample_observations;
  std::mutex sample_mutex;
  parallel_repetitions(config.runs, config.threads, [&](long rep) {
    const RandomStream rep_stream(config.master_seed,
                                  static_cast<std::uint64_t>(rep));
    ConstantMechanism mechanism(center_d, center_d_prime, sigma);
    const DiOutcome outcome =
        run_di_experiment(mechanism, config.steps, rep_stream);
    RepetitionRecord& record = records[static_cast<std::size_t>(rep)];
    record.final_belief_d = outcome.final_state.belief_d();
    record.secret_bit = outcome.secret_bit;
    record.win = outcome.win;
    if (rep == 0) {
      std::lock_guard<std::mutex> lock(sample_mutex);
      sample_trajectory = outcome.belief_trajectory;
      sample_observations = mechanism.observations();
    }
  });

  const std::vector<double> shared_ls(static_cast<std::size_t>(config.steps),
                                      sensitivity);
  const std::vector<double> shared_sigma(static_cast<std::size_t>(config.steps),
                                         sigma);
  return aggregate_report(target, split, sensitivity, std::move(records),
                          shared_ls, shared_sigma,
                          std::move(sample_trajectory),
                          std::move(sample_observations));
}

}  // namespace dpident
