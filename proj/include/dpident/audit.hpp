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

#ifndef DPIDENT_AUDIT_HPP_
#define DPIDENT_AUDIT_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dpident/adversary.hpp"
#include "dpident/data.hpp"
#include "dpident/dp_core.hpp"
#include "dpident/learner.hpp"
#include "dpident/sensitivity.hpp"

namespace dpident {

enum class SensitivitySource {
  kGlobal,           // clipping norm C (unbounded) or 2C (bounded)
  kLocal,            // per-step local sensitivity of the two batch gradients
  kDatasetHeuristic  // per-step approximation from the differing record(s)
};

struct CampaignConfig {
  double epsilon = 0.0;
  double delta = 0.0;
  int steps = 30;
  NeighborMode mode = NeighborMode::kUnbounded;
  SensitivitySource source = SensitivitySource::kLocal;
  Dissimilarity measure = Dissimilarity::kEuclidean;
  long n_exp = 1000;
  double clipping_norm = 3.0;
  double learning_rate = 0.05;
  std::vector<int> hidden_layers = {16};
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct RepetitionRecord {
  double final_belief_d = 0.5;
  int secret_bit = 1;
  bool win = false;
  // Empty when the whole campaign shares one schedule (see AuditReport).
  std::vector<double> local_sensitivity;
  std::vector<double> sigma;
};

inline constexpr int kBeliefHistogramBins = 50;

struct AuditReport {
  double target_epsilon = 0.0;
  double target_delta = 0.0;
  int steps = 0;
  long n_exp = 0;
  long wins = 0;
  double rho_beta = 0.0;
  double rho_alpha = 0.0;
  double rho_alpha_composed = 0.0;
  double advantage = 0.0;
  double advantage_std_error = 0.0;
  double delta_prime = 0.0;
  double eps_from_sensitivities = 0.0;
  double eps_from_beliefs = 0.0;
  double eps_from_advantage = 0.0;
  bool advantage_estimate_vacuous = false;  // advantage <= 0
  long degenerate_ls_steps = 0;             // zero local sensitivity, skipped
  std::vector<long> belief_histogram;       // kBeliefHistogramBins bins on [0,1]
  // Campaign-wide schedules when identical across repetitions.
  std::vector<double> shared_local_sensitivity;
  std::vector<double> shared_sigma;
  std::vector<RepetitionRecord> repetitions;
  std::vector<double> sample_belief_trajectory;  // repetition 0
  std::vector<double> sample_observations;       // repetition 0, 1-D only
};

struct Algorithm1Result {
  DiOutcome outcome;
  std::vector<double> local_sensitivity;  // true per-step value, any source
  std::vector<double> sigma;              // noise actually drawn, same scale
  Network final_network;
};

// The end-to-end identification run against full-batch DPSGD: at every step
// the clipped batch gradients of both neighbors are recomputed from the
// released weights, the configured sensitivity source sets the noise scale
// sigma_i = sensitivity_i * noise_multiplier, the secret dataset's gradient
// sum is released with that noise, and the belief is updated. Sensitivities
// and noise are tracked on the gradient-sum scale; the weight update divides
// the release by |D|.
Algorithm1Result run_algorithm1(
    const TabularDataset& dataset_d, const TabularDataset& dataset_d_prime,
    const CampaignConfig& config, double noise_multiplier,
    std::optional<std::pair<long, long>> heuristic_rows, int secret_bit,
    const RandomStream& rep_stream);

struct SensitivityAudit {
  double epsilon_max = 0.0;     // max over repetitions
  long degenerate_steps = 0;    // zero-sensitivity steps skipped
};

// Empirical epsilon from recorded noise scales and local sensitivities: per
// repetition each step's effective noise multiplier (sigma_i / GS) is
// rescaled by GS / LS_i and the list fed to the accountant at the target
// delta; the maximum over repetitions is reported.
SensitivityAudit audit_eps_from_sensitivities(const AuditReport& report,
                                              double clipping_norm,
                                              NeighborMode mode,
                                              double target_delta, int steps);

// Same computation with the global sensitivity given directly.
SensitivityAudit eps_from_recorded_noise(const AuditReport& report,
                                         double global_sensitivity,
                                         double target_delta, int steps);

// Empirical epsilon from the largest final belief, clamped below 1 - 1e-12.
double audit_eps_from_beliefs(std::span<const double> final_beliefs);

struct AdvantageEps {
  double epsilon = 0.0;
  bool vacuous = false;  // advantage was <= 0
};

AdvantageEps audit_eps_from_advantage(double advantage, double delta);

// Fraction of repetitions whose final belief in D exceeds rho_beta.
double empirical_delta(std::span<const double> final_beliefs,
                       double rho_beta);

// Dataset wiring for a campaign. For bounded mode universe_rest must hold
// the candidate replacement records; generator enables fresh distribution
// draws for the membership game.
struct CampaignInputs {
  TabularDataset dataset;
  TabularDataset universe_rest;
  std::optional<BlobSpec> generator;
};

// n_exp independent repetitions of run_algorithm1, each on its own stream
// derived from (master seed, repetition). Deterministic for a fixed seed
// regardless of thread count.
AuditReport run_campaign(const CampaignConfig& config,
                         const CampaignInputs& inputs);

struct MiCampaignResult {
  long wins = 0;
  long n_exp = 0;
  double advantage = 0.0;
  double std_error = 0.0;
};

// Matching membership-inference campaign: per repetition a model is trained
// on D with the same mechanism, then challenged once with the mean-training-
// loss threshold rule.
MiCampaignResult run_mi_campaign(const CampaignConfig& config,
                                 const CampaignInputs& inputs);

struct SyntheticConfig {
  double epsilon = 5.0;
  double delta = 0.01;
  int steps = 100;
  long runs = 10000;
  std::uint64_t master_seed = 1;
  int threads = 0;

  void validate() const;
};

// Scalar sum-query campaign on the wage universe: constant hypothesis
// centers sum(D) and sum(D'), per-step noise from the equal budget split at
// query sensitivity hi - lo.
AuditReport run_synthetic_campaign(const SyntheticConfig& config);

}  // namespace dpident

#endif  // DPIDENT_AUDIT_HPP_
