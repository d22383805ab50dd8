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
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dpident/audit.hpp"
#include "dpident/bounds.hpp"
#include "dpident/commands.hpp"

using namespace dpident;

namespace {

CampaignConfig small_campaign() {
  CampaignConfig config;
  config.epsilon = 2.1972245773362196;  // belief bound 0.9
  config.delta = 0.01;
  config.steps = 10;
  config.mode = NeighborMode::kUnbounded;
  config.source = SensitivitySource::kLocal;
  config.n_exp = 60;
  config.clipping_norm = 3.0;
  config.learning_rate = 0.1;
  config.hidden_layers = {8};
  config.master_seed = 51;
  return config;
}

CampaignInputs small_inputs() {
  CampaignInputs inputs;
  BlobSpec spec;
  spec.n = 60;
  spec.d = 6;
  spec.classes = 3;
  spec.separation = 3.0;
  spec.seed = 12;
  const TabularDataset universe = synth_blobs(spec);
  inputs.dataset = universe.head(40);
  inputs.universe_rest = universe.tail_from(40);
  BlobSpec generator = spec;
  inputs.generator = generator;
  return inputs;
}

}  // namespace

TEST_CASE("audit_eps_from_beliefs") {
  CHECK(audit_eps_from_beliefs(std::vector<double>{0.5, 0.5, 0.5}) == 0.0);
  CHECK(audit_eps_from_beliefs(std::vector<double>{0.2, 0.9, 0.6}) ==
        doctest::Approx(2.1972245773362196).epsilon(1e-12));
  // Adding a lower belief never changes the result.
  CHECK(audit_eps_from_beliefs(std::vector<double>{0.2, 0.9, 0.6, 0.55}) ==
        doctest::Approx(2.1972245773362196).epsilon(1e-12));
  // Beliefs at exactly 1 are clamped instead of diverging.
  CHECK(std::isfinite(audit_eps_from_beliefs(std::vector<double>{1.0})));
  CHECK_THROWS_AS(audit_eps_from_beliefs(std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("audit_eps_from_advantage") {
  const AdvantageEps from_table =
      audit_eps_from_advantage(0.2766468742321722, 0.01);
  CHECK_FALSE(from_table.vacuous);
  CHECK(from_table.epsilon == doctest::Approx(2.2).epsilon(1e-9));
  const AdvantageEps zero = audit_eps_from_advantage(0.0, 0.01);
  CHECK(zero.vacuous);
  CHECK(zero.epsilon == 0.0);
  const AdvantageEps negative = audit_eps_from_advantage(-0.3, 0.01);
  CHECK(negative.vacuous);
  CHECK(negative.epsilon == 0.0);
}

TEST_CASE("empirical_delta") {
  const std::vector<double> beliefs{0.2, 0.95, 0.5, 0.91, 0.89};
  CHECK(empirical_delta(beliefs, 0.9) == doctest::Approx(0.4));
  CHECK(empirical_delta(beliefs, 0.99) == 0.0);
  CHECK(empirical_delta(beliefs, 0.3) == doctest::Approx(0.8));
  CHECK_THROWS_AS(empirical_delta(std::vector<double>{}, 0.9),
                  std::invalid_argument);
}

TEST_CASE("eps_from_recorded_noise") {
  AuditReport report;
  report.repetitions.resize(2);
  // Noise exactly at the global scale: the audit returns the accountant's
  // value for the base multiplier.
  const double multiplier = 3.0;
  const double gs = 2.0;
  report.repetitions[0].local_sensitivity = {gs, gs, gs};
  report.repetitions[0].sigma = {gs * multiplier, gs * multiplier,
                                 gs * multiplier};
  // Effective sensitivities at half the global bound halve the loss.
  report.repetitions[1].local_sensitivity = {gs / 2, gs / 2, gs / 2};
  report.repetitions[1].sigma = {gs * multiplier, gs * multiplier,
                                 gs * multiplier};
  const SensitivityAudit audit = eps_from_recorded_noise(report, gs, 0.01, 3);
  const double expected = accountant_epsilon(
      std::vector<double>{multiplier, multiplier, multiplier}, 0.01);
  CHECK(audit.epsilon_max == doctest::Approx(expected).epsilon(1e-12));
  CHECK(audit.degenerate_steps == 0);

  // A repetition with only looser steps cannot raise the maximum.
  AuditReport loose;
  loose.repetitions.resize(1);
  loose.repetitions[0].local_sensitivity = {gs / 2, gs / 2, gs / 2};
  loose.repetitions[0].sigma = {gs * multiplier, gs * multiplier,
                                gs * multiplier};
  CHECK(eps_from_recorded_noise(loose, gs, 0.01, 3).epsilon_max < expected);

  // Zero local sensitivity steps are skipped and counted.
  AuditReport degenerate;
  degenerate.repetitions.resize(1);
  degenerate.repetitions[0].local_sensitivity = {gs, 0.0, gs};
  degenerate.repetitions[0].sigma = {gs * multiplier, gs * multiplier,
                                     gs * multiplier};
  const SensitivityAudit with_zero =
      eps_from_recorded_noise(degenerate, gs, 0.01, 3);
  CHECK(with_zero.degenerate_steps == 1);
  const double two_step = accountant_epsilon(
      std::vector<double>{multiplier, multiplier}, 0.01);
  CHECK(with_zero.epsilon_max == doctest::Approx(two_step).epsilon(1e-12));
}

TEST_CASE("run_algorithm1 without noise always wins") {
  CampaignConfig config = small_campaign();
  const CampaignInputs inputs = small_inputs();
  NeighborSelection sel;
  sel.index =
      select_removal_candidate(inputs.dataset.features, config.measure);
  const TabularDataset d_prime =
      neighboring_dataset(inputs.dataset, NeighborMode::kUnbounded, sel);
  for (int rep = 0; rep < 5; ++rep) {
    for (int bit : {0, 1}) {
      const Algorithm1Result result = run_algorithm1(
          inputs.dataset, d_prime, config, /*noise_multiplier=*/0.0,
          std::make_pair(static_cast<long>(sel.index), -1L), bit,
          RandomStream(371, static_cast<std::uint64_t>(rep)));
      CHECK(result.outcome.win);
    }
  }
}

TEST_CASE("local-sensitivity campaign recovers the target epsilon") {
  const CampaignConfig config = small_campaign();
  const AuditReport report = run_campaign(config, small_inputs());
  CHECK(report.n_exp == config.n_exp);
  // With noise scaled to the true per-step sensitivity the accountant
  // reproduces the budget exactly.
  CHECK(report.eps_from_sensitivities ==
        doctest::Approx(config.epsilon).epsilon(1e-6));
  CHECK(report.delta_prime <= 0.2);
  CHECK(report.advantage >= -0.2);
  CHECK(report.advantage <= report.rho_alpha + 4.0 * report.advantage_std_error);
  // No estimator may stray far above the target on a local campaign.
  CHECK(report.eps_from_sensitivities <= 1.3 * config.epsilon);
  CHECK(report.eps_from_beliefs <= 1.3 * config.epsilon);
  CHECK(report.eps_from_advantage <= 1.3 * config.epsilon);
  // Histogram mass accounts for every repetition.
  long mass = 0;
  for (const long count : report.belief_histogram) mass += count;
  CHECK(mass == report.n_exp);
}

TEST_CASE("campaigns are deterministic regardless of thread count") {
  CampaignConfig config = small_campaign();
  config.n_exp = 24;
  config.threads = 1;
  const AuditReport serial = run_campaign(config, small_inputs());
  config.threads = 4;
  const AuditReport parallel = run_campaign(config, small_inputs());
  CHECK(audit_report_to_json(serial) == audit_report_to_json(parallel));

  const AuditReport repeat = run_campaign(config, small_inputs());
  CHECK(audit_report_to_json(parallel) == audit_report_to_json(repeat));
}

TEST_CASE("single repetition campaign") {
  CampaignConfig config = small_campaign();
  config.n_exp = 1;
  const AuditReport report = run_campaign(config, small_inputs());
  CHECK(report.repetitions.size() == 1);
  CHECK(report.sample_belief_trajectory.size() ==
        static_cast<std::size_t>(config.steps));
}

TEST_CASE("report aggregation ignores repetition order") {
  CampaignConfig config = small_campaign();
  config.n_exp = 30;
  AuditReport report = run_campaign(config, small_inputs());
  const double advantage = report.advantage;
  const double delta_prime = report.delta_prime;
  const double eps_sens = report.eps_from_sensitivities;
  // Shuffle and recompute the order-sensitive aggregates by hand.
  std::vector<RepetitionRecord> shuffled = report.repetitions;
  std::rotate(shuffled.begin(), shuffled.begin() + 7, shuffled.end());
  long wins = 0;
  std::vector<double> beliefs;
  for (const auto& rep : shuffled) {
    if (rep.win) ++wins;
    beliefs.push_back(rep.final_belief_d);
  }
  CHECK(estimate_advantage(wins, 30) == doctest::Approx(advantage));
  CHECK(empirical_delta(beliefs, report.rho_beta) ==
        doctest::Approx(delta_prime));
  AuditReport reshuffled = report;
  reshuffled.repetitions = shuffled;
  CHECK(eps_from_recorded_noise(reshuffled, config.clipping_norm,
                                config.delta, config.steps)
            .epsilon_max == doctest::Approx(eps_sens).epsilon(1e-12));
}

TEST_CASE("membership campaign on heavily noised models is near chance") {
  CampaignConfig config = small_campaign();
  config.epsilon = 0.1;  // strong privacy, almost no signal
  config.n_exp = 120;
  const MiCampaignResult result = run_mi_campaign(config, small_inputs());
  CHECK(result.n_exp == 120);
  CHECK(std::abs(result.advantage) < 0.35);
}

TEST_CASE("synthetic campaign quick run matches the analytic win rate") {
  SyntheticConfig config;
  config.epsilon = 5.0;
  config.delta = 0.01;
  config.steps = 100;
  config.runs = 2000;
  config.master_seed = 3;
  const AuditReport report = run_synthetic_campaign(config);
  const double win_rate = static_cast<double>(report.wins) /
                          static_cast<double>(report.n_exp);
  CHECK(std::abs(win_rate - 0.75) < 0.04);
  CHECK(report.delta_prime <= 0.01);
  CHECK(report.eps_from_sensitivities ==
        doctest::Approx(5.0).epsilon(1e-6));
  CHECK(report.sample_observations.size() == 100);
}
