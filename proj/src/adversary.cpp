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

#include "dpident/adversary.hpp"

#include <cmath>
#include <stdexcept>

namespace dpident {
namespace {

// Log-odds weight of one noiseless observation; large enough to dominate any
// realistic accumulated ratio while staying far from overflow.
constexpr double kCertainLogOdds = 1e6;

double squared_distance(std::span<const double> x,
                        std::span<const double> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    total += diff * diff;
  }
  return total;
}

}  // namespace

double BeliefState::belief_d() const {
  // exp overflows to +inf for extreme ratios, which correctly saturates the
  // belief without disturbing the log carrier.
  return 1.0 / (1.0 + std::exp(log_likelihood_ratio));
}

BeliefState update_belief(BeliefState state, std::span<const double> observed,
                          std::span<const double> center_d,
                          std::span<const double> center_d_prime,
                          NoiseScale noise) {
  state.log_likelihood_ratio +=
      log_density(observed, center_d_prime, noise) -
      log_density(observed, center_d, noise);
  state.steps_observed += 1;
  return state;
}

BeliefState observe_step(BeliefState state, std::span<const double> observed,
                         std::span<const double> center_d,
                         std::span<const double> center_d_prime,
                         NoiseScale noise) {
  if (noise.sigma != 0.0) {
    return update_belief(state, observed, center_d, center_d_prime, noise);
  }
  if (observed.size() != center_d.size() ||
      observed.size() != center_d_prime.size()) {
    throw std::invalid_argument("observe_step: dimension mismatch");
  }
  const double to_d = squared_distance(observed, center_d);
  const double to_d_prime = squared_distance(observed, center_d_prime);
  if (to_d < to_d_prime) {
    state.log_likelihood_ratio -= kCertainLogOdds;
  } else if (to_d_prime < to_d) {
    state.log_likelihood_ratio += kCertainLogOdds;
  }
  state.steps_observed += 1;
  return state;
}

DatasetId decide(const BeliefState& state) {
  return state.log_likelihood_ratio <= 0.0 ? DatasetId::kD
                                           : DatasetId::kDPrime;
}

DiOutcome run_di_experiment_with_bit(DiMechanism& mechanism, int steps,
                                     int secret_bit,
                                     const RandomStream& rep_stream) {
  if (steps < 1) {
    throw std::invalid_argument("run_di_experiment: steps must be >= 1");
  }
  if (secret_bit != 0 && secret_bit != 1) {
    throw std::invalid_argument("run_di_experiment: secret bit must be 0 or 1");
  }
  DiOutcome outcome;
  outcome.secret_bit = secret_bit;
  outcome.belief_trajectory.reserve(static_cast<std::size_t>(steps));
  BeliefState state;
  for (int step = 0; step < steps; ++step) {
    const DiStepHypotheses hyp = mechanism.hypotheses(step);
    const std::vector<double>& truth =
        secret_bit == 1 ? hyp.center_d : hyp.center_d_prime;
    RandomStream noise_rng =
        rep_stream.substream(1 + static_cast<std::uint64_t>(step));
    const std::vector<double> released = perturb(truth, hyp.sigma, noise_rng);
    state = observe_step(state, released, hyp.center_d, hyp.center_d_prime,
                         hyp.sigma);
    mechanism.observe(step, released);
    outcome.belief_trajectory.push_back(state.belief_d());
  }
  outcome.final_state = state;
  outcome.chosen = decide(state);
  outcome.win = (secret_bit == 1) == (outcome.chosen == DatasetId::kD);
  return outcome;
}

DiOutcome run_di_experiment(DiMechanism& mechanism, int steps,
                            const RandomStream& rep_stream) {
  RandomStream bit_stream = rep_stream.substream(0);
  return run_di_experiment_with_bit(mechanism, steps, bit_stream.fair_bit(),
                                    rep_stream);
}

bool run_mi_experiment(const Network& model, const TabularDataset& train_set,
                       const DistributionSampler& sample_distribution,
                       double loss_threshold, RandomStream& rng) {
  if (train_set.rows() == 0) {
    throw std::invalid_argument("run_mi_experiment: empty training set");
  }
  const int bit = rng.fair_bit();
  Eigen::VectorXd features;
  Eigen::VectorXd label;
  if (bit == 1) {
    const long row =
        static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(
                                               train_set.rows()));
    features = train_set.features.row(row).transpose();
    label = train_set.labels.row(row).transpose();
  } else {
    Example drawn = sample_distribution(rng);
    features = std::move(drawn.features);
    label = std::move(drawn.label);
  }
  const double loss = cross_entropy_loss(model, features, label);
  const int claim = loss <= loss_threshold ? 1 : 0;
  return claim == bit;
}

double estimate_advantage(long wins, long n_exp) {
  if (n_exp <= 0) {
    throw std::invalid_argument("estimate_advantage: n_exp must be positive");
  }
  if (wins < 0 || wins > n_exp) {
    throw std::invalid_argument("estimate_advantage: wins out of range");
  }
  return 2.0 * static_cast<double>(wins) / static_cast<double>(n_exp) - 1.0;
}

}  // namespace dpident
