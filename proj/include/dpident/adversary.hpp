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

#ifndef DPIDENT_ADVERSARY_HPP_
#define DPIDENT_ADVERSARY_HPP_

#include <functional>
#include <span>
#include <vector>

#include "dpident/data.hpp"
#include "dpident/dp_core.hpp"
#include "dpident/learner.hpp"
#include "dpident/random.hpp"

namespace dpident {

enum class DatasetId { kD, kDPrime };

// Pair of posterior probabilities over (D, D'), carried as the accumulated
// log likelihood ratio sum(log p'_i - log p_i) so that long observation
// sequences neither underflow nor overflow.
struct BeliefState {
  double log_likelihood_ratio = 0.0;
  long steps_observed = 0;

  double belief_d() const;
  double belief_d_prime() const { return 1.0 - belief_d(); }
};

// Folds one Gaussian observation into the belief. Requires sigma > 0 and
// matching dimensions.
BeliefState update_belief(BeliefState state, std::span<const double> observed,
                          std::span<const double> center_d,
                          std::span<const double> center_d_prime,
                          NoiseScale noise);

// update_belief, plus the noiseless limit: sigma == 0 pushes the belief all
// the way toward the closer center (unchanged when equidistant).
BeliefState observe_step(BeliefState state, std::span<const double> observed,
                         std::span<const double> center_d,
                         std::span<const double> center_d_prime,
                         NoiseScale noise);

// D when belief_d > 0.5, D' when below; exact ties resolve to D so rerun
// campaigns stay reproducible.
DatasetId decide(const BeliefState& state);

// One round of the identification game: the two hypothesis centers and the
// shared noise scale.
struct DiStepHypotheses {
  std::vector<double> center_d;
  std::vector<double> center_d_prime;
  NoiseScale sigma;
};

// Adaptive mechanism under audit. hypotheses() may depend on everything
// released so far; observe() feeds each release back (e.g. to advance model
// weights).
class DiMechanism {
 public:
  virtual ~DiMechanism() = default;
  virtual DiStepHypotheses hypotheses(int step) = 0;
  virtual void observe(int /*step*/, std::span<const double> /*released*/) {}
};

struct DiOutcome {
  BeliefState final_state;
  DatasetId chosen = DatasetId::kD;
  int secret_bit = 1;  // 1 selects D, 0 selects D'
  bool win = false;
  std::vector<double> belief_trajectory;  // belief_d after every step
};

// Runs the full identification experiment: draws the secret bit uniformly
// (the same dataset is used in every round), releases k perturbed outputs of
// the secret dataset, updates the belief after each, and decides at the end.
// Per-step noise comes from rep_stream.substream(1 + step); the bit from
// substream(0).
DiOutcome run_di_experiment(DiMechanism& mechanism, int steps,
                            const RandomStream& rep_stream);

// Same experiment with the challenger's bit fixed by the caller.
DiOutcome run_di_experiment_with_bit(DiMechanism& mechanism, int steps,
                                     int secret_bit,
                                     const RandomStream& rep_stream);

using DistributionSampler = std::function<Example(RandomStream&)>;

// Membership game against a trained model: the challenger presents either a
// training record (b = 1) or a fresh draw from the distribution (b = 0);
// the adversary claims membership when the per-example loss is at most
// loss_threshold. Returns whether the claim matched the bit.
bool run_mi_experiment(const Network& model, const TabularDataset& train_set,
                       const DistributionSampler& sample_distribution,
                       double loss_threshold, RandomStream& rng);

// 2 * wins / n_exp - 1.
double estimate_advantage(long wins, long n_exp);

}  // namespace dpident

#endif  // DPIDENT_ADVERSARY_HPP_
