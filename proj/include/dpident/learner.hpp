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

#ifndef DPIDENT_LEARNER_HPP_
#define DPIDENT_LEARNER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dpident/dp_core.hpp"
#include "dpident/random.hpp"

namespace dpident {

// Fully connected classifier with rectifier hidden units and a softmax
// output. Parameters flatten layer by layer, weights (row-major) before
// biases; every gradient in this module uses that fixed order.
struct Network {
  std::vector<int> layer_sizes;           // input, hidden..., classes
  std::vector<Eigen::MatrixXd> weights;   // weights[l]: sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> biases;    // biases[l]: sizes[l+1]

  long parameter_count() const;
};

// Uniform(-r, r) weights with r = sqrt(6 / (fan_in + fan_out)), zero biases.
Network make_network(std::vector<int> layer_sizes, RandomStream& rng);

Eigen::VectorXd flatten_parameters(const Network& net);
void set_parameters(Network& net, const Eigen::VectorXd& flat);

// Class probabilities; softmax of the output layer.
Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& input);

double cross_entropy_loss(const Network& net, const Eigen::VectorXd& input,
                          const Eigen::VectorXd& onehot_label);
double mean_loss(const Network& net, const Eigen::MatrixXd& features,
                 const Eigen::MatrixXd& labels);
double accuracy(const Network& net, const Eigen::MatrixXd& features,
                const Eigen::MatrixXd& labels);

// Flattened gradient of the cross-entropy loss for one example.
Eigen::VectorXd per_example_gradient(const Network& net,
                                     const Eigen::VectorXd& input,
                                     const Eigen::VectorXd& onehot_label);

// g * min(1, C / ||g||).
Eigen::VectorXd clip_gradient(const Eigen::VectorXd& gradient,
                              double clipping_norm);

struct BatchGradient {
  Eigen::VectorXd mean;         // average of clipped per-example gradients
  Eigen::MatrixXd per_example;  // row i: clipped gradient of example i
};

BatchGradient batch_clipped_gradient(const Network& net,
                                     const Eigen::MatrixXd& features,
                                     const Eigen::MatrixXd& labels,
                                     double clipping_norm);

// Releases g~ = batch_gradient + noise and applies theta' = theta - lr * g~.
std::pair<Network, Eigen::VectorXd> dpsgd_step(
    const Network& net, const Eigen::VectorXd& batch_gradient,
    NoiseScale noise, double learning_rate, RandomStream& rng);

struct TrainConfig {
  double clipping_norm = 3.0;
  double learning_rate = 0.05;
  int steps = 30;
  std::vector<NoiseScale> sigma_schedule;  // length == steps

  void validate() const;
};

struct GradientTrace {
  struct Step {
    Eigen::VectorXd released;    // perturbed batch gradient g~
    Eigen::VectorXd batch_mean;  // unperturbed clipped batch gradient
    Eigen::VectorXd weights;     // flattened parameters after the update
    NoiseScale sigma;
  };
  std::vector<Step> steps;
};

// Full-batch DPSGD; per-step noise comes from rng.substream(1 + step).
GradientTrace train_dpsgd(const Network& initial,
                          const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& labels,
                          const TrainConfig& config,
                          const RandomStream& rng);

// Sum of scalar records, all of which must lie in [lo, hi].
double sum_query(std::span<const double> records, double lo, double hi);

}  // namespace dpident

#endif  // DPIDENT_LEARNER_HPP_
