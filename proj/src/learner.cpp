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

#include "dpident/learner.hpp"

#include <cmath>
#include <stdexcept>

namespace dpident {
namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

// Activations and pre-activation deltas for one example, reused across the
// batch loop.
struct Workspace {
  std::vector<Eigen::VectorXd> activations;  // activations[0] = input
  std::vector<Eigen::VectorXd> deltas;       // per layer output
};

Workspace make_workspace(const Network& net) {
  Workspace ws;
  ws.activations.resize(net.weights.size() + 1);
  ws.deltas.resize(net.weights.size());
  return ws;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const Eigen::VectorXd shifted =
      (logits.array() - logits.maxCoeff()).exp();
  return shifted / shifted.sum();
}

// Forward pass storing activations; returns output probabilities in the last
// activation slot.
void forward_into(const Network& net, const Eigen::VectorXd& input,
                  Workspace& ws) {
  ws.activations[0] = input;
  const std::size_t layers = net.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Eigen::VectorXd z = net.weights[l] * ws.activations[l] + net.biases[l];
    if (l + 1 < layers) {
      ws.activations[l + 1] = z.cwiseMax(0.0);
    } else {
      ws.activations[l + 1] = softmax(z);
    }
  }
}

// Cross-entropy backward pass; writes the flattened gradient into `out`
// (layer-major, row-major weights before biases).
void backward_into(const Network& net, const Eigen::VectorXd& onehot,
                   Workspace& ws, Eigen::VectorXd& out) {
  const std::size_t layers = net.weights.size();
  ws.deltas[layers - 1] = ws.activations[layers] - onehot;
  for (std::size_t l = layers - 1; l-- > 0;) {
    Eigen::VectorXd back = net.weights[l + 1].transpose() * ws.deltas[l + 1];
    // Rectifier derivative: active where the stored activation is positive.
    ws.deltas[l] =
        back.cwiseProduct((ws.activations[l + 1].array() > 0.0)
                              .cast<double>()
                              .matrix());
  }
  long offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const long rows = net.weights[l].rows();
    const long cols = net.weights[l].cols();
    for (long r = 0; r < rows; ++r) {
      const double d = ws.deltas[l](r);
      for (long c = 0; c < cols; ++c) {
        out(offset++) = d * ws.activations[l](c);
      }
    }
    for (long r = 0; r < rows; ++r) out(offset++) = ws.deltas[l](r);
  }
}

void check_example(const Network& net, const Eigen::VectorXd& input,
                   const Eigen::VectorXd& onehot) {
  require(!net.layer_sizes.empty(), "network has no layers");
  require(input.size() == net.layer_sizes.front(),
          "feature dimension does not match the input layer");
  require(onehot.size() == net.layer_sizes.back(),
          "label dimension does not match the output layer");
}

}  // namespace

long Network::parameter_count() const {
  long total = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    total += weights[l].size() + biases[l].size();
  }
  return total;
}

Network make_network(std::vector<int> layer_sizes, RandomStream& rng) {
  require(layer_sizes.size() >= 2, "make_network: need input and output layers");
  for (int size : layer_sizes) {
    require(size >= 1, "make_network: layer sizes must be positive");
  }
  Network net;
  net.layer_sizes = std::move(layer_sizes);
  const std::size_t layers = net.layer_sizes.size() - 1;
  net.weights.resize(layers);
  net.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const long fan_in = net.layer_sizes[l];
    const long fan_out = net.layer_sizes[l + 1];
    const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    net.weights[l].resize(fan_out, fan_in);
    for (long row = 0; row < fan_out; ++row) {
      for (long col = 0; col < fan_in; ++col) {
        net.weights[l](row, col) = (2.0 * rng.uniform() - 1.0) * r;
      }
    }
    net.biases[l] = Eigen::VectorXd::Zero(fan_out);
  }
  return net;
}

Eigen::VectorXd flatten_parameters(const Network& net) {
  Eigen::VectorXd flat(net.parameter_count());
  long offset = 0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (long r = 0; r < net.weights[l].rows(); ++r) {
      for (long c = 0; c < net.weights[l].cols(); ++c) {
        flat(offset++) = net.weights[l](r, c);
      }
    }
    for (long r = 0; r < net.biases[l].size(); ++r) {
      flat(offset++) = net.biases[l](r);
    }
  }
  return flat;
}

void set_parameters(Network& net, const Eigen::VectorXd& flat) {
  require(flat.size() == net.parameter_count(),
          "set_parameters: size mismatch");
  long offset = 0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (long r = 0; r < net.weights[l].rows(); ++r) {
      for (long c = 0; c < net.weights[l].cols(); ++c) {
        net.weights[l](r, c) = flat(offset++);
      }
    }
    for (long r = 0; r < net.biases[l].size(); ++r) {
      net.biases[l](r) = flat(offset++);
    }
  }
}

Eigen::VectorXd forward(const Network& net, const Eigen::VectorXd& input) {
  require(!net.layer_sizes.empty() && input.size() == net.layer_sizes.front(),
          "forward: feature dimension does not match the input layer");
  Workspace ws = make_workspace(net);
  forward_into(net, input, ws);
  return ws.activations.back();
}

double cross_entropy_loss(const Network& net, const Eigen::VectorXd& input,
                          const Eigen::VectorXd& onehot_label) {
  check_example(net, input, onehot_label);
  const Eigen::VectorXd probs = forward(net, input);
  double loss = 0.0;
  for (long c = 0; c < probs.size(); ++c) {
    if (onehot_label(c) != 0.0) {
      loss -= onehot_label(c) * std::log(std::max(probs(c), 1e-300));
    }
  }
  return loss;
}

double mean_loss(const Network& net, const Eigen::MatrixXd& features,
                 const Eigen::MatrixXd& labels) {
  require(features.rows() > 0, "mean_loss: empty dataset");
  double total = 0.0;
  for (long i = 0; i < features.rows(); ++i) {
    total += cross_entropy_loss(net, features.row(i).transpose(),
                                labels.row(i).transpose());
  }
  return total / static_cast<double>(features.rows());
}

double accuracy(const Network& net, const Eigen::MatrixXd& features,
                const Eigen::MatrixXd& labels) {
  require(features.rows() > 0, "accuracy: empty dataset");
  long correct = 0;
  for (long i = 0; i < features.rows(); ++i) {
    Eigen::Index predicted;
    forward(net, features.row(i).transpose()).maxCoeff(&predicted);
    Eigen::Index truth;
    labels.row(i).maxCoeff(&truth);
    if (predicted == truth) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows());
}

Eigen::VectorXd per_example_gradient(const Network& net,
                                     const Eigen::VectorXd& input,
                                     const Eigen::VectorXd& onehot_label) {
  check_example(net, input, onehot_label);
  Workspace ws = make_workspace(net);
  forward_into(net, input, ws);
  Eigen::VectorXd gradient(net.parameter_count());
  backward_into(net, onehot_label, ws, gradient);
  return gradient;
}

Eigen::VectorXd clip_gradient(const Eigen::VectorXd& gradient,
                              double clipping_norm) {
  require(clipping_norm > 0.0, "clip_gradient: clipping norm must be positive");
  const double norm = gradient.norm();
  if (norm <= clipping_norm) return gradient;
  return gradient * (clipping_norm / norm);
}

BatchGradient batch_clipped_gradient(const Network& net,
                                     const Eigen::MatrixXd& features,
                                     const Eigen::MatrixXd& labels,
                                     double clipping_norm) {
  require(features.rows() > 0, "batch_clipped_gradient: empty dataset");
  require(features.rows() == labels.rows(),
          "batch_clipped_gradient: feature/label row mismatch");
  require(clipping_norm > 0.0,
          "batch_clipped_gradient: clipping norm must be positive");
  const long n = features.rows();
  const long params = net.parameter_count();
  BatchGradient batch;
  batch.per_example.resize(n, params);
  Workspace ws = make_workspace(net);
  Eigen::VectorXd gradient(params);
  for (long i = 0; i < n; ++i) {
    forward_into(net, features.row(i).transpose(), ws);
    backward_into(net, labels.row(i).transpose(), ws, gradient);
    const double norm = gradient.norm();
    if (norm > clipping_norm) {
      batch.per_example.row(i) = gradient.transpose() * (clipping_norm / norm);
    } else {
      batch.per_example.row(i) = gradient.transpose();
    }
  }
  batch.mean = batch.per_example.colwise().mean().transpose();
  return batch;
}

std::pair<Network, Eigen::VectorXd> dpsgd_step(
    const Network& net, const Eigen::VectorXd& batch_gradient,
    NoiseScale noise, double learning_rate, RandomStream& rng) {
  require(batch_gradient.size() == net.parameter_count(),
          "dpsgd_step: gradient size mismatch");
  require(learning_rate >= 0.0, "dpsgd_step: learning rate must be >= 0");
  const std::vector<double> released =
      perturb(std::span<const double>(batch_gradient.data(),
                                      static_cast<std::size_t>(
                                          batch_gradient.size())),
              noise, rng);
  Eigen::VectorXd noisy =
      Eigen::Map<const Eigen::VectorXd>(released.data(), batch_gradient.size());
  Network updated = net;
  set_parameters(updated, flatten_parameters(net) - learning_rate * noisy);
  return {std::move(updated), std::move(noisy)};
}

void TrainConfig::validate() const {
  require(clipping_norm > 0.0, "TrainConfig: clipping norm must be positive");
  require(learning_rate >= 0.0, "TrainConfig: learning rate must be >= 0");
  require(steps >= 1, "TrainConfig: steps must be >= 1");
  require(sigma_schedule.size() == static_cast<std::size_t>(steps),
          "TrainConfig: sigma schedule length must equal the step count");
}

GradientTrace train_dpsgd(const Network& initial,
                          const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& labels,
                          const TrainConfig& config,
                          const RandomStream& rng) {
  config.validate();
  GradientTrace trace;
  trace.steps.reserve(static_cast<std::size_t>(config.steps));
  Network net = initial;
  for (int step = 0; step < config.steps; ++step) {
    const BatchGradient batch =
        batch_clipped_gradient(net, features, labels, config.clipping_norm);
    RandomStream noise_rng =
        rng.substream(1 + static_cast<std::uint64_t>(step));
    auto [updated, released] =
        dpsgd_step(net, batch.mean, config.sigma_schedule[step],
                   config.learning_rate, noise_rng);
    net = std::move(updated);
    trace.steps.push_back({std::move(released), batch.mean,
                           flatten_parameters(net),
                           config.sigma_schedule[step]});
  }
  return trace;
}

double sum_query(std::span<const double> records, double lo, double hi) {
  require(lo <= hi, "sum_query: invalid bounds");
  double total = 0.0;
  for (const double record : records) {
    require(record >= lo && record <= hi, "sum_query: record out of range");
    total += record;
  }
  return total;
}

}  // namespace dpident
