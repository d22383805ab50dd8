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
#include "dpident/data.hpp"
#include "dpident/learner.hpp"

using namespace dpident;

namespace {

Eigen::VectorXd onehot(long index, long classes) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(classes);
  v(index) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("zero-weight network outputs uniform probabilities") {
  RandomStream rng(3);
  Network net = make_network({5, 4, 3}, rng);
  for (auto& w : net.weights) w.setZero();
  const Eigen::VectorXd probs = forward(net, Eigen::VectorXd::Random(5));
  for (long c = 0; c < 3; ++c) {
    CHECK(probs(c) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("probabilities sum to one on random inputs") {
  RandomStream rng(4);
  Network net = make_network({6, 8, 4}, rng);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd x(6);
    for (long j = 0; j < 6; ++j) x(j) = 4.0 * rng.uniform() - 2.0;
    const Eigen::VectorXd probs = forward(net, x);
    CHECK(probs.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(probs.minCoeff() > 0.0);
  }
}

TEST_CASE("one-layer network is a plain softmax of its logits") {
  RandomStream rng(5);
  Network net = make_network({2, 3}, rng);
  net.weights[0] << 1.0, -1.0, 0.5, 2.0, 0.0, -0.5;
  net.biases[0] << 0.1, -0.2, 0.3;
  Eigen::VectorXd x(2);
  x << 0.7, -1.1;
  const Eigen::VectorXd logits = net.weights[0] * x + net.biases[0];
  const Eigen::VectorXd expected =
      (logits.array() - logits.maxCoeff()).exp().matrix() /
      (logits.array() - logits.maxCoeff()).exp().sum();
  const Eigen::VectorXd probs = forward(net, x);
  for (long c = 0; c < 3; ++c) {
    CHECK(probs(c) == doctest::Approx(expected(c)).epsilon(1e-12));
  }
}

TEST_CASE("per-example gradient matches central finite differences") {
  RandomStream rng(6);
  Network net = make_network({4, 5, 3}, rng);
  Eigen::VectorXd x(4);
  x << 0.3, -0.8, 1.2, 0.05;
  const Eigen::VectorXd y = onehot(1, 3);
  const Eigen::VectorXd analytic = per_example_gradient(net, x, y);

  const Eigen::VectorXd theta = flatten_parameters(net);
  const double step = 1e-5;
  long checked = 0;
  for (long p = 0; p < theta.size(); ++p) {
    Eigen::VectorXd plus = theta;
    Eigen::VectorXd minus = theta;
    plus(p) += step;
    minus(p) -= step;
    Network net_plus = net;
    Network net_minus = net;
    set_parameters(net_plus, plus);
    set_parameters(net_minus, minus);
    const double numeric = (cross_entropy_loss(net_plus, x, y) -
                            cross_entropy_loss(net_minus, x, y)) /
                           (2.0 * step);
    if (std::abs(analytic(p)) < 1e-8 && std::abs(numeric) < 1e-8) continue;
    CHECK(analytic(p) ==
          doctest::Approx(numeric).epsilon(1e-4));
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("gradient vanishes at a saturated correct prediction") {
  RandomStream rng(7);
  Network net = make_network({2, 2}, rng);
  net.weights[0] << 50.0, 0.0, -50.0, 0.0;
  net.biases[0].setZero();
  Eigen::VectorXd x(2);
  x << 1.0, 0.0;
  const Eigen::VectorXd g = per_example_gradient(net, x, onehot(0, 2));
  CHECK(g.norm() < 1e-8);
}

TEST_CASE("gradient is linear in the output error on a constructed case") {
  // With zero hidden weights the output deltas scale the same activations,
  // so scaling (p - y) scales the flattened gradient linearly.
  RandomStream rng(8);
  Network net = make_network({3, 3}, rng);
  Eigen::VectorXd x(3);
  x << 0.2, -0.4, 0.9;
  const Eigen::VectorXd g0 = per_example_gradient(net, x, onehot(0, 3));
  const Eigen::VectorXd g1 = per_example_gradient(net, x, onehot(1, 3));
  const Eigen::VectorXd g2 = per_example_gradient(net, x, onehot(2, 3));
  // Cross-entropy gradients over all labels sum to the gradient of
  // -log prod p_c, whose label terms cancel: sum_c (p - e_c) = 3p - 1.
  const Eigen::VectorXd probs = forward(net, x);
  Eigen::VectorXd summed = g0 + g1 + g2;
  // Direct evaluation of the summed output error (3p - 1) through the
  // same flattening: three separate gradients must match it exactly.
  Eigen::VectorXd expected(net.parameter_count());
  long offset = 0;
  for (long r = 0; r < 3; ++r) {
    const double d = 3.0 * probs(r) - 1.0;
    for (long c = 0; c < 3; ++c) expected(offset++) = d * x(c);
  }
  for (long r = 0; r < 3; ++r) expected(offset++) = 3.0 * probs(r) - 1.0;
  for (long p = 0; p < expected.size(); ++p) {
    CHECK(summed(p) == doctest::Approx(expected(p)).epsilon(1e-10));
  }
}

TEST_CASE("clip_gradient") {
  Eigen::VectorXd small(2);
  small << 0.3, 0.4;
  CHECK((clip_gradient(small, 1.0) - small).norm() == 0.0);
  Eigen::VectorXd big(2);
  big << 3.0, 4.0;
  const Eigen::VectorXd clipped = clip_gradient(big, 1.0);
  CHECK(clipped(0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(clipped(1) == doctest::Approx(0.8).epsilon(1e-12));
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(4);
  CHECK(clip_gradient(zero, 2.0).norm() == 0.0);
}

TEST_CASE("batch_clipped_gradient properties") {
  RandomStream rng(9);
  Network net = make_network({4, 6, 3}, rng);
  TabularDataset data = synth_blobs(12, 4, 3, 2.0, 21);

  const double clip_norm = 0.5;
  const BatchGradient batch =
      batch_clipped_gradient(net, data.features, data.labels, clip_norm);
  CHECK(batch.per_example.rows() == 12);
  for (long i = 0; i < batch.per_example.rows(); ++i) {
    CHECK(batch.per_example.row(i).norm() <= clip_norm + 1e-12);
  }
  CHECK(batch.mean.norm() <= clip_norm + 1e-12);
  // Mean equals the arithmetic mean of the returned rows.
  const Eigen::VectorXd recomputed =
      batch.per_example.colwise().mean().transpose();
  CHECK((batch.mean - recomputed).norm() < 1e-12);

  // Single example: the mean is that example's clipped gradient.
  const BatchGradient single = batch_clipped_gradient(
      net, data.features.topRows(1), data.labels.topRows(1), clip_norm);
  CHECK((single.mean.transpose() - single.per_example.row(0)).norm() == 0.0);

  // Duplicating every record leaves the mean unchanged.
  Eigen::MatrixXd doubled_x(24, 4);
  Eigen::MatrixXd doubled_y(24, 3);
  doubled_x << data.features, data.features;
  doubled_y << data.labels, data.labels;
  const BatchGradient doubled =
      batch_clipped_gradient(net, doubled_x, doubled_y, clip_norm);
  CHECK((doubled.mean - batch.mean).norm() < 1e-12);
}

TEST_CASE("dpsgd_step basics") {
  RandomStream rng(10);
  Network net = make_network({3, 4, 2}, rng);
  const Eigen::VectorXd gradient =
      Eigen::VectorXd::Constant(net.parameter_count(), 0.25);

  RandomStream noise_a(77, 0);
  auto [plain, released] = dpsgd_step(net, gradient, {0.0}, 0.1, noise_a);
  CHECK((released - gradient).norm() == 0.0);
  CHECK((flatten_parameters(plain) -
         (flatten_parameters(net) - 0.1 * gradient))
            .norm() < 1e-15);

  RandomStream noise_b(77, 0);
  auto [frozen, recorded] = dpsgd_step(net, gradient, {0.5}, 0.0, noise_b);
  CHECK((flatten_parameters(frozen) - flatten_parameters(net)).norm() == 0.0);
  CHECK((recorded - gradient).norm() > 0.0);

  // Replays with the same stream are bit identical.
  RandomStream noise_c(77, 0);
  RandomStream noise_d(77, 0);
  auto [net_c, rel_c] = dpsgd_step(net, gradient, {0.5}, 0.1, noise_c);
  auto [net_d, rel_d] = dpsgd_step(net, gradient, {0.5}, 0.1, noise_d);
  CHECK((rel_c - rel_d).norm() == 0.0);
  CHECK((flatten_parameters(net_c) - flatten_parameters(net_d)).norm() == 0.0);
}

TEST_CASE("train_dpsgd validation and trace shape") {
  RandomStream rng(11);
  Network net = make_network({4, 5, 2}, rng);
  TabularDataset data = synth_blobs(20, 4, 2, 3.0, 5);

  TrainConfig bad;
  bad.steps = 0;
  bad.sigma_schedule = {};
  CHECK_THROWS_AS(train_dpsgd(net, data.features, data.labels, bad,
                              RandomStream(1, 0)),
                  std::invalid_argument);

  TrainConfig one;
  one.steps = 1;
  one.sigma_schedule = {{0.1}};
  const GradientTrace trace =
      train_dpsgd(net, data.features, data.labels, one, RandomStream(1, 0));
  CHECK(trace.steps.size() == 1);
  CHECK(trace.steps[0].released.size() == net.parameter_count());
}

TEST_CASE("noiseless full-batch descent decreases the loss") {
  RandomStream rng(12);
  // Two separated blobs; generous clipping norm so no gradient is clipped
  // and each update is an exact gradient step.
  TabularDataset data = synth_blobs(30, 3, 2, 5.0, 9);
  Network net = make_network({3, 6, 2}, rng);
  TrainConfig config;
  config.clipping_norm = 1e6;
  config.learning_rate = 0.05;
  config.steps = 25;
  config.sigma_schedule.assign(25, {0.0});
  const GradientTrace trace =
      train_dpsgd(net, data.features, data.labels, config, RandomStream(2, 0));
  double previous = mean_loss(net, data.features, data.labels);
  Network current = net;
  for (const auto& step : trace.steps) {
    set_parameters(current, step.weights);
    const double loss = mean_loss(current, data.features, data.labels);
    CHECK(loss <= previous + 1e-12);
    previous = loss;
  }
}

TEST_CASE("test accuracy degrades as the noise grows") {
  TabularDataset train = synth_blobs(60, 4, 3, 6.0, 40);
  TabularDataset test = synth_blobs(60, 4, 3, 6.0, 41);
  const auto run = [&](double sigma) {
    RandomStream rng(13);
    Network net = make_network({4, 8, 3}, rng);
    TrainConfig config;
    config.clipping_norm = 3.0;
    config.learning_rate = 0.3;
    config.steps = 30;
    config.sigma_schedule.assign(30, {sigma});
    const GradientTrace trace = train_dpsgd(net, train.features, train.labels,
                                            config, RandomStream(3, 0));
    set_parameters(net, trace.steps.back().weights);
    return accuracy(net, test.features, test.labels);
  };
  const double clean = run(0.0);
  const double noisy = run(50.0);
  CHECK(clean > noisy);
}

TEST_CASE("deterministic training trace under a fixed seed") {
  TabularDataset data = synth_blobs(20, 4, 2, 3.0, 5);
  RandomStream rng_a(14);
  Network net = make_network({4, 5, 2}, rng_a);
  TrainConfig config;
  config.clipping_norm = 2.0;
  config.learning_rate = 0.1;
  config.steps = 8;
  config.sigma_schedule.assign(8, {0.7});
  const GradientTrace t1 =
      train_dpsgd(net, data.features, data.labels, config, RandomStream(9, 4));
  const GradientTrace t2 =
      train_dpsgd(net, data.features, data.labels, config, RandomStream(9, 4));
  REQUIRE(t1.steps.size() == t2.steps.size());
  for (std::size_t i = 0; i < t1.steps.size(); ++i) {
    CHECK((t1.steps[i].released - t2.steps[i].released).norm() == 0.0);
    CHECK((t1.steps[i].weights - t2.steps[i].weights).norm() == 0.0);
  }
}

TEST_CASE("sum_query") {
  const WageUniverse world = wage_universe();
  CHECK(sum_query(world.survey, world.lo, world.hi) == doctest::Approx(17.0));
  CHECK(sum_query(world.alternative, world.lo, world.hi) ==
        doctest::Approx(8.0));
  CHECK(std::abs(sum_query(world.survey, world.lo, world.hi) -
                 sum_query(world.alternative, world.lo, world.hi)) ==
        doctest::Approx(world.query_sensitivity()));
  CHECK(sum_query(std::vector<double>{}, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(sum_query(std::vector<double>{11.0}, 1.0, 10.0),
                  std::invalid_argument);
}
