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

#include "dpident/dp_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dpident {
namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

bool valid_delta(double delta) {
  return std::isfinite(delta) && delta > 0.0 && delta < 1.0;
}

}  // namespace

void PrivacyParams::validate() const {
  require(std::isfinite(epsilon) && epsilon > 0.0,
          "PrivacyParams: epsilon must be positive");
  require(valid_delta(delta), "PrivacyParams: delta must lie in (0, 1)");
  require(std::isfinite(sensitivity) && sensitivity > 0.0,
          "PrivacyParams: sensitivity must be positive");
  require(steps >= 1, "PrivacyParams: steps must be >= 1");
}

NoiseScale gaussian_sigma(double epsilon, double delta, double sensitivity) {
  require(std::isfinite(epsilon) && epsilon > 0.0,
          "gaussian_sigma: epsilon must be positive");
  require(valid_delta(delta), "gaussian_sigma: delta must lie in (0, 1)");
  require(std::isfinite(sensitivity) && sensitivity > 0.0,
          "gaussian_sigma: sensitivity must be positive");
  return {sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon};
}

double gaussian_epsilon(NoiseScale noise, double delta, double sensitivity) {
  require(std::isfinite(noise.sigma) && noise.sigma > 0.0,
          "gaussian_epsilon: sigma must be positive");
  require(valid_delta(delta), "gaussian_epsilon: delta must lie in (0, 1)");
  require(std::isfinite(sensitivity) && sensitivity > 0.0,
          "gaussian_epsilon: sensitivity must be positive");
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / noise.sigma;
}

std::vector<double> perturb(std::span<const double> center, NoiseScale noise,
                            RandomStream& rng) {
  require(std::isfinite(noise.sigma) && noise.sigma >= 0.0,
          "perturb: sigma must be nonnegative");
  std::vector<double> out(center.begin(), center.end());
  if (noise.sigma == 0.0) return out;
  for (double& value : out) value += noise.sigma * rng.gaussian();
  return out;
}

double log_density(std::span<const double> observed,
                   std::span<const double> center, NoiseScale noise) {
  require(observed.size() == center.size(), "log_density: dimension mismatch");
  require(std::isfinite(noise.sigma) && noise.sigma > 0.0,
          "log_density: sigma must be positive");
  double squared = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - center[i];
    squared += diff * diff;
  }
  return -squared / (2.0 * noise.sigma * noise.sigma);
}

RdpGuarantee rdp_epsilon_per_step(double alpha, double sensitivity,
                                  NoiseScale noise) {
  require(std::isfinite(alpha) && alpha > 1.0,
          "rdp_epsilon_per_step: alpha must exceed 1");
  require(std::isfinite(sensitivity) && sensitivity > 0.0,
          "rdp_epsilon_per_step: sensitivity must be positive");
  require(std::isfinite(noise.sigma) && noise.sigma > 0.0,
          "rdp_epsilon_per_step: sigma must be positive");
  return {alpha,
          alpha * sensitivity * sensitivity / (2.0 * noise.sigma * noise.sigma)};
}

double rdp_to_dp(const RdpGuarantee& guarantee, double delta) {
  require(std::isfinite(guarantee.alpha) && guarantee.alpha > 1.0,
          "rdp_to_dp: alpha must exceed 1");
  require(guarantee.eps_rdp >= 0.0, "rdp_to_dp: eps_rdp must be nonnegative");
  require(valid_delta(delta), "rdp_to_dp: delta must lie in (0, 1)");
  return guarantee.eps_rdp + std::log(1.0 / delta) / (guarantee.alpha - 1.0);
}

RdpGuarantee rdp_compose(std::span<const RdpGuarantee> per_step) {
  require(!per_step.empty(), "rdp_compose: empty guarantee list");
  const double alpha = per_step.front().alpha;
  double total = 0.0;
  for (const RdpGuarantee& g : per_step) {
    require(g.alpha == alpha, "rdp_compose: mismatched Renyi orders");
    require(g.eps_rdp >= 0.0, "rdp_compose: eps_rdp must be nonnegative");
    total += g.eps_rdp;
  }
  return {alpha, total};
}

BudgetSplit budget_split(const PrivacyParams& total) {
  total.validate();
  const double b = std::log(1.0 / total.delta);
  // Solve s^2 + 2 s sqrt(b) = epsilon for the composed Renyi term a = s^2;
  // the optimal order then converts a + 2 sqrt(a b) back to epsilon exactly.
  const double s = std::sqrt(b + total.epsilon) - std::sqrt(b);
  const double a = s * s;
  BudgetSplit split;
  split.renyi_term = a;
  split.alpha_star = 1.0 + std::sqrt(b / a);
  split.noise_multiplier = std::sqrt(static_cast<double>(total.steps) / (2.0 * a));
  split.per_step_sigma = {total.sensitivity * split.noise_multiplier};
  split.per_step_delta = total.delta;
  const RdpGuarantee one_step{split.alpha_star,
                              split.alpha_star * a / total.steps};
  split.per_step_epsilon = rdp_to_dp(one_step, total.delta);
  return split;
}

double accountant_epsilon(std::span<const double> noise_multipliers,
                          double delta) {
  require(!noise_multipliers.empty(), "accountant_epsilon: empty multiplier list");
  require(valid_delta(delta), "accountant_epsilon: delta must lie in (0, 1)");
  double renyi_per_alpha = 0.0;  // sum_i 1 / (2 m_i^2)
  for (const double m : noise_multipliers) {
    require(m > 0.0, "accountant_epsilon: multipliers must be positive");
    if (std::isinf(m)) continue;  // no privacy loss for this step
    renyi_per_alpha += 1.0 / (2.0 * m * m);
  }
  if (renyi_per_alpha == 0.0) return 0.0;

  const double b = std::log(1.0 / delta);
  const auto converted = [&](double alpha) {
    return renyi_per_alpha * alpha + b / (alpha - 1.0);
  };

  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](double alpha) {
    if (alpha > 1.0) best = std::min(best, converted(alpha));
  };
  consider(1.25);
  consider(1.5);
  for (int alpha = 2; alpha <= 64; ++alpha) consider(alpha);
  consider(128.0);
  consider(256.0);
  consider(1.0 + std::sqrt(b / renyi_per_alpha));  // closed-form optimum
  return best;
}

}  // namespace dpident
