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

#include "dpident/bounds.hpp"

#include <algorithm>
#include <cmath>
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

BeliefBound posterior_bound(std::span<const double> eps_per_step,
                            std::span<const double> delta_per_step) {
  require(eps_per_step.size() == delta_per_step.size(),
          "posterior_bound: list length mismatch");
  require(!eps_per_step.empty(), "posterior_bound: empty budget lists");
  double eps_sum = 0.0;
  double delta_sum = 0.0;
  for (std::size_t i = 0; i < eps_per_step.size(); ++i) {
    require(std::isfinite(eps_per_step[i]) && eps_per_step[i] >= 0.0,
            "posterior_bound: epsilon entries must be nonnegative");
    require(delta_per_step[i] >= 0.0 && delta_per_step[i] < 1.0,
            "posterior_bound: delta entries must lie in [0, 1)");
    eps_sum += eps_per_step[i];
    delta_sum += delta_per_step[i];
  }
  BeliefBound bound;
  bound.rho_beta = 1.0 / (1.0 + std::exp(-eps_sum));
  bound.holds_with_probability = std::max(0.0, 1.0 - delta_sum);
  return bound;
}

double eps_from_posterior_bound(double rho_beta) {
  require(std::isfinite(rho_beta) && rho_beta > 0.5 && rho_beta < 1.0,
          "eps_from_posterior_bound: rho_beta must lie in (0.5, 1)");
  return std::log(rho_beta / (1.0 - rho_beta));
}

double advantage_bound_general(double epsilon, double false_positive_rate) {
  require(std::isfinite(epsilon) && epsilon >= 0.0,
          "advantage_bound_general: epsilon must be nonnegative");
  require(false_positive_rate >= 0.0 && false_positive_rate <= 1.0,
          "advantage_bound_general: rate must lie in [0, 1]");
  return (std::exp(epsilon) - 1.0) * false_positive_rate;
}

AdvantageBound advantage_bound_gaussian(double epsilon, double delta) {
  require(std::isfinite(epsilon) && epsilon >= 0.0,
          "advantage_bound_gaussian: epsilon must be nonnegative");
  require(valid_delta(delta),
          "advantage_bound_gaussian: delta must lie in (0, 1)");
  const double scale = 2.0 * std::sqrt(2.0 * std::log(1.25 / delta));
  return {2.0 * normal_cdf(epsilon / scale) - 1.0};
}

double eps_from_advantage(double rho_alpha, double delta) {
  require(std::isfinite(rho_alpha) && rho_alpha > 0.0 && rho_alpha < 1.0,
          "eps_from_advantage: rho_alpha must lie in (0, 1)");
  require(valid_delta(delta), "eps_from_advantage: delta must lie in (0, 1)");
  return 2.0 * std::sqrt(2.0 * std::log(1.25 / delta)) *
         normal_quantile((rho_alpha + 1.0) / 2.0);
}

AdvantageBound advantage_bound_rdp(const RdpGuarantee& guarantee) {
  require(std::isfinite(guarantee.alpha) && guarantee.alpha > 1.0,
          "advantage_bound_rdp: alpha must exceed 1");
  require(guarantee.eps_rdp >= 0.0,
          "advantage_bound_rdp: eps_rdp must be nonnegative");
  return {2.0 * normal_cdf(std::sqrt(guarantee.eps_rdp /
                                     (2.0 * guarantee.alpha))) -
          1.0};
}

double mahalanobis_advantage(std::span<const double> center_a,
                             std::span<const double> center_b,
                             NoiseScale noise) {
  require(center_a.size() == center_b.size(),
          "mahalanobis_advantage: dimension mismatch");
  require(std::isfinite(noise.sigma) && noise.sigma > 0.0,
          "mahalanobis_advantage: sigma must be positive");
  double squared = 0.0;
  for (std::size_t i = 0; i < center_a.size(); ++i) {
    const double diff = center_a[i] - center_b[i];
    squared += diff * diff;
  }
  const double distance = std::sqrt(squared);
  return 2.0 * normal_cdf(distance / (2.0 * noise.sigma)) - 1.0;
}

}  // namespace dpident
