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

#ifndef DPIDENT_DP_CORE_HPP_
#define DPIDENT_DP_CORE_HPP_

#include <span>
#include <vector>

#include "dpident/random.hpp"

namespace dpident {

/// Standard deviation of isotropic Gaussian noise, in query-output units.
struct NoiseScale {
  double sigma = 0.0;
};

/// An (epsilon, delta) guarantee for a k-step release of a query with fixed
/// l2-sensitivity.
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 1.0;
  int steps = 1;

  // Throws std::invalid_argument when any field is out of range.
  void validate() const;
};

/// Renyi-divergence privacy guarantee of order alpha > 1.
struct RdpGuarantee {
  double alpha = 0.0;
  double eps_rdp = 0.0;
};

/// Per-step Gaussian scale chosen so that k-fold Renyi composition followed
/// by conversion at the target delta spends exactly the total epsilon.
struct BudgetSplit {
  NoiseScale per_step_sigma;
  double noise_multiplier = 0.0;  // per_step_sigma.sigma / sensitivity
  double alpha_star = 0.0;        // optimal Renyi order
  double renyi_term = 0.0;        // composed eps_rdp / alpha
  double per_step_epsilon = 0.0;  // single step converted at per_step_delta
  double per_step_delta = 0.0;

  RdpGuarantee composed_rdp() const {
    return {alpha_star, alpha_star * renyi_term};
  }
};

/// Smallest sigma for which the Gaussian mechanism satisfies
/// (epsilon, delta)-DP under the classical tail-bound calibration:
/// sigma = sensitivity * sqrt(2 ln(1.25/delta)) / epsilon.
NoiseScale gaussian_sigma(double epsilon, double delta, double sensitivity);

/// Inverse of gaussian_sigma: epsilon spent when releasing with the given
/// noise scale.
double gaussian_epsilon(NoiseScale noise, double delta, double sensitivity);

/// center + i.i.d. N(0, sigma^2) per coordinate. sigma = 0 returns the
/// center bit-exactly.
std::vector<double> perturb(std::span<const double> center, NoiseScale noise,
                            RandomStream& rng);

/// Log of the isotropic Gaussian density at `observed`, up to the additive
/// normalization constant shared by hypotheses with equal sigma:
/// -||observed - center||^2 / (2 sigma^2).
double log_density(std::span<const double> observed,
                   std::span<const double> center, NoiseScale noise);

/// Renyi guarantee of one Gaussian release: eps_rdp = alpha * sens^2 /
/// (2 sigma^2).
RdpGuarantee rdp_epsilon_per_step(double alpha, double sensitivity,
                                  NoiseScale noise);

/// Conversion to (eps_rdp + ln(1/delta)/(alpha-1), delta)-DP.
double rdp_to_dp(const RdpGuarantee& guarantee, double delta);

/// Additive composition; all orders must match.
RdpGuarantee rdp_compose(std::span<const RdpGuarantee> per_step);

BudgetSplit budget_split(const PrivacyParams& total);

/// Smallest converted epsilon over the Renyi order search grid (closed-form
/// optimum plus {1.25, 1.5, 2..64, 128, 256}) for a sequence of Gaussian
/// releases with per-step noise multipliers sigma_i / sensitivity_i.
/// Infinite multipliers contribute no privacy loss.
double accountant_epsilon(std::span<const double> noise_multipliers,
                          double delta);

}  // namespace dpident

#endif  // DPIDENT_DP_CORE_HPP_
