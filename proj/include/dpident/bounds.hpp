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

#ifndef DPIDENT_BOUNDS_HPP_
#define DPIDENT_BOUNDS_HPP_

#include <span>

#include "dpident/dp_core.hpp"
#include "dpident/normal.hpp"

namespace dpident {

/// Worst-case bound on the adversary's posterior belief in the true
/// dataset. The bound itself holds with probability 1 - sum(delta_i).
struct BeliefBound {
  double rho_beta = 0.5;
  double holds_with_probability = 1.0;
};

/// Bound on the expected membership advantage of the Bayes-optimal
/// distinguisher against the Gaussian mechanism.
struct AdvantageBound {
  double rho_alpha = 0.0;
};

/// rho_beta = 1 / (1 + e^{-sum eps_i}); the qualifier 1 - sum(delta_i) is
/// clamped at zero for degenerate budgets.
BeliefBound posterior_bound(std::span<const double> eps_per_step,
                            std::span<const double> delta_per_step);

/// Epsilon budget that keeps the posterior belief below rho_beta:
/// ln(rho_beta / (1 - rho_beta)), for rho_beta in (0.5, 1).
double eps_from_posterior_bound(double rho_beta);

/// (e^eps - 1) * false_positive_rate; mechanism-agnostic and usually loose.
/// Not clamped; values >= 1 are vacuous and left to the caller to display.
double advantage_bound_general(double epsilon, double false_positive_rate);

/// 2 Phi(eps / (2 sqrt(2 ln(1.25/delta)))) - 1 for the Gaussian mechanism.
AdvantageBound advantage_bound_gaussian(double epsilon, double delta);

/// Exact inverse of advantage_bound_gaussian:
/// eps = 2 sqrt(2 ln(1.25/delta)) * Phi^{-1}((rho_alpha + 1) / 2).
double eps_from_advantage(double rho_alpha, double delta);

/// Advantage bound under a composed Renyi guarantee:
/// 2 Phi(sqrt(eps_rdp / (2 alpha))) - 1. Invariant under splitting the
/// guarantee into equal per-step shares.
AdvantageBound advantage_bound_rdp(const RdpGuarantee& guarantee);

/// Exact expected advantage of the Bayes adversary distinguishing two
/// isotropic Gaussians with equal priors:
/// 2 Phi(||a - b|| / (2 sigma)) - 1.
double mahalanobis_advantage(std::span<const double> center_a,
                             std::span<const double> center_b,
                             NoiseScale noise);

}  // namespace dpident

#endif  // DPIDENT_BOUNDS_HPP_
