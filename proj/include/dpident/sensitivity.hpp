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

#ifndef DPIDENT_SENSITIVITY_HPP_
#define DPIDENT_SENSITIVITY_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "dpident/data.hpp"

namespace dpident {

enum class Dissimilarity {
  kEuclidean,
  kManhattan,
  kHamming,
  kCosine,       // 1 - cosine similarity; rejects zero vectors
  kNegativeSsim  // 1 - SSIM on the flattened vectors
};

enum class NeighborMode {
  kUnbounded,  // one record removed
  kBounded     // one record replaced
};

// data_range is the value range L entering the SSIM stabilizers
// C1 = (0.01 L)^2 and C2 = (0.03 L)^2; ignored by the other measures.
double dissimilarity(std::span<const double> x1, std::span<const double> x2,
                     Dissimilarity measure, double data_range = 1.0);

// Record maximizing the summed dissimilarity to the rest of the dataset.
// Ties break toward the smallest index.
std::size_t select_removal_candidate(const Eigen::MatrixXd& rows,
                                     Dissimilarity measure,
                                     double data_range = 1.0);

// Most dissimilar (inside, outside) record pair; ties break toward the
// lexicographically smallest index pair.
std::pair<std::size_t, std::size_t> select_replacement_pair(
    const Eigen::MatrixXd& inside, const Eigen::MatrixXd& outside,
    Dissimilarity measure, double data_range = 1.0);

struct NeighborSelection {
  std::size_t index = 0;  // record of the dataset to remove or replace
  std::optional<Eigen::VectorXd> replacement_features;  // bounded only
  std::optional<Eigen::VectorXd> replacement_label;
};

// Builds the neighboring dataset; the input is left untouched.
TabularDataset neighboring_dataset(const TabularDataset& dataset,
                                   NeighborMode mode,
                                   const NeighborSelection& selection);

// Per-step local sensitivity from the mean clipped batch gradients of the
// two neighbors; n is the size of the primary dataset.
//   bounded:   || n (g_d' - g_d) ||
//   unbounded: || (n-1) g_d' - n g_d ||
double local_sensitivity_step(const Eigen::VectorXd& mean_gradient_d,
                              const Eigen::VectorXd& mean_gradient_d_prime,
                              long n, NeighborMode mode);

// Heuristic approximation from the clipped gradients of the differing
// record(s): ||g(x)|| unbounded, ||g(x) - g(x')|| bounded.
double approx_local_sensitivity(
    const Eigen::VectorXd& clipped_gradient_x,
    const std::optional<Eigen::VectorXd>& clipped_gradient_x_prime,
    NeighborMode mode);

}  // namespace dpident

#endif  // DPIDENT_SENSITIVITY_HPP_
