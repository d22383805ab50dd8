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

#include "dpident/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace dpident {
namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    total += diff * diff;
  }
  return std::sqrt(total);
}

double manhattan(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::abs(a[i] - b[i]);
  return total;
}

double hamming(std::span<const double> a, std::span<const double> b) {
  double count = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) count += 1.0;
  }
  return count;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  require(norm_a > 0.0 && norm_b > 0.0,
          "dissimilarity: cosine distance is undefined for zero vectors");
  return 1.0 - dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

// Global (single window) structural similarity on the flattened vectors,
// population statistics, stabilizers from the data range.
double negative_ssim(std::span<const double> a, std::span<const double> b,
                     double range) {
  const double c1 = (0.01 * range) * (0.01 * range);
  const double c2 = (0.03 * range) * (0.03 * range);
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double var_a = 0.0;
  double var_b = 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    var_a += da * da;
    var_b += db * db;
    cov += da * db;
  }
  var_a /= n;
  var_b /= n;
  cov /= n;
  const double ssim = ((2.0 * mean_a * mean_b + c1) * (2.0 * cov + c2)) /
                      ((mean_a * mean_a + mean_b * mean_b + c1) *
                       (var_a + var_b + c2));
  return 1.0 - ssim;
}

}  // namespace

double dissimilarity(std::span<const double> x1, std::span<const double> x2,
                     Dissimilarity measure, double data_range) {
  require(x1.size() == x2.size(), "dissimilarity: dimension mismatch");
  require(!x1.empty(), "dissimilarity: empty vectors");
  switch (measure) {
    case Dissimilarity::kEuclidean:
      return euclidean(x1, x2);
    case Dissimilarity::kManhattan:
      return manhattan(x1, x2);
    case Dissimilarity::kHamming:
      return hamming(x1, x2);
    case Dissimilarity::kCosine:
      return cosine_distance(x1, x2);
    case Dissimilarity::kNegativeSsim:
      require(data_range > 0.0, "dissimilarity: data range must be positive");
      return negative_ssim(x1, x2, data_range);
  }
  throw std::invalid_argument("dissimilarity: unknown measure");
}

std::size_t select_removal_candidate(const Eigen::MatrixXd& rows,
                                     Dissimilarity measure,
                                     double data_range) {
  require(rows.rows() >= 2,
          "select_removal_candidate: need at least two records");
  std::vector<Eigen::VectorXd> cache(static_cast<std::size_t>(rows.rows()));
  for (long i = 0; i < rows.rows(); ++i) cache[i] = rows.row(i).transpose();
  const auto span_of = [&](long i) {
    return std::span<const double>(cache[i].data(),
                                   static_cast<std::size_t>(cache[i].size()));
  };
  std::size_t best_index = 0;
  double best_sum = -1.0;
  for (long i = 0; i < rows.rows(); ++i) {
    double sum = 0.0;
    for (long j = 0; j < rows.rows(); ++j) {
      if (i == j) continue;
      sum += dissimilarity(span_of(i), span_of(j), measure, data_range);
    }
    if (sum > best_sum) {
      best_sum = sum;
      best_index = static_cast<std::size_t>(i);
    }
  }
  return best_index;
}

std::pair<std::size_t, std::size_t> select_replacement_pair(
    const Eigen::MatrixXd& inside, const Eigen::MatrixXd& outside,
    Dissimilarity measure, double data_range) {
  require(inside.rows() >= 1 && outside.rows() >= 1,
          "select_replacement_pair: both sets must be nonempty");
  std::pair<std::size_t, std::size_t> best{0, 0};
  double best_value = -1.0;
  for (long i = 0; i < inside.rows(); ++i) {
    const Eigen::VectorXd a = inside.row(i).transpose();
    const std::span<const double> sa(a.data(),
                                     static_cast<std::size_t>(a.size()));
    for (long j = 0; j < outside.rows(); ++j) {
      const Eigen::VectorXd b = outside.row(j).transpose();
      const double value = dissimilarity(
          sa, std::span<const double>(b.data(),
                                      static_cast<std::size_t>(b.size())),
          measure, data_range);
      if (value > best_value) {
        best_value = value;
        best = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
      }
    }
  }
  return best;
}

TabularDataset neighboring_dataset(const TabularDataset& dataset,
                                   NeighborMode mode,
                                   const NeighborSelection& selection) {
  const long n = dataset.rows();
  require(n >= 1, "neighboring_dataset: empty dataset");
  require(selection.index < static_cast<std::size_t>(n),
          "neighboring_dataset: selection index out of range");
  TabularDataset neighbor = dataset;
  const long index = static_cast<long>(selection.index);
  if (mode == NeighborMode::kUnbounded) {
    neighbor.features.resize(n - 1, dataset.feature_count());
    neighbor.labels.resize(n - 1, dataset.class_count());
    long out = 0;
    for (long i = 0; i < n; ++i) {
      if (i == index) continue;
      neighbor.features.row(out) = dataset.features.row(i);
      neighbor.labels.row(out) = dataset.labels.row(i);
      ++out;
    }
    return neighbor;
  }
  require(selection.replacement_features.has_value() &&
              selection.replacement_label.has_value(),
          "neighboring_dataset: bounded mode needs a replacement record");
  require(selection.replacement_features->size() == dataset.feature_count() &&
              selection.replacement_label->size() == dataset.class_count(),
          "neighboring_dataset: replacement dimensions mismatch");
  neighbor.features.row(index) = selection.replacement_features->transpose();
  neighbor.labels.row(index) = selection.replacement_label->transpose();
  return neighbor;
}

double local_sensitivity_step(const Eigen::VectorXd& mean_gradient_d,
                              const Eigen::VectorXd& mean_gradient_d_prime,
                              long n, NeighborMode mode) {
  require(mean_gradient_d.size() == mean_gradient_d_prime.size(),
          "local_sensitivity_step: dimension mismatch");
  require(n >= 1, "local_sensitivity_step: n must be positive");
  const double count = static_cast<double>(n);
  if (mode == NeighborMode::kBounded) {
    return (count * (mean_gradient_d_prime - mean_gradient_d)).norm();
  }
  return ((count - 1.0) * mean_gradient_d_prime - count * mean_gradient_d)
      .norm();
}

double approx_local_sensitivity(
    const Eigen::VectorXd& clipped_gradient_x,
    const std::optional<Eigen::VectorXd>& clipped_gradient_x_prime,
    NeighborMode mode) {
  if (mode == NeighborMode::kUnbounded) {
    return clipped_gradient_x.norm();
  }
  require(clipped_gradient_x_prime.has_value(),
          "approx_local_sensitivity: bounded mode needs both gradients");
  require(clipped_gradient_x.size() == clipped_gradient_x_prime->size(),
          "approx_local_sensitivity: dimension mismatch");
  return (clipped_gradient_x - *clipped_gradient_x_prime).norm();
}

}  // namespace dpident
