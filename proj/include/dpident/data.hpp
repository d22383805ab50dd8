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

#ifndef DPIDENT_DATA_HPP_
#define DPIDENT_DATA_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dpident/random.hpp"

namespace dpident {

struct Example {
  Eigen::VectorXd features;
  Eigen::VectorXd label;  // one-hot
};

// Immutable tabular dataset: features min-max normalized to [0, 1] per
// column (range-zero columns map to 0), labels one-hot. Pre-normalization
// ranges are kept so values round-trip.
struct TabularDataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::MatrixXd labels;    // n x c
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<double> feature_min;
  std::vector<double> feature_max;
  std::string provenance;

  long rows() const { return features.rows(); }
  long feature_count() const { return features.cols(); }
  long class_count() const { return labels.cols(); }
  Example example(long row) const;

  TabularDataset head(long n) const;  // first n rows
  TabularDataset tail_from(long n) const;
};

struct CsvOptions {
  std::vector<std::string> missing_tokens = {"", "?", "NA"};
};

// Comma separated, first row header, '.' decimal. Rows with missing values
// are dropped, categorical columns expand to one indicator column per level,
// and features are min-max normalized.
TabularDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const CsvOptions& options = {});

// Gaussian class blobs at mutually separated centers. Row i belongs to
// class i mod `classes`; unit-variance noise around the class center.
struct BlobSpec {
  long n = 200;
  long d = 10;
  long classes = 3;
  double separation = 4.0;
  std::uint64_t seed = 1;
};

TabularDataset synth_blobs(const BlobSpec& spec);
TabularDataset synth_blobs(long n, long d, long classes, double separation,
                           std::uint64_t seed);

// Fresh draw from the blob distribution, normalized with the reference
// dataset's stored ranges.
Example sample_blob(const BlobSpec& spec, const TabularDataset& reference,
                    RandomStream& rng);

// Four-person hourly-wage toy universe for the scalar sum-query audit.
struct WageUniverse {
  std::vector<double> universe;     // {5, 10, 2, 1}
  std::vector<double> survey;       // D  = {5, 10, 2}
  std::vector<double> alternative;  // D' = {5, 1, 2}
  double lo = 1.0;
  double hi = 10.0;

  double query_sensitivity() const { return hi - lo; }
};

WageUniverse wage_universe();

// JSON dataset cache; numeric values round-trip bit-exactly.
std::string dataset_to_json(const TabularDataset& dataset);
TabularDataset dataset_from_json(const std::string& text);

// Maps a normalized feature value back to its original scale.
double denormalize(const TabularDataset& dataset, long column, double value);

}  // namespace dpident

#endif  // DPIDENT_DATA_HPP_
