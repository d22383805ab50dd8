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

#include "dpident/data.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dpident/errors.hpp"
#include "json.hpp"

namespace dpident {
namespace {

using nlohmann::json;

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string& text, double* value) {
  if (text.empty()) return false;
  char* end = nullptr;
  const double parsed = std::strtod(text.c_str(), &end);
  if (end == nullptr || *end != '\0') return false;
  *value = parsed;
  return true;
}

// Min-max normalization in place; range-zero columns map to 0.
void normalize_columns(TabularDataset& dataset) {
  const long d = dataset.feature_count();
  dataset.feature_min.resize(static_cast<std::size_t>(d));
  dataset.feature_max.resize(static_cast<std::size_t>(d));
  for (long c = 0; c < d; ++c) {
    const double lo = dataset.features.col(c).minCoeff();
    const double hi = dataset.features.col(c).maxCoeff();
    dataset.feature_min[static_cast<std::size_t>(c)] = lo;
    dataset.feature_max[static_cast<std::size_t>(c)] = hi;
    if (hi > lo) {
      dataset.features.col(c) =
          (dataset.features.col(c).array() - lo) / (hi - lo);
    } else {
      dataset.features.col(c).setZero();
    }
  }
}

}  // namespace

Example TabularDataset::example(long row) const {
  if (row < 0 || row >= rows()) {
    throw std::invalid_argument("TabularDataset: row out of range");
  }
  return {features.row(row).transpose(), labels.row(row).transpose()};
}

TabularDataset TabularDataset::head(long n) const {
  if (n < 0 || n > rows()) {
    throw std::invalid_argument("TabularDataset: head size out of range");
  }
  TabularDataset out = *this;
  out.features = features.topRows(n);
  out.labels = labels.topRows(n);
  return out;
}

TabularDataset TabularDataset::tail_from(long n) const {
  if (n < 0 || n > rows()) {
    throw std::invalid_argument("TabularDataset: tail offset out of range");
  }
  TabularDataset out = *this;
  out.features = features.bottomRows(rows() - n);
  out.labels = labels.bottomRows(rows() - n);
  return out;
}

TabularDataset load_csv(const std::string& path,
                        const std::string& label_column,
                        const CsvOptions& options) {
  std::ifstream file(path);
  if (!file) throw DataError("load_csv: cannot open " + path);

  std::string line;
  if (!std::getline(file, line)) throw DataError("load_csv: empty file");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) throw DataError("load_csv: empty header row");

  long label_index = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) label_index = static_cast<long>(i);
  }
  if (label_index < 0) {
    throw DataError("load_csv: label column '" + label_column + "' not found");
  }

  const auto is_missing = [&](const std::string& field) {
    return std::find(options.missing_tokens.begin(),
                     options.missing_tokens.end(),
                     field) != options.missing_tokens.end();
  };

  std::vector<std::vector<std::string>> rows;
  std::size_t line_number = 1;
  while (std::getline(file, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("load_csv: row " + std::to_string(line_number) +
                      " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    const bool missing = std::any_of(fields.begin(), fields.end(), is_missing);
    if (!missing) rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw DataError("load_csv: no complete rows in " + path);

  const std::size_t columns = header.size();
  std::vector<bool> numeric(columns, true);
  for (std::size_t c = 0; c < columns; ++c) {
    for (const auto& row : rows) {
      double ignored;
      if (!parse_double(row[c], &ignored)) {
        numeric[c] = false;
        break;
      }
    }
  }

  // Sorted distinct levels per categorical column (labels always included).
  std::map<std::size_t, std::vector<std::string>> levels;
  for (std::size_t c = 0; c < columns; ++c) {
    const bool is_label = static_cast<long>(c) == label_index;
    if (numeric[c] && !is_label) continue;
    std::set<std::string> distinct;
    for (const auto& row : rows) distinct.insert(row[c]);
    levels[c] = {distinct.begin(), distinct.end()};
  }

  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < columns; ++c) {
    if (static_cast<long>(c) == label_index) continue;
    if (numeric[c]) {
      feature_names.push_back(header[c]);
    } else {
      for (const auto& level : levels[c]) {
        feature_names.push_back(header[c] + "=" + level);
      }
    }
  }

  TabularDataset dataset;
  dataset.provenance = "csv:" + path;
  dataset.feature_names = feature_names;
  dataset.class_names = levels[static_cast<std::size_t>(label_index)];
  const long n = static_cast<long>(rows.size());
  dataset.features.setZero(n, static_cast<long>(feature_names.size()));
  dataset.labels.setZero(n, static_cast<long>(dataset.class_names.size()));

  for (long i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    long out = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      if (static_cast<long>(c) == label_index) continue;
      if (numeric[c]) {
        double value = 0.0;
        parse_double(row[c], &value);
        dataset.features(i, out++) = value;
      } else {
        for (const auto& level : levels[c]) {
          dataset.features(i, out++) = row[c] == level ? 1.0 : 0.0;
        }
      }
    }
    const auto& label_levels = levels[static_cast<std::size_t>(label_index)];
    const auto it = std::find(label_levels.begin(), label_levels.end(),
                              row[static_cast<std::size_t>(label_index)]);
    dataset.labels(i, static_cast<long>(it - label_levels.begin())) = 1.0;
  }

  normalize_columns(dataset);
  return dataset;
}

TabularDataset synth_blobs(const BlobSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.classes < 1 || spec.n < spec.classes) {
    throw std::invalid_argument("synth_blobs: invalid sizes");
  }
  if (!(spec.separation >= 0.0)) {
    throw std::invalid_argument("synth_blobs: separation must be >= 0");
  }
  TabularDataset dataset;
  dataset.provenance = "blobs";
  dataset.features.resize(spec.n, spec.d);
  dataset.labels.setZero(spec.n, spec.classes);
  RandomStream master(spec.seed);
  for (long i = 0; i < spec.n; ++i) {
    const long cls = i % spec.classes;
    RandomStream row_rng = master.substream(static_cast<std::uint64_t>(i));
    for (long j = 0; j < spec.d; ++j) {
      const double center = (j == cls % spec.d) ? spec.separation : 0.0;
      dataset.features(i, j) = center + row_rng.gaussian();
    }
    dataset.labels(i, cls) = 1.0;
  }
  dataset.feature_names.resize(static_cast<std::size_t>(spec.d));
  for (long j = 0; j < spec.d; ++j) {
    dataset.feature_names[static_cast<std::size_t>(j)] =
        "f" + std::to_string(j);
  }
  dataset.class_names.resize(static_cast<std::size_t>(spec.classes));
  for (long c = 0; c < spec.classes; ++c) {
    dataset.class_names[static_cast<std::size_t>(c)] = std::to_string(c);
  }
  normalize_columns(dataset);
  return dataset;
}

TabularDataset synth_blobs(long n, long d, long classes, double separation,
                           std::uint64_t seed) {
  return synth_blobs(BlobSpec{n, d, classes, separation, seed});
}

Example sample_blob(const BlobSpec& spec, const TabularDataset& reference,
                    RandomStream& rng) {
  if (reference.feature_count() != spec.d ||
      reference.class_count() != spec.classes) {
    throw std::invalid_argument("sample_blob: reference dataset mismatch");
  }
  const long cls = static_cast<long>(rng.next_u64() %
                                     static_cast<std::uint64_t>(spec.classes));
  Example example;
  example.features.resize(spec.d);
  for (long j = 0; j < spec.d; ++j) {
    const double center = (j == cls % spec.d) ? spec.separation : 0.0;
    const double raw = center + rng.gaussian();
    const double lo = reference.feature_min[static_cast<std::size_t>(j)];
    const double hi = reference.feature_max[static_cast<std::size_t>(j)];
    example.features(j) = hi > lo ? (raw - lo) / (hi - lo) : 0.0;
  }
  example.label = Eigen::VectorXd::Zero(spec.classes);
  example.label(cls) = 1.0;
  return example;
}

WageUniverse wage_universe() {
  WageUniverse world;
  world.universe = {5.0, 10.0, 2.0, 1.0};
  world.survey = {5.0, 10.0, 2.0};
  world.alternative = {5.0, 1.0, 2.0};
  world.lo = 1.0;
  world.hi = 10.0;
  return world;
}

std::string dataset_to_json(const TabularDataset& dataset) {
  json doc;
  doc["provenance"] = dataset.provenance;
  doc["feature_names"] = dataset.feature_names;
  doc["class_names"] = dataset.class_names;
  doc["feature_min"] = dataset.feature_min;
  doc["feature_max"] = dataset.feature_max;
  json features = json::array();
  for (long i = 0; i < dataset.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < dataset.feature_count(); ++j) {
      row.push_back(dataset.features(i, j));
    }
    features.push_back(std::move(row));
  }
  doc["features"] = std::move(features);
  json labels = json::array();
  for (long i = 0; i < dataset.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < dataset.class_count(); ++j) {
      row.push_back(dataset.labels(i, j));
    }
    labels.push_back(std::move(row));
  }
  doc["labels"] = std::move(labels);
  return doc.dump();
}

TabularDataset dataset_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& error) {
    throw DataError(std::string("dataset_from_json: ") + error.what());
  }
  TabularDataset dataset;
  try {
    dataset.provenance = doc.at("provenance").get<std::string>();
    dataset.feature_names =
        doc.at("feature_names").get<std::vector<std::string>>();
    dataset.class_names = doc.at("class_names").get<std::vector<std::string>>();
    dataset.feature_min = doc.at("feature_min").get<std::vector<double>>();
    dataset.feature_max = doc.at("feature_max").get<std::vector<double>>();
    const json& features = doc.at("features");
    const json& labels = doc.at("labels");
    const long n = static_cast<long>(features.size());
    const long d = static_cast<long>(dataset.feature_names.size());
    const long c = static_cast<long>(dataset.class_names.size());
    dataset.features.resize(n, d);
    dataset.labels.resize(n, c);
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < d; ++j) {
        dataset.features(i, j) =
            features.at(static_cast<std::size_t>(i))
                .at(static_cast<std::size_t>(j))
                .get<double>();
      }
      for (long j = 0; j < c; ++j) {
        dataset.labels(i, j) = labels.at(static_cast<std::size_t>(i))
                                   .at(static_cast<std::size_t>(j))
                                   .get<double>();
      }
    }
  } catch (const json::exception& error) {
    throw DataError(std::string("dataset_from_json: ") + error.what());
  }
  return dataset;
}

double denormalize(const TabularDataset& dataset, long column, double value) {
  if (column < 0 || column >= dataset.feature_count()) {
    throw std::invalid_argument("denormalize: column out of range");
  }
  const double lo = dataset.feature_min[static_cast<std::size_t>(column)];
  const double hi = dataset.feature_max[static_cast<std::size_t>(column)];
  return hi > lo ? lo + value * (hi - lo) : lo;
}

}  // namespace dpident
