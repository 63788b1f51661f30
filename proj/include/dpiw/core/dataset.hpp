// Copyright 2026 The dpiw Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpiw/core/rng.hpp"

namespace dpiw {

enum class Source { kPrivate, kSynthetic };

/// Public per-feature scaling bounds. These are declared inputs, never
/// estimated from private data (estimating them would leak).
struct FeatureBounds {
  double lo = 0.0;
  double hi = 1.0;
};

/// Immutable feature matrix with optional binary labels. Rows are
/// observations; features are stored row-major.
class Dataset {
 public:
  Dataset(std::vector<double> features, std::size_t n_rows, std::size_t n_cols,
          Source source, std::optional<std::vector<int>> labels = std::nullopt);

  std::size_t rows() const { return n_; }
  std::size_t cols() const { return d_; }
  Source source() const { return source_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * d_, d_};
  }
  double at(std::size_t i, std::size_t j) const { return features_[i * d_ + j]; }
  const std::vector<double>& features() const { return features_; }

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<int>& labels() const { return *labels_; }
  int label(std::size_t i) const { return (*labels_)[i]; }

  /// Bounds used by the scaling transform that produced this dataset;
  /// empty when the data has not been scaled.
  const std::vector<FeatureBounds>& scaling() const { return scaling_; }
  void set_scaling(std::vector<FeatureBounds> b) { scaling_ = std::move(b); }

  Dataset select(const std::vector<std::size_t>& indices) const;
  Dataset head(std::size_t n) const;

 private:
  std::vector<double> features_;
  std::optional<std::vector<int>> labels_;
  Source source_;
  std::vector<FeatureBounds> scaling_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
};

struct ScaleResult {
  Dataset data;
  std::size_t clamped = 0;  // values pushed back into [0, 1]
};

/// Affine map (x - lo) / (hi - lo) per feature, clamped to [0, 1]. Bounds
/// with hi <= lo are rejected with the offending feature index. The bounds
/// are recorded on the result so test data can be scaled identically.
ScaleResult minmax_scale(const Dataset& data, const std::vector<FeatureBounds>& bounds);

/// Disjoint split into ceil(f*N) train rows and the rest, by a uniform
/// permutation of the given stream. Labels travel with their rows.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double train_fraction,
                                             RngStream rng);

struct CsvOptions {
  std::string label_column;  // empty: no label column expected
  char separator = ',';
};

/// Reads a dataset from CSV: header row, decimal feature columns, optional
/// label column in {0,1}. Missing or malformed fields reject the file with
/// the 1-based line number.
Dataset read_csv(const std::string& path, Source source, const CsvOptions& opts = {});

void write_csv(const Dataset& data, const std::string& path,
               const std::string& label_column = "");

}  // namespace dpiw
