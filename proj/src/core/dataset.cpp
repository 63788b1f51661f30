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

#include "dpiw/core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dpiw/core/error.hpp"

namespace dpiw {

Dataset::Dataset(std::vector<double> features, std::size_t n_rows, std::size_t n_cols,
                 Source source, std::optional<std::vector<int>> labels)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      source_(source),
      n_(n_rows),
      d_(n_cols) {
  if (n_ < 1 || d_ < 1) throw InputError("dataset must have at least one row and one column");
  if (features_.size() != n_ * d_)
    throw InputError("feature buffer size does not match rows x cols");
  if (labels_) {
    if (labels_->size() != n_) throw InputError("label vector length does not match rows");
    for (int y : *labels_)
      if (y != 0 && y != 1) throw InputError("labels must be 0 or 1");
  }
}

Dataset Dataset::select(const std::vector<std::size_t>& indices) const {
  std::vector<double> f(indices.size() * d_);
  std::optional<std::vector<int>> l;
  if (labels_) l.emplace(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    std::copy_n(features_.data() + i * d_, d_, f.data() + k * d_);
    if (labels_) (*l)[k] = (*labels_)[i];
  }
  Dataset out(std::move(f), indices.size(), d_, source_, std::move(l));
  out.scaling_ = scaling_;
  return out;
}

Dataset Dataset::head(std::size_t n) const {
  std::vector<std::size_t> idx(std::min(n, n_));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return select(idx);
}

ScaleResult minmax_scale(const Dataset& data, const std::vector<FeatureBounds>& bounds) {
  if (bounds.size() != data.cols())
    throw InputError("expected one bound pair per feature, got " +
                     std::to_string(bounds.size()) + " for " + std::to_string(data.cols()) +
                     " features");
  for (std::size_t j = 0; j < bounds.size(); ++j)
    if (!(bounds[j].hi > bounds[j].lo))
      throw InputError("degenerate bounds for feature " + std::to_string(j) + ": [" +
                       std::to_string(bounds[j].lo) + ", " + std::to_string(bounds[j].hi) + "]");

  std::vector<double> f(data.rows() * data.cols());
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      const double span = bounds[j].hi - bounds[j].lo;
      double v = (data.at(i, j) - bounds[j].lo) / span;
      if (v < 0.0) {
        v = 0.0;
        ++clamped;
      } else if (v > 1.0) {
        v = 1.0;
        ++clamped;
      }
      f[i * data.cols() + j] = v;
    }
  }
  std::optional<std::vector<int>> labels;
  if (data.has_labels()) labels = data.labels();
  Dataset scaled(std::move(f), data.rows(), data.cols(), data.source(), std::move(labels));
  scaled.set_scaling(bounds);
  return {std::move(scaled), clamped};
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double train_fraction,
                                             RngStream rng) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InputError("train fraction must be strictly between 0 and 1");
  if (data.rows() < 2) throw InputError("need at least 2 rows to split");

  const auto perm = rng.permutation(data.rows());
  const auto n_train =
      static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(data.rows())));
  std::vector<std::size_t> train_idx(perm.begin(), perm.begin() + n_train);
  std::vector<std::size_t> test_idx(perm.begin() + n_train, perm.end());
  return {data.select(train_idx), data.select(test_idx)};
}

namespace {

std::vector<std::string> split_line(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& field, std::size_t line_no) {
  if (field.empty()) throw InputError("missing value", line_no);
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0'))
    throw InputError("malformed number '" + field + "'", line_no);
  if (!std::isfinite(v)) throw InputError("non-finite value '" + field + "'", line_no);
  return v;
}

}  // namespace

Dataset read_csv(const std::string& path, Source source, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line, opts.separator);

  long label_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (!opts.label_column.empty() && header[j] == opts.label_column)
      label_col = static_cast<long>(j);
  if (!opts.label_column.empty() && label_col < 0)
    throw InputError("label column '" + opts.label_column + "' not found in header");

  const std::size_t d = header.size() - (label_col >= 0 ? 1 : 0);
  if (d == 0) throw InputError("no feature columns in '" + path + "'");

  std::vector<double> features;
  std::vector<int> labels;
  std::size_t n = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_line(line, opts.separator);
    if (fields.size() != header.size())
      throw InputError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const double v = parse_number(fields[j], line_no);
      if (static_cast<long>(j) == label_col) {
        if (v != 0.0 && v != 1.0) throw InputError("label must be 0 or 1", line_no);
        labels.push_back(static_cast<int>(v));
      } else {
        features.push_back(v);
      }
    }
    ++n;
  }
  if (n == 0) throw InputError("no data rows in '" + path + "'");

  std::optional<std::vector<int>> maybe_labels;
  if (label_col >= 0) maybe_labels = std::move(labels);
  return Dataset(std::move(features), n, d, source, std::move(maybe_labels));
}

void write_csv(const Dataset& data, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.precision(17);
  for (std::size_t j = 0; j < data.cols(); ++j) {
    if (j) out << ',';
    out << "x" << j;
  }
  const bool with_labels = data.has_labels() && !label_column.empty();
  if (with_labels) out << ',' << label_column;
  out << '\n';
  for (std::size_t i = 0; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << data.at(i, j);
    }
    if (with_labels) out << ',' << data.label(i);
    out << '\n';
  }
}

}  // namespace dpiw
