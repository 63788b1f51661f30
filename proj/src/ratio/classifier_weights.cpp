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

#include "dpiw/ratio/classifier_weights.hpp"

#include <cmath>
#include <fstream>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"

namespace dpiw::ratio {

namespace {

double prior_odds_correction(std::size_t n_private, std::size_t n_synth) {
  if (n_private < 1 || n_synth < 1) throw InputError("sample counts must be positive");
  return std::log(static_cast<double>(n_private) / static_cast<double>(n_synth));
}

}  // namespace

WeightVector log_weights_from_logits(const std::function<double(std::span<const double>)>& logit,
                                     const Dataset& points, std::size_t n_private,
                                     std::size_t n_synth) {
  const double correction = prior_odds_correction(n_private, n_synth);
  std::vector<double> lw(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) lw[i] = logit(points.row(i)) + correction;
  return WeightVector::from_log(std::move(lw), Provenance::kEstimated);
}

WeightVector log_weights_from_classifier(const LogisticModel& model, const Dataset& points,
                                         std::size_t n_private, std::size_t n_synth) {
  return log_weights_from_logits(
      [&model](std::span<const double> x) { return model.logit(x); }, points, n_private, n_synth);
}

WeightVector log_weights_from_classifier(const MlpModel& model, const Dataset& points,
                                         std::size_t n_private, std::size_t n_synth) {
  auto w = log_weights_from_logits(
      [&model](std::span<const double> x) { return model.logit(x); }, points, n_private, n_synth);
  if (model.training_spend()) {
    // Post-processing of a privately trained model: the weights inherit the
    // training spend and no additional budget is consumed.
    return WeightVector::from_log(w.log_values(), Provenance::kEstimated,
                                  *model.training_spend());
  }
  return w;
}

WeightVector import_external_probabilities(const std::string& path, std::size_t n_private,
                                           std::size_t n_synth, const ImportOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "prob") throw InputError("expected header 'prob', got '" + line + "'", 1);

  constexpr double kClampLo = 1e-6;
  const double correction = prior_odds_correction(n_private, n_synth);
  std::vector<double> lw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    char* end = nullptr;
    double p = std::strtod(line.c_str(), &end);
    if (end == line.c_str() || *end != '\0')
      throw InputError("malformed probability '" + line + "'", line_no);
    if (!(p > 0.0 && p < 1.0)) {
      if (!opts.clamp)
        throw InputError("probability " + std::to_string(p) + " outside (0, 1)", line_no);
      p = std::min(std::max(p, kClampLo), 1.0 - kClampLo);
    }
    lw.push_back(logit(p) + correction);
  }
  if (lw.empty()) throw InputError("no probabilities in '" + path + "'");

  PrivacySpend spend{0.0, 0.0, "post-processing of a private discriminator"};
  return WeightVector::from_log(std::move(lw), Provenance::kEstimated, std::move(spend));
}

}  // namespace dpiw::ratio
