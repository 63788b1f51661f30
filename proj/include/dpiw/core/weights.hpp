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
#include <string>
#include <vector>

#include "dpiw/core/privacy_ledger.hpp"

namespace dpiw {

/// How a weight vector came to be. Raw classifier estimates (kEstimated
/// without an attached spend) must never leave the trust boundary.
enum class Provenance {
  kTrue,            // analytic density ratio of known generators
  kEstimated,       // classifier logits, unreleased unless spend attached
  kBetaNoised,      // coefficient-perturbed classifier (biased baseline)
  kOutputLaplace,   // log-weights + calibrated Laplace noise
  kOutputGaussian,  // log-weights + calibrated Gaussian noise
  kSmoothed,        // tempered or Pareto-smoothed
  kCalibrated,      // probabilities recalibrated on a holdout
  kUniform,         // all ones
};

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// Per-observation importance weights, stored in log-space; exponentiation
/// happens only at estimator boundaries. All stored log-weights are finite.
class WeightVector {
 public:
  static WeightVector uniform(std::size_t n);
  static WeightVector from_log(std::vector<double> log_weights, Provenance prov,
                               std::optional<PrivacySpend> spend = std::nullopt);

  std::size_t size() const { return log_w_.size(); }
  const std::vector<double>& log_values() const { return log_w_; }
  double log_value(std::size_t i) const { return log_w_[i]; }

  /// Weights on the natural scale.
  std::vector<double> values() const;
  /// Weights rescaled to mean 1.
  std::vector<double> values_mean_one() const;
  /// Weights rescaled to sum 1 (a probability vector).
  std::vector<double> normalized() const;

  Provenance provenance() const { return prov_; }
  const std::optional<PrivacySpend>& spend() const { return spend_; }

  /// Variance of the multiplicative noise factor exp(zeta) applied during
  /// privatization; 0 for noise-free weights, +inf when the noise scale
  /// admits no finite variance.
  double noise_factor_variance() const { return var_exp_noise_; }
  bool infinite_variance_warning() const { return infinite_variance_; }

  /// True when the vector may be written outside the trust boundary without
  /// an explicit override: either a privacy spend is attached (privatized or
  /// post-processed from a private mechanism) or the weights are uniform.
  bool releasable() const { return spend_.has_value() || prov_ == Provenance::kUniform; }

  /// Copy with new log-values and provenance; privacy spend and noise
  /// metadata carry over (post-processing does not consume budget).
  WeightVector with_log_values(std::vector<double> log_weights, Provenance prov) const;
  WeightVector with_noise_metadata(double var_exp_noise, bool infinite_variance,
                                   PrivacySpend spend, Provenance prov,
                                   std::vector<double> log_weights) const;

  WeightVector subset(const std::vector<std::size_t>& indices) const;
  WeightVector head(std::size_t n) const;

 private:
  WeightVector() = default;
  std::vector<double> log_w_;
  Provenance prov_ = Provenance::kUniform;
  std::optional<PrivacySpend> spend_;
  double var_exp_noise_ = 0.0;
  bool infinite_variance_ = false;
};

}  // namespace dpiw
