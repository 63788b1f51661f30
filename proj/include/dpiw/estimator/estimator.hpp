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

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/weights.hpp"

namespace dpiw::estimator {

struct EstimateReport {
  double value = 0.0;
  double variance = 0.0;  // +inf when the noise variance is infinite
  std::size_t n_used = 0;
  Provenance weight_provenance = Provenance::kUniform;
  std::optional<PrivacySpend> spend;

  nlohmann::ordered_json to_json() const;
};

/// Importance-sampling mean of h under the weighted sample: the plain
/// (1/N) sum w_i h_i by default, or sum w_i h_i / sum w_i when
/// self_normalize is set. The variance field is the plug-in estimate
/// (sample variance of w h over N for the plain form, the delta-method
/// value for the self-normalized form), inflated by the weights' recorded
/// multiplicative noise variance when one is attached.
EstimateReport importance_estimate(std::span<const double> h_values, const WeightVector& w,
                                   bool self_normalize = false);

/// Variance of the noise-perturbed estimator: (sample variance of w h +
/// var_exp_noise * sample mean of (w h)^2) / N. Pass the weights BEFORE
/// noising together with the mechanism's exp-noise variance; +inf
/// var_exp_noise propagates to the result.
double noisy_estimator_variance(std::span<const double> h_values, const WeightVector& w,
                                double var_exp_noise);

/// Gradient of the negative log-likelihood at one observation.
using LogLikGradient = std::function<Eigen::VectorXd(
    std::span<const double> x, std::optional<int> label, const Eigen::VectorXd& theta)>;

struct EssResult {
  double n_effective = 0.0;
  double variance_ratio = 0.0;  // scalarized plain-to-weighted variance ratio
  std::string scalarization;    // "trace" or "determinant"
};

/// Effective sample size of a weighted synthetic sample for likelihood
/// fitting: how many real observations give the plain maximum-likelihood
/// estimate the same variance as the weighted one computed from these
/// n_synth observations. theta_hat must be the weighted estimate fitted
/// upstream. The two score second-moment matrices (weighted once and
/// twice) are summarized by trace (determinant behind the flag) and the
/// count is n_synth * ratio^2. Weights are rescaled to mean one first.
EssResult effective_sample_size(const Dataset& synth, const WeightVector& w,
                                const LogLikGradient& grad, const Eigen::VectorXd& theta_hat,
                                bool use_determinant = false);

}  // namespace dpiw::estimator
