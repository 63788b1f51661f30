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

#include <span>
#include <vector>

#include "dpiw/core/weights.hpp"

namespace dpiw::postprocess {

/// Flattens weights toward uniform: log-weights scaled by tau in [0, 1]
/// (tau = 1 identity, tau = 0 all ones).
WeightVector temper(const WeightVector& w, double tau);

struct GpdFit {
  double k_hat = 0.0;      // tail shape; positive means heavy
  double sigma_hat = 0.0;  // tail scale
};

/// Profile-likelihood generalized-Pareto fit to threshold exceedances
/// (Zhang & Stephens 2009 grid posterior with a weak prior pulling the
/// shape toward 1/2). Needs at least 5 positive exceedances with spread.
GpdFit fit_gpd_tail(std::vector<double> exceedances);

struct PsisResult {
  WeightVector smoothed;
  double k_hat = 0.0;
  double sigma_hat = 0.0;
  bool warning = false;  // k_hat > 0.7: the proposal is unreliable
  std::size_t tail_size = 0;
};

/// Pareto-smoothed importance sampling: replaces the M largest weights,
/// M = min(ceil(0.2 N), ceil(3 sqrt(N))), with generalized-Pareto quantiles
/// at expected order-statistic positions, capped at the raw maximum.
/// Weights below the tail threshold are untouched; orderings are preserved.
PsisResult psis_smooth(const WeightVector& w);

/// Three-parameter monotone recalibration map
/// p -> sigmoid(a log p - b log(1 - p) + c), fitted on a labelled holdout
/// by maximum likelihood.
struct BetaCalibration {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;

  double apply(double p) const;
};

/// Fits the calibration map from classifier probabilities and the holdout's
/// real(1)/synthetic(0) labels. Both classes must be present and all
/// probabilities strictly inside (0, 1).
BetaCalibration beta_calibrate(std::span<const double> probs, std::span<const int> labels);

}  // namespace dpiw::postprocess
