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
#include <span>
#include <vector>

#include "dpiw/core/dataset.hpp"

namespace dpiw::ratio {

/// L2-regularized logistic classifier. The coefficient vector includes the
/// constant feature appended last; its length d is the dimension used by
/// the sensitivity formula.
struct LogisticModel {
  std::vector<double> beta;  // raw-feature coefficients, then the constant
  double lambda = 0.0;
  std::size_t n_private = 0;

  std::size_t dim() const { return beta.size(); }

  /// Classifier logit for a raw (unaugmented) feature row.
  double logit(std::span<const double> x) const;
  double prob(std::span<const double> x) const;

  /// Worst-case change of any log-weight between neighboring private
  /// datasets: 2 sqrt(d) / (n_private * lambda).
  double sensitivity() const;
};

/// 2 sqrt(d) / (n_private * lambda): the log-weight sensitivity of the exact
/// regularized optimum on minmax-scaled features, with the constant feature
/// counted inside d.
double logistic_sensitivity(std::size_t d, std::size_t n_private, double lambda);

/// Fits real (label 1) against synthetic (label 0) by damped Newton with
/// backtracking line search; converges to gradient norm <= 1e-8 or throws
/// after 100 iterations. Both datasets must be scaled to [0, 1].
LogisticModel fit_logistic_l2(const Dataset& real, const Dataset& synth, double lambda);

/// Same objective with a nonnegative multiplier per example (losses scaled
/// example-wise); used by the weighted downstream classifier.
LogisticModel fit_logistic_l2_weighted(const Dataset& data, const std::vector<int>& labels,
                                       const std::vector<double>& example_weights,
                                       double lambda);

/// Newton core shared by the fitting entry points and beta calibration:
/// minimizes (1/N) sum_i c_i log(1 + exp(-y_i beta.x_i)) + (lambda/2)|beta|^2
/// over rows of x (already augmented), y in {-1, +1}.
struct NewtonOptions {
  double tolerance = 1e-8;
  std::size_t max_iterations = 100;
};
std::vector<double> newton_logistic(const std::vector<double>& x_aug, std::size_t n,
                                    std::size_t p, const std::vector<double>& y_pm1,
                                    const std::vector<double>& multipliers, double lambda,
                                    const NewtonOptions& opts = {});

}  // namespace dpiw::ratio
