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
#include <span>
#include <string>
#include <vector>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/rng.hpp"
#include "dpiw/core/weights.hpp"

namespace dpiw::metrics {

/// Unbiased weighted MMD^2 U-statistic with a Gaussian kernel
/// k(a,b) = exp(-|a-b|^2 / (2 bandwidth^2)). Weights are rescaled to mean
/// one, so uniform weights reduce term-for-term to the standard unbiased
/// estimator. Requires equal sample sizes; subsample the larger set first
/// (subsample_rows).
double weighted_mmd2(const Dataset& synth, const WeightVector& w, const Dataset& real,
                     double bandwidth = 1.0);

/// Uniform subsample without replacement, for equalizing sample sizes.
std::vector<std::size_t> subsample_rows(std::size_t from, std::size_t count, RngStream rng);

struct WassersteinSettings {
  // Exact solver limit. Desk-scale experiments stay exact: the entropic
  // value at the default regularization is biased upward enough on
  // concentrated weighted measures to reorder nearby configurations.
  std::size_t exact_max_n = 2048;
  double sinkhorn_reg = 0.01;        // entropic regularization above the limit
  double sinkhorn_tol = 1e-9;        // marginal violation tolerance
  std::size_t sinkhorn_max_iters = 10000;
};

struct WassersteinResult {
  double value = 0.0;
  std::string method;  // "exact" or "sinkhorn"
};

/// Wasserstein-1 with Euclidean ground cost between the weighted empirical
/// measure on the synthetic points (weights normalized to a probability
/// vector) and the uniform empirical measure on the real points.
WassersteinResult weighted_wasserstein(const Dataset& synth, const WeightVector& w,
                                       const Dataset& real,
                                       const WassersteinSettings& settings = {});

/// Exact discrete optimal transport cost between two weighted point clouds
/// (masses need not be uniform; they are normalized to equal totals).
double exact_wasserstein1(const Dataset& a, const std::vector<double>& mass_a, const Dataset& b,
                          const std::vector<double>& mass_b);

/// Entropically regularized transport cost (log-domain Sinkhorn with
/// stepwise regularization annealing and plan rounding). Throws after
/// max_iters final-stage iterations without reaching the tolerance.
double sinkhorn_wasserstein1(const Dataset& a, const std::vector<double>& mass_a,
                             const Dataset& b, const std::vector<double>& mass_b,
                             const WassersteinSettings& settings = {});

/// Area under the ROC curve by the tie-corrected rank statistic.
double auc_from_scores(std::span<const double> scores, std::span<const int> labels);

/// Trains a weighted L2 logistic classifier on the labelled synthetic data
/// (each example's loss multiplied by its weight) and returns its AUC on
/// the labelled real test set.
double downstream_auc(const Dataset& synth, const WeightVector& w, const Dataset& real_test,
                      double lambda = 1e-4);

/// sqrt((a-b)' cov^-1 (a-b)); cov must be symmetric positive definite.
double mahalanobis(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::MatrixXd& cov);

}  // namespace dpiw::metrics
