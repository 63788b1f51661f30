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

#include "dpiw/postprocess/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/ratio/logistic.hpp"

namespace dpiw::postprocess {

WeightVector temper(const WeightVector& w, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InputError("tempering exponent must lie in [0, 1]");
  std::vector<double> lw = w.log_values();
  for (double& x : lw) x *= tau;
  return w.with_log_values(std::move(lw), Provenance::kSmoothed);
}

GpdFit fit_gpd_tail(std::vector<double> exceedances) {
  const std::size_t n = exceedances.size();
  if (n < 5) throw InputError("tail too short: need at least 5 exceedances");
  std::sort(exceedances.begin(), exceedances.end());
  if (!(exceedances.front() >= 0.0)) throw InputError("exceedances must be nonnegative");
  if (!(exceedances.back() > exceedances.front()))
    throw InputError("degenerate tail: exceedances have no spread");

  // Zhang & Stephens (2009): grid of candidate values for theta = -k/sigma,
  // weighted by profile likelihood, then the shape from the weighted theta.
  const std::size_t m = 30 + static_cast<std::size_t>(std::floor(std::sqrt(n)));
  const double x_max = exceedances.back();
  const double x_quart =
      exceedances[static_cast<std::size_t>(std::floor(static_cast<double>(n) / 4.0 + 0.5)) - 1];
  if (!(x_quart > 0.0)) throw InputError("degenerate tail: lower quartile is zero");

  auto shape_at = [&](double theta) {
    double acc = 0.0;
    for (double z : exceedances) acc += std::log1p(-theta * z);
    return acc / static_cast<double>(n);
  };

  std::vector<double> theta(m), loglik(m);
  for (std::size_t j = 0; j < m; ++j) {
    theta[j] = 1.0 / x_max +
               (1.0 - std::sqrt(static_cast<double>(m) / (static_cast<double>(j) + 0.5))) /
                   (3.0 * x_quart);
    const double k = shape_at(theta[j]);
    loglik[j] = static_cast<double>(n) * (std::log(-theta[j] / k) - k - 1.0);
  }

  double theta_hat = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double denom = 0.0;
    for (std::size_t l = 0; l < m; ++l) denom += std::exp(loglik[l] - loglik[j]);
    theta_hat += theta[j] / denom;
  }

  GpdFit fit;
  fit.k_hat = shape_at(theta_hat);
  fit.sigma_hat = -fit.k_hat / theta_hat;
  // Weak prior regularization toward 1/2 stabilizes small tails.
  fit.k_hat = (static_cast<double>(n) * fit.k_hat + 5.0) / (static_cast<double>(n) + 10.0);
  if (!std::isfinite(fit.k_hat) || !std::isfinite(fit.sigma_hat) || !(fit.sigma_hat > 0.0))
    throw NonConvergenceError("tail fit failed", fit.k_hat);
  return fit;
}

namespace {

double gpd_quantile(double p, double k, double sigma) {
  if (std::fabs(k) < 1e-12) return -sigma * std::log1p(-p);
  return sigma * std::expm1(-k * std::log1p(-p)) / k;
}

}  // namespace

PsisResult psis_smooth(const WeightVector& w) {
  const std::size_t n = w.size();
  if (n < 25) throw InputError("need at least 25 weights to smooth a tail");

  const std::size_t tail =
      std::min(static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(n))),
               static_cast<std::size_t>(std::ceil(3.0 * std::sqrt(static_cast<double>(n)))));
  if (tail < 5) throw InputError("tail too short: need at least 5 exceedances");

  auto raw = w.values();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&raw](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

  const double cutoff = raw[order[n - tail - 1]];
  const double raw_max = raw[order[n - 1]];
  std::vector<double> exceedances(tail);
  for (std::size_t j = 0; j < tail; ++j) exceedances[j] = raw[order[n - tail + j]] - cutoff;

  const GpdFit fit = fit_gpd_tail(exceedances);

  std::vector<double> smoothed = raw;
  for (std::size_t j = 0; j < tail; ++j) {
    const double p = (static_cast<double>(j) + 0.5) / static_cast<double>(tail);
    const double v = cutoff + gpd_quantile(p, fit.k_hat, fit.sigma_hat);
    smoothed[order[n - tail + j]] = std::min(v, raw_max);
  }

  std::vector<double> lw(n);
  for (std::size_t i = 0; i < n; ++i) lw[i] = std::log(smoothed[i]);

  return PsisResult{w.with_log_values(std::move(lw), Provenance::kSmoothed), fit.k_hat,
                    fit.sigma_hat, fit.k_hat > 0.7, tail};
}

double BetaCalibration::apply(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw InputError("calibration input must lie in (0, 1)");
  return sigmoid(a * std::log(p) - b * std::log1p(-p) + c);
}

BetaCalibration beta_calibrate(std::span<const double> probs, std::span<const int> labels) {
  const std::size_t n = probs.size();
  if (labels.size() != n) throw InputError("probabilities and labels must have equal length");
  if (n < 2) throw InputError("calibration needs at least two holdout points");

  bool any_pos = false, any_neg = false;
  std::vector<double> x_aug(n * 3);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = probs[i];
    if (!(p > 0.0 && p < 1.0)) throw InputError("probabilities must lie strictly in (0, 1)");
    x_aug[i * 3 + 0] = std::log(p);
    x_aug[i * 3 + 1] = -std::log1p(-p);
    x_aug[i * 3 + 2] = 1.0;
    y[i] = labels[i] == 1 ? 1.0 : -1.0;
    (labels[i] == 1 ? any_pos : any_neg) = true;
  }
  if (!any_pos || !any_neg) throw InputError("calibration holdout must contain both classes");

  const std::vector<double> ones(n, 1.0);
  // Unregularized maximum likelihood; separable holdouts surface as a
  // NonConvergenceError from the solver.
  const auto beta = ratio::newton_logistic(x_aug, n, 3, y, ones, 0.0);
  return BetaCalibration{beta[0], beta[1], beta[2]};
}

}  // namespace dpiw::postprocess
