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

#include "dpiw/privacy/mechanisms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dpiw/core/error.hpp"

namespace dpiw::privacy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Relative guard against the strict inequalities rho < 1 and rho < 1/2
// dissolving in floating-point rounding.
constexpr double kStrictGuard = 1.0 - 1e-12;

void check_release_args(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                        std::size_t n_release) {
  if (d < 1 || n_private < 1 || n_release < 1)
    throw InputError("d, n_private and n_release must be positive");
  if (!(lambda > 0.0) || !(epsilon > 0.0))
    throw InputError("lambda and epsilon must be positive");
}

}  // namespace

LogLaplaceMoments log_laplace_moments(double mu, double scale) {
  if (!(scale > 0.0)) throw InputError("log-Laplace scale must be positive");
  LogLaplaceMoments m;
  if (scale < 1.0) {
    m.mean = std::exp(mu) / (1.0 - scale * scale);
    m.mean_finite = true;
  } else {
    m.mean = kInf;
  }
  if (scale < 0.5) {
    const double s2 = scale * scale;
    m.variance = std::exp(2.0 * mu) * (1.0 / (1.0 - 4.0 * s2) - 1.0 / ((1.0 - s2) * (1.0 - s2)));
    m.variance_finite = true;
  } else {
    m.variance = kInf;
  }
  return m;
}

double laplace_scale_rho(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                         std::size_t n_release) {
  check_release_args(d, n_private, lambda, epsilon, n_release);
  const double rho = 2.0 * std::sqrt(static_cast<double>(d)) * static_cast<double>(n_release) /
                     (static_cast<double>(n_private) * lambda * epsilon);
  if (rho >= kStrictGuard) {
    long feasible = 0;
    try {
      feasible = max_releasable_weights(d, n_private, lambda, epsilon, false);
    } catch (const InfeasibleReleaseError&) {
    }
    throw InfeasibleReleaseError(
        "unbiased Laplace noising needs rho < 1, got rho = " + std::to_string(rho), feasible);
  }
  return rho;
}

double gaussian_scale_gamma(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                            double delta, std::size_t n_release) {
  check_release_args(d, n_private, lambda, epsilon, n_release);
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  const double eps_per = epsilon / static_cast<double>(n_release);
  const double base = static_cast<double>(n_private) * lambda * eps_per;
  return std::sqrt(8.0 * static_cast<double>(d) / (base * base) * std::log(2.0 / delta));
}

long max_releasable_weights(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                            bool require_finite_variance) {
  check_release_args(d, n_private, lambda, epsilon, 1);
  const double threshold = require_finite_variance ? 0.5 : 1.0;
  const double per_release =
      2.0 * std::sqrt(static_cast<double>(d)) / (static_cast<double>(n_private) * lambda * epsilon);
  long n = static_cast<long>(std::floor(threshold / per_release));
  while (n >= 1 && static_cast<double>(n) * per_release >= threshold * kStrictGuard) --n;
  if (n < 1)
    throw InfeasibleReleaseError("budget cannot release even one weight", 0);
  return n;
}

WeightVector privatize_weights_laplace(const WeightVector& w, double rho,
                                       double log_weight_sensitivity, RngStream rng) {
  if (!(rho > 0.0)) throw InputError("rho must be positive");
  if (rho >= 1.0)
    throw InfeasibleReleaseError("rho >= 1 would bias the estimator", 0);
  if (!(log_weight_sensitivity > 0.0)) throw InputError("sensitivity must be positive");
  if (w.provenance() != Provenance::kEstimated && w.provenance() != Provenance::kCalibrated)
    throw InputError("only classifier-estimated weights can be output-noised");

  const double mu = std::log1p(-rho * rho);
  std::vector<double> lw = w.log_values();
  for (std::size_t i = 0; i < lw.size(); ++i) {
    auto sub = rng.substream(i);
    lw[i] += sub.next_laplace(mu, rho);
  }

  const auto moments = log_laplace_moments(mu, rho);
  const double eps_per = log_weight_sensitivity / rho;
  PrivacySpend spend{static_cast<double>(lw.size()) * eps_per, 0.0,
                     "output-noised weights, Laplace(scale " + std::to_string(rho) + ") x" +
                         std::to_string(lw.size())};
  return w.with_noise_metadata(moments.variance, !moments.variance_finite, std::move(spend),
                               Provenance::kOutputLaplace, std::move(lw));
}

WeightVector privatize_weights_gaussian(const WeightVector& w, double gamma,
                                        double log_weight_sensitivity, double delta,
                                        RngStream rng) {
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (!(log_weight_sensitivity > 0.0)) throw InputError("sensitivity must be positive");
  if (w.provenance() != Provenance::kEstimated && w.provenance() != Provenance::kCalibrated)
    throw InputError("only classifier-estimated weights can be output-noised");

  const double mu = -0.5 * gamma * gamma;
  std::vector<double> lw = w.log_values();
  for (std::size_t i = 0; i < lw.size(); ++i) {
    auto sub = rng.substream(i);
    lw[i] += sub.next_normal(mu, gamma);
  }

  const double var_exp = std::expm1(gamma * gamma);
  const double eps_per = log_weight_sensitivity * std::sqrt(2.0 * std::log(2.0 / delta)) / gamma;
  PrivacySpend spend{static_cast<double>(lw.size()) * eps_per, delta,
                     "output-noised weights, Gaussian(scale " + std::to_string(gamma) + ") x" +
                         std::to_string(lw.size())};
  return w.with_noise_metadata(var_exp, false, std::move(spend), Provenance::kOutputGaussian,
                               std::move(lw));
}

ratio::LogisticModel beta_noised_model(const ratio::LogisticModel& model, double epsilon,
                                       RngStream rng) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  const double scale = model.sensitivity() / epsilon;
  ratio::LogisticModel noised = model;
  for (std::size_t j = 0; j < noised.beta.size(); ++j) {
    auto sub = rng.substream(j);
    noised.beta[j] += sub.next_laplace(0.0, scale);
  }
  return noised;
}

double beta_noise_variance(std::size_t d, std::size_t n_private, double lambda, double epsilon) {
  if (n_private < 1 || !(lambda > 0.0) || !(epsilon > 0.0))
    throw InputError("n_private, lambda and epsilon must be positive");
  const double base = static_cast<double>(n_private) * lambda * epsilon;
  const double dd = static_cast<double>(d);
  return 4.0 * (dd + 1.0) * dd / (base * base);
}

}  // namespace dpiw::privacy
