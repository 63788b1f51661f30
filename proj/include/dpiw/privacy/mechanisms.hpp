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

#include "dpiw/core/rng.hpp"
#include "dpiw/core/weights.hpp"
#include "dpiw/ratio/logistic.hpp"

namespace dpiw::privacy {

/// Additive noise on log-weights, i.e. multiplicative noise on weights.
/// Unbiasedness of downstream importance sampling requires E[exp(zeta)] = 1,
/// which fixes the location: log(1 - scale^2) for Laplace, -scale^2/2 for
/// Gaussian.
struct NoiseSpec {
  enum class Family { kLaplace, kGaussian };
  Family family = Family::kLaplace;
  double location = 0.0;
  double scale = 0.0;
};

struct LogLaplaceMoments {
  double mean = 0.0;
  bool mean_finite = false;      // requires scale < 1
  double variance = 0.0;
  bool variance_finite = false;  // requires scale < 1/2
};

/// Mean and variance of exp(zeta) for zeta ~ Laplace(mu, scale):
/// mean exp(mu) / (1 - scale^2), variance
/// exp(2 mu) (1/(1 - 4 scale^2) - 1/(1 - scale^2)^2). Infinite moments are
/// reported through the flags, never thrown.
LogLaplaceMoments log_laplace_moments(double mu, double scale);

/// Laplace scale for releasing n_release log-weights of an L2-regularized
/// logistic ratio model under a total budget epsilon:
/// rho = 2 sqrt(d) n_release / (n_private lambda epsilon). Values >= 1 make
/// calibrated unbiased noising impossible and raise InfeasibleReleaseError
/// carrying the largest feasible count.
double laplace_scale_rho(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                         std::size_t n_release);

/// Gaussian scale for the same release:
/// gamma = sqrt(8 d / (n_private lambda eps_per)^2 * log(2 / delta)) with
/// eps_per = epsilon / n_release.
double gaussian_scale_gamma(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                            double delta, std::size_t n_release);

/// Largest release count keeping rho < 1 (or < 1/2 when finite estimator
/// variance is required). Errors when not even one weight fits the budget.
long max_releasable_weights(std::size_t d, std::size_t n_private, double lambda, double epsilon,
                            bool require_finite_variance);

/// Adds i.i.d. Laplace(log(1 - rho^2), rho) draws to each log-weight, from
/// per-index substreams. log_weight_sensitivity is the bound on any single
/// log-weight's change across neighboring private datasets (the fitted
/// model's sensitivity()); it prices the attached spend
/// (n epsilon_per_weight, 0) with epsilon_per_weight = sensitivity / rho.
/// For rho >= 1/2 the multiplicative noise variance is infinite: the result
/// carries a mandatory warning flag and an infinite variance record.
WeightVector privatize_weights_laplace(const WeightVector& w, double rho,
                                       double log_weight_sensitivity, RngStream rng);

/// Gaussian counterpart with zeta ~ N(-gamma^2/2, gamma^2); spend
/// (n epsilon_per_weight, delta) with
/// epsilon_per_weight = sensitivity sqrt(2 log(2/delta)) / gamma. The
/// recorded multiplicative variance is the exact exp(gamma^2) - 1 (gamma^2
/// is its small-gamma approximation).
WeightVector privatize_weights_gaussian(const WeightVector& w, double gamma,
                                        double log_weight_sensitivity, double delta,
                                        RngStream rng);

/// Coefficient perturbation baseline: beta + i.i.d. Laplace(0,
/// 2 sqrt(d) / (n_private lambda epsilon)) per coordinate, spending
/// (epsilon, 0). Weights derived from the noised model are biased for the
/// density ratio; prefer the output-noised mechanisms when unbiasedness
/// matters.
ratio::LogisticModel beta_noised_model(const ratio::LogisticModel& model, double epsilon,
                                       RngStream rng);

/// Additive variance term of the coefficient-noised estimator:
/// 4 (d+1) d / (n_private lambda epsilon)^2.
double beta_noise_variance(std::size_t d, std::size_t n_private, double lambda, double epsilon);

}  // namespace dpiw::privacy
