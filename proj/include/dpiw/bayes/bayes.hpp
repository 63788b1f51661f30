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
#include <vector>

#include <json.hpp>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/rng.hpp"
#include "dpiw/core/weights.hpp"

namespace dpiw::bayes {

/// Weighted belief update: the posterior kernel is
/// log prior(theta) + sum_i w_i log f(x_i | theta). With unit weights this
/// is standard Bayesian updating; with density-ratio weights it retargets
/// inference from the synthetic law to the data-generating one.
class IwPosterior {
 public:
  using LogPrior = std::function<double(const Eigen::VectorXd&)>;
  using PriorSampler = std::function<Eigen::VectorXd(RngStream&)>;
  using LogLik = std::function<double(const Eigen::VectorXd&, std::span<const double> x,
                                      std::optional<int> label)>;

  IwPosterior(std::size_t param_dim, LogPrior log_prior, PriorSampler sample_prior,
              LogLik log_lik, Dataset data, WeightVector weights);

  std::size_t param_dim() const { return dim_; }
  const Dataset& data() const { return data_; }
  const WeightVector& weights() const { return weights_; }

  /// Optional fused evaluator of sum_i w_i log f(x_i | theta); the sampler
  /// prefers it when set (built-in models install closed-form or
  /// vectorized versions).
  void set_bulk_loglik(std::function<double(const Eigen::VectorXd&)> fused);

  /// Log posterior kernel (up to an additive constant).
  double log_kernel(const Eigen::VectorXd& theta) const;

  /// Per-observation evaluation that names the offending observation when
  /// a likelihood term is non-finite.
  double log_kernel_checked(const Eigen::VectorXd& theta) const;

  Eigen::VectorXd draw_from_prior(RngStream& rng) const { return sample_prior_(rng); }

 private:
  std::size_t dim_;
  LogPrior log_prior_;
  PriorSampler sample_prior_;
  LogLik log_lik_;
  Dataset data_;
  WeightVector weights_;
  std::vector<double> w_values_;
  std::function<double(const Eigen::VectorXd&)> bulk_;
};

struct McmcConfig {
  std::size_t chains = 4;
  std::size_t iterations = 5000;   // per chain, first half discarded as warm-up
  double target_acceptance = 0.234;
};

struct PosteriorSamples {
  Eigen::MatrixXd draws;        // kept draws, all chains stacked
  std::vector<int> chain_ids;   // one per row of draws
  std::size_t chains = 0;
  double acceptance_rate = 0.0;
  Eigen::VectorXd rhat;         // split statistic per dimension
  bool converged = false;       // all rhat <= 1.05

  Eigen::VectorXd mean() const;
  Eigen::VectorXd stddev() const;
  Eigen::MatrixXd covariance() const;
  void write_csv(const std::string& path) const;
};

/// Adaptive random-walk Metropolis: chains start from prior draws, the
/// proposal covariance and scale adapt during warm-up toward the target
/// acceptance rate, and split-Rhat is computed on the kept halves. A run
/// with any rhat above 1.05 is returned with converged = false rather than
/// thrown.
PosteriorSamples sample_iw_posterior(const IwPosterior& posterior, const McmcConfig& cfg,
                                     RngStream rng);

/// Gaussian location model x ~ N(theta, 1) with a N(prior_mean, prior_var)
/// prior; the weighted posterior is conjugate, which the tests exploit.
IwPosterior gaussian_mean_posterior(Dataset data, WeightVector weights, double prior_mean,
                                    double prior_var);

/// Closed-form weighted conjugate posterior for the same model.
struct GaussianPosterior {
  double mean = 0.0;
  double variance = 0.0;
};
GaussianPosterior gaussian_mean_conjugate(const Dataset& data, const WeightVector& weights,
                                          double prior_mean, double prior_var);

/// Bayesian logistic regression on labelled data with a N(0, prior_var I)
/// prior; theta has one coefficient per feature plus an intercept last.
IwPosterior logistic_posterior(Dataset data, WeightVector weights, double prior_var = 10.0);

/// Gradient of the negative logistic log-likelihood, for the effective
/// sample size diagnostic.
Eigen::VectorXd logistic_loglik_gradient(std::span<const double> x, std::optional<int> label,
                                         const Eigen::VectorXd& theta);

enum class WeightScheme { kNone, kTrue, kLogReg, kOutputLaplace };

/// One seed of the labelled-Gaussian posterior comparison: synthetic data
/// drawn from the gamma-mixture generator, weighted per scheme, posterior
/// sampled on the synthetic data and on a private sample of equal size.
struct BayesExperimentRow {
  std::uint64_t seed = 0;
  double mse_to_generating = 0.0;   // mean |theta - theta_dgp|^2 over draws
  double mahalanobis_private = 0.0; // posterior-mean gap, private-run metric
  double posterior_trace_var = 0.0;
  bool converged = false;
  std::size_t n_used = 0;
};

struct BayesExperimentConfig {
  double gamma = 1.0;
  std::size_t n = 2000;
  std::size_t seeds = 40;
  WeightScheme scheme = WeightScheme::kTrue;
  double epsilon = 6.0;     // weight-mechanism budget (output noising)
  double lambda = 0.1;      // ratio-model regularization
  McmcConfig mcmc{4, 2000, 0.234};
};

std::vector<BayesExperimentRow> bayes_logistic_experiment(const BayesExperimentConfig& cfg,
                                                          RngStream rng);

/// Model interface for the finite-sample posterior divergence diagnostic:
/// a data sampler for the generating law, a posterior sampler given one
/// dataset, the pointwise log-likelihood and its expectation under fresh
/// draws from the generating law (exact when available).
struct KldModelSpec {
  std::function<double(RngStream&)> sample_data;
  std::function<std::vector<double>(std::span<const double> data, std::size_t draws, RngStream&)>
      sample_posterior;
  std::function<double(double theta, double x)> log_lik;
  std::function<double(double theta)> expected_log_lik;
};

/// Expected gap between the real-data posterior and its weighted synthetic
/// approximation at equal sample sizes:
/// n * E_data[ E_posterior[ mean_i log f(x_i; theta)
///                          - E_fresh[log f(x'; theta)] ] ],
/// estimated by nested Monte Carlo over mc_reps dataset draws of size n.
struct KldEstimate {
  double value = 0.0;
  double std_error = 0.0;
};
KldEstimate expected_posterior_kld(const KldModelSpec& model, std::size_t n, std::size_t mc_reps,
                                   RngStream rng, std::size_t posterior_draws = 64);

/// Gaussian location model x ~ N(theta, 1) with data mean data_mean and a
/// N(prior_mean, prior_var) prior; posterior sampling is exact conjugate
/// and the fresh-draw expectation is closed-form.
KldModelSpec conjugate_gaussian_kld_model(double data_mean, double prior_mean, double prior_var);

}  // namespace dpiw::bayes
