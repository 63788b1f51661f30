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

#include "dpiw/bayes/bayes.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/kernels/kernels.hpp"

namespace dpiw::bayes {

IwPosterior::IwPosterior(std::size_t param_dim, LogPrior log_prior, PriorSampler sample_prior,
                         LogLik log_lik, Dataset data, WeightVector weights)
    : dim_(param_dim),
      log_prior_(std::move(log_prior)),
      sample_prior_(std::move(sample_prior)),
      log_lik_(std::move(log_lik)),
      data_(std::move(data)),
      weights_(std::move(weights)),
      w_values_(weights_.values()) {
  if (weights_.size() != data_.rows())
    throw InputError("weights must have one entry per observation");
  if (dim_ < 1) throw InputError("parameter dimension must be positive");
}

void IwPosterior::set_bulk_loglik(std::function<double(const Eigen::VectorXd&)> fused) {
  bulk_ = std::move(fused);
}

double IwPosterior::log_kernel(const Eigen::VectorXd& theta) const {
  const double prior = log_prior_(theta);
  if (!std::isfinite(prior)) return prior;
  if (bulk_) return prior + bulk_(theta);
  double acc = 0.0;
  for (std::size_t i = 0; i < data_.rows(); ++i) {
    std::optional<int> label;
    if (data_.has_labels()) label = data_.label(i);
    acc += w_values_[i] * log_lik_(theta, data_.row(i), label);
  }
  return prior + acc;
}

double IwPosterior::log_kernel_checked(const Eigen::VectorXd& theta) const {
  const double prior = log_prior_(theta);
  if (!std::isfinite(prior)) throw Error("theta outside prior support");
  double acc = 0.0;
  for (std::size_t i = 0; i < data_.rows(); ++i) {
    std::optional<int> label;
    if (data_.has_labels()) label = data_.label(i);
    const double term = log_lik_(theta, data_.row(i), label);
    if (!std::isfinite(term))
      throw Error("non-finite log-likelihood at observation " + std::to_string(i));
    acc += w_values_[i] * term;
  }
  return prior + acc;
}

namespace {

// Split-Rhat over the kept draws: each chain's sample is halved, then the
// usual between/within variance ratio across the 2 * chains pieces.
Eigen::VectorXd split_rhat(const std::vector<Eigen::MatrixXd>& chains) {
  const std::size_t p = static_cast<std::size_t>(chains[0].cols());
  const std::size_t half = static_cast<std::size_t>(chains[0].rows()) / 2;
  std::vector<Eigen::MatrixXd> pieces;
  for (const auto& c : chains) {
    pieces.push_back(c.topRows(static_cast<Eigen::Index>(half)));
    pieces.push_back(c.bottomRows(static_cast<Eigen::Index>(half)));
  }
  const double m = static_cast<double>(pieces.size());
  const double n = static_cast<double>(half);

  Eigen::VectorXd rhat(static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) {
    double grand = 0.0;
    std::vector<double> means, vars;
    for (const auto& piece : pieces) {
      const auto col = piece.col(static_cast<Eigen::Index>(j));
      const double mean = col.mean();
      means.push_back(mean);
      vars.push_back((col.array() - mean).square().sum() / (n - 1.0));
      grand += mean;
    }
    grand /= m;
    double b = 0.0, w = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      b += (means[k] - grand) * (means[k] - grand);
      w += vars[k];
    }
    b *= n / (m - 1.0);
    w /= m;
    const double var_plus = (n - 1.0) / n * w + b / n;
    rhat(static_cast<Eigen::Index>(j)) = w > 0.0 ? std::sqrt(var_plus / w) : 1.0;
  }
  return rhat;
}

}  // namespace

Eigen::VectorXd PosteriorSamples::mean() const { return draws.colwise().mean(); }

Eigen::VectorXd PosteriorSamples::stddev() const {
  const Eigen::VectorXd mu = mean();
  const double n = static_cast<double>(draws.rows());
  return ((draws.rowwise() - mu.transpose()).array().square().colwise().sum() / (n - 1.0))
      .sqrt()
      .matrix();
}

Eigen::MatrixXd PosteriorSamples::covariance() const {
  const Eigen::MatrixXd centered = draws.rowwise() - mean().transpose();
  return centered.transpose() * centered / (static_cast<double>(draws.rows()) - 1.0);
}

void PosteriorSamples::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.precision(17);
  out << "chain";
  for (Eigen::Index j = 0; j < draws.cols(); ++j) out << ",theta" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    out << chain_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < draws.cols(); ++j) out << ',' << draws(i, j);
    out << '\n';
  }
}

PosteriorSamples sample_iw_posterior(const IwPosterior& posterior, const McmcConfig& cfg,
                                     RngStream rng) {
  if (cfg.chains < 1 || cfg.iterations < 20) throw InputError("MCMC needs chains and iterations");
  const auto p = static_cast<Eigen::Index>(posterior.param_dim());
  const std::size_t warmup = cfg.iterations / 2;
  const std::size_t kept = cfg.iterations - warmup;

  std::vector<Eigen::MatrixXd> chain_draws;
  double accepted_total = 0.0;

  for (std::size_t c = 0; c < cfg.chains; ++c) {
    auto chain_rng = rng.substream(c);

    Eigen::VectorXd theta;
    double lp = -std::numeric_limits<double>::infinity();
    for (int tries = 0; tries < 200 && !std::isfinite(lp); ++tries) {
      theta = posterior.draw_from_prior(chain_rng);
      lp = posterior.log_kernel(theta);
    }
    if (!std::isfinite(lp)) throw Error("could not initialize a chain inside the support");

    double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(p)));
    Eigen::MatrixXd prop_chol = Eigen::MatrixXd::Identity(p, p);
    Eigen::VectorXd run_mean = theta;
    Eigen::MatrixXd run_cov = Eigen::MatrixXd::Identity(p, p) * 1e-6;

    Eigen::MatrixXd kept_draws(static_cast<Eigen::Index>(kept), p);
    std::size_t accepted_kept = 0;

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
      Eigen::VectorXd z(p);
      for (Eigen::Index j = 0; j < p; ++j) z(j) = chain_rng.next_normal();
      const Eigen::VectorXd proposal = theta + std::exp(log_scale) * (prop_chol * z);
      const double lp_prop = posterior.log_kernel(proposal);
      const double log_alpha = lp_prop - lp;
      const double alpha = std::isfinite(log_alpha) ? std::min(1.0, std::exp(log_alpha)) : 0.0;
      if (chain_rng.next_uniform() < alpha) {
        theta = proposal;
        lp = lp_prop;
        if (t > warmup) ++accepted_kept;
      }

      if (t <= warmup) {
        // Robbins-Monro on the scale plus a running covariance estimate.
        const double rate = std::pow(static_cast<double>(t), -0.6);
        log_scale += rate * (alpha - cfg.target_acceptance);
        const Eigen::VectorXd delta = theta - run_mean;
        run_mean += delta / static_cast<double>(t + 1);
        run_cov += (delta * (theta - run_mean).transpose() - run_cov) /
                   static_cast<double>(t + 1);
        if (t >= 100 && t % 100 == 0) {
          Eigen::LLT<Eigen::MatrixXd> llt(
              run_cov + 1e-9 * Eigen::MatrixXd::Identity(p, p));
          if (llt.info() == Eigen::Success) prop_chol = llt.matrixL();
        }
      } else {
        kept_draws.row(static_cast<Eigen::Index>(t - warmup - 1)) = theta.transpose();
      }
    }
    accepted_total += static_cast<double>(accepted_kept) / static_cast<double>(kept);
    chain_draws.push_back(std::move(kept_draws));
  }

  PosteriorSamples out;
  out.chains = cfg.chains;
  out.acceptance_rate = accepted_total / static_cast<double>(cfg.chains);
  out.draws.resize(static_cast<Eigen::Index>(kept * cfg.chains), p);
  out.chain_ids.resize(kept * cfg.chains);
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    out.draws.middleRows(static_cast<Eigen::Index>(c * kept), static_cast<Eigen::Index>(kept)) =
        chain_draws[c];
    for (std::size_t i = 0; i < kept; ++i) out.chain_ids[c * kept + i] = static_cast<int>(c);
  }
  out.rhat = split_rhat(chain_draws);
  out.converged = (out.rhat.array() <= 1.05).all();
  return out;
}

IwPosterior gaussian_mean_posterior(Dataset data, WeightVector weights, double prior_mean,
                                    double prior_var) {
  if (!(prior_var > 0.0)) throw InputError("prior variance must be positive");
  if (data.cols() != 1) throw InputError("gaussian location model is one-dimensional");

  // Weighted sufficient statistics make the kernel O(1) per evaluation.
  const auto w = weights.values();
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double x = data.at(i, 0);
    s0 += w[i];
    s1 += w[i] * x;
    s2 += w[i] * x * x;
  }

  IwPosterior post(
      1,
      [prior_mean, prior_var](const Eigen::VectorXd& th) {
        const double d = th(0) - prior_mean;
        return -0.5 * d * d / prior_var;
      },
      [prior_mean, prior_var](RngStream& r) {
        Eigen::VectorXd th(1);
        th(0) = prior_mean + std::sqrt(prior_var) * r.next_normal();
        return th;
      },
      [](const Eigen::VectorXd& th, std::span<const double> x, std::optional<int>) {
        const double d = x[0] - th(0);
        return -0.5 * d * d - 0.5 * std::log(2.0 * std::numbers::pi);
      },
      std::move(data), std::move(weights));
  post.set_bulk_loglik([s0, s1, s2](const Eigen::VectorXd& th) {
    const double t = th(0);
    return -0.5 * (s2 - 2.0 * t * s1 + t * t * s0) -
           0.5 * s0 * std::log(2.0 * std::numbers::pi);
  });
  return post;
}

GaussianPosterior gaussian_mean_conjugate(const Dataset& data, const WeightVector& weights,
                                          double prior_mean, double prior_var) {
  const auto w = weights.values();
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    s0 += w[i];
    s1 += w[i] * data.at(i, 0);
  }
  const double precision = 1.0 / prior_var + s0;
  return {(prior_mean / prior_var + s1) / precision, 1.0 / precision};
}

IwPosterior logistic_posterior(Dataset data, WeightVector weights, double prior_var) {
  if (!data.has_labels()) throw InputError("logistic posterior needs labelled data");
  const std::size_t d = data.cols();
  const auto p = static_cast<Eigen::Index>(d + 1);

  // Cache the design matrix with the intercept column appended last and
  // labels as +-1 signs.
  const std::size_t n = data.rows();
  auto design = std::make_shared<std::vector<double>>(n * (d + 1));
  auto signs = std::make_shared<std::vector<double>>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) (*design)[i * (d + 1) + j] = data.at(i, j);
    (*design)[i * (d + 1) + d] = 1.0;
    (*signs)[i] = data.label(i) == 1 ? 1.0 : -1.0;
  }
  auto w_vals = std::make_shared<std::vector<double>>(weights.values());

  IwPosterior post(
      d + 1,
      [prior_var, p](const Eigen::VectorXd& th) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) acc += th(j) * th(j);
        return -0.5 * acc / prior_var;
      },
      [prior_var, p](RngStream& r) {
        Eigen::VectorXd th(p);
        for (Eigen::Index j = 0; j < p; ++j) th(j) = std::sqrt(prior_var) * r.next_normal();
        return th;
      },
      [](const Eigen::VectorXd& th, std::span<const double> x, std::optional<int> label) {
        if (!label) throw Error("logistic likelihood needs a label");
        double t = th(th.size() - 1);
        for (std::size_t j = 0; j < x.size(); ++j) t += th(static_cast<Eigen::Index>(j)) * x[j];
        return -log1pexp(*label == 1 ? -t : t);
      },
      std::move(data), std::move(weights));

  post.set_bulk_loglik([design, signs, w_vals, n, d](const Eigen::VectorXd& th) {
    double acc = 0.0;
    const double* dm = design->data();
    for (std::size_t i = 0; i < n; ++i) {
      const double t = kernels::dot(dm + i * (d + 1), th.data(), d + 1);
      acc += (*w_vals)[i] * -log1pexp(-(*signs)[i] * t);
    }
    return acc;
  });
  return post;
}

Eigen::VectorXd logistic_loglik_gradient(std::span<const double> x, std::optional<int> label,
                                         const Eigen::VectorXd& theta) {
  if (!label) throw Error("logistic score needs a label");
  const auto p = theta.size();
  double t = theta(p - 1);
  for (std::size_t j = 0; j < x.size(); ++j) t += theta(static_cast<Eigen::Index>(j)) * x[j];
  // Gradient of -log f: (sigmoid(t) - y) * [x, 1].
  const double residual = sigmoid(t) - (*label == 1 ? 1.0 : 0.0);
  Eigen::VectorXd g(p);
  for (std::size_t j = 0; j < x.size(); ++j) g(static_cast<Eigen::Index>(j)) = residual * x[j];
  g(p - 1) = residual;
  return g;
}

KldEstimate expected_posterior_kld(const KldModelSpec& model, std::size_t n, std::size_t mc_reps,
                                   RngStream rng, std::size_t posterior_draws) {
  if (n < 1 || mc_reps < 2) throw InputError("need n >= 1 and at least two replications");
  if (posterior_draws < 1) throw InputError("need at least one posterior draw");

  std::vector<double> reps(mc_reps);
  std::vector<double> data(n);
  for (std::size_t r = 0; r < mc_reps; ++r) {
    auto rep_rng = rng.substream(r);
    for (std::size_t i = 0; i < n; ++i) data[i] = model.sample_data(rep_rng);
    const auto thetas = model.sample_posterior(data, posterior_draws, rep_rng);

    double acc = 0.0;
    for (const double theta : thetas) {
      double avg_loglik = 0.0;
      for (const double x : data) avg_loglik += model.log_lik(theta, x);
      avg_loglik /= static_cast<double>(n);
      acc += avg_loglik - model.expected_log_lik(theta);
    }
    reps[r] = static_cast<double>(n) * acc / static_cast<double>(thetas.size());
  }

  KldEstimate est;
  for (double v : reps) est.value += v;
  est.value /= static_cast<double>(mc_reps);
  double var = 0.0;
  for (double v : reps) var += (v - est.value) * (v - est.value);
  var /= static_cast<double>(mc_reps - 1);
  est.std_error = std::sqrt(var / static_cast<double>(mc_reps));
  return est;
}

KldModelSpec conjugate_gaussian_kld_model(double data_mean, double prior_mean, double prior_var) {
  if (!(prior_var > 0.0)) throw InputError("prior variance must be positive");
  KldModelSpec spec;
  spec.sample_data = [data_mean](RngStream& r) { return data_mean + r.next_normal(); };
  spec.sample_posterior = [prior_mean, prior_var](std::span<const double> data,
                                                  std::size_t draws, RngStream& r) {
    double sum = 0.0;
    for (double x : data) sum += x;
    const double precision = 1.0 / prior_var + static_cast<double>(data.size());
    const double post_mean = (prior_mean / prior_var + sum) / precision;
    const double post_sd = std::sqrt(1.0 / precision);
    std::vector<double> thetas(draws);
    for (double& t : thetas) t = post_mean + post_sd * r.next_normal();
    return thetas;
  };
  spec.log_lik = [](double theta, double x) {
    const double d = x - theta;
    return -0.5 * d * d - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  spec.expected_log_lik = [data_mean](double theta) {
    const double d = data_mean - theta;
    return -0.5 * (1.0 + d * d) - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  return spec;
}

}  // namespace dpiw::bayes
