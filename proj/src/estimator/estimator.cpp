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

#include "dpiw/estimator/estimator.hpp"

#include <cmath>
#include <limits>

#include "dpiw/core/error.hpp"
#include "dpiw/kernels/kernels.hpp"

namespace dpiw::estimator {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

nlohmann::ordered_json EstimateReport::to_json() const {
  nlohmann::ordered_json j;
  j["value"] = value;
  if (std::isfinite(variance))
    j["variance"] = variance;
  else
    j["variance"] = "infinite";
  j["n"] = n_used;
  j["provenance"] = to_string(weight_provenance);
  if (spend) {
    j["privacy"] = {{"epsilon", spend->epsilon},
                    {"delta", spend->delta},
                    {"mechanism", spend->mechanism}};
  }
  return j;
}

EstimateReport importance_estimate(std::span<const double> h_values, const WeightVector& w,
                                   bool self_normalize) {
  const std::size_t n = w.size();
  if (h_values.size() != n) throw InputError("h and weights must have equal length");
  if (n < 1) throw InputError("need at least one observation");

  const auto weights = w.values();
  const double n_d = static_cast<double>(n);
  const double sum_wh = kernels::weighted_sum(weights.data(), h_values.data(), n);

  EstimateReport report;
  report.n_used = n;
  report.weight_provenance = w.provenance();
  report.spend = w.spend();

  if (self_normalize) {
    const double sum_w = kernels::sum(weights.data(), n);
    if (sum_w == 0.0) throw Error("cannot self-normalize: weights sum to zero");
    report.value = sum_wh / sum_w;
    // Delta-method variance of the ratio estimator.
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = weights[i] * (h_values[i] - report.value);
      acc += t * t;
    }
    report.variance = acc / (sum_w * sum_w);
  } else {
    report.value = sum_wh / n_d;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = weights[i] * h_values[i] - report.value;
      acc += t * t;
    }
    const double sample_var = n > 1 ? acc / (n_d - 1.0) : 0.0;
    report.variance = sample_var / n_d;
  }

  if (w.infinite_variance_warning()) {
    report.variance = kInf;
  } else if (w.noise_factor_variance() > 0.0) {
    // The weights were noised after estimation; report the inflated
    // variance instead of the naive plug-in value.
    report.variance += w.noise_factor_variance() *
                       kernels::weighted_sq_sum(weights.data(), h_values.data(), n) /
                       (n_d * n_d);
  }
  return report;
}

double noisy_estimator_variance(std::span<const double> h_values, const WeightVector& w,
                                double var_exp_noise) {
  const std::size_t n = w.size();
  if (h_values.size() != n) throw InputError("h and weights must have equal length");
  if (!std::isfinite(var_exp_noise)) return kInf;
  if (var_exp_noise < 0.0) throw InputError("noise variance must be nonnegative");

  const auto weights = w.values();
  const double n_d = static_cast<double>(n);
  const double mean_wh = kernels::weighted_sum(weights.data(), h_values.data(), n) / n_d;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = weights[i] * h_values[i] - mean_wh;
    acc += t * t;
  }
  const double sample_var = n > 1 ? acc / (n_d - 1.0) : 0.0;
  const double mean_sq = kernels::weighted_sq_sum(weights.data(), h_values.data(), n) / n_d;
  return (sample_var + var_exp_noise * mean_sq) / n_d;
}

EssResult effective_sample_size(const Dataset& synth, const WeightVector& w,
                                const LogLikGradient& grad, const Eigen::VectorXd& theta_hat,
                                bool use_determinant) {
  const std::size_t n = synth.rows();
  if (w.size() != n) throw InputError("weights must have one entry per synthetic row");
  const auto weights = w.values_mean_one();

  const auto p = theta_hat.size();
  Eigen::MatrixXd plain = Eigen::MatrixXd::Zero(p, p);     // sum w g g'
  Eigen::MatrixXd weighted = Eigen::MatrixXd::Zero(p, p);  // sum (w g)(w g)'
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<int> label;
    if (synth.has_labels()) label = synth.label(i);
    const Eigen::VectorXd g = grad(synth.row(i), label, theta_hat);
    if (g.size() != p) throw InputError("gradient dimension does not match theta");
    if (!g.allFinite()) throw Error("non-finite score at observation " + std::to_string(i));
    plain.noalias() += weights[i] * g * g.transpose();
    weighted.noalias() += (weights[i] * weights[i]) * g * g.transpose();
  }

  EssResult result;
  double ratio = 0.0;
  if (use_determinant) {
    result.scalarization = "determinant";
    const double det_plain = plain.determinant();
    const double det_weighted = weighted.determinant();
    if (!(det_weighted > 0.0) || !(det_plain > 0.0))
      throw Error("singular score second-moment matrix; more data or regularization needed");
    ratio = std::pow(det_plain / det_weighted, 1.0 / static_cast<double>(p));
  } else {
    result.scalarization = "trace";
    const double tr_plain = plain.trace();
    const double tr_weighted = weighted.trace();
    if (!(tr_weighted > 0.0) || !(tr_plain > 0.0))
      throw Error("singular score second-moment matrix; more data or regularization needed");
    ratio = tr_plain / tr_weighted;
  }
  result.variance_ratio = ratio;
  result.n_effective = static_cast<double>(n) * ratio * ratio;
  return result;
}

}  // namespace dpiw::estimator
