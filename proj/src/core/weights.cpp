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

#include "dpiw/core/weights.hpp"

#include <cmath>

#include "dpiw/core/error.hpp"
#include "dpiw/kernels/kernels.hpp"

namespace dpiw {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kTrue: return "true";
    case Provenance::kEstimated: return "estimated";
    case Provenance::kBetaNoised: return "beta_noised";
    case Provenance::kOutputLaplace: return "output_laplace";
    case Provenance::kOutputGaussian: return "output_gaussian";
    case Provenance::kSmoothed: return "smoothed";
    case Provenance::kCalibrated: return "calibrated";
    case Provenance::kUniform: return "uniform";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "true") return Provenance::kTrue;
  if (s == "estimated") return Provenance::kEstimated;
  if (s == "beta_noised") return Provenance::kBetaNoised;
  if (s == "output_laplace") return Provenance::kOutputLaplace;
  if (s == "output_gaussian") return Provenance::kOutputGaussian;
  if (s == "smoothed") return Provenance::kSmoothed;
  if (s == "calibrated") return Provenance::kCalibrated;
  if (s == "uniform") return Provenance::kUniform;
  throw InputError("unknown weight provenance '" + s + "'");
}

WeightVector WeightVector::uniform(std::size_t n) {
  WeightVector w;
  w.log_w_.assign(n, 0.0);
  w.prov_ = Provenance::kUniform;
  return w;
}

WeightVector WeightVector::from_log(std::vector<double> log_weights, Provenance prov,
                                    std::optional<PrivacySpend> spend) {
  for (double lw : log_weights)
    if (!std::isfinite(lw)) throw InputError("log-weights must be finite");
  WeightVector w;
  w.log_w_ = std::move(log_weights);
  w.prov_ = prov;
  w.spend_ = std::move(spend);
  return w;
}

std::vector<double> WeightVector::values() const {
  std::vector<double> v(log_w_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(log_w_[i]);
  return v;
}

std::vector<double> WeightVector::values_mean_one() const {
  auto v = values();
  const double mean = kernels::sum(v.data(), v.size()) / static_cast<double>(v.size());
  if (!(mean > 0.0) || !std::isfinite(mean)) throw Error("weight mean is not positive and finite");
  for (double& x : v) x /= mean;
  return v;
}

std::vector<double> WeightVector::normalized() const {
  auto v = values();
  const double total = kernels::sum(v.data(), v.size());
  if (!(total > 0.0) || !std::isfinite(total)) throw Error("weight sum is not positive and finite");
  for (double& x : v) x /= total;
  return v;
}

WeightVector WeightVector::with_log_values(std::vector<double> log_weights,
                                           Provenance prov) const {
  auto out = from_log(std::move(log_weights), prov, spend_);
  out.var_exp_noise_ = var_exp_noise_;
  out.infinite_variance_ = infinite_variance_;
  return out;
}

WeightVector WeightVector::with_noise_metadata(double var_exp_noise, bool infinite_variance,
                                               PrivacySpend spend, Provenance prov,
                                               std::vector<double> log_weights) const {
  auto out = from_log(std::move(log_weights), prov, std::move(spend));
  out.var_exp_noise_ = var_exp_noise;
  out.infinite_variance_ = infinite_variance;
  return out;
}

WeightVector WeightVector::subset(const std::vector<std::size_t>& indices) const {
  std::vector<double> lw(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) lw[k] = log_w_[indices[k]];
  WeightVector out = *this;
  out.log_w_ = std::move(lw);
  return out;
}

WeightVector WeightVector::head(std::size_t n) const {
  WeightVector out = *this;
  out.log_w_.resize(std::min(n, log_w_.size()));
  return out;
}

}  // namespace dpiw
