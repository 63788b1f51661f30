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
#include <optional>
#include <span>
#include <vector>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/privacy_ledger.hpp"
#include "dpiw/core/rng.hpp"

namespace dpiw::ratio {

/// Fully connected classifier: rectifier hidden layers, logistic output.
class MlpModel {
 public:
  MlpModel(std::size_t in_dim, std::vector<std::size_t> hidden = {64, 64});

  std::size_t in_dim() const { return in_dim_; }
  const std::vector<std::size_t>& hidden() const { return hidden_; }
  std::size_t param_count() const { return params_.size(); }
  const std::vector<double>& params() const { return params_; }
  std::vector<double>& mutable_params() { return params_; }

  double logit(std::span<const double> x) const;
  double prob(std::span<const double> x) const;

  /// Logistic loss at one example and its gradient w.r.t. all parameters
  /// (packed like params()); grad must have param_count() entries.
  double loss_and_gradient(std::span<const double> x, int label, double* grad) const;

  void init_parameters(RngStream& rng);

  const std::optional<PrivacySpend>& training_spend() const { return spend_; }
  void set_training_spend(PrivacySpend s) { spend_ = std::move(s); }

 private:
  std::size_t in_dim_;
  std::vector<std::size_t> hidden_;
  std::vector<std::size_t> offsets_;  // per-layer weight/bias offsets into params_
  std::vector<double> params_;
  std::optional<PrivacySpend> spend_;
};

/// Relaxed noisy-SGD settings for training on a private/synthetic mix.
struct DpSgdConfig {
  std::size_t lot_size = 256;      // L: expected lot size
  double clip_norm = 1.0;          // C: per-example gradient bound
  double noise_multiplier = 5.2;   // sigma: Gaussian scale in units of C
  std::size_t steps = 300;         // T
  double learning_rate = 0.1;      // eta
  double delta = 1e-5;             // per-step delta target for the accountant
};

/// Trains real (label 1) against synthetic (label 0). Each step samples a
/// lot with probability L / (n_real + n_synth) per example, clips every
/// per-example gradient to clip_norm, adds Gaussian noise only to gradients
/// of private examples, averages by 1 / L and descends. Noise and lot draws
/// come from per-step/per-example substreams, so the trajectory is
/// independent of evaluation order. The returned model carries the privacy
/// spend of the run.
///
/// When trajectory is non-null, the parameter vector after every step is
/// appended to it.
MlpModel fit_mlp_dpsgd(const Dataset& real, const Dataset& synth, const DpSgdConfig& cfg,
                       RngStream rng, std::vector<std::vector<double>>* trajectory = nullptr);

/// Plain minibatch SGD sharing the lot-sampling scheme of fit_mlp_dpsgd but
/// without clipping or noise. With noise_multiplier 0 and an inactive clip,
/// fit_mlp_dpsgd reproduces this trajectory bitwise for the same stream.
MlpModel fit_mlp_sgd(const Dataset& real, const Dataset& synth, const DpSgdConfig& cfg,
                     RngStream rng, std::vector<std::vector<double>>* trajectory = nullptr);

}  // namespace dpiw::ratio
