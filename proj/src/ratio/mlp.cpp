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

#include "dpiw/ratio/mlp.hpp"

#include <cmath>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/kernels/kernels.hpp"
#include "dpiw/privacy/accountant.hpp"

namespace dpiw::ratio {

MlpModel::MlpModel(std::size_t in_dim, std::vector<std::size_t> hidden)
    : in_dim_(in_dim), hidden_(std::move(hidden)) {
  if (in_dim_ < 1) throw InputError("MLP input dimension must be positive");
  std::size_t prev = in_dim_;
  std::size_t total = 0;
  for (std::size_t width : hidden_) {
    if (width < 1) throw InputError("MLP hidden width must be positive");
    offsets_.push_back(total);          // weights
    total += width * prev;
    offsets_.push_back(total);          // biases
    total += width;
    prev = width;
  }
  offsets_.push_back(total);  // output weights
  total += prev;
  offsets_.push_back(total);  // output bias
  total += 1;
  params_.assign(total, 0.0);
}

void MlpModel::init_parameters(RngStream& rng) {
  std::size_t prev = in_dim_;
  std::size_t layer = 0;
  for (std::size_t width : hidden_) {
    const double sd = std::sqrt(2.0 / static_cast<double>(prev));  // rectifier scaling
    double* w = params_.data() + offsets_[2 * layer];
    for (std::size_t i = 0; i < width * prev; ++i) w[i] = sd * rng.next_normal();
    double* b = params_.data() + offsets_[2 * layer + 1];
    for (std::size_t i = 0; i < width; ++i) b[i] = 0.0;
    prev = width;
    ++layer;
  }
  const double sd = std::sqrt(1.0 / static_cast<double>(prev));
  double* w = params_.data() + offsets_[2 * layer];
  for (std::size_t i = 0; i < prev; ++i) w[i] = sd * rng.next_normal();
  params_[offsets_[2 * layer + 1]] = 0.0;
}

double MlpModel::logit(std::span<const double> x) const {
  if (x.size() != in_dim_) throw InputError("feature dimension does not match MLP");
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  std::size_t prev = in_dim_;
  std::size_t layer = 0;
  for (std::size_t width : hidden_) {
    next.assign(width, 0.0);
    kernels::matvec(params_.data() + offsets_[2 * layer], cur.data(), width, prev, next.data());
    const double* b = params_.data() + offsets_[2 * layer + 1];
    for (std::size_t i = 0; i < width; ++i) next[i] = std::max(0.0, next[i] + b[i]);
    cur.swap(next);
    prev = width;
    ++layer;
  }
  return kernels::dot(params_.data() + offsets_[2 * layer], cur.data(), prev) +
         params_[offsets_[2 * layer + 1]];
}

double MlpModel::prob(std::span<const double> x) const { return sigmoid(logit(x)); }

double MlpModel::loss_and_gradient(std::span<const double> x, int label, double* grad) const {
  const std::size_t n_layers = hidden_.size();

  // Forward pass keeping pre-activations.
  std::vector<std::vector<double>> acts(n_layers + 1);
  std::vector<std::vector<double>> pre(n_layers);
  acts[0].assign(x.begin(), x.end());
  std::size_t prev = in_dim_;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t width = hidden_[l];
    pre[l].assign(width, 0.0);
    kernels::matvec(params_.data() + offsets_[2 * l], acts[l].data(), width, prev, pre[l].data());
    const double* b = params_.data() + offsets_[2 * l + 1];
    acts[l + 1].resize(width);
    for (std::size_t i = 0; i < width; ++i) {
      pre[l][i] += b[i];
      acts[l + 1][i] = std::max(0.0, pre[l][i]);
    }
    prev = width;
  }
  const double t = kernels::dot(params_.data() + offsets_[2 * n_layers], acts[n_layers].data(),
                                prev) +
                   params_[offsets_[2 * n_layers + 1]];
  const double y = label == 1 ? 1.0 : 0.0;
  const double loss = log1pexp(t) - y * t;

  // Backward pass.
  const double delta_out = sigmoid(t) - y;
  const double* w_out = params_.data() + offsets_[2 * n_layers];
  double* g_w_out = grad + offsets_[2 * n_layers];
  for (std::size_t i = 0; i < prev; ++i) g_w_out[i] = delta_out * acts[n_layers][i];
  grad[offsets_[2 * n_layers + 1]] = delta_out;

  std::vector<double> delta(prev);
  for (std::size_t i = 0; i < prev; ++i)
    delta[i] = pre[n_layers - 1][i] > 0.0 ? delta_out * w_out[i] : 0.0;

  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t width = hidden_[l];
    const std::size_t in_w = l == 0 ? in_dim_ : hidden_[l - 1];
    double* g_w = grad + offsets_[2 * l];
    double* g_b = grad + offsets_[2 * l + 1];
    for (std::size_t i = 0; i < width; ++i) {
      const double di = delta[i];
      double* row = g_w + i * in_w;
      for (std::size_t j = 0; j < in_w; ++j) row[j] = di * acts[l][j];
      g_b[i] = di;
    }
    if (l > 0) {
      const double* w = params_.data() + offsets_[2 * l];
      std::vector<double> delta_prev(in_w, 0.0);
      for (std::size_t i = 0; i < width; ++i)
        if (delta[i] != 0.0) kernels::axpy(delta[i], w + i * in_w, delta_prev.data(), in_w);
      for (std::size_t j = 0; j < in_w; ++j)
        if (pre[l - 1][j] <= 0.0) delta_prev[j] = 0.0;
      delta.swap(delta_prev);
    }
  }
  return loss;
}

namespace {

struct Example {
  std::span<const double> x;
  int label;    // 1 = private, 0 = synthetic
};

MlpModel train(const Dataset& real, const Dataset& synth, const DpSgdConfig& cfg, RngStream rng,
               bool privatize, std::vector<std::vector<double>>* trajectory) {
  if (real.cols() != synth.cols())
    throw InputError("real and synthetic data must share feature dimensions");
  const std::size_t n_total = real.rows() + synth.rows();
  if (cfg.lot_size < 1 || cfg.lot_size > n_total)
    throw InputError("lot size must lie in [1, n_real + n_synth]");
  if (!(cfg.clip_norm > 0.0) || !(cfg.learning_rate > 0.0) || cfg.steps < 1)
    throw InputError("invalid SGD configuration");
  if (privatize && cfg.noise_multiplier < 0.0)
    throw InputError("noise multiplier must be nonnegative");

  auto example = [&](std::size_t i) -> Example {
    if (i < real.rows()) return {real.row(i), 1};
    return {synth.row(i - real.rows()), 0};
  };

  MlpModel model(real.cols());
  auto init_rng = rng.substream(0);
  model.init_parameters(init_rng);

  const double q = static_cast<double>(cfg.lot_size) / static_cast<double>(n_total);
  const std::size_t n_params = model.param_count();
  std::vector<double> grad(n_params), accum(n_params);
  std::vector<std::size_t> lot;

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    auto step_rng = rng.substream(t + 1);

    // Poisson lot: one coin per example, resample on an empty lot.
    lot.clear();
    for (std::uint64_t attempt = 0; lot.empty(); ++attempt) {
      auto lot_rng = step_rng.substream(attempt);
      for (std::size_t i = 0; i < n_total; ++i)
        if (lot_rng.next_uniform() < q) lot.push_back(i);
    }

    std::fill(accum.begin(), accum.end(), 0.0);
    for (std::size_t i : lot) {
      const Example ex = example(i);
      const double loss = model.loss_and_gradient(ex.x, ex.label, grad.data());
      if (!std::isfinite(loss))
        throw Error("training loss became non-finite at step " + std::to_string(t));

      if (privatize) {
        const double norm = std::sqrt(kernels::dot(grad.data(), grad.data(), n_params));
        if (norm > cfg.clip_norm) {
          const double scale = cfg.clip_norm / norm;
          for (double& g : grad) g *= scale;
          const double clipped = std::sqrt(kernels::dot(grad.data(), grad.data(), n_params));
          if (clipped > cfg.clip_norm * (1.0 + 1e-9))
            throw Error("clipped gradient exceeds bound at step " + std::to_string(t));
        }
        if (ex.label == 1 && cfg.noise_multiplier > 0.0) {
          auto noise_rng = step_rng.substream(static_cast<std::uint64_t>(i) + n_total);
          const double sd = cfg.noise_multiplier * cfg.clip_norm;
          for (double& g : grad) g += sd * noise_rng.next_normal();
        }
      }
      kernels::axpy(1.0, grad.data(), accum.data(), n_params);
    }

    const double scale = -cfg.learning_rate / static_cast<double>(cfg.lot_size);
    kernels::axpy(scale, accum.data(), model.mutable_params().data(), n_params);
    for (double v : model.params())
      if (!std::isfinite(v))
        throw Error("parameters became non-finite at step " + std::to_string(t));
    if (trajectory) trajectory->push_back(model.params());
  }

  // Zero noise trains without a privacy guarantee; leaving the spend absent
  // keeps the resulting weights unreleasable.
  if (privatize && cfg.noise_multiplier > 0.0) {
    const auto report = privacy::dp_sgd_privacy(cfg, real.rows(), synth.rows());
    model.set_training_spend(report.chosen);
  }
  return model;
}

}  // namespace

MlpModel fit_mlp_dpsgd(const Dataset& real, const Dataset& synth, const DpSgdConfig& cfg,
                       RngStream rng, std::vector<std::vector<double>>* trajectory) {
  return train(real, synth, cfg, rng, /*privatize=*/true, trajectory);
}

MlpModel fit_mlp_sgd(const Dataset& real, const Dataset& synth, const DpSgdConfig& cfg,
                     RngStream rng, std::vector<std::vector<double>>* trajectory) {
  return train(real, synth, cfg, rng, /*privatize=*/false, trajectory);
}

}  // namespace dpiw::ratio
