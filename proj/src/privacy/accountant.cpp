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

#include "dpiw/privacy/accountant.hpp"

#include <cmath>
#include <string>

#include "dpiw/core/error.hpp"

namespace dpiw::privacy {

AccountantReport dp_sgd_privacy(const ratio::DpSgdConfig& cfg, std::size_t n_private,
                                std::size_t n_synth) {
  if (!(cfg.noise_multiplier > 0.0))
    throw InputError("accountant needs a positive noise multiplier");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InputError("delta must lie in (0, 1)");
  if (n_private + n_synth == 0) throw InputError("empty training set");
  if (cfg.lot_size < 1 || cfg.lot_size > n_private + n_synth)
    throw InputError("lot size must lie in [1, n_private + n_synth]");

  AccountantReport report;
  report.epsilon_step = std::sqrt(2.0 * std::log(1.25 / cfg.delta)) / cfg.noise_multiplier;
  report.q = static_cast<double>(cfg.lot_size) / static_cast<double>(n_private + n_synth);

  const double t = static_cast<double>(cfg.steps);
  const double eps_amp = report.q * report.epsilon_step;
  const double delta_amp = report.q * cfg.delta;

  report.basic = {t * eps_amp, t * delta_amp, "noisy SGD, basic composition"};

  // Advanced composition with delta' equal to the per-step delta.
  const double delta_prime = cfg.delta;
  const double eps_adv = std::sqrt(2.0 * t * std::log(1.0 / delta_prime)) * eps_amp +
                         t * eps_amp * std::expm1(eps_amp);
  report.advanced = {eps_adv, t * delta_amp + delta_prime, "noisy SGD, advanced composition"};

  report.chosen = report.basic.epsilon <= report.advanced.epsilon ? report.basic : report.advanced;
  report.chosen.mechanism += " (conservative)";
  return report;
}

}  // namespace dpiw::privacy
