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

#include "dpiw/core/privacy_ledger.hpp"
#include "dpiw/ratio/mlp.hpp"

namespace dpiw::privacy {

/// Conservative ledger for the subsampled noisy-SGD trainer. Deliberately
/// avoids tighter numerical accountants: per-step cost is the Gaussian
/// mechanism's epsilon_step = sqrt(2 log(1.25/delta)) / sigma, amplified by
/// the sampling rate q = L / (n_private + n_synth), then composed over T
/// steps both basically and by the advanced composition theorem. The
/// reported spend takes the smaller epsilon of the two.
struct AccountantReport {
  double epsilon_step = 0.0;  // per step, with respect to one lot
  double q = 0.0;             // subsampling rate
  PrivacySpend basic;
  PrivacySpend advanced;
  PrivacySpend chosen;
};

AccountantReport dp_sgd_privacy(const ratio::DpSgdConfig& cfg, std::size_t n_private,
                                std::size_t n_synth);

}  // namespace dpiw::privacy
