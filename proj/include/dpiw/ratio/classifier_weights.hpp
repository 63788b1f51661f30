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

#include <functional>
#include <string>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/weights.hpp"
#include "dpiw/ratio/logistic.hpp"
#include "dpiw/ratio/mlp.hpp"

namespace dpiw::ratio {

/// Log-weight per point from a real-vs-synthetic classifier: the classifier
/// logit plus the prior-odds correction log(n_private / n_synth). Provenance
/// is kEstimated with no spend attached; raw estimates are not releasable.
WeightVector log_weights_from_classifier(const LogisticModel& model, const Dataset& points,
                                         std::size_t n_private, std::size_t n_synth);

/// MLP variant; when the model carries a training spend (private training),
/// the weights inherit it, since deriving weights from a private model is
/// post-processing.
WeightVector log_weights_from_classifier(const MlpModel& model, const Dataset& points,
                                         std::size_t n_private, std::size_t n_synth);

WeightVector log_weights_from_logits(const std::function<double(std::span<const double>)>& logit,
                                     const Dataset& points, std::size_t n_private,
                                     std::size_t n_synth);

struct ImportOptions {
  bool clamp = false;  // clamp probabilities into [1e-6, 1 - 1e-6] instead of rejecting
};

/// Reads a one-column CSV (header "prob") of discriminator probabilities,
/// one row per synthetic observation in file order, and converts them to
/// log-weights. Probabilities outside (0, 1) reject the row with its line
/// number unless clamping is requested. The result carries a zero spend:
/// a private discriminator's outputs are free to post-process.
WeightVector import_external_probabilities(const std::string& path, std::size_t n_private,
                                           std::size_t n_synth, const ImportOptions& opts = {});

}  // namespace dpiw::ratio
