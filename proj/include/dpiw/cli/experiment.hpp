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

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/privacy_ledger.hpp"
#include "dpiw/core/weights.hpp"
#include "dpiw/ratio/mlp.hpp"

namespace dpiw::cli {

enum class Scheme {
  kNone,
  kTrue,
  kLogReg,
  kBetaNoised,
  kOutputLaplace,
  kOutputGaussian,
  kPrivMlp,
  kDiscriminator,
};

Scheme scheme_from_string(const std::string& s);
std::string to_string(Scheme s);

/// Batch experiment description; a report is a pure function of this plus
/// the seed list.
struct ExperimentConfig {
  std::string preset = "gmm-grid";  // empty: load CSV data or explicit specs
  double gamma = 1.0;               // labelled preset mixing share
  nlohmann::json dgp_spec;          // explicit generator specs override the preset
  nlohmann::json sdgp_spec;
  std::string real_csv;
  std::string synth_csv;
  std::string label_column;
  std::vector<FeatureBounds> bounds;  // empty: preset default
  std::size_t n = 2000;               // per-seed generator draw
  Scheme scheme = Scheme::kNone;
  std::string discriminator_csv;
  double epsilon = 6.0;   // weight-mechanism budget
  double delta = 1e-5;
  PrivacySpend sdgp_spend{0.0, 0.0, "synthetic generator (external spend)"};
  double train_fraction = 0.8;
  double lambda = 0.1;
  double target_rho = 0.35;  // release-count rule; 0 releases the max with finite variance
  double temper_tau = 1.0;
  bool psis = false;
  bool calibrate = false;
  std::vector<std::string> metrics{"wasserstein", "mmd"};
  double mmd_bandwidth = 1.0;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  ratio::DpSgdConfig dpsgd;

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct ExperimentReport {
  nlohmann::ordered_json doc;
  bool pareto_warning = false;
  std::size_t seeds_failed = 0;
  std::size_t seeds_total = 0;

  bool all_failed() const { return seeds_total > 0 && seeds_failed == seeds_total; }
};

/// Runs every seed of the configured pipeline (generate or load, scale,
/// split, weight, privatize, post-process, evaluate) and aggregates the
/// per-seed metrics with normal-approximation 95% intervals. Failing seeds
/// are recorded, not fatal, unless every seed fails.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Writes the weight-release CSV (index, log_weight, provenance, epsilon,
/// delta). Raw estimated weights are refused unless unsafe_release is set:
/// they are a function of the private data with no noise on them.
void write_release_csv(const WeightVector& w, const std::string& path, bool unsafe_release);

/// Reads a release file back; when indices is non-null it receives the
/// released observation indices (a release may cover a subset of the
/// synthetic rows).
WeightVector read_release_csv(const std::string& path,
                              std::vector<std::size_t>* indices = nullptr);

/// Flat CSV rendering of the aggregate metric table.
std::string report_csv(const nlohmann::ordered_json& report_doc);

}  // namespace dpiw::cli
