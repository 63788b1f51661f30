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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/rng.hpp"
#include "dpiw/core/weights.hpp"

namespace dpiw::synthgen {

/// A generator with an exactly evaluable log-density. Labelled kinds model
/// the joint law of (features, binary label); for those, density queries
/// take the label alongside the feature vector.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual std::size_t dim() const = 0;
  virtual bool labelled() const { return false; }

  /// Draws one observation; writes dim() features and, for labelled kinds,
  /// the label.
  virtual void draw(RngStream& rng, double* x, int* label) const = 0;

  /// Exact log-density at x (jointly with the label when labelled);
  /// -infinity outside the support is a valid return.
  virtual double log_density(std::span<const double> x, std::optional<int> label) const = 0;

  virtual nlohmann::ordered_json to_json() const = 0;

  static std::shared_ptr<const Distribution> from_json(const nlohmann::json& j);
};

using DistributionPtr = std::shared_ptr<const Distribution>;

/// Mixture of isotropic Gaussians sharing one standard deviation.
DistributionPtr gaussian_mixture(std::vector<std::vector<double>> means, double sd,
                                 std::vector<double> weights = {});

/// Square grid of isotropic Gaussians at grid_values x grid_values (2-d),
/// uniform mixture weights.
DistributionPtr gaussian_grid(const std::vector<double>& grid_values, double sd);

/// Mixture of axis-aligned uniform boxes; boxes[k][j] = (lo, hi) of
/// feature j in component k.
DistributionPtr uniform_mixture(std::vector<std::vector<std::pair<double, double>>> boxes,
                                std::vector<double> weights);

DistributionPtr multivariate_gaussian(std::vector<double> mean,
                                      std::vector<std::vector<double>> cov);

/// gamma * component + (1 - gamma) * base, for gamma in [0, 1].
DistributionPtr convex_combination(double gamma, DistributionPtr component,
                                   DistributionPtr base);

/// Joint law of x ~ base and y ~ Bernoulli(sigmoid(theta . [x, 1])); theta
/// has dim(base) + 1 entries with the intercept last.
DistributionPtr logistic_labelled(DistributionPtr base, std::vector<double> theta);

Dataset sample(const Distribution& dist, std::size_t n, RngStream rng,
               Source source = Source::kSynthetic);

double log_density(const Distribution& dist, std::span<const double> x,
                   std::optional<int> label = std::nullopt);

/// log p_dgp(point) - log p_sdgp(point). Errors when the sdgp has zero
/// density at a point the dgp can produce.
double true_log_weight(const Distribution& dgp, const Distribution& sdgp,
                       std::span<const double> x, std::optional<int> label = std::nullopt);

/// Exact generator weights for every row of a dataset (labels included for
/// labelled pairs); provenance kTrue.
WeightVector true_log_weights(const Distribution& dgp, const Distribution& sdgp,
                              const Dataset& data);

struct GeneratorPair {
  DistributionPtr dgp;
  DistributionPtr sdgp;
};

/// Built-in experiment parameterizations. Names: "gmm-grid" (two-dimensional
/// Gaussian grid vs a two-box uniform mixture) and "bayes-logistic" (labelled
/// Gaussian pair; gamma sets the convex-combination share of the far
/// component in the sdgp).
GeneratorPair preset(const std::string& name, double gamma = 1.0);

}  // namespace dpiw::synthgen
