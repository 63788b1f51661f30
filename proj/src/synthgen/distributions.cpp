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

#include "dpiw/synthgen/distributions.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/kernels/kernels.hpp"

namespace dpiw::synthgen {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Finite floor for stored log-weights; exp(-700) underflows to zero anyway.
constexpr double kLogWeightFloor = -700.0;

std::vector<double> normalized_weights(std::vector<double> w, std::size_t k) {
  if (w.empty()) w.assign(k, 1.0 / static_cast<double>(k));
  if (w.size() != k) throw InputError("mixture weight count does not match components");
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw InputError("mixture weights must be nonnegative");
    total += x;
  }
  if (!(total > 0.0)) throw InputError("mixture weights must not all be zero");
  for (double& x : w) x /= total;
  return w;
}

std::size_t pick_component(const std::vector<double>& weights, RngStream& rng) {
  const double u = rng.next_uniform();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  return weights.size() - 1;
}

class GaussianMixture final : public Distribution {
 public:
  GaussianMixture(std::vector<std::vector<double>> means, double sd, std::vector<double> weights)
      : sd_(sd) {
    if (means.empty()) throw InputError("gaussian mixture needs at least one component");
    if (!(sd > 0.0)) throw InputError("gaussian mixture sd must be positive");
    d_ = means[0].size();
    for (const auto& m : means) {
      if (m.size() != d_) throw InputError("gaussian mixture means have mixed dimensions");
      means_.insert(means_.end(), m.begin(), m.end());
    }
    k_ = means.size();
    weights_ = normalized_weights(std::move(weights), k_);
    log_norm_ = -0.5 * static_cast<double>(d_) * std::log(2.0 * std::numbers::pi * sd * sd);
  }

  std::size_t dim() const override { return d_; }

  void draw(RngStream& rng, double* x, int*) const override {
    const std::size_t k = pick_component(weights_, rng);
    for (std::size_t j = 0; j < d_; ++j) x[j] = means_[k * d_ + j] + sd_ * rng.next_normal();
  }

  double log_density(std::span<const double> x, std::optional<int>) const override {
    std::vector<double> terms(k_);
    const double inv2s2 = 1.0 / (2.0 * sd_ * sd_);
    for (std::size_t k = 0; k < k_; ++k) {
      const double d2 = kernels::sq_dist(x.data(), means_.data() + k * d_, d_);
      terms[k] = std::log(weights_[k]) + log_norm_ - d2 * inv2s2;
    }
    return logsumexp(terms);
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["kind"] = "gaussian_mixture";
    auto means = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < k_; ++k)
      means.push_back(std::vector<double>(means_.begin() + k * d_, means_.begin() + (k + 1) * d_));
    j["means"] = means;
    j["sd"] = sd_;
    j["weights"] = weights_;
    return j;
  }

 private:
  std::vector<double> means_;  // k x d
  std::vector<double> weights_;
  double sd_;
  double log_norm_ = 0.0;
  std::size_t k_ = 0, d_ = 0;
};

class UniformMixture final : public Distribution {
 public:
  UniformMixture(std::vector<std::vector<std::pair<double, double>>> boxes,
                 std::vector<double> weights)
      : boxes_(std::move(boxes)) {
    if (boxes_.empty()) throw InputError("uniform mixture needs at least one box");
    d_ = boxes_[0].size();
    log_vol_.reserve(boxes_.size());
    for (const auto& box : boxes_) {
      if (box.size() != d_) throw InputError("uniform mixture boxes have mixed dimensions");
      double lv = 0.0;
      for (const auto& [lo, hi] : box) {
        if (!(hi > lo)) throw InputError("uniform box side must have positive length");
        lv += std::log(hi - lo);
      }
      log_vol_.push_back(lv);
    }
    weights_ = normalized_weights(std::move(weights), boxes_.size());
  }

  std::size_t dim() const override { return d_; }

  void draw(RngStream& rng, double* x, int*) const override {
    const auto& box = boxes_[pick_component(weights_, rng)];
    for (std::size_t j = 0; j < d_; ++j)
      x[j] = box[j].first + (box[j].second - box[j].first) * rng.next_uniform();
  }

  double log_density(std::span<const double> x, std::optional<int>) const override {
    double acc = kNegInf;
    for (std::size_t k = 0; k < boxes_.size(); ++k) {
      bool inside = true;
      for (std::size_t j = 0; j < d_ && inside; ++j)
        inside = x[j] >= boxes_[k][j].first && x[j] <= boxes_[k][j].second;
      if (inside) acc = logaddexp(acc, std::log(weights_[k]) - log_vol_[k]);
    }
    return acc;
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["kind"] = "uniform_mixture";
    auto boxes = nlohmann::ordered_json::array();
    for (const auto& box : boxes_) {
      auto jb = nlohmann::ordered_json::array();
      for (const auto& [lo, hi] : box) jb.push_back({lo, hi});
      boxes.push_back(jb);
    }
    j["boxes"] = boxes;
    j["weights"] = weights_;
    return j;
  }

 private:
  std::vector<std::vector<std::pair<double, double>>> boxes_;
  std::vector<double> weights_;
  std::vector<double> log_vol_;
  std::size_t d_ = 0;
};

class MultivariateGaussian final : public Distribution {
 public:
  MultivariateGaussian(std::vector<double> mean, std::vector<std::vector<double>> cov)
      : mean_(std::move(mean)) {
    const auto d = static_cast<Eigen::Index>(mean_.size());
    Eigen::MatrixXd sigma(d, d);
    if (cov.size() != mean_.size()) throw InputError("covariance rows do not match mean length");
    for (Eigen::Index i = 0; i < d; ++i) {
      if (cov[i].size() != mean_.size())
        throw InputError("covariance columns do not match mean length");
      for (Eigen::Index j = 0; j < d; ++j) sigma(i, j) = cov[i][j];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
      throw InputError("covariance must be symmetric positive definite");
    chol_ = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) log_det += 2.0 * std::log(chol_(i, i));
    log_norm_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
    cov_ = std::move(cov);
  }

  std::size_t dim() const override { return mean_.size(); }

  void draw(RngStream& rng, double* x, int*) const override {
    const auto d = static_cast<Eigen::Index>(mean_.size());
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.next_normal();
    const Eigen::VectorXd v = chol_ * z;
    for (Eigen::Index i = 0; i < d; ++i) x[i] = mean_[i] + v(i);
  }

  double log_density(std::span<const double> x, std::optional<int>) const override {
    const auto d = static_cast<Eigen::Index>(mean_.size());
    Eigen::VectorXd delta(d);
    for (Eigen::Index i = 0; i < d; ++i) delta(i) = x[i] - mean_[i];
    const Eigen::VectorXd y = chol_.triangularView<Eigen::Lower>().solve(delta);
    return log_norm_ - 0.5 * y.squaredNorm();
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["kind"] = "mvn";
    j["mean"] = mean_;
    j["cov"] = cov_;
    return j;
  }

 private:
  std::vector<double> mean_;
  std::vector<std::vector<double>> cov_;
  Eigen::MatrixXd chol_;
  double log_norm_ = 0.0;
};

class ConvexCombination final : public Distribution {
 public:
  ConvexCombination(double gamma, DistributionPtr component, DistributionPtr base)
      : gamma_(gamma), component_(std::move(component)), base_(std::move(base)) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InputError("gamma must lie in [0, 1]");
    if (component_->dim() != base_->dim())
      throw InputError("convex combination parts must share a dimension");
    if (component_->labelled() != base_->labelled())
      throw InputError("convex combination parts must agree on labelling");
  }

  std::size_t dim() const override { return base_->dim(); }
  bool labelled() const override { return base_->labelled(); }

  void draw(RngStream& rng, double* x, int* label) const override {
    if (rng.next_uniform() < gamma_)
      component_->draw(rng, x, label);
    else
      base_->draw(rng, x, label);
  }

  double log_density(std::span<const double> x, std::optional<int> label) const override {
    if (gamma_ <= 0.0) return base_->log_density(x, label);
    if (gamma_ >= 1.0) return component_->log_density(x, label);
    return logaddexp(std::log(gamma_) + component_->log_density(x, label),
                     std::log1p(-gamma_) + base_->log_density(x, label));
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["kind"] = "convex_combination";
    j["gamma"] = gamma_;
    j["component"] = component_->to_json();
    j["base"] = base_->to_json();
    return j;
  }

 private:
  double gamma_;
  DistributionPtr component_;
  DistributionPtr base_;
};

class LogisticLabelled final : public Distribution {
 public:
  LogisticLabelled(DistributionPtr base, std::vector<double> theta)
      : base_(std::move(base)), theta_(std::move(theta)) {
    if (base_->labelled()) throw InputError("labelled base cannot be labelled again");
    if (theta_.size() != base_->dim() + 1)
      throw InputError("theta must have one entry per feature plus an intercept");
  }

  std::size_t dim() const override { return base_->dim(); }
  bool labelled() const override { return true; }

  void draw(RngStream& rng, double* x, int* label) const override {
    base_->draw(rng, x, nullptr);
    const double t = score(x);
    if (label) *label = rng.next_bernoulli(sigmoid(t)) ? 1 : 0;
  }

  double log_density(std::span<const double> x, std::optional<int> label) const override {
    const double base_ld = base_->log_density(x, std::nullopt);
    if (!label) return base_ld;  // marginal over the label
    const double t = score(x.data());
    return base_ld - log1pexp(*label == 1 ? -t : t);
  }

  nlohmann::ordered_json to_json() const override {
    nlohmann::ordered_json j;
    j["kind"] = "logistic_labelled";
    j["base"] = base_->to_json();
    j["theta"] = theta_;
    return j;
  }

 private:
  double score(const double* x) const {
    return kernels::dot(theta_.data(), x, theta_.size() - 1) + theta_.back();
  }

  DistributionPtr base_;
  std::vector<double> theta_;
};

}  // namespace

DistributionPtr gaussian_mixture(std::vector<std::vector<double>> means, double sd,
                                 std::vector<double> weights) {
  return std::make_shared<GaussianMixture>(std::move(means), sd, std::move(weights));
}

DistributionPtr gaussian_grid(const std::vector<double>& grid_values, double sd) {
  std::vector<std::vector<double>> means;
  for (double a : grid_values)
    for (double b : grid_values) means.push_back({a, b});
  return gaussian_mixture(std::move(means), sd);
}

DistributionPtr uniform_mixture(std::vector<std::vector<std::pair<double, double>>> boxes,
                                std::vector<double> weights) {
  return std::make_shared<UniformMixture>(std::move(boxes), std::move(weights));
}

DistributionPtr multivariate_gaussian(std::vector<double> mean,
                                      std::vector<std::vector<double>> cov) {
  return std::make_shared<MultivariateGaussian>(std::move(mean), std::move(cov));
}

DistributionPtr convex_combination(double gamma, DistributionPtr component, DistributionPtr base) {
  return std::make_shared<ConvexCombination>(gamma, std::move(component), std::move(base));
}

DistributionPtr logistic_labelled(DistributionPtr base, std::vector<double> theta) {
  return std::make_shared<LogisticLabelled>(std::move(base), std::move(theta));
}

DistributionPtr Distribution::from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian_mixture") {
    return gaussian_mixture(j.at("means").get<std::vector<std::vector<double>>>(),
                            j.at("sd").get<double>(),
                            j.value("weights", std::vector<double>{}));
  }
  if (kind == "uniform_mixture") {
    std::vector<std::vector<std::pair<double, double>>> boxes;
    for (const auto& jb : j.at("boxes")) {
      std::vector<std::pair<double, double>> box;
      for (const auto& side : jb) box.emplace_back(side.at(0).get<double>(), side.at(1).get<double>());
      boxes.push_back(std::move(box));
    }
    return uniform_mixture(std::move(boxes), j.value("weights", std::vector<double>{}));
  }
  if (kind == "mvn") {
    return multivariate_gaussian(j.at("mean").get<std::vector<double>>(),
                                 j.at("cov").get<std::vector<std::vector<double>>>());
  }
  if (kind == "convex_combination") {
    return convex_combination(j.at("gamma").get<double>(), from_json(j.at("component")),
                              from_json(j.at("base")));
  }
  if (kind == "logistic_labelled") {
    return logistic_labelled(from_json(j.at("base")), j.at("theta").get<std::vector<double>>());
  }
  throw InputError("unknown distribution kind '" + kind + "'");
}

Dataset sample(const Distribution& dist, std::size_t n, RngStream rng, Source source) {
  if (n < 1) throw InputError("sample size must be at least 1");
  const std::size_t d = dist.dim();
  std::vector<double> features(n * d);
  std::optional<std::vector<int>> labels;
  if (dist.labelled()) labels.emplace(n);
  for (std::size_t i = 0; i < n; ++i) {
    int* lbl = labels ? &(*labels)[i] : nullptr;
    dist.draw(rng, features.data() + i * d, lbl);
  }
  return Dataset(std::move(features), n, d, source, std::move(labels));
}

double log_density(const Distribution& dist, std::span<const double> x,
                   std::optional<int> label) {
  if (x.size() != dist.dim()) throw InputError("point dimension does not match distribution");
  return dist.log_density(x, label);
}

double true_log_weight(const Distribution& dgp, const Distribution& sdgp,
                       std::span<const double> x, std::optional<int> label) {
  const double num = dgp.log_density(x, label);
  const double den = sdgp.log_density(x, label);
  if (den == kNegInf && num > kNegInf) {
    std::ostringstream msg;
    msg << "synthetic generator has zero density at a point the data generator can produce: (";
    for (std::size_t j = 0; j < x.size(); ++j) msg << (j ? ", " : "") << x[j];
    msg << ")";
    throw Error(msg.str());
  }
  if (num == kNegInf) return kLogWeightFloor;
  return std::max(num - den, kLogWeightFloor);
}

WeightVector true_log_weights(const Distribution& dgp, const Distribution& sdgp,
                              const Dataset& data) {
  const bool with_labels = dgp.labelled() && sdgp.labelled() && data.has_labels();
  std::vector<double> lw(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::optional<int> label;
    if (with_labels) label = data.label(i);
    lw[i] = true_log_weight(dgp, sdgp, data.row(i), label);
  }
  return WeightVector::from_log(std::move(lw), Provenance::kTrue);
}

GeneratorPair preset(const std::string& name, double gamma) {
  if (name == "gmm-grid") {
    auto dgp = gaussian_grid({-2.0, -1.0, 0.0, 1.0, 2.0}, 0.05);
    auto sdgp = uniform_mixture(
        {{{-2.5, 0.0}, {-2.5, 2.5}}, {{0.0, 2.5}, {-2.5, 2.5}}}, {0.7, 0.3});
    return {std::move(dgp), std::move(sdgp)};
  }
  if (name == "bayes-logistic") {
    auto dgp = logistic_labelled(
        multivariate_gaussian({-1.25, 1.25}, {{1.0, 0.5}, {0.5, 1.0}}), {1.5, 1.0, 2.5});
    auto far = logistic_labelled(
        multivariate_gaussian({2.0, -2.5}, {{4.0, 0.2}, {0.2, 4.0}}), {-1.5, 1.0, -2.5});
    auto sdgp = convex_combination(gamma, std::move(far), dgp);
    return {std::move(dgp), std::move(sdgp)};
  }
  throw InputError("unknown preset '" + name + "'");
}

}  // namespace dpiw::synthgen
