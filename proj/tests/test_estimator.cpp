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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dpiw/core/error.hpp"
#include "dpiw/estimator/estimator.hpp"

using namespace dpiw;
using namespace dpiw::estimator;

namespace {

// Three-atom toy: support {0,1,2}, target mass (0.5,0.3,0.2), proposal
// (0.2,0.3,0.5). Exact weights (2.5,1.0,0.4); enumerated target mean of
// h(x)=x is 0.7.
constexpr double kTargetMass[3] = {0.5, 0.3, 0.2};
constexpr double kProposalMass[3] = {0.2, 0.3, 0.5};
constexpr double kToyWeights[3] = {2.5, 1.0, 0.4};

double enumerated_target_mean() {
  double acc = 0.0;
  for (int k = 0; k < 3; ++k) acc += kTargetMass[k] * k;
  return acc;
}

int draw_proposal(RngStream& rng) {
  const double u = rng.next_uniform();
  if (u < kProposalMass[0]) return 0;
  if (u < kProposalMass[0] + kProposalMass[1]) return 1;
  return 2;
}

}  // namespace

TEST_CASE("uniform weights reduce to the sample mean") {
  const std::vector<double> h{1.0, 2.0, 3.0, 4.0};
  const auto report = importance_estimate(h, WeightVector::uniform(4), false);
  CHECK(report.value == doctest::Approx(2.5));
  CHECK(report.n_used == 4);
  CHECK(report.weight_provenance == Provenance::kUniform);
}

TEST_CASE("self-normalized estimate of a constant is exactly that constant") {
  const std::vector<double> h{3.25, 3.25, 3.25};
  const auto w = WeightVector::from_log({0.7, -0.1, 0.4}, Provenance::kEstimated);
  const auto report = importance_estimate(h, w, true);
  CHECK(report.value == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("estimator is linear in h and scale-free when self-normalized") {
  RngStream rng(5);
  std::vector<double> h1(50), h2(50), lw(50);
  for (int i = 0; i < 50; ++i) {
    h1[i] = rng.next_normal();
    h2[i] = rng.next_normal();
    lw[i] = 0.5 * rng.next_normal();
  }
  const auto w = WeightVector::from_log(lw, Provenance::kEstimated);

  std::vector<double> combo(50);
  for (int i = 0; i < 50; ++i) combo[i] = 2.0 * h1[i] - 3.0 * h2[i];
  const double lhs = importance_estimate(combo, w, false).value;
  const double rhs = 2.0 * importance_estimate(h1, w, false).value -
                     3.0 * importance_estimate(h2, w, false).value;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  auto scaled_lw = lw;
  for (double& x : scaled_lw) x += std::log(7.0);
  const auto w_scaled = WeightVector::from_log(scaled_lw, Provenance::kEstimated);
  CHECK(importance_estimate(h1, w, true).value ==
        doctest::Approx(importance_estimate(h1, w_scaled, true).value).epsilon(1e-12));
}

TEST_CASE("toy estimator mean matches the enumerated target (resampling)") {
  const double truth = enumerated_target_mean();
  CHECK(truth == doctest::Approx(0.7));

  RngStream rng(6);
  const int reps = 20000, n = 100;
  double sum = 0.0, sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const int x = draw_proposal(rng);
      acc += kToyWeights[x] * x;
    }
    const double estimate = acc / n;
    sum += estimate;
    sq += estimate * estimate;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sq / reps - mean * mean) / reps);
  CHECK(std::fabs(mean - truth) <= 3.0 * se);
}

TEST_CASE("noisy estimator variance") {
  RngStream rng(7);
  std::vector<double> h(200), lw(200);
  for (int i = 0; i < 200; ++i) {
    h[i] = rng.next_normal();
    lw[i] = 0.3 * rng.next_normal();
  }
  const auto w = WeightVector::from_log(lw, Provenance::kEstimated);

  SUBCASE("no noise reduces to the plain plug-in variance") {
    const auto plain = importance_estimate(h, w, false);
    CHECK(noisy_estimator_variance(h, w, 0.0) == doctest::Approx(plain.variance));
  }

  SUBCASE("null statistic has zero variance") {
    const std::vector<double> zero(200, 0.0);
    CHECK(noisy_estimator_variance(zero, w, 0.5) == 0.0);
  }

  SUBCASE("infinite noise variance propagates") {
    CHECK(std::isinf(
        noisy_estimator_variance(h, w, std::numeric_limits<double>::infinity())));
  }

  SUBCASE("formula tracks the empirical variance on the toy (quick check)") {
    // Exact moments: sigma^2(h) = E[(wh)^2] - 0.49 = 0.62 - 0.49 = 0.13.
    const double var_exp = 0.171875;  // log-Laplace at scale 0.25
    const double expected = (0.13 + var_exp * 0.62) / 100.0;

    RngStream mc(8);
    const double mu = std::log1p(-0.25 * 0.25);
    const int reps = 200000, n = 100;
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const int x = draw_proposal(mc);
        acc += kToyWeights[x] * std::exp(mc.next_laplace(mu, 0.25)) * x;
      }
      const double est = acc / n;
      sum += est;
      sq += est * est;
    }
    const double mean = sum / reps;
    const double var = sq / reps - mean * mean;
    CHECK(var == doctest::Approx(expected).epsilon(0.08));
  }
}

TEST_CASE("effective sample size") {
  // Gaussian location score: grad of -log f at theta is (theta - x).
  const LogLikGradient grad = [](std::span<const double> x, std::optional<int>,
                                 const Eigen::VectorXd& theta) {
    Eigen::VectorXd g(1);
    g(0) = theta(0) - x[0];
    return g;
  };

  SUBCASE("constant weights recover the full sample count") {
    RngStream rng(9);
    std::vector<double> xs(500);
    for (double& x : xs) x = rng.next_normal();
    Dataset data(xs, 500, 1, Source::kSynthetic);
    Eigen::VectorXd theta(1);
    theta(0) = 0.0;
    const auto result =
        effective_sample_size(data, WeightVector::uniform(500), grad, theta);
    CHECK(result.n_effective == doctest::Approx(500.0));
    CHECK(result.variance_ratio == doctest::Approx(1.0));
    CHECK(result.scalarization == "trace");
  }

  SUBCASE("all mass on one point collapses the effective count") {
    Dataset data({0.4, 1.3, -0.8}, 3, 1, Source::kSynthetic);
    const auto w = WeightVector::from_log({std::log(1e6), 0.0, 0.0}, Provenance::kEstimated);
    // Scored at the population-level estimate (an upstream fit), not at the
    // heavy point itself, where its score would vanish by construction.
    Eigen::VectorXd theta(1);
    theta(0) = 0.0;
    const auto result = effective_sample_size(data, w, grad, theta);
    CHECK(result.n_effective < 3.0);
    CHECK(result.n_effective < 0.5);  // sharply reduced, near single-point scale
  }

  SUBCASE("narrow proposal against a wide target loses effective samples") {
    // Target N(0,1), proposal N(0, 0.8^2): tail weights explode, so the
    // weighted fit is worth fewer than its nominal count.
    RngStream rng(10);
    const std::size_t n = 20000;
    std::vector<double> xs(n), lw(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = 0.8 * rng.next_normal();
      const double x = xs[i];
      lw[i] = -0.5 * x * x + 0.5 * (x / 0.8) * (x / 0.8) + std::log(0.8);
    }
    Dataset data(xs, n, 1, Source::kSynthetic);
    const auto w = WeightVector::from_log(lw, Provenance::kTrue);
    const auto wv = w.values();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += wv[i] * xs[i];
      den += wv[i];
    }
    Eigen::VectorXd theta(1);
    theta(0) = num / den;
    const auto result = effective_sample_size(data, w, grad, theta);
    CHECK(result.n_effective < static_cast<double>(n));

    const auto det_result = effective_sample_size(data, w, grad, theta, true);
    CHECK(det_result.scalarization == "determinant");
    CHECK(det_result.n_effective == doctest::Approx(result.n_effective).epsilon(1e-9));
  }
}

TEST_CASE("estimate reports serialize with their privacy ledger") {
  const std::vector<double> h{1.0, 2.0};
  const auto w = WeightVector::from_log({0.0, 0.1}, Provenance::kOutputLaplace,
                                        PrivacySpend{1.5, 0.0, "mechanism"});
  const auto report = importance_estimate(h, w, false);
  const auto j = report.to_json();
  CHECK(j.at("value").get<double>() == doctest::Approx(report.value));
  CHECK(j.contains("variance"));
  CHECK(j.at("n").get<int>() == 2);
  CHECK(j.at("provenance") == "output_laplace");
  CHECK(j.at("privacy").at("epsilon").get<double>() == doctest::Approx(1.5));

  const auto winf = w.with_noise_metadata(std::numeric_limits<double>::infinity(), true,
                                          PrivacySpend{1.5, 0.0, "m"},
                                          Provenance::kOutputLaplace, w.log_values());
  CHECK(importance_estimate(h, winf, false).to_json().at("variance") == "infinite");
}
