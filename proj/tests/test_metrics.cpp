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

#include <algorithm>
#include <cmath>

#include "dpiw/core/error.hpp"
#include "dpiw/kernels/kernels.hpp"
#include "dpiw/metrics/metrics.hpp"

using namespace dpiw;
using namespace dpiw::metrics;

namespace {

Dataset points(std::vector<double> flat, std::size_t d, Source src = Source::kSynthetic) {
  const std::size_t n = flat.size() / d;
  return Dataset(std::move(flat), n, d, src);
}

Dataset random_cloud(std::size_t n, std::size_t d, RngStream& rng, double shift = 0.0) {
  std::vector<double> flat(n * d);
  for (double& x : flat) x = rng.next_uniform() + shift;
  return points(std::move(flat), d);
}

// Standard unbiased two-sample statistic, written independently of the
// weighted implementation.
double standard_mmd2(const Dataset& x, const Dataset& z, double bw) {
  const std::size_t n = x.rows();
  const double inv = 1.0 / (2.0 * bw * bw);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      acc += std::exp(-kernels::sq_dist(x.row(i).data(), x.row(j).data(), x.cols()) * inv);
      acc += std::exp(-kernels::sq_dist(z.row(i).data(), z.row(j).data(), x.cols()) * inv);
      acc -= std::exp(-kernels::sq_dist(x.row(i).data(), z.row(j).data(), x.cols()) * inv);
      acc -= std::exp(-kernels::sq_dist(x.row(j).data(), z.row(i).data(), x.cols()) * inv);
    }
  return acc / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

// 1-d Wasserstein-1 between weighted discrete measures via the CDF
// difference integral; exact and independent of the transport solver.
double w1_1d(std::vector<double> xs, std::vector<double> xm, std::vector<double> ys,
             std::vector<double> ym) {
  std::vector<std::pair<double, double>> a, b;
  double ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) ta += xm[i];
  for (std::size_t i = 0; i < ys.size(); ++i) tb += ym[i];
  for (std::size_t i = 0; i < xs.size(); ++i) a.emplace_back(xs[i], xm[i] / ta);
  for (std::size_t i = 0; i < ys.size(); ++i) b.emplace_back(ys[i], ym[i] / tb);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  std::vector<double> grid;
  for (auto& [x, m] : a) grid.push_back(x);
  for (auto& [x, m] : b) grid.push_back(x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double total = 0.0;
  std::size_t ia = 0, ib = 0;
  double fa = 0.0, fb = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    while (ia < a.size() && a[ia].first <= grid[g]) fa += a[ia++].second;
    while (ib < b.size() && b[ib].first <= grid[g]) fb += b[ib++].second;
    total += std::fabs(fa - fb) * (grid[g + 1] - grid[g]);
  }
  return total;
}

}  // namespace

TEST_CASE("weighted MMD^2") {
  RngStream rng(1);

  SUBCASE("identical samples with uniform weights give exactly zero") {
    const auto x = random_cloud(40, 2, rng);
    Dataset z(std::vector<double>(x.features()), x.rows(), x.cols(), Source::kPrivate);
    CHECK(weighted_mmd2(x, WeightVector::uniform(40), z, 1.0) == 0.0);
  }

  SUBCASE("unit weights reduce to the standard unbiased estimator") {
    const auto x = random_cloud(60, 3, rng);
    const auto z = random_cloud(60, 3, rng, 0.2);
    const double weighted = weighted_mmd2(x, WeightVector::uniform(60), z, 0.7);
    CHECK(std::fabs(weighted - standard_mmd2(x, z, 0.7)) <= 1e-12);
  }

  SUBCASE("true weights shrink the discrepancy on a mismatched pair") {
    // Proposal uniform on [0,1], target uniform on [0,1/2]: exact weights
    // are 2 on the left half, vanishing on the right.
    int improved = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
      RngStream trial_rng(100 + t);
      const std::size_t n = 150;
      std::vector<double> synth_flat(n), real_flat(n), lw(n);
      for (std::size_t i = 0; i < n; ++i) {
        synth_flat[i] = trial_rng.next_uniform();
        real_flat[i] = 0.5 * trial_rng.next_uniform();
        lw[i] = synth_flat[i] < 0.5 ? std::log(2.0) : -700.0;
      }
      const auto synth = points(std::move(synth_flat), 1);
      const auto real = points(std::move(real_flat), 1, Source::kPrivate);
      const auto w = WeightVector::from_log(std::move(lw), Provenance::kTrue);
      const double with_w = weighted_mmd2(synth, w, real, 1.0);
      const double without = weighted_mmd2(synth, WeightVector::uniform(n), real, 1.0);
      if (with_w < without) ++improved;
    }
    CHECK(improved >= 17);
  }

  SUBCASE("unequal sizes are rejected; subsampling fixes them") {
    const auto x = random_cloud(30, 2, rng);
    const auto z = random_cloud(40, 2, rng);
    CHECK_THROWS_AS(weighted_mmd2(x, WeightVector::uniform(30), z, 1.0), InputError);
    const auto idx = subsample_rows(40, 30, RngStream(3));
    CHECK(idx.size() == 30);
    CHECK_NOTHROW(weighted_mmd2(x, WeightVector::uniform(30), z.select(idx), 1.0));
  }
}

TEST_CASE("wasserstein-1") {
  SUBCASE("identical point sets give zero") {
    RngStream rng(4);
    const auto x = random_cloud(50, 2, rng);
    Dataset z(std::vector<double>(x.features()), x.rows(), x.cols(), Source::kPrivate);
    const auto result = weighted_wasserstein(x, WeightVector::uniform(50), z);
    CHECK(result.method == "exact");
    CHECK(result.value == doctest::Approx(0.0).epsilon(1e-9));
  }

  SUBCASE("two-point hand enumeration") {
    const auto synth = points({0.0, 1.0}, 1);
    const auto real = points({0.5, 0.5}, 1, Source::kPrivate);
    const auto result = weighted_wasserstein(synth, WeightVector::uniform(2), real);
    CHECK(result.value == doctest::Approx(0.5).epsilon(1e-9));
  }

  SUBCASE("exact solver matches the 1-d quantile oracle on weighted instances") {
    for (int trial = 0; trial < 10; ++trial) {
      RngStream rng(200 + trial);
      const std::size_t na = 40, nb = 55;
      std::vector<double> xs(na), ys(nb), xm(na), ym(nb);
      for (auto& v : xs) v = rng.next_normal();
      for (auto& v : ys) v = 0.5 + rng.next_normal();
      for (auto& v : xm) v = 0.1 + rng.next_uniform();
      for (auto& v : ym) v = 0.1 + rng.next_uniform();
      const double oracle = w1_1d(xs, xm, ys, ym);
      const double solved = exact_wasserstein1(points(std::vector<double>(xs), 1), xm,
                                               points(std::vector<double>(ys), 1), ym);
      CHECK(solved == doctest::Approx(oracle).epsilon(1e-7));
    }
  }

  SUBCASE("uniform-weight symmetry under swapping the sides") {
    RngStream rng(5);
    const auto a = random_cloud(30, 2, rng);
    const auto b = random_cloud(45, 2, rng, 0.3);
    const std::vector<double> ma(30, 1.0 / 30.0), mb(45, 1.0 / 45.0);
    CHECK(exact_wasserstein1(a, ma, b, mb) ==
          doctest::Approx(exact_wasserstein1(b, mb, a, ma)).epsilon(1e-9));
  }

  SUBCASE("entropic solver agrees with the exact one within a percent") {
    RngStream rng(6);
    const auto a = random_cloud(100, 2, rng);
    const auto b = random_cloud(100, 2, rng, 0.4);
    const std::vector<double> ma(100, 0.01), mb(100, 0.01);
    const double exact = exact_wasserstein1(a, ma, b, mb);
    const double entropic = sinkhorn_wasserstein1(a, ma, b, mb);
    CHECK(std::fabs(entropic - exact) / exact < 0.01);
  }

  SUBCASE("overflowing weights are rejected") {
    const auto synth = points({0.0, 1.0}, 1);
    const auto real = points({0.5, 0.5}, 1, Source::kPrivate);
    const auto w = WeightVector::from_log({710.0, 710.0}, Provenance::kEstimated);
    CHECK_THROWS_AS(weighted_wasserstein(synth, w, real), Error);
  }

  SUBCASE("weighted atoms move the optimal plan") {
    // Mass (0.75, 0.25) on {0, 1} against (0.5, 0.5): a quarter of the
    // mass travels distance 1.
    const auto synth = points({0.0, 1.0}, 1);
    const auto real = points({0.0, 1.0}, 1, Source::kPrivate);
    const auto w = WeightVector::from_log({std::log(3.0), 0.0}, Provenance::kTrue);
    const auto result = weighted_wasserstein(synth, w, real);
    CHECK(result.value == doctest::Approx(0.25).epsilon(1e-9));
  }
}

TEST_CASE("AUC") {
  SUBCASE("perfect ordering") {
    const std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
    const std::vector<int> labels{0, 0, 1, 1};
    CHECK(auc_from_scores(scores, labels) == doctest::Approx(1.0));
  }

  SUBCASE("random scores hover near one half") {
    RngStream rng(7);
    double total = 0.0;
    const int seeds = 40;
    for (int s = 0; s < seeds; ++s) {
      std::vector<double> scores(300);
      std::vector<int> labels(300);
      for (int i = 0; i < 300; ++i) {
        scores[i] = rng.next_uniform();
        labels[i] = rng.next_bernoulli(0.5) ? 1 : 0;
      }
      total += auc_from_scores(scores, labels);
    }
    CHECK(total / seeds == doctest::Approx(0.5).epsilon(0.03));
  }

  SUBCASE("invariant to strictly monotone transforms") {
    RngStream rng(8);
    std::vector<double> scores(100);
    std::vector<int> labels(100);
    for (int i = 0; i < 100; ++i) {
      scores[i] = rng.next_normal();
      labels[i] = rng.next_bernoulli(0.4) ? 1 : 0;
    }
    auto mapped = scores;
    for (double& s : mapped) s = std::exp(2.0 * s) + 1.0;
    CHECK(auc_from_scores(scores, labels) == doctest::Approx(auc_from_scores(mapped, labels)));
  }

  SUBCASE("ties average their ranks") {
    const std::vector<double> scores{0.5, 0.5, 0.5, 0.5};
    const std::vector<int> labels{0, 1, 0, 1};
    CHECK(auc_from_scores(scores, labels) == doctest::Approx(0.5));
  }

  SUBCASE("single-class inputs are rejected") {
    const std::vector<double> scores{0.1, 0.9};
    const std::vector<int> labels{1, 1};
    CHECK_THROWS_AS(auc_from_scores(scores, labels), InputError);
  }
}

TEST_CASE("downstream classifier AUC on a separable labelled toy") {
  RngStream rng(9);
  const std::size_t n = 400;
  std::vector<double> synth_flat(n), real_flat(n);
  std::vector<int> synth_labels(n), real_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = rng.next_bernoulli(0.5);
    synth_flat[i] = pos ? 0.7 + 0.3 * rng.next_uniform() : 0.3 * rng.next_uniform();
    synth_labels[i] = pos ? 1 : 0;
    const bool rpos = rng.next_bernoulli(0.5);
    real_flat[i] = rpos ? 0.7 + 0.3 * rng.next_uniform() : 0.3 * rng.next_uniform();
    real_labels[i] = rpos ? 1 : 0;
  }
  Dataset synth(std::move(synth_flat), n, 1, Source::kSynthetic, synth_labels);
  Dataset real(std::move(real_flat), n, 1, Source::kPrivate, real_labels);
  CHECK(downstream_auc(synth, WeightVector::uniform(n), real) > 0.99);
}

TEST_CASE("mahalanobis distance") {
  Eigen::VectorXd a(2), b(2);
  a << 1.0, 2.0;
  b << 1.0, 2.0;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  CHECK(mahalanobis(a, b, eye) == doctest::Approx(0.0));

  b << 4.0, 6.0;
  CHECK(mahalanobis(a, b, eye) == doctest::Approx(5.0));

  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(2, 2);
  diag(0, 0) = 4.0;
  diag(1, 1) = 1.0;
  b << 2.0, 2.0;
  CHECK(mahalanobis(a, b, diag) == doctest::Approx(0.5));

  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
  singular(0, 0) = 1.0;
  singular(1, 1) = -1.0;
  CHECK_THROWS_AS(mahalanobis(a, b, singular), InputError);
}
