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
#include <cstdio>
#include <fstream>

#include "dpiw/core/dataset.hpp"
#include "dpiw/core/error.hpp"
#include "dpiw/core/privacy_ledger.hpp"
#include "dpiw/core/rng.hpp"
#include "dpiw/core/weights.hpp"

using namespace dpiw;

namespace {

Dataset column(std::vector<double> values) {
  const std::size_t n = values.size();
  return Dataset(std::move(values), n, 1, Source::kPrivate);
}

}  // namespace

TEST_CASE("rng streams are reproducible and independent") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
  }

  // Substreams do not disturb the parent and are themselves reproducible.
  RngStream parent(1);
  auto child1 = parent.substream(3);
  const double before = parent.next_uniform();
  auto child2 = RngStream(1).substream(3);
  CHECK(child1.next_uniform() == child2.next_uniform());
  RngStream parent2(1);
  (void)parent2.substream(3);
  CHECK(before == parent2.next_uniform());
}

TEST_CASE("rng moments are sane") {
  RngStream rng(2024);
  const int n = 200000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    mean += z;
    var += z * z;
  }
  mean /= n;
  var /= n;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(var - 1.0) < 0.02);

  double lap_mean = 0.0;
  for (int i = 0; i < n; ++i) lap_mean += rng.next_laplace(0.5, 2.0);
  CHECK(std::fabs(lap_mean / n - 0.5) < 0.03);
}

TEST_CASE("minmax scaling maps bounds to the unit interval") {
  auto result = minmax_scale(column({2.0, 4.0, 6.0}), {{2.0, 6.0}});
  CHECK(result.data.at(0, 0) == doctest::Approx(0.0));
  CHECK(result.data.at(1, 0) == doctest::Approx(0.5));
  CHECK(result.data.at(2, 0) == doctest::Approx(1.0));
  CHECK(result.clamped == 0);

  SUBCASE("identity on [0,1] bounds") {
    auto id = minmax_scale(column({0.0, 0.25, 1.0}), {{0.0, 1.0}});
    CHECK(id.data.at(1, 0) == doctest::Approx(0.25));
  }

  SUBCASE("out-of-bounds values clamp and are counted") {
    auto clamped = minmax_scale(column({8.0}), {{2.0, 6.0}});
    CHECK(clamped.data.at(0, 0) == doctest::Approx(1.0));
    CHECK(clamped.clamped == 1);
  }

  SUBCASE("scaling an already scaled dataset with unit bounds is idempotent") {
    auto once = minmax_scale(column({2.0, 4.0, 6.0}), {{2.0, 6.0}});
    auto twice = minmax_scale(once.data, {{0.0, 1.0}});
    for (std::size_t i = 0; i < 3; ++i) CHECK(twice.data.at(i, 0) == once.data.at(i, 0));
  }

  SUBCASE("degenerate bounds name the feature") {
    CHECK_THROWS_WITH_AS(minmax_scale(column({1.0}), {{3.0, 3.0}}),
                         doctest::Contains("feature 0"), InputError);
  }
}

TEST_CASE("train/test split sizes, determinism and label transport") {
  std::vector<double> f;
  std::vector<int> labels;
  for (int i = 0; i < 10; ++i) {
    f.push_back(i);
    labels.push_back(i % 2);
  }
  Dataset data(f, 10, 1, Source::kPrivate, labels);

  auto [train, test] = train_test_split(data, 0.8, RngStream(5));
  CHECK(train.rows() == 8);
  CHECK(test.rows() == 2);

  // Same seed, same partition; labels follow their rows.
  auto [train2, test2] = train_test_split(data, 0.8, RngStream(5));
  for (std::size_t i = 0; i < train.rows(); ++i) {
    CHECK(train.at(i, 0) == train2.at(i, 0));
    CHECK(train.label(i) == static_cast<int>(train.at(i, 0)) % 2);
  }

  SUBCASE("ceiling arithmetic at 569 rows") {
    std::vector<double> big(569, 0.0);
    for (std::size_t i = 0; i < 569; ++i) big[i] = static_cast<double>(i);
    auto [tr, te] = train_test_split(Dataset(big, 569, 1, Source::kPrivate), 0.8, RngStream(1));
    CHECK(tr.rows() == 456);
    CHECK(te.rows() == 113);
  }

  SUBCASE("single row cannot split") {
    CHECK_THROWS_AS(train_test_split(column({1.0}), 0.5, RngStream(1)), InputError);
  }
}

TEST_CASE("ledger composition adds epsilons and deltas") {
  const auto total = compose_spends({{3.0, 1e-5, "sdgp"}, {3.0, 0.0, "weights"}});
  CHECK(total.epsilon == doctest::Approx(6.0));
  CHECK(total.delta == doctest::Approx(1e-5));

  CHECK(compose_spends({}).epsilon == 0.0);

  std::vector<PrivacySpend> five(5, {1.0, 1e-6, "m"});
  const auto sum5 = compose_spends(five);
  CHECK(sum5.epsilon == doctest::Approx(5.0));
  CHECK(sum5.delta == doctest::Approx(5e-6));

  // Associativity/commutativity in (epsilon, delta).
  RngStream rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PrivacySpend> items;
    for (int i = 0; i < 6; ++i) items.push_back({rng.next_uniform(), rng.next_uniform() * 1e-4, ""});
    auto shuffled = items;
    const auto perm = rng.permutation(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) shuffled[i] = items[perm[i]];
    CHECK(compose_spends(items).epsilon == doctest::Approx(compose_spends(shuffled).epsilon));
    CHECK(compose_spends(items).delta == doctest::Approx(compose_spends(shuffled).delta));
  }
}

TEST_CASE("weight vectors live in log space with finite entries") {
  auto uniform = WeightVector::uniform(4);
  for (double v : uniform.values()) CHECK(v == 1.0);
  CHECK(uniform.releasable());

  CHECK_THROWS_AS(
      WeightVector::from_log({0.0, std::numeric_limits<double>::infinity()},
                             Provenance::kEstimated),
      InputError);

  auto est = WeightVector::from_log({0.1, -0.4, 2.0}, Provenance::kEstimated);
  CHECK_FALSE(est.releasable());
  auto priv = est.with_noise_metadata(0.25, false, {1.0, 0.0, "m"}, Provenance::kOutputLaplace,
                                      est.log_values());
  CHECK(priv.releasable());
  CHECK(priv.noise_factor_variance() == doctest::Approx(0.25));

  const auto mean_one = est.values_mean_one();
  double m = 0.0;
  for (double v : mean_one) m += v;
  CHECK(m / 3.0 == doctest::Approx(1.0));
}

TEST_CASE("csv round trip and rejection of malformed rows") {
  const char* path = "core_test_data.csv";
  {
    std::ofstream out(path);
    out << "x0,x1,y\n0.5,1.5,1\n0.25,2.5,0\n";
  }
  CsvOptions opts;
  opts.label_column = "y";
  const auto data = read_csv(path, Source::kPrivate, opts);
  CHECK(data.rows() == 2);
  CHECK(data.cols() == 2);
  CHECK(data.label(0) == 1);
  CHECK(data.at(1, 1) == doctest::Approx(2.5));

  {
    std::ofstream out(path);
    out << "x0,x1\n0.5\n";
  }
  CHECK_THROWS_WITH_AS(read_csv(path, Source::kPrivate, {}), doctest::Contains("line 2"),
                       InputError);

  {
    std::ofstream out(path);
    out << "x0\n0.5\n\n0.75,\n";
  }
  CHECK_THROWS_AS(read_csv(path, Source::kPrivate, {}), InputError);
  std::remove(path);
}
