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

#include <cstdio>
#include <fstream>

#include "dpiw/cli/experiment.hpp"
#include "dpiw/core/error.hpp"

using namespace dpiw;
using namespace dpiw::cli;

namespace {

ExperimentConfig small_config(Scheme scheme) {
  ExperimentConfig cfg;
  cfg.preset = "gmm-grid";
  cfg.n = 300;
  cfg.scheme = scheme;
  cfg.seeds = {1, 2};
  cfg.metrics = {"wasserstein"};
  return cfg;
}

}  // namespace

TEST_CASE("reports are byte-identical for identical configs and seeds") {
  const auto cfg = small_config(Scheme::kLogReg);
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  CHECK(a.doc.dump() == b.doc.dump());
  CHECK(a.seeds_failed == 0);
}

TEST_CASE("unweighted and exact-weight schemes consume no budget") {
  for (const auto scheme : {Scheme::kNone, Scheme::kTrue}) {
    const auto report = run_experiment(small_config(scheme));
    CHECK(report.doc.at("privacy_ledger").at("epsilon").get<double>() == 0.0);
    CHECK(report.doc.at("privacy_ledger").at("delta").get<double>() == 0.0);
  }
}

TEST_CASE("output noising consumes exactly the configured budget per seed") {
  auto cfg = small_config(Scheme::kOutputLaplace);
  cfg.epsilon = 4.0;
  const auto report = run_experiment(cfg);
  CHECK(report.seeds_failed == 0);
  // One mechanism invocation per seed; the rho rule prices each release
  // so the per-seed total telescopes back to the budget.
  const double total = report.doc.at("privacy_ledger").at("epsilon").get<double>();
  CHECK(total == doctest::Approx(4.0 * 2).epsilon(0.02));
}

TEST_CASE("coefficient noising records its spend in the ledger") {
  auto cfg = small_config(Scheme::kBetaNoised);
  cfg.epsilon = 3.0;
  const auto report = run_experiment(cfg);
  CHECK(report.doc.at("privacy_ledger").at("epsilon").get<double>() ==
        doctest::Approx(6.0));  // two seeds
}

TEST_CASE("aggregate table carries means and intervals") {
  const auto report = run_experiment(small_config(Scheme::kNone));
  const auto& agg = report.doc.at("aggregate");
  REQUIRE(agg.contains("wasserstein"));
  const double mean = agg.at("wasserstein").at("mean").get<double>();
  const double lo = agg.at("wasserstein").at("ci95").at(0).get<double>();
  const double hi = agg.at("wasserstein").at("ci95").at(1).get<double>();
  CHECK(lo <= mean);
  CHECK(mean <= hi);

  const auto csv = report_csv(report.doc);
  CHECK(csv.find("metric,mean,ci95_lo,ci95_hi") == 0);
  CHECK(csv.find("wasserstein") != std::string::npos);
}

TEST_CASE("per-seed failures are recorded without sinking the run") {
  auto cfg = small_config(Scheme::kDiscriminator);
  cfg.discriminator_csv = "missing_file.csv";
  const auto report = run_experiment(cfg);
  CHECK(report.seeds_failed == 2);
  CHECK(report.all_failed());
  CHECK(report.doc.at("per_seed").at(0).contains("error"));
}

TEST_CASE("release policy") {
  const char* path = "cli_release_test.csv";

  SUBCASE("raw estimates are refused without the override") {
    const auto raw = WeightVector::from_log({0.1, 0.2}, Provenance::kEstimated);
    CHECK_THROWS_WITH_AS(write_release_csv(raw, path, false), doctest::Contains("refusing"),
                         InputError);
    CHECK_NOTHROW(write_release_csv(raw, path, true));
    const auto back = read_release_csv(path);
    CHECK_FALSE(back.releasable());
    CHECK(back.log_value(1) == doctest::Approx(0.2));
  }

  SUBCASE("privatized weights round-trip with their spend") {
    const auto priv = WeightVector::from_log({0.5, -0.1, 0.3}, Provenance::kOutputLaplace,
                                             PrivacySpend{2.5, 0.0, "mechanism"});
    write_release_csv(priv, path, false);
    const auto back = read_release_csv(path);
    CHECK(back.provenance() == Provenance::kOutputLaplace);
    REQUIRE(back.spend().has_value());
    CHECK(back.spend()->epsilon == doctest::Approx(2.5));
    CHECK(back.releasable());
  }

  SUBCASE("uniform weights release at zero cost") {
    write_release_csv(WeightVector::uniform(3), path, false);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "index,log_weight,provenance,epsilon,delta");
    std::getline(in, row);
    CHECK(row.find("uniform") != std::string::npos);
  }

  std::remove(path);
}

TEST_CASE("configs round-trip through json") {
  auto cfg = small_config(Scheme::kOutputGaussian);
  cfg.epsilon = 2.5;
  cfg.psis = true;
  cfg.temper_tau = 0.8;
  cfg.bounds = {{-1.0, 1.0}, {-2.0, 2.0}};
  const auto rebuilt = ExperimentConfig::from_json(cfg.to_json());
  CHECK(rebuilt.to_json().dump() == cfg.to_json().dump());
}

TEST_CASE("config validation") {
  auto cfg = small_config(Scheme::kOutputLaplace);
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(run_experiment(cfg), InputError);
  cfg = small_config(Scheme::kNone);
  cfg.seeds.clear();
  CHECK_THROWS_AS(run_experiment(cfg), InputError);
  cfg = small_config(Scheme::kNone);
  cfg.preset = "";
  CHECK_THROWS_AS(run_experiment(cfg), InputError);
}

TEST_CASE("postprocessing shows up in the report") {
  auto cfg = small_config(Scheme::kLogReg);
  cfg.psis = true;
  cfg.temper_tau = 0.9;
  const auto report = run_experiment(cfg);
  CHECK(report.seeds_failed == 0);
  const auto& seed0 = report.doc.at("per_seed").at(0);
  REQUIRE(seed0.contains("psis"));
  CHECK(seed0.at("psis").contains("k_hat"));
  CHECK(seed0.at("weights").at("provenance") == "smoothed");
}
