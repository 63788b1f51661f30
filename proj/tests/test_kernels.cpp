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
#include <vector>

#include "dpiw/core/rng.hpp"
#include "dpiw/kernels/kernels.hpp"

using namespace dpiw;

namespace {

struct BackendGuard {
  kernels::Backend saved = kernels::active_backend();
  ~BackendGuard() { kernels::force_backend(saved); }
};

std::vector<double> random_vec(RngStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_normal();
  return v;
}

}  // namespace

// The vector backend must agree with the scalar reference up to
// reassociation error on every kernel and length (including remainders
// around the lane width).
TEST_CASE("scalar and vector backends are equivalent") {
  if (kernels::active_backend() != kernels::Backend::kAvx2) {
    MESSAGE("AVX2 unavailable; dispatcher runs scalar only");
    return;
  }
  BackendGuard guard;
  RngStream rng(77);

  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 15u, 64u, 1000u, 4097u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    const double tol = 1e-12 * static_cast<double>(n);

    kernels::force_backend(kernels::Backend::kScalar);
    const double s_sum = kernels::sum(a.data(), n);
    const double s_dot = kernels::dot(a.data(), b.data(), n);
    const double s_ws = kernels::weighted_sum(a.data(), b.data(), n);
    const double s_wss = kernels::weighted_sq_sum(a.data(), b.data(), n);
    const double s_sq = kernels::sq_dist(a.data(), b.data(), n);
    const double s_max = kernels::max(a.data(), n);
    std::vector<double> s_y = b;
    kernels::axpy(0.37, a.data(), s_y.data(), n);

    kernels::force_backend(kernels::Backend::kAvx2);
    CHECK(kernels::sum(a.data(), n) == doctest::Approx(s_sum).epsilon(tol));
    CHECK(kernels::dot(a.data(), b.data(), n) == doctest::Approx(s_dot).epsilon(tol));
    CHECK(kernels::weighted_sum(a.data(), b.data(), n) == doctest::Approx(s_ws).epsilon(tol));
    CHECK(kernels::weighted_sq_sum(a.data(), b.data(), n) ==
          doctest::Approx(s_wss).epsilon(tol));
    CHECK(kernels::sq_dist(a.data(), b.data(), n) == doctest::Approx(s_sq).epsilon(tol));
    CHECK(kernels::max(a.data(), n) == s_max);
    std::vector<double> v_y = b;
    kernels::axpy(0.37, a.data(), v_y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(v_y[i] == doctest::Approx(s_y[i]));
  }
}

TEST_CASE("matvec matches per-row dot products") {
  BackendGuard guard;
  RngStream rng(5);
  const std::size_t rows = 13, cols = 29;
  const auto a = random_vec(rng, rows * cols);
  const auto x = random_vec(rng, cols);
  std::vector<double> out(rows);
  kernels::matvec(a.data(), x.data(), rows, cols, out.data());
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += a[r * cols + c] * x[c];
    CHECK(out[r] == doctest::Approx(acc));
  }
}

TEST_CASE("kernel identities") {
  RngStream rng(6);
  const auto a = random_vec(rng, 257);
  // sq_dist(x, x) = 0 and sq_dist = |a|^2 against zero.
  CHECK(kernels::sq_dist(a.data(), a.data(), a.size()) == 0.0);
  std::vector<double> zero(a.size(), 0.0);
  CHECK(kernels::sq_dist(a.data(), zero.data(), a.size()) ==
        doctest::Approx(kernels::dot(a.data(), a.data(), a.size())));
}
