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

#include "dpiw/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace dpiw {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stafford variant 13 of the splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t key_of(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGolden * mix64(stream + kGolden));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, mix64(stream_ + kGolden * mix64(id + 1)));
}

std::uint64_t RngStream::next_u64() {
  // splitmix64 keyed by (seed, stream): output is a pure function of the
  // identifiers and the running counter.
  return mix64(key_of(seed_, stream_) + kGolden * ++counter_);
}

double RngStream::next_uniform() {
  // 53-bit mantissa shifted into (0, 1); the +0.5 keeps both endpoints out.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  // Rejection-free multiply-shift; bias is negligible for n << 2^64.
  return static_cast<std::uint64_t>(next_uniform() * static_cast<double>(n)) % n;
}

double RngStream::next_normal() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::next_laplace(double mu, double b) {
  const double u = next_uniform() - 0.5;
  const double sign = u < 0.0 ? -1.0 : 1.0;
  return mu - b * sign * std::log(1.0 - 2.0 * std::fabs(u));
}

std::vector<std::size_t> RngStream::permutation(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace dpiw
