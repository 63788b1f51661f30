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

#include <cstdint>
#include <cstddef>
#include <vector>

namespace dpiw {

/// Counter-based pseudo-random stream. A stream is fully identified by
/// (seed, stream id); identical identifiers reproduce identical draw
/// sequences regardless of thread schedule or call site. Substreams are
/// derived by hashing, so independent work items (chains, lots, weight
/// indices) can draw without coordinating a shared state.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Derives an independent stream keyed by (this stream, id). The child
  /// starts at counter zero; drawing from the parent does not affect it.
  RngStream substream(std::uint64_t id) const;

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0, 1).
  double next_uniform();

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n);

  /// Standard normal via Box-Muller; consumes two uniforms per draw.
  double next_normal();

  double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

  /// Laplace(location mu, scale b) by inverse CDF from a single uniform.
  double next_laplace(double mu, double b);

  /// Bernoulli(p).
  bool next_bernoulli(double p) { return next_uniform() < p; }

  /// In-place Fisher-Yates shuffle of indices 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace dpiw
