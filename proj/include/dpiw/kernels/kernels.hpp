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

#include <cstddef>

// Data-parallel inner loops used across the library. Every kernel has a
// scalar reference implementation and, on x86-64 with AVX2+FMA, a vector
// variant selected once at startup. Results of the two backends agree to
// floating-point reassociation error; the equivalence suite pins this down.

namespace dpiw::kernels {

enum class Backend { kScalar, kAvx2 };

Backend active_backend();

/// Overrides backend selection (tests only). Throws if the requested
/// backend is not supported on this machine.
void force_backend(Backend b);

/// Sum of x[0..n).
double sum(const double* x, std::size_t n);

/// Dot product of a and b.
double dot(const double* a, const double* b, std::size_t n);

/// Sum of w[i] * h[i].
double weighted_sum(const double* w, const double* h, std::size_t n);

/// Sum of (w[i] * h[i])^2.
double weighted_sq_sum(const double* w, const double* h, std::size_t n);

/// Squared Euclidean distance between a and b in R^d.
double sq_dist(const double* a, const double* b, std::size_t d);

/// y[i] += alpha * x[i].
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// out = A x for row-major A (rows x cols).
void matvec(const double* a, const double* x, std::size_t rows, std::size_t cols,
            double* out);

/// Maximum of x[0..n); n must be positive.
double max(const double* x, std::size_t n);

}  // namespace dpiw::kernels
