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

// Per-backend entry points; the dispatcher in kernels.cpp routes to one set.

namespace dpiw::kernels::scalar {
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double weighted_sum(const double* w, const double* h, std::size_t n);
double weighted_sq_sum(const double* w, const double* h, std::size_t n);
double sq_dist(const double* a, const double* b, std::size_t d);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* a, const double* x, std::size_t rows, std::size_t cols,
            double* out);
double max(const double* x, std::size_t n);
}  // namespace dpiw::kernels::scalar

#if defined(DPIW_HAVE_AVX2_TU)
namespace dpiw::kernels::avx2 {
double sum(const double* x, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
double weighted_sum(const double* w, const double* h, std::size_t n);
double weighted_sq_sum(const double* w, const double* h, std::size_t n);
double sq_dist(const double* a, const double* b, std::size_t d);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void matvec(const double* a, const double* x, std::size_t rows, std::size_t cols,
            double* out);
double max(const double* x, std::size_t n);
}  // namespace dpiw::kernels::avx2
#endif
