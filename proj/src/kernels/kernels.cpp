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

#include "dpiw/kernels/kernels.hpp"

#include <stdexcept>

#include "kernels_impl.hpp"

namespace dpiw::kernels {

namespace {

struct Vtable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*weighted_sum)(const double*, const double*, std::size_t);
  double (*weighted_sq_sum)(const double*, const double*, std::size_t);
  double (*sq_dist)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*matvec)(const double*, const double*, std::size_t, std::size_t, double*);
  double (*max)(const double*, std::size_t);
};

constexpr Vtable kScalarVtable = {
    scalar::sum,     scalar::dot,  scalar::weighted_sum, scalar::weighted_sq_sum,
    scalar::sq_dist, scalar::axpy, scalar::matvec,       scalar::max,
};

#if defined(DPIW_HAVE_AVX2_TU)
constexpr Vtable kAvx2Vtable = {
    avx2::sum,     avx2::dot,  avx2::weighted_sum, avx2::weighted_sq_sum,
    avx2::sq_dist, avx2::axpy, avx2::matvec,       avx2::max,
};
#endif

bool avx2_supported() {
#if defined(DPIW_HAVE_AVX2_TU) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend pick_backend() { return avx2_supported() ? Backend::kAvx2 : Backend::kScalar; }

Backend g_backend = pick_backend();

const Vtable& table() {
#if defined(DPIW_HAVE_AVX2_TU)
  if (g_backend == Backend::kAvx2) return kAvx2Vtable;
#endif
  return kScalarVtable;
}

}  // namespace

Backend active_backend() { return g_backend; }

void force_backend(Backend b) {
  if (b == Backend::kAvx2 && !avx2_supported())
    throw std::runtime_error("AVX2 backend not supported on this machine");
  g_backend = b;
}

double sum(const double* x, std::size_t n) { return table().sum(x, n); }
double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }
double weighted_sum(const double* w, const double* h, std::size_t n) {
  return table().weighted_sum(w, h, n);
}
double weighted_sq_sum(const double* w, const double* h, std::size_t n) {
  return table().weighted_sq_sum(w, h, n);
}
double sq_dist(const double* a, const double* b, std::size_t d) {
  return table().sq_dist(a, b, d);
}
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}
void matvec(const double* a, const double* x, std::size_t rows, std::size_t cols,
            double* out) {
  table().matvec(a, x, rows, cols, out);
}
double max(const double* x, std::size_t n) { return table().max(x, n); }

}  // namespace dpiw::kernels
