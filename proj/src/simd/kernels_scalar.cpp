// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>

#include "polarbench/simd/kernels.hpp"

namespace polarbench::simd {
namespace {

void stokes_triple(const double* un, const double* i0, const double* i45, double* s0, double* s1, double* s2,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double u = un[i];
    s0[i] = u;
    s1[i] = 2.0 * i0[i] - u;
    s2[i] = 2.0 * i45[i] - u;
  }
}

void stokes_four(const double* i0, const double* i45, const double* i90, const double* i135, double* s0,
                 double* s1, double* s2, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    s0[i] = (((i0[i] + i45[i]) + i90[i]) + i135[i]) * 0.5;
    s1[i] = i0[i] - i90[i];
    s2[i] = i45[i] - i135[i];
  }
}

void synthesize(const double* s0, const double* p1, const double* p2, double c, double s, double* out,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mod = (1.0 + c * p1[i]) + s * p2[i];
    const double v = (0.5 * s0[i]) * mod;
    out[i] = v > 0.0 ? v : 0.0;
  }
}

void dop_ratio(const double* s0, const double* s1, const double* s2, double eps, double* ratio,
               std::uint8_t* valid, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::sqrt(s1[i] * s1[i] + s2[i] * s2[i]);
    const bool ok = s0[i] > eps;
    ratio[i] = mag / (ok ? s0[i] : eps);
    valid[i] = ok ? 1 : 0;
  }
}

void identity_residual(const double* i0, const double* i90, const double* i45, const double* i135,
                       const double* un, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs((i0[i] + i90[i]) - un[i]);
    const double b = std::fabs((i45[i] + i135[i]) - un[i]);
    out[i] = a > b ? a : b;
  }
}

double sum_sq_diff(const double* a, const double* b, const std::uint8_t* mask, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask && !mask[i]) continue;
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
  return acc;
}

double sum_weighted_abs_diff(const double* a, const double* b, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * std::fabs(a[i] - b[i]);
  return acc;
}

constexpr Kernels kScalar{
    Isa::scalar,     stokes_triple, stokes_four,  synthesize,           dop_ratio, identity_residual,
    sum_sq_diff,     sum_abs_diff,  sum_weighted_abs_diff,
};

}  // namespace

const Kernels& detail::scalar_kernels() { return kScalar; }

}  // namespace polarbench::simd
