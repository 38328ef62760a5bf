// SPDX-License-Identifier: Apache-2.0
// AArch64 NEON variants (two double lanes). NEON is architecturally
// guaranteed on AArch64, so no runtime probe is needed beyond the build.

#include "polarbench/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace polarbench::simd {
namespace {

constexpr std::size_t kLanes = 2;

void stokes_triple(const double* un, const double* i0, const double* i45, double* s0, double* s1, double* s2,
                   std::size_t n) {
  const float64x2_t two = vdupq_n_f64(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t u = vld1q_f64(un + i);
    vst1q_f64(s0 + i, u);
    vst1q_f64(s1 + i, vsubq_f64(vmulq_f64(two, vld1q_f64(i0 + i)), u));
    vst1q_f64(s2 + i, vsubq_f64(vmulq_f64(two, vld1q_f64(i45 + i)), u));
  }
  detail::scalar_kernels().stokes_triple(un + i, i0 + i, i45 + i, s0 + i, s1 + i, s2 + i, n - i);
}

void stokes_four(const double* i0, const double* i45, const double* i90, const double* i135, double* s0,
                 double* s1, double* s2, std::size_t n) {
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t a = vld1q_f64(i0 + i);
    const float64x2_t b = vld1q_f64(i45 + i);
    const float64x2_t c = vld1q_f64(i90 + i);
    const float64x2_t d = vld1q_f64(i135 + i);
    vst1q_f64(s0 + i, vmulq_f64(vaddq_f64(vaddq_f64(vaddq_f64(a, b), c), d), half));
    vst1q_f64(s1 + i, vsubq_f64(a, c));
    vst1q_f64(s2 + i, vsubq_f64(b, d));
  }
  detail::scalar_kernels().stokes_four(i0 + i, i45 + i, i90 + i, i135 + i, s0 + i, s1 + i, s2 + i, n - i);
}

void synthesize(const double* s0, const double* p1, const double* p2, double c, double s, double* out,
                std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t half = vdupq_n_f64(0.5);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t mod =
        vaddq_f64(vaddq_f64(one, vmulq_f64(vc, vld1q_f64(p1 + i))), vmulq_f64(vs, vld1q_f64(p2 + i)));
    const float64x2_t v = vmulq_f64(vmulq_f64(half, vld1q_f64(s0 + i)), mod);
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(v, zero), v, zero));
  }
  detail::scalar_kernels().synthesize(s0 + i, p1 + i, p2 + i, c, s, out + i, n - i);
}

void dop_ratio(const double* s0, const double* s1, const double* s2, double eps, double* ratio,
               std::uint8_t* valid, std::size_t n) {
  const float64x2_t veps = vdupq_n_f64(eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t a = vld1q_f64(s1 + i);
    const float64x2_t b = vld1q_f64(s2 + i);
    const float64x2_t z = vld1q_f64(s0 + i);
    const float64x2_t mag = vsqrtq_f64(vaddq_f64(vmulq_f64(a, a), vmulq_f64(b, b)));
    const uint64x2_t ok = vcgtq_f64(z, veps);
    vst1q_f64(ratio + i, vdivq_f64(mag, vbslq_f64(ok, z, veps)));
    valid[i] = vgetq_lane_u64(ok, 0) ? 1 : 0;
    valid[i + 1] = vgetq_lane_u64(ok, 1) ? 1 : 0;
  }
  detail::scalar_kernels().dop_ratio(s0 + i, s1 + i, s2 + i, eps, ratio + i, valid + i, n - i);
}

void identity_residual(const double* i0, const double* i90, const double* i45, const double* i135,
                       const double* un, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t u = vld1q_f64(un + i);
    const float64x2_t a = vabsq_f64(vsubq_f64(vaddq_f64(vld1q_f64(i0 + i), vld1q_f64(i90 + i)), u));
    const float64x2_t b = vabsq_f64(vsubq_f64(vaddq_f64(vld1q_f64(i45 + i), vld1q_f64(i135 + i)), u));
    vst1q_f64(out + i, vbslq_f64(vcgtq_f64(a, b), a, b));
  }
  detail::scalar_kernels().identity_residual(i0 + i, i90 + i, i45 + i, i135 + i, un + i, out + i, n - i);
}

double sum_sq_diff(const double* a, const double* b, const std::uint8_t* mask, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    float64x2_t sq = vmulq_f64(d, d);
    if (mask) {
      const uint64x2_t keep = {mask[i] ? ~0ull : 0ull, mask[i + 1] ? ~0ull : 0ull};
      sq = vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(sq), keep));
    }
    acc = vaddq_f64(acc, sq);
  }
  return vaddvq_f64(acc) + detail::scalar_kernels().sum_sq_diff(a + i, b + i, mask ? mask + i : nullptr, n - i);
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  return vaddvq_f64(acc) + detail::scalar_kernels().sum_abs_diff(a + i, b + i, n - i);
}

double sum_weighted_abs_diff(const double* a, const double* b, const double* w, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(w + i), vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
  }
  return vaddvq_f64(acc) + detail::scalar_kernels().sum_weighted_abs_diff(a + i, b + i, w + i, n - i);
}

constexpr Kernels kNeon{
    Isa::neon,   stokes_triple, stokes_four,  synthesize,           dop_ratio, identity_residual,
    sum_sq_diff, sum_abs_diff,  sum_weighted_abs_diff,
};

}  // namespace

const Kernels* detail::neon_kernels() { return &kNeon; }

}  // namespace polarbench::simd

#else

namespace polarbench::simd {
const Kernels* detail::neon_kernels() { return nullptr; }
}  // namespace polarbench::simd

#endif
