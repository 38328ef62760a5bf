// SPDX-License-Identifier: Apache-2.0
// AVX2 variants. This translation unit is built with -mavx2 (and without
// -mfma) and is only entered after a runtime CPU check.

#include "polarbench/simd/kernels.hpp"

#if defined(POLARBENCH_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace polarbench::simd {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// 4 mask bytes -> all-ones lanes where the byte is non-zero
inline __m256d mask_pd(const std::uint8_t* m) {
  int packed;
  __builtin_memcpy(&packed, m, sizeof(packed));
  const __m128i bytes = _mm_cvtsi32_si128(packed);
  const __m256i wide = _mm256_cvtepu8_epi64(bytes);
  const __m256i nz = _mm256_cmpeq_epi64(wide, _mm256_setzero_si256());
  return _mm256_castsi256_pd(_mm256_xor_si256(nz, _mm256_set1_epi64x(-1)));
}

void stokes_triple(const double* un, const double* i0, const double* i45, double* s0, double* s1, double* s2,
                   std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d u = _mm256_loadu_pd(un + i);
    _mm256_storeu_pd(s0 + i, u);
    _mm256_storeu_pd(s1 + i, _mm256_sub_pd(_mm256_mul_pd(two, _mm256_loadu_pd(i0 + i)), u));
    _mm256_storeu_pd(s2 + i, _mm256_sub_pd(_mm256_mul_pd(two, _mm256_loadu_pd(i45 + i)), u));
  }
  detail::scalar_kernels().stokes_triple(un + i, i0 + i, i45 + i, s0 + i, s1 + i, s2 + i, n - i);
}

void stokes_four(const double* i0, const double* i45, const double* i90, const double* i135, double* s0,
                 double* s1, double* s2, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(i0 + i);
    const __m256d b = _mm256_loadu_pd(i45 + i);
    const __m256d c = _mm256_loadu_pd(i90 + i);
    const __m256d d = _mm256_loadu_pd(i135 + i);
    _mm256_storeu_pd(s0 + i, _mm256_mul_pd(_mm256_add_pd(_mm256_add_pd(_mm256_add_pd(a, b), c), d), half));
    _mm256_storeu_pd(s1 + i, _mm256_sub_pd(a, c));
    _mm256_storeu_pd(s2 + i, _mm256_sub_pd(b, d));
  }
  detail::scalar_kernels().stokes_four(i0 + i, i45 + i, i90 + i, i135 + i, s0 + i, s1 + i, s2 + i, n - i);
}

void synthesize(const double* s0, const double* p1, const double* p2, double c, double s, double* out,
                std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d mod = _mm256_add_pd(_mm256_add_pd(one, _mm256_mul_pd(vc, _mm256_loadu_pd(p1 + i))),
                                      _mm256_mul_pd(vs, _mm256_loadu_pd(p2 + i)));
    const __m256d v = _mm256_mul_pd(_mm256_mul_pd(half, _mm256_loadu_pd(s0 + i)), mod);
    // max(v, 0) with the scalar tie-break: v > 0 ? v : 0
    _mm256_storeu_pd(out + i, _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ)));
  }
  detail::scalar_kernels().synthesize(s0 + i, p1 + i, p2 + i, c, s, out + i, n - i);
}

void dop_ratio(const double* s0, const double* s1, const double* s2, double eps, double* ratio,
               std::uint8_t* valid, std::size_t n) {
  const __m256d veps = _mm256_set1_pd(eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(s1 + i);
    const __m256d b = _mm256_loadu_pd(s2 + i);
    const __m256d z = _mm256_loadu_pd(s0 + i);
    const __m256d mag = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
    const __m256d ok = _mm256_cmp_pd(z, veps, _CMP_GT_OQ);
    const __m256d den = _mm256_blendv_pd(veps, z, ok);
    _mm256_storeu_pd(ratio + i, _mm256_div_pd(mag, den));
    const int bits = _mm256_movemask_pd(ok);
    for (std::size_t k = 0; k < kLanes; ++k) valid[i + k] = (bits >> k) & 1;
  }
  detail::scalar_kernels().dop_ratio(s0 + i, s1 + i, s2 + i, eps, ratio + i, valid + i, n - i);
}

void identity_residual(const double* i0, const double* i90, const double* i45, const double* i135,
                       const double* un, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d u = _mm256_loadu_pd(un + i);
    const __m256d a = abs_pd(_mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(i0 + i), _mm256_loadu_pd(i90 + i)), u));
    const __m256d b =
        abs_pd(_mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(i45 + i), _mm256_loadu_pd(i135 + i)), u));
    // a > b ? a : b
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(b, a, _mm256_cmp_pd(a, b, _CMP_GT_OQ)));
  }
  detail::scalar_kernels().identity_residual(i0 + i, i90 + i, i45 + i, i135 + i, un + i, out + i, n - i);
}

double sum_sq_diff(const double* a, const double* b, const std::uint8_t* mask, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    __m256d sq = _mm256_mul_pd(d, d);
    if (mask) sq = _mm256_and_pd(sq, mask_pd(mask + i));
    acc = _mm256_add_pd(acc, sq);
  }
  return hsum(acc) + detail::scalar_kernels().sum_sq_diff(a + i, b + i, mask ? mask + i : nullptr, n - i);
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = _mm256_add_pd(acc, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  return hsum(acc) + detail::scalar_kernels().sum_abs_diff(a + i, b + i, n - i);
}

double sum_weighted_abs_diff(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), d));
  }
  return hsum(acc) + detail::scalar_kernels().sum_weighted_abs_diff(a + i, b + i, w + i, n - i);
}

constexpr Kernels kAvx2{
    Isa::avx2,   stokes_triple, stokes_four,  synthesize,           dop_ratio, identity_residual,
    sum_sq_diff, sum_abs_diff,  sum_weighted_abs_diff,
};

}  // namespace

const Kernels* detail::avx2_kernels() { return &kAvx2; }

}  // namespace polarbench::simd

#else

namespace polarbench::simd {
const Kernels* detail::avx2_kernels() { return nullptr; }
}  // namespace polarbench::simd

#endif
