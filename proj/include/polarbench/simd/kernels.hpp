// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-pixel arithmetic kernels with a scalar reference implementation and
// SIMD variants selected at runtime. Element-wise kernels are required to be
// bit-identical across variants (same operation order, no FMA); reductions
// may differ by summation order only.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace polarbench::simd {

enum class Isa { scalar, avx2, neon };

struct Kernels {
  Isa isa;

  /// s0 = un, s1 = 2*i0 - un, s2 = 2*i45 - un
  void (*stokes_triple)(const double* un, const double* i0, const double* i45, double* s0, double* s1,
                        double* s2, std::size_t n);

  /// s0 = (i0 + i45 + i90 + i135) / 2, s1 = i0 - i90, s2 = i45 - i135
  void (*stokes_four)(const double* i0, const double* i45, const double* i90, const double* i135, double* s0,
                      double* s1, double* s2, std::size_t n);

  /// out = max(0, 0.5*s0 * (1 + c*p1 + s*p2)); p1, p2 are rho*cos2theta, rho*sin2theta
  /// and (c, s) = (cos 2alpha, sin 2alpha).
  void (*synthesize)(const double* s0, const double* p1, const double* p2, double c, double s, double* out,
                     std::size_t n);

  /// ratio = sqrt(s1^2 + s2^2) / max(s0, eps); valid = s0 > eps
  void (*dop_ratio)(const double* s0, const double* s1, const double* s2, double eps, double* ratio,
                    std::uint8_t* valid, std::size_t n);

  /// out = max(|i0 + i90 - un|, |i45 + i135 - un|)
  void (*identity_residual)(const double* i0, const double* i90, const double* i45, const double* i135,
                            const double* un, double* out, std::size_t n);

  /// sum of (a - b)^2 over mask != 0 (mask may be null for all pixels)
  double (*sum_sq_diff)(const double* a, const double* b, const std::uint8_t* mask, std::size_t n);

  /// sum of |a - b|
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);

  /// sum of w * |a - b|
  double (*sum_weighted_abs_diff)(const double* a, const double* b, const double* w, std::size_t n);
};

std::string_view isa_name(Isa isa);

/// True when the variant is compiled in and the running CPU supports it.
bool isa_supported(Isa isa);

/// All supported variants, scalar first.
std::vector<Isa> supported_isas();

/// Kernel table for a specific variant; throws ConfigError when unsupported.
const Kernels& kernels_for(Isa isa);

/// The best supported variant, unless POLARBENCH_SIMD names another one
/// ("scalar", "avx2", "neon"). Resolved once per process.
const Kernels& active();

namespace detail {
const Kernels& scalar_kernels();
const Kernels* avx2_kernels();  // nullptr when not compiled in
const Kernels* neon_kernels();
}  // namespace detail

}  // namespace polarbench::simd
