// SPDX-License-Identifier: Apache-2.0
#include "polarbench/polar_core.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "polarbench/simd/kernels.hpp"

namespace polarbench {

namespace {

constexpr double kSnap = 1e-12;

// Modulation terms rho*cos(2 theta), rho*sin(2 theta) of a parameter map;
// zero where the pixel is invalid.
void modulation(const PolarParams& params, std::vector<double>& p1, std::vector<double>& p2) {
  const std::size_t n = params.aop.size();
  p1.assign(n, 0.0);
  p2.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!params.valid[i]) continue;
    const double twice = 2.0 * params.aop[i];
    p1[i] = params.dop[i] * std::cos(twice);
    p2[i] = params.dop[i] * std::sin(twice);
  }
}

}  // namespace

PolarizerAngle PolarizerAngle::radians(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("polarizer angle must be finite");
  double r = std::fmod(alpha, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r -= kPi;

  PolarizerAngle out;
  static constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0, 1.0};
  static constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0, 0.0};
  for (int k = 0; k <= 4; ++k) {
    if (std::fabs(r - k * (kPi / 4.0)) < kSnap) {
      out.alpha_ = (k == 4) ? 0.0 : k * (kPi / 4.0);
      out.cos2_ = kCos[k];
      out.sin2_ = kSin[k];
      return out;
    }
  }
  out.alpha_ = r;
  out.cos2_ = std::cos(2.0 * r);
  out.sin2_ = std::sin(2.0 * r);
  return out;
}

PolarizerAngle PolarizerAngle::degrees(double alpha_deg) { return radians(alpha_deg * kPi / 180.0); }

double PolarizerAngle::radians() const {
  if (!alpha_) throw DomainError("polarizer angle requested for an unpolarized channel");
  return *alpha_;
}

double PolarizerAngle::degrees() const { return radians() * 180.0 / kPi; }

Mask StokesImage::physical_mask(double slack) const {
  Mask out(s0.width(), s0.height(), s0.channels());
  for (std::size_t i = 0; i < s0.size(); ++i) {
    out[i] = std::hypot(s1[i], s2[i]) <= s0[i] + slack ? 1 : 0;
  }
  return out;
}

double wrap_pi(double angle) {
  double r = std::fmod(angle, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

double aop_distance(double a, double b) {
  const double d = std::fabs(wrap_pi(a) - wrap_pi(b));
  return std::min(d, kPi - d);
}

double malus_intensity(double i_un, double dop, double aop, PolarizerAngle alpha) {
  if (!(i_un >= 0.0) || !std::isfinite(i_un)) throw DomainError("malus_intensity: i_un must be finite and >= 0");
  if (!(dop >= 0.0 && dop <= 1.0)) throw DomainError("malus_intensity: dop must lie in [0, 1]");
  if (alpha.is_none()) return i_un;
  const double twice = 2.0 * aop;
  const double p1 = dop * std::cos(twice);
  const double p2 = dop * std::sin(twice);
  // Same operation order as the synthesize kernel.
  const double mod = (1.0 + alpha.cos2() * p1) + alpha.sin2() * p2;
  const double v = (0.5 * i_un) * mod;
  return v > 0.0 ? v : 0.0;
}

StokesImage stokes_from_four(const IntensityImage& i0, const IntensityImage& i45, const IntensityImage& i90,
                             const IntensityImage& i135) {
  require_same_shape(i0, i45, "stokes_from_four");
  require_same_shape(i0, i90, "stokes_from_four");
  require_same_shape(i0, i135, "stokes_from_four");
  StokesImage s{Map(i0.width(), i0.height(), i0.channels()), Map(i0.width(), i0.height(), i0.channels()),
                Map(i0.width(), i0.height(), i0.channels())};
  simd::active().stokes_four(i0.values().data(), i45.values().data(), i90.values().data(), i135.values().data(),
                             s.s0.values().data(), s.s1.values().data(), s.s2.values().data(), i0.size());
  return s;
}

StokesImage stokes_from_triple(const IntensityImage& i_un, const IntensityImage& i0, const IntensityImage& i45) {
  require_same_shape(i_un, i0, "stokes_from_triple");
  require_same_shape(i_un, i45, "stokes_from_triple");
  StokesImage s{Map(i_un.width(), i_un.height(), i_un.channels()), Map(i_un.width(), i_un.height(), i_un.channels()),
                Map(i_un.width(), i_un.height(), i_un.channels())};
  simd::active().stokes_triple(i_un.values().data(), i0.values().data(), i45.values().data(), s.s0.values().data(),
                               s.s1.values().data(), s.s2.values().data(), i_un.size());
  return s;
}

PolarParams params_from_stokes(const StokesImage& s, DopClamp mode) {
  require_same_shape(s.s0, s.s1, "params_from_stokes");
  require_same_shape(s.s0, s.s2, "params_from_stokes");
  const int w = s.width(), h = s.height(), c = s.channels();
  PolarParams p{Map(w, h, c), Map(w, h, c), Mask(w, h, c)};
  simd::active().dop_ratio(s.s0.values().data(), s.s1.values().data(), s.s2.values().data(), kEpsS0,
                           p.dop.values().data(), p.valid.values().data(), s.s0.size());
  for (std::size_t i = 0; i < s.s0.size(); ++i) {
    // atan2 lands in (-pi, pi]; halve and fold into [0, pi).
    p.aop[i] = wrap_pi(0.5 * std::atan2(s.s2[i], s.s1[i]));
    if (mode == DopClamp::clamp) {
      if (p.dop[i] > 1.0 + kPhysicalSlack) p.valid[i] = 0;
      p.dop[i] = std::clamp(p.dop[i], 0.0, 1.0);
    }
    if (!std::isfinite(p.dop[i]) || !std::isfinite(p.aop[i])) {
      p.dop[i] = 0.0;
      p.aop[i] = 0.0;
      p.valid[i] = 0;
    }
  }
  return p;
}

Map check_identity(const IntensityImage& i0, const IntensityImage& i90, const IntensityImage& i45,
                   const IntensityImage& i135, const IntensityImage& i_un) {
  require_same_shape(i0, i90, "check_identity");
  require_same_shape(i0, i45, "check_identity");
  require_same_shape(i0, i135, "check_identity");
  require_same_shape(i0, i_un, "check_identity");
  Map out(i0.width(), i0.height(), i0.channels());
  simd::active().identity_residual(i0.values().data(), i90.values().data(), i45.values().data(),
                                   i135.values().data(), i_un.values().data(), out.values().data(), i0.size());
  return out;
}

IntensityImage synthesize_polarized(const PolarParams& params, const IntensityImage& i_un, PolarizerAngle alpha) {
  require_same_shape(params.aop, i_un, "synthesize_polarized");
  require_same_shape(params.dop, i_un, "synthesize_polarized");
  require_same_shape(params.valid, i_un, "synthesize_polarized");
  if (alpha.is_none()) return i_un;
  std::vector<double> p1, p2;
  modulation(params, p1, p2);
  Map out(i_un.width(), i_un.height(), i_un.channels());
  simd::active().synthesize(i_un.values().data(), p1.data(), p2.data(), alpha.cos2(), alpha.sin2(),
                            out.values().data(), i_un.size());
  return IntensityImage(std::move(out));
}

StokesImage stokes_from_params(const PolarParams& params, const IntensityImage& i_un) {
  require_same_shape(params.aop, i_un, "stokes_from_params");
  std::vector<double> p1, p2;
  modulation(params, p1, p2);
  const int w = i_un.width(), h = i_un.height(), c = i_un.channels();
  StokesImage s{Map(w, h, c), Map(w, h, c), Map(w, h, c)};
  for (std::size_t i = 0; i < i_un.size(); ++i) {
    s.s0[i] = i_un[i];
    s.s1[i] = i_un[i] * p1[i];
    s.s2[i] = i_un[i] * p2[i];
  }
  return s;
}

}  // namespace polarbench
