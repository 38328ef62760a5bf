// SPDX-License-Identifier: Apache-2.0
#pragma once

// Linear Stokes algebra and the polarizer image-formation model.
//
// Conventions used throughout the library:
//  * radiance is linear, white level 1.0, no gamma;
//  * angles (AoP, polarizer orientation, surface azimuth) are measured in the
//    image plane from the +x (right) axis towards +y (down);
//  * AoP lives in [0, pi), DoP in [0, 1];
//  * multi-channel images are processed channel by channel.

#include <numbers>
#include <optional>

#include "polarbench/image.hpp"

namespace polarbench {

inline constexpr double kPi = std::numbers::pi;

/// Radiance floor below which S0 is treated as "no light" and the pixel is
/// marked invalid instead of dividing by it.
inline constexpr double kEpsS0 = 1e-6;

/// Rounding allowance before sqrt(S1^2 + S2^2) > S0 counts as unphysical.
inline constexpr double kPhysicalSlack = 1e-9;

/// Orientation of a linear polarizer's transmission axis, or no polarizer.
/// Stored reduced to [0, pi); the four canonical angles are snapped exactly
/// so that cos/sin of twice the angle are exact.
class PolarizerAngle {
 public:
  static PolarizerAngle none() { return PolarizerAngle(); }
  static PolarizerAngle radians(double alpha);
  static PolarizerAngle degrees(double alpha_deg);

  bool is_none() const { return !alpha_; }
  /// Reduced angle in [0, pi). Throws DomainError for "none".
  double radians() const;
  double degrees() const;
  double cos2() const { return cos2_; }
  double sin2() const { return sin2_; }

  bool operator==(const PolarizerAngle&) const = default;

 private:
  PolarizerAngle() = default;
  std::optional<double> alpha_;
  double cos2_ = 0.0;
  double sin2_ = 0.0;
};

/// Per-pixel linear Stokes triplet. s0 is non-negative; s1/s2 share its units.
struct StokesImage {
  Map s0;
  Map s1;
  Map s2;

  int width() const { return s0.width(); }
  int height() const { return s0.height(); }
  int channels() const { return s0.channels(); }

  /// 1 where sqrt(s1^2 + s2^2) <= s0 + slack. Violations come from noise or
  /// misregistration and are flagged here rather than clamped.
  Mask physical_mask(double slack = kPhysicalSlack) const;
};

/// AoP in [0, pi) and DoP in [0, 1] wherever valid.
struct PolarParams {
  Map aop;
  Map dop;
  Mask valid;

  int width() const { return aop.width(); }
  int height() const { return aop.height(); }
};

enum class DopClamp { clamp, raw };

/// Wrap an angle into [0, pi).
double wrap_pi(double angle);

/// Wrap-aware distance between two AoP values, in [0, pi/2].
double aop_distance(double a, double b);

/// I_alpha = (I_un / 2) * (1 + rho * cos 2(alpha - theta)); with no polarizer
/// the unattenuated radiance is returned.
double malus_intensity(double i_un, double dop, double aop, PolarizerAngle alpha);

StokesImage stokes_from_four(const IntensityImage& i0, const IntensityImage& i45, const IntensityImage& i90,
                             const IntensityImage& i135);

/// Stokes vector from one unpolarized and two polarized (0 and 45 degree)
/// co-registered measurements.
StokesImage stokes_from_triple(const IntensityImage& i_un, const IntensityImage& i0, const IntensityImage& i45);

/// AoP = atan2(S2, S1) / 2 mapped into [0, pi); DoP = |(S1, S2)| / S0.
/// Pixels with S0 <= kEpsS0 are invalid. With DopClamp::clamp, unphysical
/// pixels are also invalid and DoP is clamped into [0, 1]; DopClamp::raw
/// keeps the raw ratio and only masks the S0 degeneracy.
PolarParams params_from_stokes(const StokesImage& s, DopClamp mode = DopClamp::clamp);

/// Per-pixel max(|i0 + i90 - i_un|, |i45 + i135 - i_un|).
Map check_identity(const IntensityImage& i0, const IntensityImage& i90, const IntensityImage& i45,
                   const IntensityImage& i135, const IntensityImage& i_un);

/// Image seen through a polarizer at `alpha` given per-pixel AoP/DoP and the
/// unpolarized radiance. Invalid pixels receive i_un / 2.
IntensityImage synthesize_polarized(const PolarParams& params, const IntensityImage& i_un, PolarizerAngle alpha);

/// Stokes vector implied by polarization parameters and S0 (invalid pixels get
/// S1 = S2 = 0).
StokesImage stokes_from_params(const PolarParams& params, const IntensityImage& i_un);

}  // namespace polarbench
