// SPDX-License-Identifier: Apache-2.0
#pragma once

// Acquisition paradigms: sequential rotating polarizer (DoT), 2x2 micro-
// polarizer mosaic (DoFP) and the three-camera rig, with sensor noise and
// per-camera radiometric mismatch.

#include <Eigen/Core>
#include <array>
#include <cstdint>

#include "polarbench/fresnel_geom.hpp"
#include "polarbench/polar_core.hpp"
#include "polarbench/scene_synth.hpp"

namespace polarbench {

/// Shot noise is Gaussian with variance signal / shot_gain, read noise adds
/// read_sigma^2. Quantization to `bits` (0 = none) clips to [0, 1].
struct NoiseModel {
  bool enabled = true;
  double read_sigma = 0.002;
  double shot_gain = 1e4;
  bool shot = true;
  int bits = 12;
  std::uint64_t seed = 0;

  /// Exact capture: no noise, no quantization.
  static NoiseModel none() {
    NoiseModel m;
    m.enabled = false;
    m.read_sigma = 0.0;
    m.bits = 0;
    return m;
  }

  /// Throws ConfigError for negative sigma, non-positive gain or bits outside [0, 24].
  void validate() const;

  /// Per-pixel noise standard deviation for a given signal (quantization excluded).
  double sigma(double signal) const;
};

/// Add noise and quantize. `stream` separates independent draws made with
/// the same seed (camera or frame index).
IntensityImage apply_noise(const IntensityImage& img, const NoiseModel& noise, std::uint64_t stream);

/// Affine camera response out = gain * in + offset, per pixel across channels.
/// Single-channel images use gain(0, 0) and offset(0) and require a scalar gain.
struct CameraResponse {
  Mat3 gain = Mat3::Identity();
  Vec3 offset = Vec3::Zero();

  static CameraResponse scalar(double g, double off = 0.0) {
    CameraResponse r;
    r.gain = g * Mat3::Identity();
    r.offset = Vec3::Constant(off);
    return r;
  }
  bool is_scalar() const;
  bool is_identity() const { return gain == Mat3::Identity() && offset.isZero(); }
  /// Gain must be positive-definite (symmetric part), offsets finite.
  void validate() const;
  /// Negative results are clipped to zero.
  IntensityImage apply(const IntensityImage& img) const;
};

/// Responses of the left, middle and right cameras.
struct RadiometricMismatch {
  CameraResponse left;
  CameraResponse mid;
  CameraResponse right;

  static RadiometricMismatch identity() { return {}; }
  void validate() const;
};

struct CaptureSet {
  IntensityImage i0_left;
  IntensityImage i_un_mid;
  IntensityImage i45_right;
  std::array<CameraModel, 3> rig;  // left, mid, right
  NoiseModel noise;
  RadiometricMismatch mismatch;
};

/// Polarizer layout of a 2x2 mosaic cell: pattern[row][col].
using MosaicPattern = std::array<std::array<PolarizerAngle, 2>, 2>;

MosaicPattern default_mosaic_pattern();  // [[90, 45], [135, 0]] degrees

/// Throws ConfigError unless the pattern holds each canonical angle once.
void validate_mosaic_pattern(const MosaicPattern& pattern);

struct DoFPRaw {
  IntensityImage mosaic;
  MosaicPattern pattern = default_mosaic_pattern();

  PolarizerAngle angle_at(int x, int y) const { return pattern[y & 1][x & 1]; }
};

struct DoTCapture {
  std::array<IntensityImage, 4> frames;  // 0, 45, 90, 135 degrees
  Eigen::Vector2d drift = Eigen::Vector2d::Zero();  // pixels per frame
};

/// Triple-rig capture. The bundle's rig must be the EasyPolar layout
/// (0 deg, none, 45 deg) with the middle camera as reference.
CaptureSet capture_easypolar(const SceneBundle& bundle, const NoiseModel& noise,
                             const RadiometricMismatch& mismatch = RadiometricMismatch::identity());

/// Mosaic capture of the reference view. Odd image sizes are a ConfigError.
DoFPRaw capture_dofp(const SceneBundle& bundle, const NoiseModel& noise,
                     const MosaicPattern& pattern = default_mosaic_pattern());

/// Four sequential frames of the reference view; frame k sees the scene
/// translated by k * drift pixels (bilinear resampling, edge clamped).
DoTCapture capture_dot(const SceneBundle& bundle, const NoiseModel& noise,
                       const Eigen::Vector2d& drift = Eigen::Vector2d::Zero());

enum class CalibrationModel { gain, gain_offset, ccm, ccm_offset };

/// Least-squares correction mapping observed patch values (rows = patches,
/// columns = channels) onto target values. Needs >= 4 patches; a rank-deficient
/// design throws CalibrationError.
CameraResponse calibrate_radiometry(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& target,
                                    CalibrationModel model);

/// Patch readings of an unpolarized chart through one camera: response
/// applied to transmission * radiance, then noise. Rows = patches.
Eigen::MatrixXd observe_patches(const Eigen::MatrixXd& radiance, const CameraResponse& response, double transmission,
                                const NoiseModel& noise, std::uint64_t stream);

/// Corrections for the side cameras from a chart seen by all three cameras.
/// Side targets are the middle camera's readings times the polarizer
/// transmission of unpolarized light (1/2). The middle correction is identity.
RadiometricMismatch calibrate_rig(const Eigen::MatrixXd& left, const Eigen::MatrixXd& mid,
                                  const Eigen::MatrixXd& right, CalibrationModel model);

/// Apply per-camera corrections to a capture.
CaptureSet correct_capture(const CaptureSet& capture, const RadiometricMismatch& correction);

}  // namespace polarbench
