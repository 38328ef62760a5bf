// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference-view AoP/DoP from one unpolarized and two polarized side views:
// disparity, backward warping, Stokes inversion into pseudo priors, a
// constraint-based confidence map and confidence-gated guided fusion.

#include <vector>

#include "polarbench/capture_sim.hpp"
#include "polarbench/fresnel_geom.hpp"
#include "polarbench/polar_core.hpp"
#include "polarbench/scene_synth.hpp"

namespace polarbench {

enum class DisparityMode { ground_truth, block_match };

struct BlockMatchConfig {
  int max_disparity = 64;      // pixels
  int radius = 4;              // aggregation window (2r+1)^2
  double texture_min = 2e-3;   // minimum window std of the reference image
  double uniqueness = 0.97;    // best cost must be below uniqueness * runner-up
  double lr_tolerance = 1.0;   // left-right consistency, pixels

  void validate() const;
};

/// Disparities of the left and right views, both in reference-view pixels.
struct StereoDisparity {
  DisparityMap left;
  DisparityMap right;
};

/// SAD block matching of `source` against `reference`, where reference pixel
/// x corresponds to source pixel x + sign * d. Pixels failing the texture,
/// uniqueness or left-right checks are invalid.
DisparityMap block_match(const IntensityImage& reference, const IntensityImage& source, double sign,
                         const BlockMatchConfig& cfg);

/// ground_truth reads `bundle` (required); block_match matches 2 * side images
/// against the middle image. Unrectified rigs throw ConfigError.
StereoDisparity estimate_disparity(const CaptureSet& capture, DisparityMode mode, const SceneBundle* bundle,
                                   const BlockMatchConfig& cfg = {});

struct WarpResult {
  IntensityImage image;
  Mask valid;
};

/// Backward warp: output(x) = src(x + sign * d(x)) by linear interpolation.
/// Out-of-frame taps and taps showing another surface (detected by
/// rasterizing the disparity field into source coordinates) are invalid;
/// invalid outputs hold 0.
WarpResult warp_to_reference(const IntensityImage& src, const DisparityMap& d, double sign = 1.0,
                             double occlusion_tolerance = 0.5);

struct PseudoPriors {
  StokesImage stokes;
  Map aop;           // [0, pi)
  Map dop;           // unclamped ratio
  Mask valid;        // warp valid and S0 above the radiance floor
  IntensityImage i0_warped;
  IntensityImage i45_warped;
  DisparityMap disparity;  // reference-view disparity of the left warp
};

PseudoPriors pseudo_priors(const CaptureSet& capture, const StereoDisparity& d);

enum class AopEncoding { trigonometric, scalar };

struct GatingConfig {
  double epsilon = 1e-8;
  int window_radius = 7;
  double sigma_g = 0.1;   // intensity guidance
  double sigma_n = 0.3;   // normal guidance
  double sigma_s = 3.0;   // spatial, pixels
  double tau = 0.05;      // physicality slack
  // Polarization range term: bandwidth k * (expected noise of S/S0), floored,
  // widened by (1 - c) * sigma_release on unreliable centers.
  double range_k = 3.0;
  double range_floor = 1e-6;
  double sigma_release = 0.5;
  // Local consistency check of S/S0 against linear neighbour predictions.
  double consistency_floor = 2e-3;
  double consistency_k = 4.0;
  // Neighbours whose disparity differs from the center by more than this
  // lie on another surface and are excluded.
  double disparity_gate = 1.5;

  bool gating = true;           // false: c treated as 1 everywhere
  bool normal_guidance = true;  // false: sigma_n -> infinity
  AopEncoding encoding = AopEncoding::trigonometric;

  void validate() const;
};

struct ConfidenceMap {
  Map c;
};

/// C = warp gate * physicality hinge * local consistency, each in [0, 1]:
///   hinge  = exp(-v / tau), v = sum of max(0, r - 1 - tau) over
///            r in {|S1|/S0, |S2|/S0, rho};
///   consistency = exp(-max(0, dev - allowed) / allowed), dev the residual
///            of S1/S0, S2/S0 against the median of polynomial predictions from
///            same-surface neighbours along four line directions,
///            allowed = floor + k * noise std.
ConfidenceMap estimate_confidence(const IntensityImage& i_un, const NormalMap& normals, const PseudoPriors& priors,
                                  const GatingConfig& cfg, const NoiseModel& noise = NoiseModel::none());

/// Target map exp(-kappa * r) * visibility, r = max(|I0w - I0_gt|, |I45w - I45_gt|)
/// after warping the captured side views with `d_gt`.
ConfidenceMap confidence_gt(const SceneBundle& bundle, const CaptureSet& capture, const StereoDisparity& d_gt,
                            double kappa = 50.0);

/// M = log(C + epsilon).
Map gating_bias(const ConfidenceMap& c, double epsilon);

/// Confidence-gated guided window aggregation of (sin 2theta, cos 2theta, rho).
PolarParams gated_fusion(const PseudoPriors& priors, const ConfidenceMap& c, const IntensityImage& i_un,
                         const NormalMap& normals, const GatingConfig& cfg, const NoiseModel& noise = NoiseModel::none());

/// Normalized window weights used by gated_fusion at (x, y), row-major over
/// the (2r+1)^2 window; entries outside the image are 0.
std::vector<double> fusion_weights(const PseudoPriors& priors, const ConfidenceMap& c, const IntensityImage& i_un,
                                   const NormalMap& normals, const GatingConfig& cfg, int x, int y,
                                   const NoiseModel& noise = NoiseModel::none());

struct ReconstructConfig {
  DisparityMode disparity = DisparityMode::ground_truth;
  BlockMatchConfig block;
  GatingConfig gating;
};

struct ReconstructResult {
  PolarParams params;
  ConfidenceMap confidence;
  PseudoPriors priors;
  StereoDisparity disparity;
  DepthMap depth;
  NormalMap normals;
};

/// Full pipeline. `bundle` is needed only for ground-truth disparity.
ReconstructResult reconstruct_pipeline(const CaptureSet& capture, const SceneBundle* bundle,
                                       const ReconstructConfig& cfg = {});

/// Check that a capture rig is rectified (shared rotation and intrinsics,
/// x-only offsets); throws ConfigError otherwise.
void require_rectified(const std::array<CameraModel, 3>& rig);

}  // namespace polarbench
