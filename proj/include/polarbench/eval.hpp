// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "polarbench/capture_sim.hpp"
#include "polarbench/polar_core.hpp"
#include "polarbench/scene_synth.hpp"

namespace polarbench {

inline constexpr double kPsnrCap = 99.0;

struct PsnrResult {
  double db = 0.0;
  bool capped = false;  // MSE was zero
};

/// 10 log10(peak^2 / MSE) over `mask` (all pixels when null).
PsnrResult psnr(const Map& x, const Map& y, double peak = 1.0, const Mask* mask = nullptr);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// dynamic range 1. Only window centres whose window lies inside the image
/// contribute; with a mask, only centres inside the mask. Single channel.
double ssim(const Map& x, const Map& y, const Mask* mask = nullptr);

/// Mean wrap-aware AoP difference over the mask, degrees in [0, 90].
double mae_angular(const Map& aop_hat, const Map& aop_gt, const Mask& mask);

/// mean |sin 2a - sin 2b| + |cos 2a - cos 2b|, plus lambda_g times the mean L1
/// difference of their forward x/y differences.
double loss_aop(const Map& aop_hat, const Map& aop_gt, double lambda_g);

/// mean W |y - y_gt|.
double loss_weighted(const Map& y, const Map& y_gt, const Map& weight);

/// 1 + alpha * dop_gt.
Map dop_weight(const Map& dop_gt, double alpha);

/// 1 + beta * (1 - c_gt).
Map confidence_weight(const Map& c_gt, double beta);

/// mean |I0(params) - i0_obs| + mean |I45(params) - i45_obs|, with the
/// polarized images resynthesized from `params` and `i_un`.
double loss_intensity(const PolarParams& params, const IntensityImage& i_un, const IntensityImage& i0_obs,
                      const IntensityImage& i45_obs);

struct LossConfig {
  double lambda_p = 1.0;
  double lambda_c = 0.5;
  double lambda_i = 1.0;
  double lambda_g = 0.1;
  double alpha = 5.0;
  double beta = 2.0;

  void validate() const;
};

struct LossComponents {
  double polar = 0.0;
  double confidence = 0.0;
  double intensity = 0.0;
};

double loss_total(const LossComponents& parts, const LossConfig& cfg = {});

/// Full-resolution 0/45/90/135 channels by normalized bilinear interpolation
/// of each polarizer sub-lattice.
std::array<IntensityImage, 4> demosaic_bilinear(const DoFPRaw& raw);

/// Stokes and polarization parameters from a demosaiced mosaic.
PolarParams dofp_params(const std::array<IntensityImage, 4>& channels, IntensityImage* s0 = nullptr);

struct QualityEntry {
  double psnr = 0.0;
  bool capped = false;
  double ssim = 0.0;

  bool operator==(const QualityEntry&) const = default;
};

struct SceneMetrics {
  std::string scene;
  QualityEntry i0, i45, s1, s2, dop;
  double aop_mae = 0.0;  // degrees
  double coverage = 0.0;  // fraction of GT-valid pixels the prediction covers

  bool operator==(const SceneMetrics&) const = default;
};

struct MetricReport {
  std::string label;
  std::vector<SceneMetrics> scenes;
  SceneMetrics aggregate;  // unweighted mean of the scenes; capped if all are

  bool operator==(const MetricReport&) const = default;
};

struct EvalOptions {
  double aop_min_dop = 0.01;  // AoP is undefined on GT pixels below this DoP
};

/// Compare predicted parameters (and predicted S0) against the reference view.
SceneMetrics evaluate(const std::string& scene, const PolarParams& pred, const IntensityImage& s0_pred,
                      const ViewGroundTruth& gt, const EvalOptions& opts = {});

SceneMetrics aggregate(const std::vector<SceneMetrics>& scenes);

MetricReport make_report(const std::string& label, std::vector<SceneMetrics> scenes);

std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

/// One aggregate row per report: label, I0, I45, S1, S2 (PSNR/SSIM), AoP MAE,
/// DoP (PSNR/SSIM), coverage.
std::string reports_to_csv(const std::vector<MetricReport>& reports);
std::string reports_to_table(const std::vector<MetricReport>& reports);

}  // namespace polarbench
