// SPDX-License-Identifier: Apache-2.0
#include "polarbench/capture_sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

namespace polarbench {

namespace {

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double quantize(double v, int bits) {
  if (bits <= 0) return std::max(v, 0.0);
  const double levels = std::ldexp(1.0, bits) - 1.0;
  return std::round(std::clamp(v, 0.0, 1.0) * levels) / levels;
}

// Bilinear sample with edge clamping.
double sample_clamped(const Map& img, double x, double y) {
  const int w = img.width(), h = img.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(std::floor(x)), w - 1), y0 = std::min(static_cast<int>(std::floor(y)), h - 1);
  const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0, fy = y - y0;
  const double top = img(x0, y0) + fx * (img(x1, y0) - img(x0, y0));
  const double bottom = img(x0, y1) + fx * (img(x1, y1) - img(x0, y1));
  return top + fy * (bottom - top);
}

void require_easypolar(const SceneSpec& spec) {
  if (spec.rig.size() != 3 || spec.reference != 1) {
    throw ConfigError("EasyPolar capture needs a three-camera rig with the middle camera as reference");
  }
  if (!(spec.rig[0].polarizer == PolarizerAngle::degrees(0)) || !spec.rig[1].polarizer.is_none() ||
      !(spec.rig[2].polarizer == PolarizerAngle::degrees(45))) {
    throw ConfigError("EasyPolar capture needs polarizers (0 deg, none, 45 deg) on (left, mid, right)");
  }
}

}  // namespace

void NoiseModel::validate() const {
  if (!(read_sigma >= 0.0) || !std::isfinite(read_sigma)) throw ConfigError("read_sigma must be finite and >= 0");
  if (!(shot_gain > 0.0) || !std::isfinite(shot_gain)) throw ConfigError("shot_gain must be finite and > 0");
  if (bits < 0 || bits > 24) throw ConfigError("quantization bits must lie in [0, 24]");
}

double NoiseModel::sigma(double signal) const {
  if (!enabled) return 0.0;
  const double shot_var = shot ? std::max(signal, 0.0) / shot_gain : 0.0;
  return std::sqrt(shot_var + read_sigma * read_sigma);
}

IntensityImage apply_noise(const IntensityImage& img, const NoiseModel& noise, std::uint64_t stream) {
  if (!noise.enabled) return img;
  noise.validate();
  auto rng = stream_rng(noise.seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Map out(img.width(), img.height(), img.channels());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = img[i] + noise.sigma(img[i]) * normal(rng);
    out[i] = quantize(v, noise.bits);
  }
  return IntensityImage(std::move(out));
}

bool CameraResponse::is_scalar() const {
  const double g = gain(0, 0);
  return gain == g * Mat3::Identity() && offset.x() == offset.y() && offset.y() == offset.z();
}

void CameraResponse::validate() const {
  if (!gain.allFinite() || !offset.allFinite()) throw ConfigError("camera response must be finite");
  const Mat3 sym = 0.5 * (gain + gain.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> eig(sym, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw ConfigError("camera gain must be positive-definite");
}

IntensityImage CameraResponse::apply(const IntensityImage& img) const {
  if (is_identity()) return img;
  Map out(img.width(), img.height(), img.channels());
  if (img.channels() == 1) {
    if (!is_scalar()) throw ConfigError("a color matrix needs a three-channel image");
    const double g = gain(0, 0), o = offset(0);
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = std::max(0.0, g * img[i] + o);
  } else if (img.channels() == 3) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        const Vec3 v(img(x, y, 0), img(x, y, 1), img(x, y, 2));
        const Vec3 r = gain * v + offset;
        for (int c = 0; c < 3; ++c) out(x, y, c) = std::max(0.0, r[c]);
      }
    }
  } else {
    throw ShapeError("camera response supports one or three channels");
  }
  return IntensityImage(std::move(out));
}

void RadiometricMismatch::validate() const {
  left.validate();
  mid.validate();
  right.validate();
}

MosaicPattern default_mosaic_pattern() {
  return {{{PolarizerAngle::degrees(90), PolarizerAngle::degrees(45)},
           {PolarizerAngle::degrees(135), PolarizerAngle::degrees(0)}}};
}

void validate_mosaic_pattern(const MosaicPattern& pattern) {
  bool seen[4] = {false, false, false, false};
  for (const auto& row : pattern) {
    for (const auto& a : row) {
      if (a.is_none()) throw ConfigError("mosaic pattern cannot contain an unpolarized pixel");
      const double k = a.degrees() / 45.0;
      const int idx = static_cast<int>(std::lround(k));
      if (std::fabs(k - idx) > 1e-9 || idx < 0 || idx > 3 || seen[idx]) {
        throw ConfigError("mosaic pattern must hold 0, 45, 90 and 135 degrees once each");
      }
      seen[idx] = true;
    }
  }
}

CaptureSet capture_easypolar(const SceneBundle& bundle, const NoiseModel& noise, const RadiometricMismatch& mismatch) {
  require_easypolar(bundle.spec);
  mismatch.validate();
  const auto& spec = bundle.spec;
  CaptureSet cs;
  cs.noise = noise;
  cs.mismatch = mismatch;
  for (int k = 0; k < 3; ++k) cs.rig[k] = spec.rig[k].camera;

  const auto& left = bundle.views[0];
  const auto& mid = bundle.views[1];
  const auto& right = bundle.views[2];
  cs.i0_left = apply_noise(mismatch.left.apply(synthesize_polarized(left.params, left.i_un, spec.rig[0].polarizer)),
                           noise, 0);
  cs.i_un_mid = apply_noise(mismatch.mid.apply(mid.i_un), noise, 1);
  cs.i45_right = apply_noise(mismatch.right.apply(synthesize_polarized(right.params, right.i_un, spec.rig[2].polarizer)),
                             noise, 2);
  return cs;
}

DoFPRaw capture_dofp(const SceneBundle& bundle, const NoiseModel& noise, const MosaicPattern& pattern) {
  validate_mosaic_pattern(pattern);
  const auto& ref = bundle.reference();
  const int w = ref.i_un.width(), h = ref.i_un.height();
  if (w % 2 != 0 || h % 2 != 0) throw ConfigError("DoFP mosaic needs even image dimensions");
  if (ref.i_un.channels() != 1) throw ShapeError("DoFP mosaic is single-channel");
  Map mosaic(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool valid = ref.params.valid(x, y);
      mosaic(x, y) = malus_intensity(ref.i_un(x, y), valid ? ref.params.dop(x, y) : 0.0,
                                     valid ? ref.params.aop(x, y) : 0.0, pattern[y & 1][x & 1]);
    }
  }
  DoFPRaw raw;
  raw.pattern = pattern;
  raw.mosaic = apply_noise(IntensityImage(std::move(mosaic)), noise, 10);
  return raw;
}

DoTCapture capture_dot(const SceneBundle& bundle, const NoiseModel& noise, const Eigen::Vector2d& drift) {
  const auto& ref = bundle.reference();
  DoTCapture out;
  out.drift = drift;
  const int w = ref.i_un.width(), h = ref.i_un.height();
  for (int k = 0; k < 4; ++k) {
    const auto alpha = PolarizerAngle::degrees(45.0 * k);
    IntensityImage frame = synthesize_polarized(ref.params, ref.i_un, alpha);
    if (k > 0 && !drift.isZero()) {
      Map shifted(w, h, frame.channels());
      for (int c = 0; c < frame.channels(); ++c) {
        Map plane(w, h);
        std::copy(frame.plane(c).begin(), frame.plane(c).end(), plane.values().begin());
        for (int y = 0; y < h; ++y)
          for (int x = 0; x < w; ++x) shifted(x, y, c) = sample_clamped(plane, x - k * drift.x(), y - k * drift.y());
      }
      frame = IntensityImage(std::move(shifted));
    }
    out.frames[k] = apply_noise(frame, noise, 20 + k);
  }
  return out;
}

CameraResponse calibrate_radiometry(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& target,
                                    CalibrationModel model) {
  if (observed.rows() != target.rows() || observed.cols() != target.cols()) {
    throw ShapeError("calibration: observed and target patch sets differ in shape");
  }
  const Eigen::Index n = observed.rows(), c = observed.cols();
  if (c != 1 && c != 3) throw ShapeError("calibration: patches need one or three channels");
  if (n < 4) throw CalibrationError("calibration needs at least 4 patches");
  if (!observed.allFinite() || !target.allFinite()) throw CalibrationError("calibration patches must be finite");

  CameraResponse out;
  if (model == CalibrationModel::gain || model == CalibrationModel::gain_offset) {
    const Eigen::VectorXd x = observed.reshaped();
    const Eigen::VectorXd y = target.reshaped();
    Eigen::MatrixXd a(x.size(), model == CalibrationModel::gain ? 1 : 2);
    a.col(0) = x;
    if (model == CalibrationModel::gain_offset) a.col(1).setOnes();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < a.cols()) throw CalibrationError("calibration patches are rank-deficient");
    const Eigen::VectorXd sol = qr.solve(y);
    out = CameraResponse::scalar(sol(0), model == CalibrationModel::gain_offset ? sol(1) : 0.0);
    return out;
  }

  if (c != 3) throw ConfigError("a color correction matrix needs three-channel patches");
  const bool with_offset = model == CalibrationModel::ccm_offset;
  Eigen::MatrixXd a(n, with_offset ? 4 : 3);
  a.leftCols(3) = observed;
  if (with_offset) a.col(3).setOnes();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols()) throw CalibrationError("calibration patches are rank-deficient");
  const Eigen::MatrixXd sol = qr.solve(target);  // (3 or 4) x 3
  out.gain = sol.topRows(3).transpose();
  if (with_offset) out.offset = sol.row(3).transpose();
  return out;
}

Eigen::MatrixXd observe_patches(const Eigen::MatrixXd& radiance, const CameraResponse& response, double transmission,
                                const NoiseModel& noise, std::uint64_t stream) {
  const Eigen::Index n = radiance.rows(), c = radiance.cols();
  if (c != 1 && c != 3) throw ShapeError("patches need one or three channels");
  Map img(static_cast<int>(n), 1, static_cast<int>(c));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < c; ++k) img(static_cast<int>(i), 0, static_cast<int>(k)) = transmission * radiance(i, k);
  const IntensityImage seen = apply_noise(response.apply(IntensityImage(std::move(img))), noise, stream);
  Eigen::MatrixXd out(n, c);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < c; ++k) out(i, k) = seen(static_cast<int>(i), 0, static_cast<int>(k));
  return out;
}

RadiometricMismatch calibrate_rig(const Eigen::MatrixXd& left, const Eigen::MatrixXd& mid, const Eigen::MatrixXd& right,
                                  CalibrationModel model) {
  const Eigen::MatrixXd target = 0.5 * mid;
  RadiometricMismatch out;
  out.left = calibrate_radiometry(left, target, model);
  out.right = calibrate_radiometry(right, target, model);
  return out;
}

CaptureSet correct_capture(const CaptureSet& capture, const RadiometricMismatch& correction) {
  CaptureSet out = capture;
  out.i0_left = correction.left.apply(capture.i0_left);
  out.i_un_mid = correction.mid.apply(capture.i_un_mid);
  out.i45_right = correction.right.apply(capture.i45_right);
  return out;
}

}  // namespace polarbench
