// SPDX-License-Identifier: Apache-2.0
#include "polarbench/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "polarbench/error.hpp"

namespace polarbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::pair<int, int> kDirections[] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};

void require_single_channel(const Grid<double>& g, const char* what) {
  if (g.channels() != 1) throw ShapeError(std::string(what) + ": expected a single-channel map");
}

// Noise std of S/S0 at a pixel with unpolarized radiance s0.
double normalized_stokes_sigma(const NoiseModel& noise, double s0) {
  if (!noise.enabled) return 0.0;
  const double side = noise.sigma(0.5 * s0);
  const double mid = noise.sigma(s0);
  return std::sqrt(4.0 * side * side + mid * mid) / std::max(s0, kEpsS0);
}

// Box sums of a plane via an integral image; out-of-image samples count as 0.
class BoxSum {
 public:
  BoxSum(const std::vector<double>& v, int w, int h) : w_(w), h_(h), s_((w + 1) * static_cast<std::size_t>(h + 1), 0.0) {
    for (int y = 0; y < h; ++y) {
      double row = 0.0;
      for (int x = 0; x < w; ++x) {
        row += v[static_cast<std::size_t>(y) * w + x];
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }
  double sum(int x0, int y0, int x1, int y1) const {  // inclusive, clamped
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, w_ - 1);
    y1 = std::min(y1, h_ - 1);
    if (x0 > x1 || y0 > y1) return 0.0;
    return get(x1 + 1, y1 + 1) - get(x0, y1 + 1) - get(x1 + 1, y0) + get(x0, y0);
  }

 private:
  double& at(int x, int y) { return s_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  double get(int x, int y) const { return s_[static_cast<std::size_t>(y) * (w_ + 1) + x]; }
  int w_, h_;
  std::vector<double> s_;
};

struct CostVolume {
  int w, h, dmax;
  std::vector<double> c;  // [d][y][x]
  double& at(int d, int x, int y) { return c[(static_cast<std::size_t>(d) * h + y) * w + x]; }
  double at(int d, int x, int y) const { return c[(static_cast<std::size_t>(d) * h + y) * w + x]; }
};

// Aggregated mean SAD of ref(x) against src(x + sign * d); infinite where the
// window leaves the source frame.
CostVolume sad_volume(const IntensityImage& ref, const IntensityImage& src, double sign, const BlockMatchConfig& cfg) {
  const int w = ref.width(), h = ref.height(), r = cfg.radius;
  CostVolume vol{w, h, cfg.max_disparity, std::vector<double>(static_cast<std::size_t>(cfg.max_disparity + 1) * w * h)};
  std::vector<double> diff(static_cast<std::size_t>(w) * h), inside(static_cast<std::size_t>(w) * h);
  for (int d = 0; d <= cfg.max_disparity; ++d) {
    const int off = static_cast<int>(sign) * d;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int xs = x + off;
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (xs >= 0 && xs < w) {
          diff[i] = std::abs(ref(x, y) - src(xs, y));
          inside[i] = 1.0;
        } else {
          diff[i] = 0.0;
          inside[i] = 0.0;
        }
      }
    }
    const BoxSum sd(diff, w, h), si(inside, w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double n_all = static_cast<double>((std::min(x + r, w - 1) - std::max(x - r, 0) + 1) *
                                                 (std::min(y + r, h - 1) - std::max(y - r, 0) + 1));
        const double n_in = si.sum(x - r, y - r, x + r, y + r);
        vol.at(d, x, y) = (n_in < n_all) ? kInf : sd.sum(x - r, y - r, x + r, y + r) / n_in;
      }
    }
  }
  return vol;
}

// Winner-take-all with uniqueness test and parabolic subpixel refinement.
DisparityMap winner_take_all(const CostVolume& vol, const BlockMatchConfig& cfg) {
  DisparityMap out{Map(vol.w, vol.h), Mask(vol.w, vol.h)};
  for (int y = 0; y < vol.h; ++y) {
    for (int x = 0; x < vol.w; ++x) {
      int best = -1;
      double cb = kInf;
      for (int d = 0; d <= vol.dmax; ++d) {
        if (vol.at(d, x, y) < cb) {
          cb = vol.at(d, x, y);
          best = d;
        }
      }
      if (best < 0) continue;
      double second = kInf;
      for (int d = 0; d <= vol.dmax; ++d) {
        if (std::abs(d - best) > 1) second = std::min(second, vol.at(d, x, y));
      }
      if (std::isfinite(second) && cb > cfg.uniqueness * second) continue;
      double sub = best;
      if (best > 0 && best < vol.dmax) {
        const double cm = vol.at(best - 1, x, y), cp = vol.at(best + 1, x, y);
        const double denom = cm - 2.0 * cb + cp;
        if (std::isfinite(cm) && std::isfinite(cp) && denom > 0.0) {
          sub = best + std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
        }
      }
      out.disparity(x, y) = sub;
      out.valid(x, y) = 1;
    }
  }
  return out;
}

}  // namespace

void BlockMatchConfig::validate() const {
  if (max_disparity < 1) throw ConfigError("block matching: max_disparity must be >= 1");
  if (radius < 0) throw ConfigError("block matching: radius must be >= 0");
  if (!(texture_min >= 0.0)) throw ConfigError("block matching: texture_min must be >= 0");
  if (!(uniqueness > 0.0 && uniqueness <= 1.0)) throw ConfigError("block matching: uniqueness must lie in (0, 1]");
  if (!(lr_tolerance > 0.0)) throw ConfigError("block matching: lr_tolerance must be positive");
}

void GatingConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("gating: epsilon must be positive");
  if (window_radius < 0) throw ConfigError("gating: window_radius must be >= 0");
  if (!(sigma_g > 0.0) || !(sigma_n > 0.0) || !(sigma_s > 0.0)) {
    throw ConfigError("gating: sigma_g, sigma_n and sigma_s must be positive");
  }
  if (!(tau > 0.0)) throw ConfigError("gating: tau must be positive");
  if (!(range_k >= 0.0) || !(range_floor > 0.0) || !(sigma_release >= 0.0)) {
    throw ConfigError("gating: range_k, sigma_release must be >= 0 and range_floor > 0");
  }
  if (!(disparity_gate > 0.0)) throw ConfigError("gating: disparity_gate must be positive");
  if (!(consistency_floor > 0.0) || !(consistency_k >= 0.0)) {
    throw ConfigError("gating: consistency_floor must be positive and consistency_k >= 0");
  }
}

void require_rectified(const std::array<CameraModel, 3>& rig) {
  const CameraModel& ref = rig[1];
  for (const CameraModel& cam : rig) {
    cam.validate();
    if ((cam.rotation - ref.rotation).norm() > 1e-9 || cam.fx != ref.fx || cam.fy != ref.fy || cam.cx != ref.cx ||
        cam.cy != ref.cy) {
      throw ConfigError("rig is not rectified: cameras differ in rotation or intrinsics");
    }
    const Vec3 off = ref.rotation * (cam.center - ref.center);
    if (std::abs(off.y()) > 1e-9 || std::abs(off.z()) > 1e-9 || std::abs(off.x() - cam.baseline_to_ref) > 1e-9) {
      throw ConfigError("rig is not rectified: camera offsets must lie along the x axis");
    }
  }
}

DisparityMap block_match(const IntensityImage& reference, const IntensityImage& source, double sign,
                         const BlockMatchConfig& cfg) {
  cfg.validate();
  require_same_shape(reference, source, "block_match");
  require_single_channel(reference, "block_match");
  if (sign != 1.0 && sign != -1.0) throw DomainError("block_match: sign must be +1 or -1");
  const int w = reference.width(), h = reference.height(), r = cfg.radius;

  DisparityMap fwd = winner_take_all(sad_volume(reference, source, sign, cfg), cfg);
  const DisparityMap back = winner_take_all(sad_volume(source, reference, -sign, cfg), cfg);

  std::vector<double> v(reference.values().begin(), reference.values().end()), v2(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) v2[i] = v[i] * v[i];
  const BoxSum s1(v, w, h), s2(v2, w, h);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!fwd.valid(x, y)) continue;
      const double n = static_cast<double>((std::min(x + r, w - 1) - std::max(x - r, 0) + 1) *
                                           (std::min(y + r, h - 1) - std::max(y - r, 0) + 1));
      const double mean = s1.sum(x - r, y - r, x + r, y + r) / n;
      const double var = s2.sum(x - r, y - r, x + r, y + r) / n - mean * mean;
      bool ok = std::sqrt(std::max(var, 0.0)) >= cfg.texture_min;
      const int xs = static_cast<int>(std::lround(x + sign * fwd.disparity(x, y)));
      ok = ok && xs >= 0 && xs < w && back.valid(xs, y) &&
           std::abs(back.disparity(xs, y) - fwd.disparity(x, y)) <= cfg.lr_tolerance;
      if (!ok) {
        fwd.valid(x, y) = 0;
        fwd.disparity(x, y) = 0.0;
      }
    }
  }
  return fwd;
}

StereoDisparity estimate_disparity(const CaptureSet& capture, DisparityMode mode, const SceneBundle* bundle,
                                   const BlockMatchConfig& cfg) {
  require_rectified(capture.rig);
  if (mode == DisparityMode::ground_truth) {
    if (!bundle) throw ConfigError("ground-truth disparity requires the scene bundle");
    if (bundle->ref_disparity.size() != 3) throw ConfigError("scene bundle does not hold a three-camera rig");
    return {bundle->ref_disparity[0], bundle->ref_disparity[2]};
  }
  auto doubled = [](const IntensityImage& img) {
    Grid<double> g = img;
    for (double& v : g.values()) v *= 2.0;
    return IntensityImage(std::move(g));
  };
  const IntensityImage& mid = capture.i_un_mid;
  return {block_match(mid, doubled(capture.i0_left), source_offset_sign(capture.rig[0]), cfg),
          block_match(mid, doubled(capture.i45_right), source_offset_sign(capture.rig[2]), cfg)};
}

WarpResult warp_to_reference(const IntensityImage& src, const DisparityMap& d, double sign, double occlusion_tolerance) {
  require_single_channel(d.disparity, "warp_to_reference");
  if (src.width() != d.disparity.width() || src.height() != d.disparity.height()) {
    throw ShapeError("warp_to_reference: image and disparity sizes differ");
  }
  require_same_shape(d.disparity, d.valid, "warp_to_reference");
  if (sign != 1.0 && sign != -1.0) throw DomainError("warp_to_reference: sign must be +1 or -1");
  const int w = src.width(), h = src.height();
  Grid<double> out(w, h, src.channels());
  Mask valid(w, h);
  std::vector<double> zbuf(w);

  for (int y = 0; y < h; ++y) {
    // Rasterize the reference surface into source columns, keeping the
    // nearest (largest disparity) surface per column.
    std::fill(zbuf.begin(), zbuf.end(), -kInf);
    auto cover = [&](int j, double dj) {
      if (j >= 0 && j < w) zbuf[j] = std::max(zbuf[j], dj);
    };
    for (int x = 0; x < w; ++x) {
      if (!d.valid(x, y)) continue;
      const double dx = d.disparity(x, y);
      const double xs = x + sign * dx;
      cover(static_cast<int>(std::floor(xs + 0.5)), dx);
      if (x + 1 < w && d.valid(x + 1, y) && std::abs(d.disparity(x + 1, y) - dx) <= occlusion_tolerance) {
        const double dn = d.disparity(x + 1, y);
        const double xn = x + 1 + sign * dn;
        const double lo = std::min(xs, xn), hi = std::max(xs, xn);
        for (int j = static_cast<int>(std::ceil(lo)); j <= static_cast<int>(std::floor(hi)); ++j) {
          const double t = (hi > lo) ? (j - xs) / (xn - xs) : 0.0;
          cover(j, dx + t * (dn - dx));
        }
      }
    }
    for (int x = 0; x < w; ++x) {
      if (!d.valid(x, y)) continue;
      const double dx = d.disparity(x, y);
      const double xs = x + sign * dx;
      const double fl = std::floor(xs);
      const int j0 = static_cast<int>(fl);
      const double f = xs - fl;
      if (j0 < 0 || j0 >= w || (f > 0.0 && j0 + 1 >= w)) continue;
      // A tap must show this surface, and no nearer surface may start in the
      // adjacent column (the tap would be partly covered by it).
      auto tap_ok = [&](int j) {
        if (!std::isfinite(zbuf[j]) || std::abs(zbuf[j] - dx) > occlusion_tolerance) return false;
        if (j > 0 && zbuf[j - 1] > dx + occlusion_tolerance) return false;
        return j + 1 >= w || zbuf[j + 1] <= dx + occlusion_tolerance;
      };
      if (!tap_ok(j0) || (f > 0.0 && !tap_ok(j0 + 1))) continue;
      valid(x, y) = 1;
      for (int c = 0; c < src.channels(); ++c) {
        const double a = src(j0, y, c);
        out(x, y, c) = (f > 0.0) ? a + f * (src(j0 + 1, y, c) - a) : a;
      }
    }
  }
  return {IntensityImage(std::move(out)), std::move(valid)};
}

PseudoPriors pseudo_priors(const CaptureSet& capture, const StereoDisparity& d) {
  require_rectified(capture.rig);
  const IntensityImage& mid = capture.i_un_mid;
  require_same_shape(mid, capture.i0_left, "pseudo_priors");
  require_same_shape(mid, capture.i45_right, "pseudo_priors");
  WarpResult l = warp_to_reference(capture.i0_left, d.left, source_offset_sign(capture.rig[0]));
  WarpResult r = warp_to_reference(capture.i45_right, d.right, source_offset_sign(capture.rig[2]));

  // Unwarpable pixels are filled as unpolarized so downstream maps stay finite.
  const int w = mid.width(), h = mid.height(), nc = mid.channels();
  Mask warp_valid(w, h);
  Grid<double> i0 = l.image, i45 = r.image;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      warp_valid(x, y) = l.valid(x, y) && r.valid(x, y);
      if (!warp_valid(x, y)) {
        for (int c = 0; c < nc; ++c) i0(x, y, c) = i45(x, y, c) = 0.5 * mid(x, y, c);
      }
    }
  }
  PseudoPriors p;
  p.i0_warped = IntensityImage(std::move(i0));
  p.i45_warped = IntensityImage(std::move(i45));
  p.disparity = d.left;
  p.stokes = stokes_from_triple(mid, p.i0_warped, p.i45_warped);
  PolarParams raw = params_from_stokes(p.stokes, DopClamp::raw);
  p.aop = std::move(raw.aop);
  p.dop = std::move(raw.dop);
  p.valid = Mask(w, h, nc);
  for (int c = 0; c < nc; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) p.valid(x, y, c) = warp_valid(x, y) && raw.valid(x, y, c);
    }
  }
  return p;
}

ConfidenceMap estimate_confidence(const IntensityImage& i_un, const NormalMap& normals, const PseudoPriors& priors,
                                  const GatingConfig& cfg, const NoiseModel& noise) {
  cfg.validate();
  require_same_shape(i_un, priors.stokes.s0, "estimate_confidence");
  const int w = i_un.width(), h = i_un.height(), nc = i_un.channels();
  if (normals.n.width() != w || normals.n.height() != h) {
    throw ShapeError("estimate_confidence: normal map size differs");
  }
  Map c(w, h, nc, 0.0);
  const StokesImage& s = priors.stokes;
  auto q = [&](int x, int y, int ch, int k) {
    const double s0 = std::max(s.s0(x, y, ch), kEpsS0);
    return (k == 0 ? s.s1(x, y, ch) : s.s2(x, y, ch)) / s0;
  };
  const double cos_same_surface = std::cos(kPi / 6.0);
  std::vector<double> preds;
  for (int ch = 0; ch < nc; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!priors.valid(x, y, ch)) continue;
        const double q1 = q(x, y, ch, 0), q2 = q(x, y, ch, 1);
        const double rho = priors.dop(x, y, ch);
        const double v = std::max(0.0, std::abs(q1) - 1.0 - cfg.tau) + std::max(0.0, std::abs(q2) - 1.0 - cfg.tau) +
                         std::max(0.0, rho - 1.0 - cfg.tau);
        const double hinge = std::exp(-v / cfg.tau);

        const bool have_n = normals.valid(x, y);
        const Vec3 n0 = normals.at(x, y);
        auto usable = [&](int xx, int yy) {
          if (!i_un.in_bounds(xx, yy) || !priors.valid(xx, yy, ch)) return false;
          return !(have_n && normals.valid(xx, yy) && normals.at(xx, yy).dot(n0) < cos_same_surface);
        };
        // Median over the four line directions of a polynomial prediction
        // from same-surface neighbours: cubic-exact central stencil, else
        // linear interpolation, else one-sided extrapolation.
        double dev = 0.0;
        for (int k = 0; k < 2; ++k) {
          preds.clear();
          for (const auto& [ux, uy] : kDirections) {
            auto ok = [&](int t) { return usable(x + t * ux, y + t * uy); };
            auto qt = [&](int t) { return q(x + t * ux, y + t * uy, ch, k); };
            if (ok(-2) && ok(-1) && ok(1) && ok(2)) {
              preds.push_back((4.0 * (qt(-1) + qt(1)) - qt(-2) - qt(2)) / 6.0);
            } else if (ok(-1) && ok(1)) {
              preds.push_back(0.5 * (qt(-1) + qt(1)));
            } else {
              for (int side : {1, -1}) {
                if (ok(side) && ok(2 * side) && ok(3 * side)) {
                  preds.push_back(3.0 * qt(side) - 3.0 * qt(2 * side) + qt(3 * side));
                  break;
                }
                if (ok(side) && ok(2 * side)) {
                  preds.push_back(2.0 * qt(side) - qt(2 * side));
                  break;
                }
              }
            }
          }
          if (preds.empty()) continue;  // no usable line: no evidence either way
          std::sort(preds.begin(), preds.end());
          const std::size_t m = preds.size();
          const double med = (m % 2) ? preds[m / 2] : 0.5 * (preds[m / 2 - 1] + preds[m / 2]);
          dev = std::max(dev, std::abs(((k == 0) ? q1 : q2) - med));
        }
        const double allowed =
            cfg.consistency_floor + cfg.consistency_k * normalized_stokes_sigma(noise, s.s0(x, y, ch));
        const double consistency = std::exp(-std::max(0.0, dev - allowed) / allowed);
        c(x, y, ch) = hinge * consistency;
      }
    }
  }
  return {std::move(c)};
}

ConfidenceMap confidence_gt(const SceneBundle& bundle, const CaptureSet& capture, const StereoDisparity& d_gt,
                            double kappa) {
  if (!(kappa > 0.0)) throw DomainError("confidence_gt: kappa must be positive");
  const ViewGroundTruth& ref = bundle.reference();
  const WarpResult l = warp_to_reference(capture.i0_left, d_gt.left, source_offset_sign(capture.rig[0]));
  const WarpResult r = warp_to_reference(capture.i45_right, d_gt.right, source_offset_sign(capture.rig[2]));
  const IntensityImage i0 = synthesize_polarized(ref.params, ref.i_un, PolarizerAngle::degrees(0.0));
  const IntensityImage i45 = synthesize_polarized(ref.params, ref.i_un, PolarizerAngle::degrees(45.0));
  require_same_shape(i0, l.image, "confidence_gt");
  const int w = i0.width(), h = i0.height(), nc = i0.channels();
  Map c(w, h, nc, 0.0);
  for (int ch = 0; ch < nc; ++ch) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const bool visible = l.valid(x, y) && r.valid(x, y) && !bundle.ref_occlusion[0](x, y) &&
                             !bundle.ref_occlusion[2](x, y);
        if (!visible) continue;
        const double res = std::max(std::abs(l.image(x, y, ch) - i0(x, y, ch)), std::abs(r.image(x, y, ch) - i45(x, y, ch)));
        c(x, y, ch) = std::exp(-kappa * res);
      }
    }
  }
  return {std::move(c)};
}

Map gating_bias(const ConfidenceMap& c, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("gating_bias: epsilon must be positive");
  Map m(c.c.width(), c.c.height(), c.c.channels());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!(c.c[i] >= 0.0 && c.c[i] <= 1.0)) throw DomainError("gating_bias: confidence outside [0, 1]");
    m[i] = c.c[i] >= 0.5 ? std::log1p((c.c[i] - 1.0) + epsilon) : std::log(c.c[i] + epsilon);
  }
  return m;
}

namespace {

class Fuser {
 public:
  Fuser(const PseudoPriors& p, const ConfidenceMap& c, const IntensityImage& g, const NormalMap& n,
        const GatingConfig& cfg, const NoiseModel& noise)
      : p_(p), c_(c), g_(g), n_(n), cfg_(cfg), noise_(noise) {
    cfg.validate();
    require_same_shape(g, p.stokes.s0, "gated_fusion");
    require_same_shape(g, c.c, "gated_fusion");
    require_same_shape(g, p.valid, "gated_fusion");
    if (n.n.width() != g.width() || n.n.height() != g.height()) throw ShapeError("gated_fusion: normal map size differs");
    if (!p.disparity.valid.empty() &&
        (p.disparity.valid.width() != g.width() || p.disparity.valid.height() != g.height())) {
      throw ShapeError("gated_fusion: disparity map size differs");
    }
    bias_ = cfg.gating ? gating_bias(c, cfg.epsilon) : Map(g.width(), g.height(), g.channels(), std::log1p(cfg.epsilon));
  }

  // Fills `wts` (window, row-major) with normalized weights; false when the
  // window carries no usable sample.
  bool weights(int x, int y, int ch, std::vector<double>& wts) const {
    const int r = cfg_.window_radius, side = 2 * r + 1;
    wts.assign(static_cast<std::size_t>(side) * side, 0.0);
    const StokesImage& s = p_.stokes;
    const bool center_ok = p_.valid(x, y, ch);
    const double c0 = cfg_.gating ? c_.c(x, y, ch) : 1.0;
    const double s00 = std::max(s.s0(x, y, ch), kEpsS0);
    const double q10 = s.s1(x, y, ch) / s00, q20 = s.s2(x, y, ch) / s00;
    const double sigma_p = std::max(cfg_.range_floor, cfg_.range_k * normalized_stokes_sigma(noise_, s.s0(x, y, ch)));
    const double sigma_r = sigma_p + (1.0 - c0) * cfg_.sigma_release;
    const bool use_n = cfg_.normal_guidance && n_.valid(x, y);
    const Vec3 n0 = n_.at(x, y);
    const double g0 = g_(x, y, ch);
    const DisparityMap& disp = p_.disparity;
    const bool use_d = !disp.valid.empty() && disp.valid(x, y);
    const double d0 = use_d ? disp.disparity(x, y) : 0.0;

    double best = -kInf;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const int xx = x + dx, yy = y + dy;
        double& l = wts[static_cast<std::size_t>(dy + r) * side + dx + r];
        l = -kInf;
        if (!g_.in_bounds(xx, yy) || !p_.valid(xx, yy, ch)) continue;
        if (use_d && disp.valid(xx, yy) && std::abs(disp.disparity(xx, yy) - d0) > cfg_.disparity_gate) continue;
        const double dg = g_(xx, yy, ch) - g0;
        l = -dg * dg / (2.0 * cfg_.sigma_g * cfg_.sigma_g) - (dx * dx + dy * dy) / (2.0 * cfg_.sigma_s * cfg_.sigma_s) +
            bias_(xx, yy, ch);
        if (use_n && n_.valid(xx, yy)) {
          l -= (n_.at(xx, yy) - n0).squaredNorm() / (2.0 * cfg_.sigma_n * cfg_.sigma_n);
        }
        if (center_ok) {
          const double sj = std::max(s.s0(xx, yy, ch), kEpsS0);
          const double e1 = s.s1(xx, yy, ch) / sj - q10, e2 = s.s2(xx, yy, ch) / sj - q20;
          l -= (e1 * e1 + e2 * e2) / (2.0 * sigma_r * sigma_r);
        }
        best = std::max(best, l);
      }
    }
    if (!std::isfinite(best)) {
      std::fill(wts.begin(), wts.end(), 0.0);
      return false;
    }
    double sum = 0.0;
    for (double& l : wts) {
      l = std::isfinite(l) ? std::exp(l - best) : 0.0;
      sum += l;
    }
    for (double& l : wts) l /= sum;
    return true;
  }

  PolarParams run() const {
    const int w = g_.width(), h = g_.height(), nc = g_.channels(), r = cfg_.window_radius, side = 2 * r + 1;
    PolarParams out{Map(w, h, nc), Map(w, h, nc), Mask(w, h, nc)};
    std::vector<double> wts;
    for (int ch = 0; ch < nc; ++ch) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!weights(x, y, ch, wts)) continue;
          double fs = 0.0, fc = 0.0, fr = 0.0, fa = 0.0;
          for (int dy = -r; dy <= r; ++dy) {
            for (int dx = -r; dx <= r; ++dx) {
              const double wt = wts[static_cast<std::size_t>(dy + r) * side + dx + r];
              if (wt == 0.0) continue;
              const double th = p_.aop(x + dx, y + dy, ch);
              fs += wt * std::sin(2.0 * th);
              fc += wt * std::cos(2.0 * th);
              fa += wt * th;
              fr += wt * p_.dop(x + dx, y + dy, ch);
            }
          }
          out.aop(x, y, ch) =
              (cfg_.encoding == AopEncoding::trigonometric) ? wrap_pi(0.5 * std::atan2(fs, fc)) : wrap_pi(fa);
          out.dop(x, y, ch) = std::clamp(fr, 0.0, 1.0);
          out.valid(x, y, ch) = 1;
        }
      }
    }
    return out;
  }

 private:
  const PseudoPriors& p_;
  const ConfidenceMap& c_;
  const IntensityImage& g_;
  const NormalMap& n_;
  const GatingConfig& cfg_;
  const NoiseModel& noise_;
  Map bias_;
};

}  // namespace

PolarParams gated_fusion(const PseudoPriors& priors, const ConfidenceMap& c, const IntensityImage& i_un,
                         const NormalMap& normals, const GatingConfig& cfg, const NoiseModel& noise) {
  return Fuser(priors, c, i_un, normals, cfg, noise).run();
}

std::vector<double> fusion_weights(const PseudoPriors& priors, const ConfidenceMap& c, const IntensityImage& i_un,
                                   const NormalMap& normals, const GatingConfig& cfg, int x, int y,
                                   const NoiseModel& noise) {
  if (!i_un.in_bounds(x, y)) throw DomainError("fusion_weights: pixel outside the image");
  std::vector<double> wts;
  Fuser(priors, c, i_un, normals, cfg, noise).weights(x, y, 0, wts);
  return wts;
}

ReconstructResult reconstruct_pipeline(const CaptureSet& capture, const SceneBundle* bundle,
                                       const ReconstructConfig& cfg) {
  cfg.gating.validate();
  ReconstructResult res;
  res.disparity = estimate_disparity(capture, cfg.disparity, bundle, cfg.block);
  res.priors = pseudo_priors(capture, res.disparity);

  // Depth from whichever side has a valid disparity; the left view wins.
  const DepthMap dl = depth_from_disparity(res.disparity.left, capture.rig[0]);
  const DepthMap dr = depth_from_disparity(res.disparity.right, capture.rig[2]);
  res.depth = dl;
  for (std::size_t i = 0; i < res.depth.depth.size(); ++i) {
    if (!res.depth.valid[i] && dr.valid[i]) {
      res.depth.depth[i] = dr.depth[i];
      res.depth.valid[i] = 1;
    }
  }
  res.normals = normals_from_depth(res.depth, capture.rig[1]);
  res.confidence = estimate_confidence(capture.i_un_mid, res.normals, res.priors, cfg.gating, capture.noise);
  res.params = gated_fusion(res.priors, res.confidence, capture.i_un_mid, res.normals, cfg.gating, capture.noise);
  return res;
}

}  // namespace polarbench
