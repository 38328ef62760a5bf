// SPDX-License-Identifier: Apache-2.0
#include "polarbench/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace polarbench {

namespace {

constexpr int kSsimRadius = 5;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

void require_single_channel(const Map& m, const char* what) {
  if (m.channels() != 1) throw ShapeError(std::string(what) + ": expected a single channel");
}

std::array<double, 2 * kSsimRadius + 1> gaussian_taps() {
  std::array<double, 2 * kSsimRadius + 1> g{};
  double sum = 0.0;
  for (int i = -kSsimRadius; i <= kSsimRadius; ++i) {
    g[i + kSsimRadius] = std::exp(-(i * i) / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i + kSsimRadius];
  }
  for (double& v : g) v /= sum;
  return g;
}

// Separable Gaussian filter, "valid" region only: output (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
  static const auto g = gaussian_taps();
  const int ow = w - 2 * kSsimRadius, oh = h - 2 * kSsimRadius;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h), out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < 2 * kSsimRadius + 1; ++k) s += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < 2 * kSsimRadius + 1; ++k) s += g[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

PsnrResult psnr(const Map& x, const Map& y, double peak, const Mask* mask) {
  require_same_shape(x, y, "psnr");
  if (!(peak > 0.0)) throw DomainError("psnr: peak must be positive");
  if (mask && (mask->width() != x.width() || mask->height() != x.height())) throw ShapeError("psnr: mask size differs");
  double sse = 0.0;
  std::size_t n = 0;
  const std::size_t plane = x.plane_size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask && !(*mask)[i % plane]) continue;
    const double d = x[i] - y[i];
    sse += d * d;
    ++n;
  }
  if (n == 0) throw DomainError("psnr: empty mask");
  const double mse = sse / static_cast<double>(n);
  if (mse == 0.0) return {kPsnrCap, true};
  const double db = 10.0 * std::log10(peak * peak / mse);
  if (db >= kPsnrCap) return {kPsnrCap, true};
  return {db, false};
}

double ssim(const Map& x, const Map& y, const Mask* mask) {
  require_same_shape(x, y, "ssim");
  require_single_channel(x, "ssim");
  const int w = x.width(), h = x.height();
  if (w < 2 * kSsimRadius + 1 || h < 2 * kSsimRadius + 1) throw ShapeError("ssim: image smaller than the 11x11 window");
  if (mask && (mask->width() != w || mask->height() != h)) throw ShapeError("ssim: mask size differs");
  const std::size_t n = x.size();
  std::vector<double> a(x.values().begin(), x.values().end()), b(y.values().begin(), y.values().end());
  std::vector<double> aa(n), bb(n), ab(n);
  for (std::size_t i = 0; i < n; ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, w, h), mu_b = filter_valid(b, w, h);
  const auto e_aa = filter_valid(aa, w, h), e_bb = filter_valid(bb, w, h), e_ab = filter_valid(ab, w, h);
  const int ow = w - 2 * kSsimRadius, oh = h - 2 * kSsimRadius;
  double sum = 0.0;
  std::size_t count = 0;
  for (int cy = 0; cy < oh; ++cy) {
    for (int cx = 0; cx < ow; ++cx) {
      if (mask && !(*mask)(cx + kSsimRadius, cy + kSsimRadius)) continue;
      const std::size_t i = static_cast<std::size_t>(cy) * ow + cx;
      const double va = e_aa[i] - mu_a[i] * mu_a[i];
      const double vb = e_bb[i] - mu_b[i] * mu_b[i];
      const double cov = e_ab[i] - mu_a[i] * mu_b[i];
      sum += ((2 * mu_a[i] * mu_b[i] + kSsimC1) * (2 * cov + kSsimC2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kSsimC1) * (va + vb + kSsimC2));
      ++count;
    }
  }
  if (count == 0) throw DomainError("ssim: no window centre inside the mask");
  return sum / static_cast<double>(count);
}

double mae_angular(const Map& aop_hat, const Map& aop_gt, const Mask& mask) {
  require_same_shape(aop_hat, aop_gt, "mae_angular");
  if (mask.width() != aop_hat.width() || mask.height() != aop_hat.height()) throw ShapeError("mae_angular: mask size differs");
  const std::size_t plane = aop_hat.plane_size();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < aop_hat.size(); ++i) {
    if (!mask[i % plane]) continue;
    sum += aop_distance(aop_hat[i], aop_gt[i]);
    ++n;
  }
  if (n == 0) throw DomainError("mae_angular: empty mask");
  return sum / static_cast<double>(n) * 180.0 / kPi;
}

double loss_aop(const Map& aop_hat, const Map& aop_gt, double lambda_g) {
  require_same_shape(aop_hat, aop_gt, "loss_aop");
  if (!(lambda_g >= 0.0)) throw DomainError("loss_aop: lambda_g must be non-negative");
  const int w = aop_hat.width(), h = aop_hat.height();
  Map ds(w, h, aop_hat.channels()), dc(w, h, aop_hat.channels());
  double l1 = 0.0;
  for (std::size_t i = 0; i < aop_hat.size(); ++i) {
    ds[i] = std::sin(2 * aop_hat[i]) - std::sin(2 * aop_gt[i]);
    dc[i] = std::cos(2 * aop_hat[i]) - std::cos(2 * aop_gt[i]);
    l1 += std::abs(ds[i]) + std::abs(dc[i]);
  }
  if (aop_hat.empty()) return 0.0;
  l1 /= static_cast<double>(aop_hat.size());
  double grad = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < aop_hat.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (x + 1 < w) {
          grad += std::abs(ds(x + 1, y, c) - ds(x, y, c)) + std::abs(dc(x + 1, y, c) - dc(x, y, c));
          ++n;
        }
        if (y + 1 < h) {
          grad += std::abs(ds(x, y + 1, c) - ds(x, y, c)) + std::abs(dc(x, y + 1, c) - dc(x, y, c));
          ++n;
        }
      }
    }
  }
  return n ? l1 + lambda_g * grad / static_cast<double>(n) : l1;
}

double loss_weighted(const Map& y, const Map& y_gt, const Map& weight) {
  require_same_shape(y, y_gt, "loss_weighted");
  require_same_shape(y, weight, "loss_weighted");
  if (y.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(weight[i] >= 0.0)) throw DomainError("loss_weighted: negative weight");
    s += weight[i] * std::abs(y[i] - y_gt[i]);
  }
  return s / static_cast<double>(y.size());
}

Map dop_weight(const Map& dop_gt, double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("dop_weight: alpha must be non-negative");
  Map w(dop_gt.width(), dop_gt.height(), dop_gt.channels());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + alpha * dop_gt[i];
  return w;
}

Map confidence_weight(const Map& c_gt, double beta) {
  if (!(beta >= 0.0)) throw DomainError("confidence_weight: beta must be non-negative");
  Map w(c_gt.width(), c_gt.height(), c_gt.channels());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + beta * (1.0 - c_gt[i]);
  return w;
}

double loss_intensity(const PolarParams& params, const IntensityImage& i_un, const IntensityImage& i0_obs,
                      const IntensityImage& i45_obs) {
  require_same_shape(i_un, i0_obs, "loss_intensity");
  require_same_shape(i_un, i45_obs, "loss_intensity");
  if (i_un.empty()) return 0.0;
  const auto i0 = synthesize_polarized(params, i_un, PolarizerAngle::degrees(0.0));
  const auto i45 = synthesize_polarized(params, i_un, PolarizerAngle::degrees(45.0));
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < i_un.size(); ++i) {
    a += std::abs(i0[i] - i0_obs[i]);
    b += std::abs(i45[i] - i45_obs[i]);
  }
  return (a + b) / static_cast<double>(i_un.size());
}

void LossConfig::validate() const {
  for (double v : {lambda_p, lambda_c, lambda_i, lambda_g, alpha, beta}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("loss weights must be finite and non-negative");
  }
}

double loss_total(const LossComponents& parts, const LossConfig& cfg) {
  cfg.validate();
  return cfg.lambda_p * parts.polar + cfg.lambda_c * parts.confidence + cfg.lambda_i * parts.intensity;
}

std::array<IntensityImage, 4> demosaic_bilinear(const DoFPRaw& raw) {
  validate_mosaic_pattern(raw.pattern);
  const IntensityImage& m = raw.mosaic;
  const int w = m.width(), h = m.height();
  if (w % 2 || h % 2) throw ShapeError("demosaic_bilinear: mosaic dimensions must be even");
  std::array<IntensityImage, 4> out;
  for (int k = 0; k < 4; ++k) {
    const double deg = 45.0 * k;
    int ax = -1, ay = -1;
    for (int py = 0; py < 2; ++py)
      for (int px = 0; px < 2; ++px)
        if (raw.pattern[py][px] == PolarizerAngle::degrees(deg)) {
          ax = px;
          ay = py;
        }
    Grid<double> ch(w, h, m.channels());
    for (int c = 0; c < m.channels(); ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          double num = 0.0, den = 0.0;
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const int sx = x + dx, sy = y + dy;
              if (!m.in_bounds(sx, sy) || (sx & 1) != ax || (sy & 1) != ay) continue;
              const double wt = (dx ? 1.0 : 2.0) * (dy ? 1.0 : 2.0);
              num += wt * m(sx, sy, c);
              den += wt;
            }
          }
          ch(x, y, c) = num / den;
        }
      }
    }
    out[k] = IntensityImage(std::move(ch));
  }
  return out;
}

PolarParams dofp_params(const std::array<IntensityImage, 4>& ch, IntensityImage* s0) {
  const StokesImage s = stokes_from_four(ch[0], ch[1], ch[2], ch[3]);
  PolarParams p = params_from_stokes(s, DopClamp::raw);
  for (double& v : p.dop.values()) v = std::min(v, 1.0);
  if (s0) {
    Grid<double> g = s.s0;
    for (double& v : g.values()) v = std::max(v, 0.0);
    *s0 = IntensityImage(std::move(g));
  }
  return p;
}

namespace {

Map normalized_stokes(const Map& s, const Map& s0) {
  Map out(s.width(), s.height(), s.channels());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = s0[i] > kEpsS0 ? (s[i] / s0[i] + 1.0) / 2.0 : 0.5;
  return out;
}

QualityEntry quality(const Map& pred, const Map& gt, const Mask& mask) {
  const PsnrResult p = psnr(pred, gt, 1.0, &mask);
  QualityEntry e;
  e.psnr = p.db;
  e.capped = p.capped;
  double s = 0.0;
  for (int c = 0; c < pred.channels(); ++c) {
    Map a(pred.width(), pred.height()), b(pred.width(), pred.height());
    std::copy(pred.plane(c).begin(), pred.plane(c).end(), a.values().begin());
    std::copy(gt.plane(c).begin(), gt.plane(c).end(), b.values().begin());
    s += ssim(a, b, &mask);
  }
  e.ssim = s / pred.channels();
  return e;
}

}  // namespace

SceneMetrics evaluate(const std::string& scene, const PolarParams& pred, const IntensityImage& s0_pred,
                      const ViewGroundTruth& gt, const EvalOptions& opts) {
  if (gt.i_un.empty() || gt.params.aop.empty() || gt.params.dop.empty() || gt.params.valid.empty()) {
    throw ConfigError("evaluate: ground truth for scene '" + scene + "' is missing fields");
  }
  require_same_shape(pred.aop, gt.params.aop, "evaluate");
  require_same_shape(pred.dop, gt.params.dop, "evaluate");
  require_same_shape(s0_pred, gt.i_un, "evaluate");
  const int w = gt.i_un.width(), h = gt.i_un.height();
  Mask mask(w, h), aop_mask(w, h);
  std::size_t gt_valid = 0, covered = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!gt.params.valid(x, y)) continue;
      ++gt_valid;
      if (!pred.valid(x, y)) continue;
      ++covered;
      mask(x, y) = 1;
      aop_mask(x, y) = gt.params.dop(x, y) >= opts.aop_min_dop;
    }
  }
  if (covered == 0) throw DomainError("evaluate: prediction covers no ground-truth pixel in '" + scene + "'");
  SceneMetrics m;
  m.scene = scene;
  m.coverage = static_cast<double>(covered) / static_cast<double>(gt_valid);
  const auto i0p = synthesize_polarized(pred, s0_pred, PolarizerAngle::degrees(0.0));
  const auto i45p = synthesize_polarized(pred, s0_pred, PolarizerAngle::degrees(45.0));
  const auto i0g = synthesize_polarized(gt.params, gt.i_un, PolarizerAngle::degrees(0.0));
  const auto i45g = synthesize_polarized(gt.params, gt.i_un, PolarizerAngle::degrees(45.0));
  const auto sp = stokes_from_params(pred, s0_pred);
  const auto sg = stokes_from_params(gt.params, gt.i_un);
  m.i0 = quality(i0p, i0g, mask);
  m.i45 = quality(i45p, i45g, mask);
  m.s1 = quality(normalized_stokes(sp.s1, sp.s0), normalized_stokes(sg.s1, sg.s0), mask);
  m.s2 = quality(normalized_stokes(sp.s2, sp.s0), normalized_stokes(sg.s2, sg.s0), mask);
  m.dop = quality(pred.dop, gt.params.dop, mask);
  m.aop_mae = mae_angular(pred.aop, gt.params.aop, aop_mask);
  return m;
}

SceneMetrics aggregate(const std::vector<SceneMetrics>& scenes) {
  SceneMetrics a;
  a.scene = "mean";
  if (scenes.empty()) return a;
  const double n = static_cast<double>(scenes.size());
  auto mean_entry = [&](QualityEntry SceneMetrics::*f) {
    QualityEntry e;
    e.capped = true;
    for (const auto& s : scenes) {
      e.psnr += (s.*f).psnr / n;
      e.ssim += (s.*f).ssim / n;
      e.capped = e.capped && (s.*f).capped;
    }
    return e;
  };
  a.i0 = mean_entry(&SceneMetrics::i0);
  a.i45 = mean_entry(&SceneMetrics::i45);
  a.s1 = mean_entry(&SceneMetrics::s1);
  a.s2 = mean_entry(&SceneMetrics::s2);
  a.dop = mean_entry(&SceneMetrics::dop);
  for (const auto& s : scenes) {
    a.aop_mae += s.aop_mae / n;
    a.coverage += s.coverage / n;
  }
  return a;
}

MetricReport make_report(const std::string& label, std::vector<SceneMetrics> scenes) {
  MetricReport r;
  r.label = label;
  r.aggregate = aggregate(scenes);
  r.scenes = std::move(scenes);
  return r;
}

namespace {

using nlohmann::json;

json entry_json(const QualityEntry& e) { return {{"psnr_db", e.psnr}, {"psnr_capped", e.capped}, {"ssim", e.ssim}}; }

QualityEntry entry_from(const json& j) {
  return {j.at("psnr_db").get<double>(), j.at("psnr_capped").get<bool>(), j.at("ssim").get<double>()};
}

json scene_json(const SceneMetrics& m) {
  return {{"scene", m.scene},
          {"I0", entry_json(m.i0)},
          {"I45", entry_json(m.i45)},
          {"S1", entry_json(m.s1)},
          {"S2", entry_json(m.s2)},
          {"DoP", entry_json(m.dop)},
          {"AoP", {{"mae_deg", m.aop_mae}}},
          {"coverage", m.coverage}};
}

SceneMetrics scene_from(const json& j) {
  SceneMetrics m;
  m.scene = j.at("scene").get<std::string>();
  m.i0 = entry_from(j.at("I0"));
  m.i45 = entry_from(j.at("I45"));
  m.s1 = entry_from(j.at("S1"));
  m.s2 = entry_from(j.at("S2"));
  m.dop = entry_from(j.at("DoP"));
  m.aop_mae = j.at("AoP").at("mae_deg").get<double>();
  m.coverage = j.at("coverage").get<double>();
  return m;
}

std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> row_fields(const MetricReport& r) {
  const SceneMetrics& a = r.aggregate;
  std::vector<std::string> f{r.label};
  for (const QualityEntry* e : {&a.i0, &a.i45, &a.s1, &a.s2}) {
    f.push_back(shortest(e->psnr));
    f.push_back(shortest(e->ssim));
  }
  f.push_back(shortest(a.aop_mae));
  f.push_back(shortest(a.dop.psnr));
  f.push_back(shortest(a.dop.ssim));
  f.push_back(shortest(a.coverage));
  return f;
}

const std::vector<std::string> kColumns{"method",   "I0_psnr", "I0_ssim", "I45_psnr", "I45_ssim", "S1_psnr", "S1_ssim",
                                        "S2_psnr",  "S2_ssim", "aop_mae_deg", "dop_psnr", "dop_ssim", "coverage"};

}  // namespace

std::string report_to_json(const MetricReport& report) {
  json j;
  j["label"] = report.label;
  j["psnr_peak"] = 1.0;
  j["note"] = "DoP PSNR over [0,1]; S1/S2 mapped to [0,1] by (s/S0+1)/2; masks exclude invalid pixels";
  j["scenes"] = json::array();
  for (const auto& s : report.scenes) j["scenes"].push_back(scene_json(s));
  j["aggregate"] = scene_json(report.aggregate);
  return j.dump(2);
}

MetricReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    MetricReport r;
    r.label = j.at("label").get<std::string>();
    for (const auto& s : j.at("scenes")) r.scenes.push_back(scene_from(s));
    r.aggregate = scene_from(j.at("aggregate"));
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("metric report: ") + e.what());
  }
}

std::string reports_to_csv(const std::vector<MetricReport>& reports) {
  std::ostringstream os;
  for (std::size_t i = 0; i < kColumns.size(); ++i) os << (i ? "," : "") << kColumns[i];
  os << "\n";
  for (const auto& r : reports) {
    const auto f = row_fields(r);
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << "\n";
  }
  return os.str();
}

std::string reports_to_table(const std::vector<MetricReport>& reports) {
  std::vector<std::vector<std::string>> rows{kColumns};
  for (const auto& r : reports) {
    const SceneMetrics& a = r.aggregate;
    std::vector<std::string> f{r.label};
    auto fmt = [](double v, int prec) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(prec) << v;
      return s.str();
    };
    for (const QualityEntry* e : {&a.i0, &a.i45, &a.s1, &a.s2}) {
      f.push_back(fmt(e->psnr, 2));
      f.push_back(fmt(e->ssim, 4));
    }
    f.push_back(fmt(a.aop_mae, 3));
    f.push_back(fmt(a.dop.psnr, 2));
    f.push_back(fmt(a.dop.ssim, 4));
    f.push_back(fmt(a.coverage, 3));
    rows.push_back(std::move(f));
  }
  std::vector<std::size_t> width(kColumns.size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  std::ostringstream os;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width[i])) << r[i];
      } else {
        os << "  " << std::right << std::setw(static_cast<int>(width[i])) << r[i];
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace polarbench
