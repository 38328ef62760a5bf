// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "fresnel_golden.hpp"
#include "metric_oracles.hpp"
#include "polarbench/cli/commands.hpp"
#include "polarbench/eval.hpp"
#include "polarbench/fresnel_geom.hpp"
#include "polarbench/reconstruct.hpp"

using namespace polarbench;
using namespace polarbench::cli;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double deg(double rad) { return rad * 180.0 / kPi; }

CaptureSet noiseless_capture(const SceneBundle& b) {
  return capture_easypolar(b, NoiseModel::none(), RadiometricMismatch::identity());
}

// 1. Noiseless library, GT disparity.
Outcome noiseless_exactness() {
  const auto t0 = Clock::now();
  std::vector<SceneMetrics> rows;
  for (const auto& spec : scene_library(0, 256)) {
    const SceneBundle b = render_rig(spec);
    const auto res = reconstruct_pipeline(noiseless_capture(b), &b);
    const IntensityImage s0 = b.reference().i_un;
    rows.push_back(evaluate(spec.name, res.params, s0, b.reference()));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const SceneMetrics agg = aggregate(rows);
  std::string worst;
  for (const auto& r : rows) {
    if (r.dop.psnr <= 50.0) worst += fmt(" %s=%.1fdB", r.scene.c_str(), r.dop.psnr);
  }
  const bool ok = agg.aop_mae < 0.5 && agg.dop.psnr > 50.0 && secs < 30.0;
  return {ok, fmt("%zu scenes, AoP MAE %.3f deg (< 0.5), DoP PSNR %.2f dB (> 50), %.1f s (< 30)", rows.size(),
                  agg.aop_mae, agg.dop.psnr, secs) +
                  (worst.empty() ? "" : "; DoP below 50 dB:" + worst)};
}

// 2. Stokes round trip on 10^6 samples.
Outcome stokes_round_trip() {
  const int w = 1000, h = 1000;
  std::mt19937_64 rng(20261016);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  PolarParams truth{Map(w, h), Map(w, h), Mask(w, h, 1, 1)};
  Map un(w, h), i0(w, h), i45(w, h);
  const auto a0 = PolarizerAngle::degrees(0), a45 = PolarizerAngle::degrees(45);
  for (std::size_t i = 0; i < un.size(); ++i) {
    un[i] = 0.01 + u01(rng);
    truth.dop[i] = u01(rng);
    truth.aop[i] = kPi * u01(rng);
    const double none = malus_intensity(un[i], truth.dop[i], truth.aop[i], PolarizerAngle::none());
    un[i] = none;
    i0[i] = malus_intensity(un[i], truth.dop[i], truth.aop[i], a0);
    i45[i] = malus_intensity(un[i], truth.dop[i], truth.aop[i], a45);
  }
  const auto back = params_from_stokes(
      stokes_from_triple(IntensityImage(un), IntensityImage(i0), IntensityImage(i45)), DopClamp::raw);
  double max_rho = 0, max_theta = 0;
  std::size_t invalid = 0;
  for (std::size_t i = 0; i < un.size(); ++i) {
    if (!back.valid[i]) ++invalid;
    max_rho = std::max(max_rho, std::abs(back.dop[i] - truth.dop[i]));
    max_theta = std::max(max_theta, aop_distance(back.aop[i], truth.aop[i]));
  }
  return {invalid == 0 && max_rho <= 1e-9 && max_theta <= 1e-9,
          fmt("%zu samples, max |drho| %.2e, max dtheta %.2e rad (<= 1e-9), %zu invalid", un.size(), max_rho,
              max_theta, invalid)};
}

// 3. Default noise, library x 5 seeds: triple camera vs DoFP + bilinear.
Outcome comparative_trend() {
  const ExperimentConfig cfg;
  const auto scenes = resolve_scenes(cfg);
  std::vector<SceneMetrics> easy, dofp;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const SceneBundle b = render_rig(scenes[i]);
    for (int rep = 0; rep < 5; ++rep) {
      const std::uint64_t seed = scene_seed(cfg, i, static_cast<std::uint64_t>(rep));
      NoiseModel n = cfg.noise;
      n.seed = seed;
      const auto pe = predict_easypolar(simulate_easypolar(b, cfg, seed), &b, cfg);
      const auto pd = predict_dofp(capture_dofp(b, n));
      easy.push_back(evaluate(scenes[i].name, pe.params, pe.s0, b.reference()));
      dofp.push_back(evaluate(scenes[i].name, pd.params, pd.s0, b.reference()));
    }
  }
  const SceneMetrics e = aggregate(easy), d = aggregate(dofp);
  const double mae_margin = d.aop_mae - e.aop_mae, psnr_margin = e.dop.psnr - d.dop.psnr;
  return {scenes.size() >= 10 && mae_margin > 0 && psnr_margin > 0,
          fmt("%zu scenes x 5 seeds; AoP MAE easypolar %.3f vs dofp %.3f deg (margin %.3f); "
              "DoP PSNR %.2f vs %.2f dB (margin %.2f)",
              scenes.size(), e.aop_mae, d.aop_mae, mae_margin, e.dop.psnr, d.dop.psnr, psnr_margin)};
}

// 4. Fresnel DoP curves.
Outcome fresnel_properties() {
  const double ns[] = {1.3, 1.5, 1.8, 2.4};
  double brewster = 0, at_zero = 0, golden = 0;
  bool in_range = true;
  for (double n : ns) {
    brewster = std::max(brewster, std::abs(dop_specular(std::atan(n), n) - 1.0));
    at_zero = std::max({at_zero, std::abs(dop_diffuse(0.0, n)), std::abs(dop_specular(0.0, n))});
    for (int k = 0; k < 90; ++k) {
      const double z = k * kPi / 180.0;
      const double dd = dop_diffuse(z, n), ds = dop_specular(z, n);
      in_range = in_range && dd >= 0 && dd <= 1 && ds >= 0 && ds <= 1;
    }
  }
  for (const auto& s : golden::kFresnelSamples) {
    const double z = s.zenith_deg * kPi / 180.0;
    golden = std::max({golden, std::abs(dop_diffuse(z, s.n) - s.diffuse), std::abs(dop_specular(z, s.n) - s.specular)});
  }
  return {brewster <= 1e-6 && at_zero == 0.0 && in_range && golden <= 1e-9,
          fmt("Brewster |rho-1| %.1e (<= 1e-6), rho(0) %.1e, grid in [0,1]: %s, golden max err %.1e (<= 1e-9)",
              brewster, at_zero, in_range ? "yes" : "no", golden)};
}

// 5. Four-angle identity on DoT captures.
Outcome dot_identity() {
  double worst = 0;
  double ratio_min = kInf;
  std::string weakest;
  const ExperimentConfig cfg;
  const Eigen::Vector2d drift(0.5, 0.0);
  for (const auto& spec : scene_library(0, 256)) {
    const SceneBundle b = render_rig(spec);
    const auto& ref = b.reference();
    const auto clean = capture_dot(b, NoiseModel::none());
    const auto& f = clean.frames;
    const Map r = check_identity(f[0], f[2], f[1], f[3], ref.i_un);
    worst = std::max(worst, *std::max_element(r.values().begin(), r.values().end()));

    // Edge pixels: strong radiance gradient away from the border.
    Mask edge(ref.i_un.width(), ref.i_un.height());
    for (int y = 2; y < edge.height() - 2; ++y) {
      for (int x = 2; x < edge.width() - 2; ++x) {
        const double gx = 0.5 * (ref.i_un(x + 1, y) - ref.i_un(x - 1, y));
        const double gy = 0.5 * (ref.i_un(x, y + 1) - ref.i_un(x, y - 1));
        edge(x, y) = std::hypot(gx, gy) > 0.05;
      }
    }
    NoiseModel n = cfg.noise;
    n.seed = 7;
    const auto still = capture_dot(b, n);
    const auto moving = capture_dot(b, n, drift);
    const Map rs = check_identity(still.frames[0], still.frames[2], still.frames[1], still.frames[3], ref.i_un);
    const Map rm = check_identity(moving.frames[0], moving.frames[2], moving.frames[1], moving.frames[3], ref.i_un);
    double floor2 = 0, drifted = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < edge.size(); ++i) {
      if (!edge[i]) continue;
      floor2 += rs[i] * rs[i];
      drifted += rm[i];
      ++count;
    }
    if (count == 0) continue;
    const double ratio = (drifted / count) / std::sqrt(floor2 / count);
    if (ratio < ratio_min) {
      ratio_min = ratio;
      weakest = spec.name;
    }
  }
  return {worst < 1e-9 && ratio_min > 10.0,
          fmt("noiseless max residual %.1e (< 1e-9); drift 0.5 px/frame: edge residual / noise floor >= %.1f (> 10, "
              "weakest %s)",
              worst, ratio_min, weakest.c_str())};
}

// 6. Gating isolates corrupted pixels.
Outcome gating_behavior() {
  bool local = true, accurate = true, degrades = true;
  std::string detail;
  for (const char* name : {"smooth_dome", "paraboloid_bump"}) {
    const SceneBundle b = render_rig(library_scene(name, 0, 256));
    const CaptureSet cap = noiseless_capture(b);
    const GatingConfig gcfg;
    const auto base = reconstruct_pipeline(cap, &b);
    const int r = gcfg.window_radius;
    const auto& gt = b.reference().params;
    const int w = cap.i_un_mid.width(), h = cap.i_un_mid.height();

    // Candidates: reliable interior pixels whose whole window is reliable.
    std::vector<std::pair<int, int>> candidates;
    for (int y = r; y < h - r; ++y) {
      for (int x = r; x < w - r; ++x) {
        bool ok = true;
        for (int dy = -r; dy <= r && ok; ++dy)
          for (int dx = -r; dx <= r && ok; ++dx)
            ok = base.priors.valid(x + dx, y + dy) && base.confidence.c(x + dx, y + dy) > 0.9 &&
                 gt.valid(x + dx, y + dy) && gt.dop(x + dx, y + dy) > 0.02;
        if (ok) candidates.emplace_back(x, y);
      }
    }
    std::mt19937_64 rng(6);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (int k : {1, 10, 100}) {
      std::vector<std::pair<int, int>> picked;
      for (const auto& p : candidates) {
        if (static_cast<int>(picked.size()) == k) break;
        const bool isolated = std::none_of(picked.begin(), picked.end(), [&](const auto& q) {
          return std::max(std::abs(q.first - p.first), std::abs(q.second - p.second)) <= 2 * r + 1;
        });
        if (isolated) picked.push_back(p);
      }
      if (static_cast<int>(picked.size()) < k) {
        local = false;
        detail += fmt(" %s: only %zu isolated pixels for k=%d;", name, picked.size(), k);
        continue;
      }
      PseudoPriors bad = base.priors;
      ConfidenceMap c = base.confidence;
      Mask near(w, h);
      const double rot = 2.0 * kPi / 3.0;  // 60 deg of AoP
      for (const auto& [x, y] : picked) {
        const double s1 = bad.stokes.s1(x, y), s2 = bad.stokes.s2(x, y);
        bad.stokes.s1(x, y) = std::cos(rot) * s1 - std::sin(rot) * s2;
        bad.stokes.s2(x, y) = std::sin(rot) * s1 + std::cos(rot) * s2;
        bad.aop(x, y) = wrap_pi(bad.aop(x, y) + kPi / 3.0);
        c.c(x, y) = 0.0;
        for (int dy = -r; dy <= r; ++dy)
          for (int dx = -r; dx <= r; ++dx) near(x + dx, y + dy) = 1;
      }
      // Reference: same confidence map, clean priors.
      const auto ref = gated_fusion(base.priors, c, cap.i_un_mid, base.normals, gcfg, cap.noise);
      const auto gated = gated_fusion(bad, c, cap.i_un_mid, base.normals, gcfg, cap.noise);
      GatingConfig off = gcfg;
      off.gating = false;
      const auto ungated = gated_fusion(bad, c, cap.i_un_mid, base.normals, off, cap.noise);
      std::size_t outside = 0;
      for (std::size_t i = 0; i < near.size(); ++i) {
        if (near[i]) continue;
        if (gated.aop[i] != ref.aop[i] || gated.dop[i] != ref.dop[i] || gated.valid[i] != ref.valid[i]) ++outside;
      }
      double err_g = 0, err_u = 0;
      for (const auto& [x, y] : picked) {
        err_g = std::max(err_g, deg(aop_distance(gated.aop(x, y), gt.aop(x, y))));
        err_u += deg(aop_distance(ungated.aop(x, y), gt.aop(x, y))) / k;
      }
      double mean_g = 0;
      for (const auto& [x, y] : picked) mean_g += deg(aop_distance(gated.aop(x, y), gt.aop(x, y))) / k;
      local = local && outside == 0;
      accurate = accurate && err_g < 1.0;
      degrades = degrades && err_u > mean_g;
      detail += fmt(" %s k=%d: changed outside windows %zu, corrupted max err %.3f deg, mean gated %.3f vs "
                    "ungated %.2f;",
                    name, k, outside, err_g, mean_g, err_u);
    }
  }
  detail.pop_back();
  return {local && accurate && degrades, detail.substr(1)};
}

// 7. sin/cos vs scalar AoP averaging across the 0/pi wrap.
Outcome aop_encoding() {
  const ExperimentConfig cfg;
  const SceneBundle b = render_rig(library_scene("wrap_sphere", 0, 256));
  const auto& gt = b.reference().params;
  const CaptureSet cap = simulate_easypolar(b, cfg, scene_seed(cfg, 0, 0));
  ReconstructConfig rc = cfg.reconstruct_config();
  const auto trig = reconstruct_pipeline(cap, &b, rc);
  rc.gating.encoding = AopEncoding::scalar;
  const auto scalar = reconstruct_pipeline(cap, &b, rc);
  const double band = 10.0 * kPi / 180.0;
  double et = 0, es = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < gt.aop.size(); ++i) {
    if (!gt.valid[i] || gt.dop[i] < 0.05 || !trig.params.valid[i] || !scalar.params.valid[i]) continue;
    if (aop_distance(gt.aop[i], 0.0) > band) continue;
    et += deg(aop_distance(trig.params.aop[i], gt.aop[i]));
    es += deg(aop_distance(scalar.params.aop[i], gt.aop[i]));
    ++n;
  }
  et /= std::max<std::size_t>(n, 1);
  es /= std::max<std::size_t>(n, 1);
  return {n > 0 && et < 1.0 && es > 10.0,
          fmt("wrap_sphere, %zu wrap-region pixels (GT AoP within 10 deg of 0/180, DoP >= 0.05): sin/cos %.3f deg "
              "(< 1), scalar %.2f deg (> 10)",
              n, et, es)};
}

// 8. Metrics against naive oracles; loss functionals.
Outcome metric_oracles() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_map = [&](double lo, double hi) {
    Map m(32, 32);
    for (double& v : m.values()) v = lo + (hi - lo) * u(rng);
    return m;
  };
  double dpsnr = 0, dssim = 0, dmae = 0;
  const Mask all(32, 32, 1, 1);
  for (int t = 0; t < 100; ++t) {
    const Map x = random_map(0, 1), y = random_map(0, 1);
    dpsnr = std::max(dpsnr, std::abs(psnr(x, y).db - oracle::naive_psnr(x, y)));
    dssim = std::max(dssim, std::abs(ssim(x, y) - oracle::naive_ssim(x, y)));
    const Map a = random_map(0, kPi), c = random_map(0, kPi);
    dmae = std::max(dmae, std::abs(mae_angular(a, c, all) - oracle::naive_mae_deg(a, c)));
  }
  double at_truth = 0, minimum = kInf;
  for (int t = 0; t < 10000; ++t) {
    Map a(4, 4), g(4, 4), y(4, 4), yg(4, 4), wt(4, 4), un(4, 4), dop(4, 4);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = kPi * u(rng);
      g[i] = kPi * u(rng);
      y[i] = u(rng);
      yg[i] = u(rng);
      wt[i] = 3 * u(rng);
      un[i] = u(rng);
      dop[i] = u(rng);
    }
    const PolarParams gt{g, dop, Mask(4, 4, 1, 1)};
    const PolarParams pred{a, y, Mask(4, 4, 1, 1)};
    const IntensityImage i_un(un);
    const auto i0 = synthesize_polarized(gt, i_un, PolarizerAngle::degrees(0));
    const auto i45 = synthesize_polarized(gt, i_un, PolarizerAngle::degrees(45));
    const double lam = 0.1;
    at_truth = std::max({at_truth, std::abs(loss_aop(g, g, lam)), std::abs(loss_weighted(yg, yg, wt)),
                         std::abs(loss_intensity(gt, i_un, i0, i45))});
    const LossComponents parts{loss_aop(a, g, lam) + loss_weighted(y, yg, dop_weight(dop, 5.0)),
                               loss_weighted(y, yg, confidence_weight(yg, 2.0)), loss_intensity(pred, i_un, i0, i45)};
    minimum = std::min({minimum, loss_aop(a, g, lam), loss_weighted(y, yg, wt), loss_intensity(pred, i_un, i0, i45),
                        loss_total(parts)});
  }
  return {dpsnr <= 1e-6 && dssim <= 1e-6 && dmae <= 1e-6 && at_truth == 0.0 && minimum >= 0.0,
          fmt("100 pairs: max |dPSNR| %.1e, |dSSIM| %.1e, |dMAE| %.1e (<= 1e-6); 1e4 loss probes: max at truth %.1e, "
              "min %.3e (>= 0)",
              dpsnr, dssim, dmae, at_truth, minimum)};
}

// 9. Baseline sweep with GT disparity at default noise.
Outcome baseline_sweep() {
  const ExperimentConfig cfg;
  const auto scenes = resolve_scenes(cfg);
  std::vector<double> means;
  std::string detail;
  for (double baseline : cfg.ablation_baselines) {
    std::vector<SceneMetrics> rows;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      SceneSpec s = scenes[i];
      set_easypolar_rig(s, s.rig.at(s.reference).camera.fx, baseline);
      const SceneBundle b = render_rig(s);
      for (int rep = 0; rep < cfg.ablation_seeds; ++rep) {
        const auto p = predict_easypolar(simulate_easypolar(b, cfg, scene_seed(cfg, i, rep)), &b, cfg);
        rows.push_back(evaluate(s.name, p.params, p.s0, b.reference()));
      }
    }
    means.push_back(aggregate(rows).aop_mae);
    detail += fmt(" B=%.1fcm %.3f deg,", baseline * 100, means.back());
  }
  const double ratio = *std::max_element(means.begin(), means.end()) / *std::min_element(means.begin(), means.end());
  return {ratio < 2.0, fmt("AoP MAE:%s max/min %.3f (< 2)", detail.c_str(), ratio)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"noiseless exactness", noiseless_exactness},
      {"Stokes round trip", stokes_round_trip},
      {"comparative trend vs DoFP", comparative_trend},
      {"Fresnel properties", fresnel_properties},
      {"DoT identity", dot_identity},
      {"confidence gating", gating_behavior},
      {"AoP encoding", aop_encoding},
      {"metric oracles", metric_oracles},
      {"baseline sweep", baseline_sweep},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu %s: %s: %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
