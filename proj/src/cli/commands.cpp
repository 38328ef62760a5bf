// SPDX-License-Identifier: Apache-2.0
#include "polarbench/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "polarbench/io/scene_json.hpp"

#ifndef POLARBENCH_VERSION
#define POLARBENCH_VERSION "0.0.0"
#endif

namespace polarbench::cli {

namespace fs = std::filesystem;
using io::Json;

int run_guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs body(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int t = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), n));
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < t; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

class Logger {
 public:
  explicit Logger(std::ostream& os) : os_(os) {}
  void line(const std::string& s) {
    std::lock_guard lock(mu_);
    os_ << s << "\n";
  }

 private:
  std::ostream& os_;
  std::mutex mu_;
};

io::RunManifest new_manifest(const ExperimentConfig& cfg) {
  io::RunManifest m;
  m.tool_version = POLARBENCH_VERSION;
  m.config_hash = config_hash(cfg);
  return m;
}

std::vector<SceneSpec> checked_scenes(const ExperimentConfig& cfg) {
  cfg.validate();
  auto scenes = resolve_scenes(cfg);
  std::set<std::string> names;
  for (const auto& s : scenes) {
    if (!names.insert(s.name).second) throw ConfigError("duplicate scene name '" + s.name + "'");
  }
  return scenes;
}

fs::path render_dir(const ExperimentConfig& cfg, const std::string& scene) { return cfg.out_dir() / "render" / scene; }
fs::path capture_dir(const ExperimentConfig& cfg, Paradigm p, const std::string& scene) {
  return cfg.out_dir() / "capture" / paradigm_name(p) / scene;
}
fs::path prediction_dir(const ExperimentConfig& cfg, Paradigm p, const std::string& scene) {
  return cfg.out_dir() / "reconstruct" / paradigm_name(p) / scene;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// Unpolarized gray chart; rows = patches.
Eigen::MatrixXd chart(int patches) {
  Eigen::MatrixXd r(patches, 1);
  for (int i = 0; i < patches; ++i) r(i, 0) = 0.05 + 0.85 * i / (patches - 1);
  return r;
}

std::string label_of(Paradigm p, const ExperimentConfig& cfg) {
  switch (p) {
    case Paradigm::easypolar: return "easypolar";
    case Paradigm::dofp: return "dofp+bilinear";
    case Paradigm::dot: return cfg.dot_drift.isZero() ? "dot" : "dot+drift";
  }
  return "?";
}

Json losses_json(const LossComponents& l, double total) {
  return {{"polar", l.polar}, {"confidence", l.confidence}, {"intensity", l.intensity}, {"total", total}};
}

}  // namespace

CaptureSet simulate_easypolar(const SceneBundle& b, const ExperimentConfig& cfg, std::uint64_t seed) {
  NoiseModel n = cfg.noise;
  n.seed = seed;
  if (!n.enabled) n = NoiseModel::none();
  CaptureSet c = capture_easypolar(b, n, cfg.mismatch);
  if (cfg.calibration.enabled) {
    const Eigen::MatrixXd rad = chart(cfg.calibration.patches);
    const auto l = observe_patches(rad, cfg.mismatch.left, 0.5, n, 100);
    const auto m = observe_patches(rad, cfg.mismatch.mid, 1.0, n, 101);
    const auto r = observe_patches(rad, cfg.mismatch.right, 0.5, n, 102);
    c = correct_capture(c, calibrate_rig(l, m, r, cfg.calibration.model));
  }
  return c;
}

io::Prediction predict_easypolar(const CaptureSet& capture, const SceneBundle* bundle, const ExperimentConfig& cfg) {
  const auto r = reconstruct_pipeline(capture, bundle, cfg.reconstruct_config());
  return {r.params, capture.i_un_mid, r.confidence.c};
}

io::Prediction predict_dofp(const DoFPRaw& raw) {
  io::Prediction p;
  p.params = dofp_params(demosaic_bilinear(raw), &p.s0);
  return p;
}

io::Prediction predict_dot(const DoTCapture& dot) {
  io::Prediction p;
  p.params = dofp_params(dot.frames, &p.s0);
  return p;
}

void cmd_render(const ExperimentConfig& cfg, std::ostream& log) {
  const auto scenes = checked_scenes(cfg);
  Logger lg(log);
  parallel_for(scenes.size(), cfg.jobs, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const SceneBundle b = render_rig(scenes[i]);
    auto man = new_manifest(cfg);
    const fs::path dir = render_dir(cfg, scenes[i].name);
    io::write_bundle(dir, b, man);
    man.seconds = seconds_since(t0);
    man.write(dir);
    lg.line("render " + scenes[i].name + " -> " + dir.string());
  });
}

void cmd_capture(const ExperimentConfig& cfg, std::ostream& log) {
  const auto scenes = checked_scenes(cfg);
  Logger lg(log);
  parallel_for(scenes.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& name = scenes[i].name;
    const SceneBundle b = io::read_bundle(render_dir(cfg, name));
    const std::uint64_t seed = scene_seed(cfg, i);
    NoiseModel n = cfg.noise.enabled ? cfg.noise : NoiseModel::none();
    n.seed = seed;
    for (Paradigm p : cfg.paradigms) {
      const auto t0 = Clock::now();
      auto man = new_manifest(cfg);
      man.metadata["seed"] = seed;
      const fs::path dir = capture_dir(cfg, p, name);
      switch (p) {
        case Paradigm::easypolar: io::write_capture_easypolar(dir, simulate_easypolar(b, cfg, seed), man); break;
        case Paradigm::dofp: io::write_capture_dofp(dir, capture_dofp(b, n), man); break;
        case Paradigm::dot: io::write_capture_dot(dir, capture_dot(b, n, cfg.dot_drift), man); break;
      }
      man.seconds = seconds_since(t0);
      man.write(dir);
      lg.line("capture " + paradigm_name(p) + " " + name + " -> " + dir.string());
    }
  });
}

void cmd_reconstruct(const ExperimentConfig& cfg, std::ostream& log) {
  const auto scenes = checked_scenes(cfg);
  Logger lg(log);
  parallel_for(scenes.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& name = scenes[i].name;
    for (Paradigm p : cfg.paradigms) {
      const auto t0 = Clock::now();
      const fs::path src = capture_dir(cfg, p, name);
      io::Prediction pred;
      switch (p) {
        case Paradigm::easypolar: {
          const CaptureSet c = io::read_capture_easypolar(src);
          if (cfg.disparity == DisparityMode::ground_truth) {
            const SceneBundle b = io::read_bundle(render_dir(cfg, name));
            pred = predict_easypolar(c, &b, cfg);
          } else {
            pred = predict_easypolar(c, nullptr, cfg);
          }
          break;
        }
        case Paradigm::dofp: pred = predict_dofp(io::read_capture_dofp(src)); break;
        case Paradigm::dot: pred = predict_dot(io::read_capture_dot(src)); break;
      }
      auto man = new_manifest(cfg);
      const fs::path dir = prediction_dir(cfg, p, name);
      io::write_prediction(dir, pred, man);
      man.seconds = seconds_since(t0);
      man.write(dir);
      lg.line("reconstruct " + paradigm_name(p) + " " + name + " -> " + dir.string());
    }
  });
}

void cmd_evaluate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto scenes = checked_scenes(cfg);
  const fs::path dir = cfg.out_dir() / "evaluate";
  fs::create_directories(dir);
  auto man = new_manifest(cfg);
  man.kind = "evaluation";
  std::vector<MetricReport> reports;
  for (Paradigm p : cfg.paradigms) {
    std::vector<SceneMetrics> rows(scenes.size());
    std::vector<Json> loss_rows(scenes.size());
    parallel_for(scenes.size(), cfg.jobs, [&](std::size_t i) {
      const std::string& name = scenes[i].name;
      const SceneBundle b = io::read_bundle(render_dir(cfg, name));
      const io::Prediction pred = io::read_prediction(prediction_dir(cfg, p, name));
      const ViewGroundTruth& gt = b.reference();
      rows[i] = evaluate(name, pred.params, pred.s0, gt);
      LossComponents l;
      l.polar = loss_aop(pred.params.aop, gt.params.aop, cfg.loss.lambda_g) +
                loss_weighted(pred.params.dop, gt.params.dop, dop_weight(gt.params.dop, cfg.loss.alpha));
      l.intensity = loss_intensity(pred.params, gt.i_un,
                                   synthesize_polarized(gt.params, gt.i_un, PolarizerAngle::degrees(0.0)),
                                   synthesize_polarized(gt.params, gt.i_un, PolarizerAngle::degrees(45.0)));
      if (p == Paradigm::easypolar && !pred.confidence.empty()) {
        const CaptureSet c = io::read_capture_easypolar(capture_dir(cfg, p, name));
        const auto d = estimate_disparity(c, DisparityMode::ground_truth, &b);
        const ConfidenceMap cgt = confidence_gt(b, c, d);
        l.confidence = loss_weighted(pred.confidence, cgt.c, confidence_weight(cgt.c, cfg.loss.beta));
      }
      loss_rows[i] = {{"scene", name}, {"losses", losses_json(l, loss_total(l, cfg.loss))}};
    });
    MetricReport r = make_report(label_of(p, cfg), std::move(rows));
    const std::string stem = paradigm_name(p);
    write_text(dir / ("report_" + stem + ".json"), report_to_json(r) + "\n");
    man.add(dir, "report_" + stem, "report_" + stem + ".json");
    write_text(dir / ("losses_" + stem + ".json"), Json(loss_rows).dump(2) + "\n");
    man.add(dir, "losses_" + stem, "losses_" + stem + ".json");
    log << "evaluate " << stem << ": AoP MAE " << r.aggregate.aop_mae << " deg, DoP PSNR " << r.aggregate.dop.psnr
        << " dB\n";
    reports.push_back(std::move(r));
  }
  write_text(dir / "table.csv", reports_to_csv(reports));
  man.add(dir, "table_csv", "table.csv");
  const std::string table = reports_to_table(reports);
  write_text(dir / "table.txt", table);
  man.add(dir, "table_txt", "table.txt");
  man.seconds = seconds_since(t0);
  man.write(dir);
  log << table;
}

namespace {

struct Variant {
  std::string name;
  GatingConfig gating;
};

std::vector<Variant> ablation_variants(const GatingConfig& base) {
  std::vector<Variant> v{{"full", base}};
  v.push_back({"no_confidence_gating", base});
  v.back().gating.gating = false;
  v.push_back({"scalar_aop", base});
  v.back().gating.encoding = AopEncoding::scalar;
  v.push_back({"no_normal_guidance", base});
  v.back().gating.normal_guidance = false;
  return v;
}

}  // namespace

void cmd_ablate(const ExperimentConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto scenes = checked_scenes(cfg);
  const auto variants = ablation_variants(cfg.gating);
  // [variant][scene] -> (mae, dop psnr) averaged over seeds
  std::vector<std::vector<SceneMetrics>> per(variants.size(), std::vector<SceneMetrics>(scenes.size()));
  std::vector<std::vector<double>> sweep(scenes.size(), std::vector<double>(cfg.ablation_baselines.size()));
  parallel_for(scenes.size(), cfg.jobs, [&](std::size_t i) {
    const SceneBundle b = io::read_bundle(render_dir(cfg, scenes[i].name));
    const ViewGroundTruth& gt = b.reference();
    for (int rep = 0; rep < cfg.ablation_seeds; ++rep) {
      const CaptureSet c = simulate_easypolar(b, cfg, scene_seed(cfg, i, static_cast<std::uint64_t>(rep)));
      for (std::size_t v = 0; v < variants.size(); ++v) {
        ExperimentConfig vc = cfg;
        vc.gating = variants[v].gating;
        const auto pred = predict_easypolar(c, &b, vc);
        const SceneMetrics m = evaluate(scenes[i].name, pred.params, pred.s0, gt);
        per[v][i].scene = m.scene;
        per[v][i].aop_mae += m.aop_mae / cfg.ablation_seeds;
        per[v][i].dop.psnr += m.dop.psnr / cfg.ablation_seeds;
        per[v][i].coverage += m.coverage / cfg.ablation_seeds;
      }
    }
    // Baseline sweep: same scene and focal length, GT disparity.
    for (std::size_t k = 0; k < cfg.ablation_baselines.size(); ++k) {
      SceneSpec s = b.spec;
      set_easypolar_rig(s, s.rig.at(s.reference).camera.fx, cfg.ablation_baselines[k]);
      const SceneBundle bb = render_rig(s);
      ExperimentConfig gc = cfg;
      gc.disparity = DisparityMode::ground_truth;
      double mae = 0.0;
      for (int rep = 0; rep < cfg.ablation_seeds; ++rep) {
        const CaptureSet c = simulate_easypolar(bb, gc, scene_seed(cfg, i, static_cast<std::uint64_t>(rep)));
        const auto pred = predict_easypolar(c, &bb, gc);
        mae += evaluate(s.name, pred.params, pred.s0, bb.reference()).aop_mae / cfg.ablation_seeds;
      }
      sweep[i][k] = mae;
    }
  });
  Json j;
  j["seeds"] = cfg.ablation_seeds;
  j["variants"] = Json::array();
  std::ostringstream csv, txt;
  csv << "variant,aop_mae_deg,dop_psnr_db,delta_aop_mae_deg,delta_dop_psnr_db\n";
  txt << std::left << std::setw(22) << "variant" << std::right << std::setw(14) << "AoP MAE (deg)" << std::setw(14)
      << "DoP PSNR (dB)" << std::setw(12) << "dMAE" << std::setw(12) << "dPSNR" << "\n";
  const SceneMetrics full = aggregate(per[0]);
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const SceneMetrics a = aggregate(per[v]);
    Json scenes_j = Json::array();
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      scenes_j.push_back({{"scene", per[v][i].scene},
                          {"aop_mae_deg", per[v][i].aop_mae},
                          {"dop_psnr_db", per[v][i].dop.psnr},
                          {"delta_aop_mae_deg", per[v][i].aop_mae - per[0][i].aop_mae}});
    }
    j["variants"].push_back({{"name", variants[v].name},
                             {"aop_mae_deg", a.aop_mae},
                             {"dop_psnr_db", a.dop.psnr},
                             {"delta_aop_mae_deg", a.aop_mae - full.aop_mae},
                             {"delta_dop_psnr_db", a.dop.psnr - full.dop.psnr},
                             {"scenes", scenes_j}});
    csv << variants[v].name << "," << a.aop_mae << "," << a.dop.psnr << "," << a.aop_mae - full.aop_mae << ","
        << a.dop.psnr - full.dop.psnr << "\n";
    txt << std::left << std::setw(22) << variants[v].name << std::right << std::fixed << std::setprecision(3)
        << std::setw(14) << a.aop_mae << std::setw(14) << a.dop.psnr << std::setw(12) << a.aop_mae - full.aop_mae
        << std::setw(12) << a.dop.psnr - full.dop.psnr << "\n";
  }
  Json sw = Json::array();
  double lo = INFINITY, hi = 0.0;
  txt << "\nbaseline sweep (GT disparity)\n";
  for (std::size_t k = 0; k < cfg.ablation_baselines.size(); ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < scenes.size(); ++i) mean += sweep[i][k] / static_cast<double>(scenes.size());
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    sw.push_back({{"baseline_m", cfg.ablation_baselines[k]}, {"aop_mae_deg", mean}});
    txt << "  B = " << std::setprecision(3) << cfg.ablation_baselines[k] * 100 << " cm: AoP MAE "
        << std::setprecision(3) << mean << " deg\n";
  }
  double mean_all = 0.0;
  for (const auto& e : sw) mean_all += e["aop_mae_deg"].get<double>() / static_cast<double>(sw.size());
  double variance = 0.0;
  for (const auto& e : sw) variance += std::pow(e["aop_mae_deg"].get<double>() - mean_all, 2) / static_cast<double>(sw.size());
  j["baseline_sweep"] = {{"points", sw}, {"max_over_min", hi / lo}, {"variance", variance}};
  txt << "  max/min = " << hi / lo << ", variance = " << variance << "\n";
  const fs::path dir = cfg.out_dir() / "ablate";
  write_text(dir / "ablation.json", j.dump(2) + "\n");
  write_text(dir / "ablation.csv", csv.str());
  write_text(dir / "ablation.txt", txt.str());
  auto man = new_manifest(cfg);
  man.kind = "ablation";
  man.add(dir, "ablation_json", "ablation.json");
  man.add(dir, "ablation_csv", "ablation.csv");
  man.add(dir, "ablation_txt", "ablation.txt");
  man.seconds = seconds_since(t0);
  man.write(dir);
  log << txt.str();
}

void cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
  const auto t0 = Clock::now();
  const auto scenes = checked_scenes(cfg);
  const std::size_t np = cfg.paradigms.size();
  const std::size_t ns = static_cast<std::size_t>(cfg.compare_seeds);
  // [paradigm][scene * seeds + rep]
  std::vector<std::vector<SceneMetrics>> rows(np, std::vector<SceneMetrics>(scenes.size() * ns));
  parallel_for(scenes.size(), cfg.jobs, [&](std::size_t i) {
    const SceneBundle b = render_rig(scenes[i]);
    for (std::size_t rep = 0; rep < ns; ++rep) {
      const std::uint64_t seed = scene_seed(cfg, i, rep);
      NoiseModel n = cfg.noise.enabled ? cfg.noise : NoiseModel::none();
      n.seed = seed;
      for (std::size_t k = 0; k < np; ++k) {
        io::Prediction pred;
        switch (cfg.paradigms[k]) {
          case Paradigm::easypolar: pred = predict_easypolar(simulate_easypolar(b, cfg, seed), &b, cfg); break;
          case Paradigm::dofp: pred = predict_dofp(capture_dofp(b, n)); break;
          case Paradigm::dot: pred = predict_dot(capture_dot(b, n, cfg.dot_drift)); break;
        }
        rows[k][i * ns + rep] = evaluate(scenes[i].name + "#" + std::to_string(rep), pred.params, pred.s0, b.reference());
      }
    }
  });
  std::vector<MetricReport> reports;
  const fs::path dir = cfg.out_dir() / "compare";
  fs::create_directories(dir);
  auto man = new_manifest(cfg);
  man.kind = "comparison";
  for (std::size_t k = 0; k < np; ++k) {
    reports.push_back(make_report(label_of(cfg.paradigms[k], cfg), rows[k]));
    const std::string stem = paradigm_name(cfg.paradigms[k]);
    write_text(dir / ("report_" + stem + ".json"), report_to_json(reports.back()) + "\n");
    man.add(dir, "report_" + stem, "report_" + stem + ".json");
  }
  write_text(dir / "table.csv", reports_to_csv(reports));
  man.add(dir, "table_csv", "table.csv");
  std::string table = reports_to_table(reports);
  Json margins = Json::object();
  for (std::size_t k = 0; k < np; ++k) {
    if (cfg.paradigms[k] == Paradigm::easypolar) continue;
    for (std::size_t e = 0; e < np; ++e) {
      if (cfg.paradigms[e] != Paradigm::easypolar) continue;
      const double dm = reports[k].aggregate.aop_mae - reports[e].aggregate.aop_mae;
      const double dp = reports[e].aggregate.dop.psnr - reports[k].aggregate.dop.psnr;
      margins[paradigm_name(cfg.paradigms[k])] = {{"aop_mae_margin_deg", dm}, {"dop_psnr_margin_db", dp}};
      std::ostringstream os;
      os << std::fixed << std::setprecision(3) << "easypolar vs " << reports[k].label << ": AoP MAE lower by " << dm
         << " deg, DoP PSNR higher by " << dp << " dB\n";
      table += os.str();
    }
  }
  write_text(dir / "margins.json", margins.dump(2) + "\n");
  man.add(dir, "margins", "margins.json");
  write_text(dir / "table.txt", table);
  man.add(dir, "table_txt", "table.txt");
  man.seconds = seconds_since(t0);
  man.write(dir);
  log << table;
}

}  // namespace polarbench::cli
