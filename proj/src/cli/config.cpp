// SPDX-License-Identifier: Apache-2.0
#include "polarbench/cli/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "polarbench/io/manifest.hpp"
#include "polarbench/io/scene_json.hpp"

namespace polarbench::cli {

using io::Json;
using io::JsonDocument;

std::string paradigm_name(Paradigm p) {
  switch (p) {
    case Paradigm::easypolar: return "easypolar";
    case Paradigm::dofp: return "dofp";
    case Paradigm::dot: return "dot";
  }
  return "?";
}

Paradigm parse_paradigm(const std::string& name) {
  if (name == "easypolar") return Paradigm::easypolar;
  if (name == "dofp") return Paradigm::dofp;
  if (name == "dot") return Paradigm::dot;
  throw ConfigError("unknown paradigm '" + name + "' (easypolar, dofp, dot)");
}

namespace {

const char* model_name(CalibrationModel m) {
  switch (m) {
    case CalibrationModel::gain: return "gain";
    case CalibrationModel::gain_offset: return "gain_offset";
    case CalibrationModel::ccm: return "ccm";
    case CalibrationModel::ccm_offset: return "ccm_offset";
  }
  return "?";
}

Json response_json(const CameraResponse& r) {
  Json g = Json::array();
  for (int i = 0; i < 9; ++i) g.push_back(r.gain(i / 3, i % 3));
  return {{"gain", g}, {"offset", Json::array({r.offset.x(), r.offset.y(), r.offset.z()})}};
}

CameraResponse read_response(const JsonDocument& doc, const Json& obj) {
  doc.require_known_keys(obj, {"gain", "offset"}, "camera response");
  CameraResponse r;
  if (obj.contains("gain")) {
    if (obj.at("gain").is_number()) {
      r.gain = doc.get<double>(obj, "gain") * Mat3::Identity();
    } else {
      const auto g = doc.get<std::vector<double>>(obj, "gain");
      if (g.size() != 9) doc.fail("gain", "gain must be a number or nine numbers (row-major)");
      for (int i = 0; i < 9; ++i) r.gain(i / 3, i % 3) = g[i];
    }
  }
  if (obj.contains("offset")) {
    if (obj.at("offset").is_number()) {
      r.offset = Vec3::Constant(doc.get<double>(obj, "offset"));
    } else {
      const auto o = doc.get<std::vector<double>>(obj, "offset");
      if (o.size() != 3) doc.fail("offset", "offset must be a number or three numbers");
      r.offset = Vec3(o[0], o[1], o[2]);
    }
  }
  return r;
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["scenes"] = c.scenes;
  j["scene_files"] = c.scene_files;
  j["size"] = c.size;
  j["seed"] = c.seed;
  Json rig = Json::object();
  if (c.focal_px) rig["focal_px"] = *c.focal_px;
  if (c.baseline_m) rig["baseline_m"] = *c.baseline_m;
  j["rig"] = rig;
  j["noise"] = {{"enabled", c.noise.enabled}, {"read_sigma", c.noise.read_sigma}, {"shot_gain", c.noise.shot_gain},
                {"shot", c.noise.shot},       {"bits", c.noise.bits}};
  j["mismatch"] = {{"left", response_json(c.mismatch.left)},
                   {"mid", response_json(c.mismatch.mid)},
                   {"right", response_json(c.mismatch.right)}};
  j["calibration"] = {{"enabled", c.calibration.enabled},
                      {"model", model_name(c.calibration.model)},
                      {"patches", c.calibration.patches}};
  Json par = Json::array();
  for (auto p : c.paradigms) par.push_back(paradigm_name(p));
  j["paradigms"] = par;
  j["dot_drift_px"] = {c.dot_drift.x(), c.dot_drift.y()};
  j["disparity"] = c.disparity == DisparityMode::ground_truth ? "gt" : "block";
  j["block_match"] = {{"max_disparity", c.block.max_disparity}, {"radius", c.block.radius},
                      {"texture_min", c.block.texture_min},     {"uniqueness", c.block.uniqueness},
                      {"lr_tolerance", c.block.lr_tolerance}};
  const GatingConfig& g = c.gating;
  j["gating"] = {{"epsilon", g.epsilon},
                 {"window_radius", g.window_radius},
                 {"sigma_g", g.sigma_g},
                 {"sigma_n", g.sigma_n},
                 {"sigma_s", g.sigma_s},
                 {"tau", g.tau},
                 {"range_k", g.range_k},
                 {"range_floor", g.range_floor},
                 {"sigma_release", g.sigma_release},
                 {"consistency_floor", g.consistency_floor},
                 {"consistency_k", g.consistency_k},
                 {"disparity_gate", g.disparity_gate},
                 {"gating", g.gating},
                 {"normal_guidance", g.normal_guidance},
                 {"encoding", g.encoding == AopEncoding::trigonometric ? "trigonometric" : "scalar"}};
  j["loss"] = {{"lambda_p", c.loss.lambda_p}, {"lambda_c", c.loss.lambda_c}, {"lambda_i", c.loss.lambda_i},
               {"lambda_g", c.loss.lambda_g}, {"alpha", c.loss.alpha},       {"beta", c.loss.beta}};
  j["ablation"] = {{"baselines_m", c.ablation_baselines}, {"seeds", c.ablation_seeds}};
  j["compare"] = {{"seeds", c.compare_seeds}};
  j["out"] = c.out;
  j["jobs"] = c.jobs;
  return j;
}

template <class T>
void maybe(const JsonDocument& doc, const Json& obj, const char* key, T& field) {
  if (obj.contains(key)) field = doc.get<T>(obj, key);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (size < 16 || size % 2) throw ConfigError("size must be even and >= 16");
  if (focal_px && !(*focal_px > 0.0)) throw ConfigError("rig.focal_px must be > 0");
  if (baseline_m && !(*baseline_m > 0.0)) throw ConfigError("rig.baseline_m must be > 0");
  noise.validate();
  mismatch.validate();
  if (calibration.patches < 4) throw ConfigError("calibration.patches must be >= 4");
  if (paradigms.empty()) throw ConfigError("paradigms must not be empty");
  if (!dot_drift.allFinite()) throw ConfigError("dot_drift_px must be finite");
  block.validate();
  gating.validate();
  loss.validate();
  if (ablation_baselines.empty()) throw ConfigError("ablation.baselines_m must not be empty");
  for (double b : ablation_baselines)
    if (!(b > 0.0)) throw ConfigError("ablation baselines must be > 0");
  if (ablation_seeds < 1 || compare_seeds < 1) throw ConfigError("seed counts must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (const auto& n : scenes) library_scene(n, seed, 16);
}

std::filesystem::path ExperimentConfig::out_dir() const {
  if (!out.empty()) return out;
  if (const char* env = std::getenv("POLARBENCH_OUT"); env && *env) return env;
  return "polarbench_out";
}

ReconstructConfig ExperimentConfig::reconstruct_config() const { return {disparity, block, gating}; }

ExperimentConfig config_from_json_text(const std::string& text, const std::string& source) {
  const JsonDocument doc(text, source);
  const Json& j = doc.root();
  doc.require_known_keys(j,
                         {"scenes", "scene_files", "size", "seed", "rig", "noise", "mismatch", "calibration", "paradigms",
                          "dot_drift_px", "disparity", "block_match", "gating", "loss", "ablation", "compare", "out",
                          "jobs"},
                         "config");
  ExperimentConfig c;
  maybe(doc, j, "scenes", c.scenes);
  maybe(doc, j, "scene_files", c.scene_files);
  maybe(doc, j, "size", c.size);
  maybe(doc, j, "seed", c.seed);
  if (j.contains("rig")) {
    const Json& r = j.at("rig");
    doc.require_known_keys(r, {"focal_px", "baseline_m"}, "rig");
    if (r.contains("focal_px")) c.focal_px = doc.get<double>(r, "focal_px");
    if (r.contains("baseline_m")) c.baseline_m = doc.get<double>(r, "baseline_m");
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    doc.require_known_keys(n, {"enabled", "read_sigma", "shot_gain", "shot", "bits"}, "noise");
    maybe(doc, n, "enabled", c.noise.enabled);
    maybe(doc, n, "read_sigma", c.noise.read_sigma);
    maybe(doc, n, "shot_gain", c.noise.shot_gain);
    maybe(doc, n, "shot", c.noise.shot);
    maybe(doc, n, "bits", c.noise.bits);
  }
  if (j.contains("mismatch")) {
    const Json& m = j.at("mismatch");
    doc.require_known_keys(m, {"left", "mid", "right"}, "mismatch");
    if (m.contains("left")) c.mismatch.left = read_response(doc, m.at("left"));
    if (m.contains("mid")) c.mismatch.mid = read_response(doc, m.at("mid"));
    if (m.contains("right")) c.mismatch.right = read_response(doc, m.at("right"));
  }
  if (j.contains("calibration")) {
    const Json& k = j.at("calibration");
    doc.require_known_keys(k, {"enabled", "model", "patches"}, "calibration");
    maybe(doc, k, "enabled", c.calibration.enabled);
    maybe(doc, k, "patches", c.calibration.patches);
    if (k.contains("model")) {
      const auto m = doc.get<std::string>(k, "model");
      bool found = false;
      for (auto cand : {CalibrationModel::gain, CalibrationModel::gain_offset, CalibrationModel::ccm,
                        CalibrationModel::ccm_offset}) {
        if (m == model_name(cand)) {
          c.calibration.model = cand;
          found = true;
        }
      }
      if (!found) doc.fail("model", "unknown calibration model '" + m + "'");
    }
  }
  if (j.contains("paradigms")) {
    c.paradigms.clear();
    for (const auto& name : doc.get<std::vector<std::string>>(j, "paradigms")) {
      try {
        c.paradigms.push_back(parse_paradigm(name));
      } catch (const ConfigError& e) {
        doc.fail("paradigms", e.what());
      }
    }
  }
  if (j.contains("dot_drift_px")) {
    const auto d = doc.get<std::vector<double>>(j, "dot_drift_px");
    if (d.size() != 2) doc.fail("dot_drift_px", "dot_drift_px needs two numbers");
    c.dot_drift = Eigen::Vector2d(d[0], d[1]);
  }
  if (j.contains("disparity")) {
    const auto d = doc.get<std::string>(j, "disparity");
    if (d == "gt") {
      c.disparity = DisparityMode::ground_truth;
    } else if (d == "block") {
      c.disparity = DisparityMode::block_match;
    } else {
      doc.fail("disparity", "disparity must be 'gt' or 'block'");
    }
  }
  if (j.contains("block_match")) {
    const Json& b = j.at("block_match");
    doc.require_known_keys(b, {"max_disparity", "radius", "texture_min", "uniqueness", "lr_tolerance"}, "block_match");
    maybe(doc, b, "max_disparity", c.block.max_disparity);
    maybe(doc, b, "radius", c.block.radius);
    maybe(doc, b, "texture_min", c.block.texture_min);
    maybe(doc, b, "uniqueness", c.block.uniqueness);
    maybe(doc, b, "lr_tolerance", c.block.lr_tolerance);
  }
  if (j.contains("gating")) {
    const Json& g = j.at("gating");
    doc.require_known_keys(g,
                           {"epsilon", "window_radius", "sigma_g", "sigma_n", "sigma_s", "tau", "range_k", "range_floor",
                            "sigma_release", "consistency_floor", "consistency_k", "disparity_gate", "gating",
                            "normal_guidance", "encoding"},
                           "gating");
    GatingConfig& t = c.gating;
    maybe(doc, g, "epsilon", t.epsilon);
    maybe(doc, g, "window_radius", t.window_radius);
    maybe(doc, g, "sigma_g", t.sigma_g);
    maybe(doc, g, "sigma_n", t.sigma_n);
    maybe(doc, g, "sigma_s", t.sigma_s);
    maybe(doc, g, "tau", t.tau);
    maybe(doc, g, "range_k", t.range_k);
    maybe(doc, g, "range_floor", t.range_floor);
    maybe(doc, g, "sigma_release", t.sigma_release);
    maybe(doc, g, "consistency_floor", t.consistency_floor);
    maybe(doc, g, "consistency_k", t.consistency_k);
    maybe(doc, g, "disparity_gate", t.disparity_gate);
    maybe(doc, g, "gating", t.gating);
    maybe(doc, g, "normal_guidance", t.normal_guidance);
    if (g.contains("encoding")) {
      const auto e = doc.get<std::string>(g, "encoding");
      if (e == "trigonometric") {
        t.encoding = AopEncoding::trigonometric;
      } else if (e == "scalar") {
        t.encoding = AopEncoding::scalar;
      } else {
        doc.fail("encoding", "encoding must be 'trigonometric' or 'scalar'");
      }
    }
  }
  if (j.contains("loss")) {
    const Json& l = j.at("loss");
    doc.require_known_keys(l, {"lambda_p", "lambda_c", "lambda_i", "lambda_g", "alpha", "beta"}, "loss");
    maybe(doc, l, "lambda_p", c.loss.lambda_p);
    maybe(doc, l, "lambda_c", c.loss.lambda_c);
    maybe(doc, l, "lambda_i", c.loss.lambda_i);
    maybe(doc, l, "lambda_g", c.loss.lambda_g);
    maybe(doc, l, "alpha", c.loss.alpha);
    maybe(doc, l, "beta", c.loss.beta);
  }
  if (j.contains("ablation")) {
    const Json& a = j.at("ablation");
    doc.require_known_keys(a, {"baselines_m", "seeds"}, "ablation");
    maybe(doc, a, "baselines_m", c.ablation_baselines);
    maybe(doc, a, "seeds", c.ablation_seeds);
  }
  if (j.contains("compare")) {
    const Json& a = j.at("compare");
    doc.require_known_keys(a, {"seeds"}, "compare");
    maybe(doc, a, "seeds", c.compare_seeds);
  }
  maybe(doc, j, "out", c.out);
  maybe(doc, j, "jobs", c.jobs);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str(), path.string());
}

std::string config_to_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
  Json j = to_json(cfg);
  j.erase("out");
  j.erase("jobs");
  return io::sha256_hex(j.dump());
}

std::vector<SceneSpec> resolve_scenes(const ExperimentConfig& cfg) {
  std::vector<SceneSpec> out;
  if (cfg.scenes.empty() && cfg.scene_files.empty()) {
    out = scene_library(cfg.seed, cfg.size);
  } else {
    for (const auto& n : cfg.scenes) out.push_back(library_scene(n, cfg.seed, cfg.size));
  }
  for (const auto& f : cfg.scene_files) {
    std::ifstream in(f);
    if (!in) throw IoError("cannot open scene file '" + f + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back(io::scene_from_json_text(ss.str(), f));
  }
  for (auto& s : out) {
    if (cfg.focal_px || cfg.baseline_m) {
      const CameraModel& ref = s.rig.at(s.reference).camera;
      double b = 0.0;
      for (const auto& rc : s.rig) b = std::max(b, std::abs(rc.camera.baseline_to_ref));
      set_easypolar_rig(s, cfg.focal_px.value_or(ref.fx), cfg.baseline_m.value_or(b));
    }
  }
  return out;
}

std::uint64_t scene_seed(const ExperimentConfig& cfg, std::size_t scene_index, std::uint64_t repeat) {
  // splitmix64 over (seed, scene, repeat)
  std::uint64_t z = cfg.seed * 0x9E3779B97F4A7C15ull + scene_index * 0xBF58476D1CE4E5B9ull + repeat * 0x94D049BB133111EBull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace polarbench::cli
