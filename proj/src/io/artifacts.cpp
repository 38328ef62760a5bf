// SPDX-License-Identifier: Apache-2.0
#include "polarbench/io/artifacts.hpp"

#include "polarbench/io/pfm.hpp"
#include "polarbench/io/png.hpp"
#include "polarbench/io/scene_json.hpp"

namespace polarbench::io {

namespace fs = std::filesystem;

namespace {

std::string plane_file(const std::string& role, int c, int channels) {
  std::string base = role;
  for (char& ch : base)
    if (ch == '/') ch = '_';
  return channels == 1 ? base + ".pfm" : base + "_c" + std::to_string(c) + ".pfm";
}

template <class F>
auto guarded(const fs::path& dir, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed metadata in '" + (dir / kManifestName).string() + "': " + e.what());
  }
}

void check_kind(const fs::path& dir, const RunManifest& man, const std::string& kind) {
  if (man.kind != kind) {
    throw IoError("'" + dir.string() + "' holds a " + man.kind + " manifest, expected " + kind);
  }
}

Json response_json(const CameraResponse& r) {
  Json g = Json::array();
  for (int i = 0; i < 9; ++i) g.push_back(r.gain(i / 3, i % 3));
  return {{"gain", g}, {"offset", Json::array({r.offset.x(), r.offset.y(), r.offset.z()})}};
}

CameraResponse response_from(const Json& j) {
  CameraResponse r;
  const auto g = j.at("gain").get<std::vector<double>>();
  const auto o = j.at("offset").get<std::vector<double>>();
  if (g.size() != 9 || o.size() != 3) throw IoError("malformed camera response");
  for (int i = 0; i < 9; ++i) r.gain(i / 3, i % 3) = g[i];
  r.offset = Vec3(o[0], o[1], o[2]);
  return r;
}

Json noise_json(const NoiseModel& n) {
  return {{"enabled", n.enabled}, {"read_sigma", n.read_sigma}, {"shot_gain", n.shot_gain},
          {"shot", n.shot},       {"bits", n.bits},             {"seed", n.seed}};
}

NoiseModel noise_from(const Json& j) {
  NoiseModel n;
  n.enabled = j.at("enabled").get<bool>();
  n.read_sigma = j.at("read_sigma").get<double>();
  n.shot_gain = j.at("shot_gain").get<double>();
  n.shot = j.at("shot").get<bool>();
  n.bits = j.at("bits").get<int>();
  n.seed = j.at("seed").get<std::uint64_t>();
  return n;
}

CameraModel camera_from(const Json& j) {
  const std::string text = j.dump();
  const JsonDocument doc(text, "<camera>");
  return camera_from_json(doc, doc.root());
}

IntensityImage as_intensity(const fs::path& dir, Map m) {
  for (double& v : m.values()) {
    if (!(v >= 0.0)) throw IoError("'" + dir.string() + "' holds a negative intensity");
  }
  return IntensityImage(std::move(m));
}

}  // namespace

void write_map(const fs::path& dir, RunManifest& man, const std::string& role, const Map& m) {
  for (int c = 0; c < m.channels(); ++c) {
    const std::string file = plane_file(role, c, m.channels());
    write_pfm(dir / file, m, c);
    man.add(dir, m.channels() == 1 ? role : role + "#" + std::to_string(c), file);
  }
}

void write_mask(const fs::path& dir, RunManifest& man, const std::string& role, const Mask& m) {
  const std::string file = plane_file(role, 0, 1);
  write_pfm(dir / file, m);
  man.add(dir, role, file);
}

Map read_map(const fs::path& dir, const RunManifest& man, const std::string& role) {
  if (const Artifact* a = man.find(role)) {
    const auto path = dir / a->file;
    if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
    return read_pfm(path);
  }
  std::vector<Map> planes;
  for (int c = 0;; ++c) {
    const Artifact* a = man.find(role + "#" + std::to_string(c));
    if (!a) break;
    const auto path = dir / a->file;
    if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
    planes.push_back(read_pfm(path));
  }
  if (planes.empty()) throw IoError("'" + (dir / kManifestName).string() + "' lists no artifact '" + role + "'");
  Map m(planes[0].width(), planes[0].height(), static_cast<int>(planes.size()));
  for (std::size_t c = 0; c < planes.size(); ++c) {
    if (!planes[c].same_shape(planes[0])) throw IoError("planes of '" + role + "' differ in size");
    std::copy(planes[c].values().begin(), planes[c].values().end(), m.plane(static_cast<int>(c)).begin());
  }
  return m;
}

Mask read_mask(const fs::path& dir, const RunManifest& man, const std::string& role) {
  const Artifact& a = man.require(role);
  const auto path = dir / a.file;
  if (!fs::exists(path)) throw IoError("missing file '" + path.string() + "'");
  return read_pfm_mask(path);
}

void write_bundle(const fs::path& dir, const SceneBundle& b, RunManifest& man) {
  fs::create_directories(dir);
  man.kind = "bundle";
  man.metadata["scene"] = scene_to_json(b.spec);
  man.metadata["views"] = b.views.size();
  for (std::size_t k = 0; k < b.views.size(); ++k) {
    const std::string p = "view" + std::to_string(k) + "/";
    const ViewGroundTruth& v = b.views[k];
    write_map(dir, man, p + "i_un", v.i_un);
    write_map(dir, man, p + "depth", v.depth.depth);
    write_mask(dir, man, p + "depth_valid", v.depth.valid);
    write_map(dir, man, p + "normal", v.normals.n);
    write_mask(dir, man, p + "normal_valid", v.normals.valid);
    write_map(dir, man, p + "aop", v.params.aop);
    write_map(dir, man, p + "dop", v.params.dop);
    write_mask(dir, man, p + "params_valid", v.params.valid);
    write_map(dir, man, p + "disparity", v.disparity.disparity);
    write_mask(dir, man, p + "disparity_valid", v.disparity.valid);
    write_mask(dir, man, p + "occlusion", v.occlusion);
    Map prim(v.primitive.width(), v.primitive.height());
    for (std::size_t i = 0; i < prim.size(); ++i) prim[i] = v.primitive[i];
    write_map(dir, man, p + "primitive", prim);
  }
  for (std::size_t k = 0; k < b.ref_disparity.size(); ++k) {
    const std::string p = "ref" + std::to_string(k) + "/";
    write_map(dir, man, p + "disparity", b.ref_disparity[k].disparity);
    write_mask(dir, man, p + "disparity_valid", b.ref_disparity[k].valid);
    write_mask(dir, man, p + "occlusion", b.ref_occlusion[k]);
  }
}

SceneBundle read_bundle(const fs::path& dir) {
  const RunManifest man = RunManifest::read(dir);
  check_kind(dir, man, "bundle");
  SceneBundle b;
  const std::string text = guarded(dir, [&] { return man.metadata.at("scene").dump(); });
  b.spec = scene_from_json_text(text, (dir / kManifestName).string());
  const std::size_t n = guarded(dir, [&] { return man.metadata.at("views").get<std::size_t>(); });
  for (std::size_t k = 0; k < n; ++k) {
    const std::string p = "view" + std::to_string(k) + "/";
    ViewGroundTruth v;
    v.i_un = as_intensity(dir, read_map(dir, man, p + "i_un"));
    v.depth = {read_map(dir, man, p + "depth"), read_mask(dir, man, p + "depth_valid")};
    v.normals = {read_map(dir, man, p + "normal"), read_mask(dir, man, p + "normal_valid")};
    v.params = {read_map(dir, man, p + "aop"), read_map(dir, man, p + "dop"), read_mask(dir, man, p + "params_valid")};
    v.disparity = {read_map(dir, man, p + "disparity"), read_mask(dir, man, p + "disparity_valid")};
    v.occlusion = read_mask(dir, man, p + "occlusion");
    const Map prim = read_map(dir, man, p + "primitive");
    v.primitive = Grid<std::int32_t>(prim.width(), prim.height());
    for (std::size_t i = 0; i < prim.size(); ++i) v.primitive[i] = static_cast<std::int32_t>(prim[i]);
    b.views.push_back(std::move(v));
    const std::string r = "ref" + std::to_string(k) + "/";
    if (man.find(r + "disparity")) {
      b.ref_disparity.push_back({read_map(dir, man, r + "disparity"), read_mask(dir, man, r + "disparity_valid")});
      b.ref_occlusion.push_back(read_mask(dir, man, r + "occlusion"));
    }
  }
  return b;
}

void write_capture_easypolar(const fs::path& dir, const CaptureSet& c, RunManifest& man) {
  fs::create_directories(dir);
  man.kind = "capture_easypolar";
  write_map(dir, man, "i0_left", c.i0_left);
  write_map(dir, man, "i_un_mid", c.i_un_mid);
  write_map(dir, man, "i45_right", c.i45_right);
  Json rig = Json::array();
  for (const auto& cam : c.rig) rig.push_back(camera_to_json(cam));
  man.metadata["rig"] = rig;
  man.metadata["noise"] = noise_json(c.noise);
  man.metadata["mismatch"] = {{"left", response_json(c.mismatch.left)},
                              {"mid", response_json(c.mismatch.mid)},
                              {"right", response_json(c.mismatch.right)}};
}

CaptureSet read_capture_easypolar(const fs::path& dir) {
  const RunManifest man = RunManifest::read(dir);
  check_kind(dir, man, "capture_easypolar");
  CaptureSet c;
  c.i0_left = as_intensity(dir, read_map(dir, man, "i0_left"));
  c.i_un_mid = as_intensity(dir, read_map(dir, man, "i_un_mid"));
  c.i45_right = as_intensity(dir, read_map(dir, man, "i45_right"));
  guarded(dir, [&] {
    const Json& rig = man.metadata.at("rig");
    if (rig.size() != 3) throw IoError("capture rig must hold three cameras");
    for (int k = 0; k < 3; ++k) c.rig[k] = camera_from(rig.at(k));
    c.noise = noise_from(man.metadata.at("noise"));
    const Json& mm = man.metadata.at("mismatch");
    c.mismatch = {response_from(mm.at("left")), response_from(mm.at("mid")), response_from(mm.at("right"))};
    return 0;
  });
  return c;
}

void write_capture_dofp(const fs::path& dir, const DoFPRaw& raw, RunManifest& man) {
  fs::create_directories(dir);
  man.kind = "capture_dofp";
  write_map(dir, man, "mosaic", raw.mosaic);
  Json pat = Json::array();
  for (const auto& row : raw.pattern) pat.push_back({row[0].degrees(), row[1].degrees()});
  man.metadata["pattern_deg"] = pat;
}

DoFPRaw read_capture_dofp(const fs::path& dir) {
  const RunManifest man = RunManifest::read(dir);
  check_kind(dir, man, "capture_dofp");
  DoFPRaw raw;
  raw.mosaic = as_intensity(dir, read_map(dir, man, "mosaic"));
  guarded(dir, [&] {
    const Json& pat = man.metadata.at("pattern_deg");
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) raw.pattern[r][c] = PolarizerAngle::degrees(pat.at(r).at(c).get<double>());
    return 0;
  });
  validate_mosaic_pattern(raw.pattern);
  return raw;
}

void write_capture_dot(const fs::path& dir, const DoTCapture& dot, RunManifest& man) {
  fs::create_directories(dir);
  man.kind = "capture_dot";
  for (int k = 0; k < 4; ++k) write_map(dir, man, "frame_" + std::to_string(45 * k), dot.frames[k]);
  man.metadata["drift_px_per_frame"] = {dot.drift.x(), dot.drift.y()};
}

DoTCapture read_capture_dot(const fs::path& dir) {
  const RunManifest man = RunManifest::read(dir);
  check_kind(dir, man, "capture_dot");
  DoTCapture dot;
  for (int k = 0; k < 4; ++k) dot.frames[k] = as_intensity(dir, read_map(dir, man, "frame_" + std::to_string(45 * k)));
  guarded(dir, [&] {
    const Json& d = man.metadata.at("drift_px_per_frame");
    dot.drift = Eigen::Vector2d(d.at(0).get<double>(), d.at(1).get<double>());
    return 0;
  });
  return dot;
}

void write_prediction(const fs::path& dir, const Prediction& p, RunManifest& man) {
  fs::create_directories(dir);
  man.kind = "prediction";
  write_map(dir, man, "aop", p.params.aop);
  write_map(dir, man, "dop", p.params.dop);
  write_mask(dir, man, "valid", p.params.valid);
  write_map(dir, man, "s0", p.s0);
  write_png(dir / "aop.png", aop_visual(p.params.aop, p.params.dop, p.params.valid));
  man.add(dir, "aop_png", "aop.png");
  write_png(dir / "dop.png", gray_visual(p.params.dop, 0.0, 1.0, &p.params.valid));
  man.add(dir, "dop_png", "dop.png");
  if (!p.confidence.empty()) {
    write_map(dir, man, "confidence", p.confidence);
    write_png(dir / "confidence.png", gray_visual(p.confidence, 0.0, 1.0));
    man.add(dir, "confidence_png", "confidence.png");
  }
}

Prediction read_prediction(const fs::path& dir) {
  const RunManifest man = RunManifest::read(dir);
  check_kind(dir, man, "prediction");
  Prediction p;
  p.params = {read_map(dir, man, "aop"), read_map(dir, man, "dop"), read_mask(dir, man, "valid")};
  p.s0 = as_intensity(dir, read_map(dir, man, "s0"));
  if (man.find("confidence")) p.confidence = read_map(dir, man, "confidence");
  return p;
}

}  // namespace polarbench::io
