// SPDX-License-Identifier: Apache-2.0
#include "polarbench/io/scene_json.hpp"

#include <algorithm>

namespace polarbench::io {

JsonDocument::JsonDocument(std::string text, std::string source) : text_(std::move(text)), source_(std::move(source)) {
  try {
    root_ = Json::parse(text_);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text_.size());
    const int line = 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + at, '\n'));
    const auto bol = text_.rfind('\n', at ? at - 1 : 0);
    const std::size_t col = bol == std::string::npos ? at + 1 : at - bol;
    throw ConfigError(source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
  }
}

int JsonDocument::line_of(const std::string& key) const {
  const auto pos = text_.find("\"" + key + "\"");
  if (pos == std::string::npos) return 1;
  return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + pos, '\n'));
}

void JsonDocument::fail(const std::string& key, const std::string& message) const {
  throw ConfigError(source_ + ":" + std::to_string(line_of(key)) + ": " + message);
}

void JsonDocument::require_known_keys(const Json& obj, const std::set<std::string>& allowed,
                                      const std::string& where) const {
  if (!obj.is_object()) throw ConfigError(source_ + ": " + where + " must be a JSON object");
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) fail(k, "unknown key '" + k + "' in " + where);
  }
}

namespace {

Json vec3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 read_vec3(const JsonDocument& doc, const Json& obj, const std::string& key) {
  const auto a = doc.get<std::vector<double>>(obj, key);
  if (a.size() != 3) doc.fail(key, "key '" + key + "' needs three numbers");
  return {a[0], a[1], a[2]};
}

Json texture_json(const Texture& t) {
  static const char* kinds[] = {"constant", "checker", "noise"};
  return {{"kind", kinds[static_cast<int>(t.kind)]}, {"a", t.a},       {"b", t.b},
          {"period", t.period},                      {"seed", t.seed}, {"edge", t.edge}};
}

Texture read_texture(const JsonDocument& doc, const Json& obj) {
  doc.require_known_keys(obj, {"kind", "a", "b", "period", "seed", "edge", "value"}, "texture");
  const auto kind = doc.get<std::string>(obj, "kind");
  Texture t;
  if (kind == "constant") {
    const double v = obj.contains("value") ? doc.get<double>(obj, "value") : doc.get_or<double>(obj, "a", 0.5);
    t = Texture::constant(v);
    t.b = doc.get_or<double>(obj, "b", v);
    t.period = doc.get_or<double>(obj, "period", t.period);
    t.seed = doc.get_or<std::uint64_t>(obj, "seed", 0);
    t.edge = doc.get_or<double>(obj, "edge", 0.0);
    return t;
  }
  if (kind == "checker") {
    t.kind = Texture::Kind::checker;
  } else if (kind == "noise") {
    t.kind = Texture::Kind::noise;
  } else {
    doc.fail("kind", "unknown texture kind '" + kind + "'");
  }
  t.a = doc.get<double>(obj, "a");
  t.b = doc.get<double>(obj, "b");
  t.period = doc.get<double>(obj, "period");
  t.seed = doc.get_or<std::uint64_t>(obj, "seed", 0);
  t.edge = doc.get_or<double>(obj, "edge", 0.0);
  return t;
}

Json material_json(const Material& m) {
  return {{"refractive_index", m.refractive_index},
          {"mode", m.mode == ReflectionMode::diffuse ? "diffuse" : "specular"}};
}

Material read_material(const JsonDocument& doc, const Json& obj) {
  doc.require_known_keys(obj, {"refractive_index", "mode"}, "material");
  Material m;
  m.refractive_index = doc.get_or<double>(obj, "refractive_index", 1.5);
  const auto mode = doc.get_or<std::string>(obj, "mode", "diffuse");
  if (mode == "diffuse") {
    m.mode = ReflectionMode::diffuse;
  } else if (mode == "specular") {
    m.mode = ReflectionMode::specular;
  } else {
    doc.fail("mode", "unknown reflection mode '" + mode + "'");
  }
  return m;
}

Json primitive_json(const Primitive& p) {
  Json j;
  if (const auto* s = std::get_if<Sphere>(&p.shape)) {
    j = {{"type", "sphere"}, {"center", vec3(s->center)}, {"radius", s->radius}};
  } else if (const auto* pl = std::get_if<Plane>(&p.shape)) {
    j = {{"type", "plane"}, {"point", vec3(pl->point)}, {"normal", vec3(pl->normal)}};
    if (pl->half_extent) j["half_extent"] = Json::array({pl->half_extent->x(), pl->half_extent->y()});
  } else {
    const auto& pb = std::get<ParaboloidPatch>(p.shape);
    j = {{"type", "paraboloid"}, {"apex", vec3(pb.apex)}, {"curvature", pb.curvature}, {"half_extent", pb.half_extent}};
  }
  j["material"] = material_json(p.material);
  j["albedo"] = texture_json(p.albedo);
  return j;
}

Primitive read_primitive(const JsonDocument& doc, const Json& obj) {
  const auto type = doc.get<std::string>(obj, "type");
  Primitive p;
  if (type == "sphere") {
    doc.require_known_keys(obj, {"type", "center", "radius", "material", "albedo"}, "sphere");
    p.shape = Sphere{read_vec3(doc, obj, "center"), doc.get<double>(obj, "radius")};
  } else if (type == "plane") {
    doc.require_known_keys(obj, {"type", "point", "normal", "half_extent", "material", "albedo"}, "plane");
    Plane pl{read_vec3(doc, obj, "point"), read_vec3(doc, obj, "normal"), std::nullopt};
    if (obj.contains("half_extent")) {
      const auto e = doc.get<std::vector<double>>(obj, "half_extent");
      if (e.size() != 2) doc.fail("half_extent", "plane half_extent needs two numbers");
      pl.half_extent = Eigen::Vector2d(e[0], e[1]);
    }
    p.shape = pl;
  } else if (type == "paraboloid") {
    doc.require_known_keys(obj, {"type", "apex", "curvature", "half_extent", "material", "albedo"}, "paraboloid");
    p.shape = ParaboloidPatch{read_vec3(doc, obj, "apex"), doc.get<double>(obj, "curvature"),
                              doc.get<double>(obj, "half_extent")};
  } else {
    doc.fail("type", "unknown primitive type '" + type + "'");
  }
  if (obj.contains("material")) p.material = read_material(doc, obj.at("material"));
  if (obj.contains("albedo")) p.albedo = read_texture(doc, obj.at("albedo"));
  return p;
}

}  // namespace

Json camera_to_json(const CameraModel& c) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k) rot.push_back(c.rotation(r, k));
  return {{"fx", c.fx},         {"fy", c.fy},   {"cx", c.cx},
          {"cy", c.cy},         {"center", vec3(c.center)},
          {"rotation", rot},    {"baseline_to_ref", c.baseline_to_ref}};
}

CameraModel camera_from_json(const JsonDocument& doc, const Json& obj) {
  doc.require_known_keys(obj, {"fx", "fy", "cx", "cy", "center", "rotation", "baseline_to_ref", "polarizer_deg"},
                         "camera");
  CameraModel c;
  c.fx = doc.get<double>(obj, "fx");
  c.fy = doc.get<double>(obj, "fy");
  c.cx = doc.get<double>(obj, "cx");
  c.cy = doc.get<double>(obj, "cy");
  c.center = read_vec3(doc, obj, "center");
  if (obj.contains("rotation")) {
    const auto r = doc.get<std::vector<double>>(obj, "rotation");
    if (r.size() != 9) doc.fail("rotation", "rotation needs nine numbers (row-major)");
    for (int i = 0; i < 9; ++i) c.rotation(i / 3, i % 3) = r[i];
  }
  c.baseline_to_ref = doc.get_or<double>(obj, "baseline_to_ref", 0.0);
  c.validate();
  return c;
}

Json scene_to_json(const SceneSpec& s) {
  Json j;
  j["name"] = s.name;
  j["width"] = s.width;
  j["height"] = s.height;
  j["light"] = s.light;
  j["background_depth"] = s.background_depth;
  j["background"] = texture_json(s.background);
  j["supersample_silhouettes"] = s.supersample_silhouettes;
  j["polarization_frame"] = s.polarization_frame == PolarizationFrame::reference ? "reference" : "per_view";
  j["primitives"] = Json::array();
  for (const auto& p : s.primitives) j["primitives"].push_back(primitive_json(p));
  Json cams = Json::array();
  for (const auto& rc : s.rig) {
    Json c = camera_to_json(rc.camera);
    c["polarizer_deg"] = rc.polarizer.is_none() ? Json(nullptr) : Json(rc.polarizer.degrees());
    cams.push_back(c);
  }
  j["cameras"] = cams;
  j["reference"] = s.reference;
  return j;
}

SceneSpec scene_from_json(const JsonDocument& doc, const Json& obj) {
  doc.require_known_keys(obj,
                         {"name", "width", "height", "light", "background_depth", "background", "supersample_silhouettes",
                          "polarization_frame", "primitives", "rig", "cameras", "reference"},
                         "scene");
  SceneSpec s;
  s.name = doc.get_or<std::string>(obj, "name", "scene");
  s.width = doc.get_or<int>(obj, "width", 256);
  s.height = doc.get_or<int>(obj, "height", 256);
  s.light = doc.get_or<double>(obj, "light", 1.0);
  s.background_depth = doc.get_or<double>(obj, "background_depth", 3.0);
  if (obj.contains("background")) s.background = read_texture(doc, obj.at("background"));
  s.supersample_silhouettes = doc.get_or<bool>(obj, "supersample_silhouettes", true);
  const auto frame = doc.get_or<std::string>(obj, "polarization_frame", "reference");
  if (frame == "reference") {
    s.polarization_frame = PolarizationFrame::reference;
  } else if (frame == "per_view") {
    s.polarization_frame = PolarizationFrame::per_view;
  } else {
    doc.fail("polarization_frame", "unknown polarization_frame '" + frame + "'");
  }
  if (!obj.contains("primitives") || !obj.at("primitives").is_array()) doc.fail("primitives", "scene needs a 'primitives' array");
  for (const auto& p : obj.at("primitives")) s.primitives.push_back(read_primitive(doc, p));
  if (obj.contains("rig") == obj.contains("cameras")) {
    doc.fail(obj.contains("rig") ? "rig" : "primitives", "scene needs exactly one of 'rig' or 'cameras'");
  }
  if (obj.contains("rig")) {
    const Json& r = obj.at("rig");
    doc.require_known_keys(r, {"focal_px", "baseline_m"}, "rig");
    set_easypolar_rig(s, doc.get<double>(r, "focal_px"), doc.get<double>(r, "baseline_m"));
  } else {
    for (const auto& c : obj.at("cameras")) {
      RigCamera rc;
      rc.camera = camera_from_json(doc, c);
      if (c.contains("polarizer_deg") && !c.at("polarizer_deg").is_null()) {
        rc.polarizer = PolarizerAngle::degrees(doc.get<double>(c, "polarizer_deg"));
      }
      s.rig.push_back(rc);
    }
    s.reference = doc.get_or<int>(obj, "reference", 0);
  }
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(doc.source() + ": " + e.what());
  }
  return s;
}

SceneSpec scene_from_json_text(const std::string& text, const std::string& source) {
  const JsonDocument doc(text, source);
  return scene_from_json(doc, doc.root());
}

}  // namespace polarbench::io
