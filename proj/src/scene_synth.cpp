// SPDX-License-Identifier: Apache-2.0
#include "polarbench/scene_synth.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace polarbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTMin = 1e-9;
// Slack (meters) before a blocker in front of an endpoint counts as occluding.
constexpr double kVisibilityTol = 1e-7;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
  const std::uint64_t h = mix64(mix64(static_cast<std::uint64_t>(ix) ^ mix64(seed)) ^ static_cast<std::uint64_t>(iy));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

// Square wave in [-1, 1] with unit half-period, optionally softened.
double square_wave(double u, double width) {
  double ph = std::fmod(u, 2.0);
  if (ph < 0.0) ph += 2.0;
  const double sd = ph < 1.0 ? std::min(ph, 1.0 - ph) : -std::min(ph - 1.0, 2.0 - ph);
  if (width <= 0.0) return sd >= 0.0 ? 1.0 : -1.0;
  const double f = std::clamp(sd / (0.5 * width), -1.0, 1.0);
  return f * (1.5 - 0.5 * f * f);
}

void plane_basis(const Vec3& n, Vec3& u, Vec3& v) {
  const Vec3 helper = std::fabs(n.y()) < 0.9 ? Vec3(0, 1, 0) : Vec3(1, 0, 0);
  u = helper.cross(n).normalized();
  v = n.cross(u);
}

struct Hit {
  double t = kInf;
  int prim = -1;  // -1: background
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // unit, facing the incoming ray
  double s = 0.0, u = 0.0;     // texture coordinates
};

class Tracer {
 public:
  explicit Tracer(const SceneSpec& scene) : scene_(scene) {
    const CameraModel& ref = scene.rig.at(scene.reference).camera;
    light_ = ref.center;
    bg_axis_ = ref.rotation.transpose() * Vec3(0, 0, 1);
    bg_origin_ = ref.center;
    ref_rotation_ = ref.rotation;
    for (const auto& p : scene.primitives) {
      Prepared q;
      if (const auto* pl = std::get_if<Plane>(&p.shape)) {
        q.normal = pl->normal.normalized();
        plane_basis(q.normal, q.bu, q.bv);
      }
      prepared_.push_back(q);
    }
  }

  const Vec3& light() const { return light_; }

  // Nearest primitive hit with t < tmax.
  Hit trace_primitives(const Vec3& o, const Vec3& d, double tmax) const {
    Hit best;
    best.t = tmax;
    for (std::size_t i = 0; i < scene_.primitives.size(); ++i) {
      const auto& shape = scene_.primitives[i].shape;
      double t = kInf;
      if (const auto* sp = std::get_if<Sphere>(&shape)) {
        t = hit_sphere(*sp, o, d, best.t);
      } else if (const auto* pl = std::get_if<Plane>(&shape)) {
        t = hit_plane(*pl, prepared_[i], o, d, best.t);
      } else {
        t = hit_paraboloid(std::get<ParaboloidPatch>(shape), o, d, best.t);
      }
      if (t < best.t) {
        best.t = t;
        best.prim = static_cast<int>(i);
      }
    }
    if (best.prim < 0) {
      best.t = kInf;
      return best;
    }
    best.point = o + best.t * d;
    surface(best, d);
    return best;
  }

  // Nearest hit including the background plane.
  Hit trace(const Vec3& o, const Vec3& d) const {
    const double denom = d.dot(bg_axis_);
    double t_bg = kInf;
    if (denom > 0.0) t_bg = (scene_.background_depth - (o - bg_origin_).dot(bg_axis_)) / denom;
    if (!(t_bg > kTMin)) t_bg = kInf;
    Hit h = trace_primitives(o, d, t_bg);
    if (h.prim >= 0 || !std::isfinite(t_bg)) return h;
    h.t = t_bg;
    h.point = o + t_bg * d;
    h.normal = -bg_axis_;
    const Vec3 local = ref_rotation_ * (h.point - bg_origin_);
    h.s = local.x();
    h.u = local.y();
    return h;
  }

  // True when a primitive blocks the open segment between a and b.
  bool blocked(const Vec3& a, const Vec3& b) const {
    const Vec3 dir = b - a;
    const double dist = dir.norm();
    if (!(dist > kVisibilityTol)) return false;
    const Vec3 d = dir / dist;
    const double limit = dist - kVisibilityTol - 1e-9 * dist;
    return trace_primitives(a, d, limit).prim >= 0;
  }

  double albedo(const Hit& h) const {
    const Texture& tex = h.prim < 0 ? scene_.background : scene_.primitives[h.prim].albedo;
    return tex.sample(h.s, h.u);
  }

 private:
  struct Prepared {
    Vec3 normal = Vec3::Zero();
    Vec3 bu = Vec3::Zero(), bv = Vec3::Zero();
  };

  static double hit_sphere(const Sphere& sp, const Vec3& o, const Vec3& d, double tmax) {
    const Vec3 oc = o - sp.center;
    const double b = oc.dot(d);
    const double c = oc.squaredNorm() - sp.radius * sp.radius;
    const double disc = b * b - c;
    if (disc < 0.0) return kInf;
    const double root = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double q = b > 0.0 ? -b - root : -b + root;
    double t0 = q, t1 = (q != 0.0) ? c / q : -b;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > kTMin && t0 < tmax) return t0;
    if (t1 > kTMin && t1 < tmax) return t1;
    return kInf;
  }

  static double hit_plane(const Plane& pl, const Prepared& q, const Vec3& o, const Vec3& d, double tmax) {
    const double denom = q.normal.dot(d);
    if (std::fabs(denom) < 1e-15) return kInf;
    const double t = q.normal.dot(pl.point - o) / denom;
    if (!(t > kTMin && t < tmax)) return kInf;
    if (pl.half_extent) {
      const Vec3 r = o + t * d - pl.point;
      if (std::fabs(r.dot(q.bu)) > pl.half_extent->x() || std::fabs(r.dot(q.bv)) > pl.half_extent->y()) return kInf;
    }
    return t;
  }

  static double hit_paraboloid(const ParaboloidPatch& pb, const Vec3& o, const Vec3& d, double tmax) {
    const double k = pb.curvature;
    const double ox = o.x() - pb.apex.x(), oy = o.y() - pb.apex.y();
    const double a = k * (d.x() * d.x() + d.y() * d.y());
    const double b = 2.0 * k * (ox * d.x() + oy * d.y()) - d.z();
    const double c = k * (ox * ox + oy * oy) - (o.z() - pb.apex.z());
    double roots[2] = {kInf, kInf};
    if (std::fabs(a) < 1e-14) {
      if (b != 0.0) roots[0] = -c / b;
    } else {
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0.0) return kInf;
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
      roots[0] = q / a;
      roots[1] = q != 0.0 ? c / q : kInf;
      if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    }
    for (double t : roots) {
      if (!(t > kTMin && t < tmax)) continue;
      const double x = ox + t * d.x(), y = oy + t * d.y();
      if (std::fabs(x) <= pb.half_extent && std::fabs(y) <= pb.half_extent) return t;
    }
    return kInf;
  }

  void surface(Hit& h, const Vec3& d) const {
    const auto& shape = scene_.primitives[h.prim].shape;
    Vec3 n;
    if (const auto* sp = std::get_if<Sphere>(&shape)) {
      const Vec3 q = h.point - sp->center;
      n = q.normalized();
      h.s = sp->radius * std::atan2(q.x(), -q.z());
      h.u = sp->radius * std::asin(std::clamp(q.y() / sp->radius, -1.0, 1.0));
    } else if (const auto* pl = std::get_if<Plane>(&shape)) {
      const Prepared& q = prepared_[h.prim];
      n = q.normal;
      const Vec3 r = h.point - pl->point;
      h.s = r.dot(q.bu);
      h.u = r.dot(q.bv);
    } else {
      const auto& pb = std::get<ParaboloidPatch>(shape);
      const double x = h.point.x() - pb.apex.x(), y = h.point.y() - pb.apex.y();
      n = Vec3(-2.0 * pb.curvature * x, -2.0 * pb.curvature * y, 1.0).normalized();
      h.s = x;
      h.u = y;
    }
    if (n.dot(d) > 0.0) n = -n;
    h.normal = n;
  }

  const SceneSpec& scene_;
  std::vector<Prepared> prepared_;
  Vec3 light_;
  Vec3 bg_axis_;
  Vec3 bg_origin_;
  Mat3 ref_rotation_;
};

// Lambertian headlight radiance of a hit; background is self-luminous.
double radiance(const Tracer& tracer, const SceneSpec& scene, const Hit& h, bool check_shadow) {
  const double albedo = tracer.albedo(h);
  if (h.prim < 0) return albedo * scene.light;
  const Vec3 l = (tracer.light() - h.point).normalized();
  const double lambert = std::max(0.0, h.normal.dot(l));
  if (lambert == 0.0) return 0.0;
  if (check_shadow && tracer.blocked(h.point, tracer.light())) return 0.0;
  return albedo * lambert * scene.light;
}

bool same_center(const CameraModel& a, const CameraModel& b) { return (a.center - b.center).norm() == 0.0; }

void check_rectified(const SceneSpec& scene) {
  const CameraModel& ref = scene.rig.at(scene.reference).camera;
  for (const auto& rc : scene.rig) {
    const CameraModel& c = rc.camera;
    const double rot = (c.rotation - ref.rotation).cwiseAbs().maxCoeff();
    if (rot > 1e-12 || c.fx != ref.fx || c.fy != ref.fy || c.cx != ref.cx || c.cy != ref.cy) {
      throw ConfigError("rig is not rectified: cameras differ in rotation or intrinsics");
    }
    const Vec3 off = ref.rotation * (c.center - ref.center);
    if (std::fabs(off.y()) > 1e-9 || std::fabs(off.z()) > 1e-9) {
      throw ConfigError("rig is not rectified: camera centers must differ along the camera x axis only");
    }
    if (std::fabs(off.x() - c.baseline_to_ref) > 1e-9) {
      throw ConfigError("rig camera baseline_to_ref disagrees with its center offset");
    }
  }
}

}  // namespace

double Texture::sample(double s, double t) const {
  switch (kind) {
    case Kind::constant:
      return a;
    case Kind::checker: {
      const double f = square_wave(s / period, edge) * square_wave(t / period, edge);
      return a + (b - a) * (0.5 * (1.0 - f));
    }
    case Kind::noise: {
      const double u = s / period, v = t / period;
      const double fu = std::floor(u), fv = std::floor(v);
      const auto ix = static_cast<std::int64_t>(fu), iy = static_cast<std::int64_t>(fv);
      const double wu = fade(u - fu), wv = fade(v - fv);
      const double v00 = lattice(ix, iy, seed), v10 = lattice(ix + 1, iy, seed);
      const double v01 = lattice(ix, iy + 1, seed), v11 = lattice(ix + 1, iy + 1, seed);
      const double top = v00 + wu * (v10 - v00);
      const double bottom = v01 + wu * (v11 - v01);
      return a + (b - a) * (top + wv * (bottom - top));
    }
  }
  return a;
}

void SceneSpec::validate(bool allow_empty) const {
  if (width <= 0 || height <= 0) throw ConfigError("scene image size must be positive");
  if (!allow_empty && primitives.empty()) throw ConfigError("scene needs at least one primitive");
  if (rig.empty()) throw ConfigError("scene rig needs at least one camera");
  if (reference < 0 || reference >= static_cast<int>(rig.size())) throw ConfigError("reference camera index out of range");
  if (!(light >= 0.0) || !std::isfinite(light)) throw ConfigError("light must be finite and >= 0");
  if (!(background_depth > 0.0) || !std::isfinite(background_depth)) throw ConfigError("background depth must be > 0");
  auto check_texture = [](const Texture& t) {
    if (!(t.a >= 0.0 && t.b >= 0.0) || !std::isfinite(t.a) || !std::isfinite(t.b)) {
      throw ConfigError("texture values must be finite and >= 0");
    }
    if (t.kind != Texture::Kind::constant && !(t.period > 0.0)) throw ConfigError("texture period must be > 0");
    if (!(t.edge >= 0.0 && t.edge <= 1.0)) throw ConfigError("checker edge width must lie in [0, 1]");
  };
  check_texture(background);
  for (const auto& p : primitives) {
    p.material.validate();
    check_texture(p.albedo);
    if (const auto* sp = std::get_if<Sphere>(&p.shape)) {
      if (!(sp->radius > 0.0)) throw ConfigError("sphere radius must be > 0");
    } else if (const auto* pl = std::get_if<Plane>(&p.shape)) {
      if (!(pl->normal.norm() > 0.0)) throw ConfigError("plane normal must be nonzero");
      if (pl->half_extent && !(pl->half_extent->x() > 0.0 && pl->half_extent->y() > 0.0)) {
        throw ConfigError("plane extent must be > 0");
      }
    } else {
      const auto& pb = std::get<ParaboloidPatch>(p.shape);
      if (!(pb.half_extent > 0.0)) throw ConfigError("paraboloid extent must be > 0");
    }
  }
  for (const auto& c : rig) c.camera.validate();
}

std::vector<RigCamera> easypolar_rig(int width, int height, double focal_px, double baseline_m) {
  std::vector<RigCamera> rig(3);
  rig[0].camera = centered_camera(width, height, focal_px, Vec3(-baseline_m, 0, 0), -baseline_m);
  rig[0].polarizer = PolarizerAngle::degrees(0);
  rig[1].camera = centered_camera(width, height, focal_px);
  rig[2].camera = centered_camera(width, height, focal_px, Vec3(baseline_m, 0, 0), baseline_m);
  rig[2].polarizer = PolarizerAngle::degrees(45);
  return rig;
}

void set_easypolar_rig(SceneSpec& scene, double focal_px, double baseline_m) {
  scene.rig = easypolar_rig(scene.width, scene.height, focal_px, baseline_m);
  scene.reference = 1;
}

double source_offset_sign(const CameraModel& source) { return source.baseline_to_ref > 0.0 ? -1.0 : 1.0; }

ViewGroundTruth render_view(const SceneSpec& scene, int cam_index) {
  scene.validate(true);
  if (cam_index < 0 || cam_index >= static_cast<int>(scene.rig.size())) throw ConfigError("camera index out of range");
  const int w = scene.width, h = scene.height;
  const CameraModel& cam = scene.rig[cam_index].camera;
  const CameraModel& ref = scene.rig[scene.reference].camera;
  const bool at_light = same_center(cam, ref);
  const bool is_reference = cam_index == scene.reference;
  const double fb = cam.fx * std::fabs(cam.baseline_to_ref);
  const Tracer tracer(scene);

  Map i_un(w, h);
  ViewGroundTruth gt;
  gt.depth = {Map(w, h), Mask(w, h)};
  gt.normals = {Map(w, h, 3), Mask(w, h)};
  gt.params = {Map(w, h), Map(w, h), Mask(w, h, 1, 1)};
  gt.disparity = {Map(w, h), Mask(w, h)};
  gt.occlusion = Mask(w, h);
  gt.primitive = Grid<std::int32_t>(w, h, 1, -1);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d = cam.ray_world(x, y);
      const Hit hit = tracer.trace(cam.center, d);
      if (!std::isfinite(hit.t)) continue;  // ray parallel to the background: leave empty
      gt.primitive(x, y) = hit.prim;
      i_un(x, y) = radiance(tracer, scene, hit, !at_light);

      const Vec3 pc = cam.to_camera(hit.point);
      gt.depth.depth(x, y) = pc.z();
      gt.depth.valid(x, y) = pc.z() > 0.0 ? 1 : 0;
      if (pc.z() > 0.0) {
        gt.disparity.disparity(x, y) = fb / pc.z();
        gt.disparity.valid(x, y) = 1;
      }

      const Vec3 n_cam = cam.rotation * (-hit.normal);
      gt.normals.set(x, y, n_cam);
      gt.normals.valid(x, y) = 1;
      if (!is_reference) gt.occlusion(x, y) = tracer.blocked(hit.point, ref.center) ? 1 : 0;

      if (hit.prim < 0) continue;  // background: unpolarized
      const Material& mat = scene.primitives[hit.prim].material;
      Vec3 view_cam;
      if (is_reference || at_light) {
        view_cam = cam.rotation * d;
      } else if (scene.polarization_frame == PolarizationFrame::reference) {
        view_cam = ref.rotation * (hit.point - ref.center).normalized();
      } else {
        view_cam = cam.rotation * d;
      }
      double zenith = 0.0, azimuth = 0.0;
      zenith_azimuth_at(n_cam, view_cam, zenith, azimuth);
      if (!is_reference && scene.polarization_frame == PolarizationFrame::per_view &&
          mat.mode == ReflectionMode::specular) {
        // Incidence angle about the half vector between light and viewer.
        const Vec3 to_view = (cam.center - hit.point).normalized();
        const Vec3 to_light = (ref.center - hit.point).normalized();
        const Vec3 half = (to_view + to_light).normalized();
        zenith = std::clamp(std::atan2(half.cross(to_view).norm(), std::fabs(half.dot(to_view))), 0.0, 0.5 * kPi);
      }
      gt.params.aop(x, y) = aop_from_azimuth(azimuth, mat.mode);
      gt.params.dop(x, y) = dop_from_zenith(zenith, mat);
    }
  }

  if (scene.supersample_silhouettes) {
    static constexpr double kOffsets[4][2] = {{-0.25, -0.25}, {0.25, -0.25}, {-0.25, 0.25}, {0.25, 0.25}};
    Map refined = i_un;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int id = gt.primitive(x, y);
        const bool edge = (x > 0 && gt.primitive(x - 1, y) != id) || (x + 1 < w && gt.primitive(x + 1, y) != id) ||
                          (y > 0 && gt.primitive(x, y - 1) != id) || (y + 1 < h && gt.primitive(x, y + 1) != id);
        if (!edge) continue;
        double sum = 0.0;
        for (const auto& o : kOffsets) {
          const Hit hit = tracer.trace(cam.center, cam.ray_world(x + o[0], y + o[1]));
          if (std::isfinite(hit.t)) sum += radiance(tracer, scene, hit, !at_light);
        }
        refined(x, y) = 0.25 * sum;
      }
    }
    i_un = std::move(refined);
  }
  gt.i_un = IntensityImage(std::move(i_un));
  return gt;
}

SceneBundle render_rig(const SceneSpec& scene) {
  scene.validate(true);
  check_rectified(scene);
  SceneBundle bundle;
  bundle.spec = scene;
  for (int k = 0; k < static_cast<int>(scene.rig.size()); ++k) bundle.views.push_back(render_view(scene, k));

  const int w = scene.width, h = scene.height;
  const ViewGroundTruth& ref = bundle.reference();
  const CameraModel& ref_cam = scene.rig[scene.reference].camera;
  const Tracer tracer(scene);
  for (int k = 0; k < static_cast<int>(scene.rig.size()); ++k) {
    const CameraModel& cam = scene.rig[k].camera;
    const double fb = cam.fx * std::fabs(cam.baseline_to_ref);
    DisparityMap disp{Map(w, h), Mask(w, h)};
    Mask occ(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!ref.depth.valid(x, y)) continue;
        const double z = ref.depth.depth(x, y);
        disp.disparity(x, y) = fb / z;
        disp.valid(x, y) = 1;
        if (k == scene.reference || same_center(cam, ref_cam)) continue;
        // Reference point from its depth along the pixel ray.
        const Vec3 ray = ref_cam.ray_camera(x, y);
        const Vec3 p = ref_cam.rotation.transpose() * (ray * (z / ray.z())) + ref_cam.center;
        occ(x, y) = tracer.blocked(cam.center, p) ? 1 : 0;
      }
    }
    bundle.ref_disparity.push_back(std::move(disp));
    bundle.ref_occlusion.push_back(std::move(occ));
  }
  return bundle;
}

namespace {

Primitive sphere(Vec3 c, double r, Material m, Texture t) { return {Sphere{c, r}, m, t}; }

Primitive plane(Vec3 p, Vec3 n, Material m, Texture t) { return {Plane{p, n.normalized(), std::nullopt}, m, t}; }

Primitive rect(Vec3 p, Vec3 n, double hx, double hy, Material m, Texture t) {
  return {Plane{p, n.normalized(), Eigen::Vector2d(hx, hy)}, m, t};
}

Primitive bump(Vec3 apex, double k, double half, Material m, Texture t) {
  return {ParaboloidPatch{apex, k, half}, m, t};
}

Material diffuse(double n) { return {n, ReflectionMode::diffuse}; }
Material specular(double n) { return {n, ReflectionMode::specular}; }

struct Entry {
  const char* name;
  void (*build)(SceneSpec&, std::uint64_t);
};

const Entry kLibrary[] = {
    {"sphere_on_plane",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {sphere({0.0, 0.0, 3.0}, 0.22, diffuse(1.5), Texture::constant(0.7)),
                       plane({0.0, 0.0, 3.4}, {0.3, -0.2, -1.0}, diffuse(1.5), Texture::checker(0.3, 0.7, 0.08, 0.4))};
     }},
    {"specular_sphere",
     [](SceneSpec& s, std::uint64_t seed) {
       s.primitives = {sphere({0.05, -0.02, 2.8}, 0.25, specular(1.6), Texture::constant(0.8))};
       s.background = Texture::noise(0.2, 0.5, 0.1, seed + 11);
     }},
    {"tilted_checker_plane",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {plane({0.0, 0.0, 3.0}, {0.8, 0.3, -1.0}, diffuse(1.8), Texture::checker(0.25, 0.85, 0.07, 0.4))};
     }},
    {"two_planes",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {rect({-0.1, 0.0, 2.4}, {0.2, 0.0, -1.0}, 0.12, 0.25, specular(1.5), Texture::constant(0.6)),
                       plane({0.0, 0.0, 3.5}, {-0.3, 0.1, -1.0}, diffuse(1.5), Texture::checker(0.3, 0.75, 0.09, 0.4))};
     }},
    {"sphere_cluster",
     [](SceneSpec& s, std::uint64_t seed) {
       s.primitives = {sphere({-0.2, 0.05, 3.0}, 0.15, diffuse(1.4), Texture::constant(0.6)),
                       sphere({0.15, -0.1, 3.2}, 0.18, specular(1.7), Texture::constant(0.5)),
                       sphere({0.05, 0.18, 2.7}, 0.1, diffuse(2.0), Texture::noise(0.4, 0.8, 0.06, seed + 5))};
       s.background = Texture::constant(0.25);
     }},
    {"paraboloid_bump",
     [](SceneSpec& s, std::uint64_t seed) {
       s.primitives = {bump({0.0, 0.0, 2.8}, 3.0, 0.3, specular(1.5), Texture::noise(0.4, 0.8, 0.1, seed + 7))};
     }},
    {"glossy_floor",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {plane({0.0, 0.25, 3.0}, {0.0, -1.0, -0.35}, specular(1.5), Texture::checker(0.35, 0.65, 0.12, 0.4)),
                       sphere({0.0, 0.02, 3.0}, 0.18, diffuse(1.5), Texture::constant(0.75))};
     }},
    {"wrap_sphere",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {sphere({0.0, 0.0, 3.0}, 0.3, diffuse(1.6), Texture::constant(0.7))};
     }},
    {"textured_spheres",
     [](SceneSpec& s, std::uint64_t seed) {
       s.primitives = {sphere({-0.14, 0.0, 3.0}, 0.16, diffuse(1.4), Texture::noise(0.35, 0.85, 0.08, seed + 1)),
                       sphere({0.16, 0.02, 2.9}, 0.15, specular(2.0), Texture::noise(0.3, 0.7, 0.08, seed + 2))};
     }},
    {"occluder_stack",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {rect({0.04, 0.0, 2.2}, {0.1, 0.0, -1.0}, 0.03, 0.5, diffuse(1.5), Texture::constant(0.9)),
                       sphere({0.0, 0.0, 3.0}, 0.2, specular(1.5), Texture::constant(0.6)),
                       plane({0.0, 0.0, 3.6}, {0.0, 0.0, -1.0}, diffuse(1.5), Texture::checker(0.3, 0.7, 0.1, 0.4))};
     }},
    {"smooth_dome",
     [](SceneSpec& s, std::uint64_t) {
       s.primitives = {bump({0.0, 0.0, 2.6}, 0.8, 1.0, specular(1.5), Texture::constant(0.6))};
     }},
};

SceneSpec make_library_scene(std::size_t index, std::uint64_t seed, int size) {
  SceneSpec s;
  s.name = kLibrary[index].name;
  s.width = s.height = size;
  s.background_depth = 4.0;
  std::mt19937_64 rng(mix64(seed * 1315423911ULL + index));
  std::uniform_real_distribution<double> focal(800.0, 1600.0), base(0.03, 0.05);
  // Focal range is defined at 256 px; other sizes keep the field of view.
  const double f = focal(rng) * (size / 256.0);
  const double b = base(rng);
  kLibrary[index].build(s, seed * 1000);
  set_easypolar_rig(s, f, b);
  return s;
}

}  // namespace

std::vector<std::string> library_scene_names() {
  std::vector<std::string> out;
  for (const auto& e : kLibrary) out.emplace_back(e.name);
  return out;
}

std::vector<SceneSpec> scene_library(std::uint64_t seed, int size) {
  std::vector<SceneSpec> out;
  for (std::size_t i = 0; i < std::size(kLibrary); ++i) out.push_back(make_library_scene(i, seed, size));
  return out;
}

SceneSpec library_scene(const std::string& name, std::uint64_t seed, int size) {
  for (std::size_t i = 0; i < std::size(kLibrary); ++i) {
    if (name == kLibrary[i].name) return make_library_scene(i, seed, size);
  }
  throw ConfigError("unknown library scene '" + name + "'");
}

}  // namespace polarbench
