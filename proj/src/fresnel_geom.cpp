// SPDX-License-Identifier: Apache-2.0
#include "polarbench/fresnel_geom.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "polarbench/polar_core.hpp"

namespace polarbench {

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ConfigError("camera focal lengths must be positive");
  const double err = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-9)) throw ConfigError("camera rotation is not orthonormal");
}

Vec3 CameraModel::ray_camera(double u, double v) const {
  return Vec3((u - cx) / fx, (v - cy) / fy, 1.0).normalized();
}

Vec3 CameraModel::ray_world(double u, double v) const { return rotation.transpose() * ray_camera(u, v); }

CameraModel centered_camera(int width, int height, double focal_px, Vec3 center, double baseline_to_ref) {
  CameraModel cam;
  cam.fx = cam.fy = focal_px;
  cam.cx = 0.5 * (width - 1);
  cam.cy = 0.5 * (height - 1);
  cam.center = center;
  cam.baseline_to_ref = baseline_to_ref;
  return cam;
}

void Material::validate() const {
  if (!(refractive_index > 1.0 && refractive_index <= 3.0)) {
    throw ConfigError("refractive index must lie in (1, 3]");
  }
}

double aop_from_azimuth(double phi, ReflectionMode mode) {
  return mode == ReflectionMode::diffuse ? wrap_pi(phi) : wrap_pi(phi - 0.5 * kPi);
}

namespace {

void check_fresnel_domain(double zenith, double n) {
  if (!(zenith >= 0.0 && zenith < 0.5 * kPi)) throw DomainError("zenith must lie in [0, pi/2)");
  if (!(n > 1.0)) throw DomainError("refractive index must exceed 1");
}

}  // namespace

double dop_diffuse(double zenith, double n) {
  check_fresnel_domain(zenith, n);
  const double s = std::sin(zenith);
  const double s2 = s * s;
  const double a = n - 1.0 / n;
  const double b = n + 1.0 / n;
  const double num = a * a * s2;
  const double den = 2.0 + 2.0 * n * n - b * b * s2 + 4.0 * std::cos(zenith) * std::sqrt(n * n - s2);
  return std::clamp(num / den, 0.0, 1.0);
}

double dop_specular(double zenith, double n) {
  check_fresnel_domain(zenith, n);
  const double s = std::sin(zenith);
  const double s2 = s * s;
  const double n2 = n * n;
  const double num = 2.0 * s2 * std::cos(zenith) * std::sqrt(n2 - s2);
  const double den = n2 - s2 - n2 * s2 + 2.0 * s2 * s2;
  return std::clamp(num / den, 0.0, 1.0);
}

double dop_from_zenith(double zenith, const Material& material) {
  // Callers fold grazing angles to just below pi/2.
  const double z = std::min(zenith, std::nextafter(0.5 * kPi, 0.0));
  return material.mode == ReflectionMode::diffuse ? dop_diffuse(z, material.refractive_index)
                                                  : dop_specular(z, material.refractive_index);
}

DepthMap depth_from_disparity(const DisparityMap& d, const CameraModel& cam) {
  const double baseline = std::fabs(cam.baseline_to_ref);
  if (baseline == 0.0) throw DomainError("depth_from_disparity: zero baseline");
  const double fb = cam.fx * baseline;
  DepthMap out{Map(d.disparity.width(), d.disparity.height()), Mask(d.disparity.width(), d.disparity.height())};
  for (std::size_t i = 0; i < d.disparity.size(); ++i) {
    const double disp = d.disparity[i];
    if (!d.valid[i] || !(disp > kEpsDisparity)) continue;
    out.depth[i] = fb / disp;
    out.valid[i] = 1;
  }
  return out;
}

DisparityMap disparity_from_depth(const DepthMap& z, const CameraModel& cam) {
  const double fb = cam.fx * std::fabs(cam.baseline_to_ref);
  DisparityMap out{Map(z.depth.width(), z.depth.height()), Mask(z.depth.width(), z.depth.height())};
  for (std::size_t i = 0; i < z.depth.size(); ++i) {
    if (!z.valid[i] || !(z.depth[i] > 0.0)) continue;
    out.disparity[i] = fb / z.depth[i];
    out.valid[i] = 1;
  }
  return out;
}

NormalMap normals_from_depth(const DepthMap& z, const CameraModel& cam) {
  const int w = z.depth.width(), h = z.depth.height();
  NormalMap out{Map(w, h, 3), Mask(w, h)};
  auto point = [&](int x, int y) {
    const double d = z.depth(x, y);
    return Vec3(d * (x - cam.cx) / cam.fx, d * (y - cam.cy) / cam.fy, d);
  };
  auto usable = [&](int x, int y) { return z.depth.in_bounds(x, y) && z.valid(x, y) && z.depth(x, y) > 0.0; };
  // Relative depth jump beyond which a neighbour is treated as another surface.
  constexpr double kJump = 0.05;

  // Difference along one image axis: central where possible, otherwise the
  // one-sided difference on the side without a depth discontinuity.
  auto tangent = [&](int x, int y, int dx, int dy, Vec3& t) {
    const bool fwd = usable(x + dx, y + dy);
    const bool bwd = usable(x - dx, y - dy);
    const double zc = z.depth(x, y);
    const bool fwd_ok = fwd && std::fabs(z.depth(x + dx, y + dy) - zc) <= kJump * zc;
    const bool bwd_ok = bwd && std::fabs(z.depth(x - dx, y - dy) - zc) <= kJump * zc;
    if (fwd_ok && bwd_ok) {
      t = point(x + dx, y + dy) - point(x - dx, y - dy);
    } else if (fwd_ok) {
      t = point(x + dx, y + dy) - point(x, y);
    } else if (bwd_ok) {
      t = point(x, y) - point(x - dx, y - dy);
    } else if (fwd && bwd) {
      t = point(x + dx, y + dy) - point(x - dx, y - dy);
    } else if (fwd) {
      t = point(x + dx, y + dy) - point(x, y);
    } else if (bwd) {
      t = point(x, y) - point(x - dx, y - dy);
    } else {
      return false;
    }
    return true;
  };

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!usable(x, y)) continue;
      Vec3 tu, tv;
      if (!tangent(x, y, 1, 0, tu) || !tangent(x, y, 0, 1, tv)) continue;
      const Vec3 n = tu.cross(tv);
      const double len = n.norm();
      if (!(len > 0.0) || !(n.z() > 0.0)) continue;
      out.set(x, y, n / len);
      out.valid(x, y) = 1;
    }
  }
  return out;
}

PluckerRayMap plucker_rays(const CameraModel& cam, int width, int height) {
  PluckerRayMap out{Map(width, height, 3), Map(width, height, 3)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 d = cam.ray_world(x, y);
      const Vec3 m = cam.center.cross(d);
      for (int c = 0; c < 3; ++c) {
        out.direction(x, y, c) = d[c];
        out.moment(x, y, c) = m[c];
      }
    }
  }
  return out;
}

void zenith_azimuth_at(const Vec3& normal_cam, const Vec3& view_dir_cam, double& zenith, double& azimuth) {
  // atan2 form keeps precision near normal incidence where acos does not.
  const double c = normal_cam.dot(view_dir_cam);
  const double s = normal_cam.cross(view_dir_cam).norm();
  zenith = std::clamp(std::atan2(s, std::fabs(c)), 0.0, 0.5 * kPi);
  double phi = std::atan2(normal_cam.y(), normal_cam.x());
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  azimuth = phi;
}

ZenithAzimuth zenith_azimuth(const NormalMap& normals, const PluckerRayMap& view, const CameraModel& cam) {
  const int w = normals.n.width(), h = normals.n.height();
  if (view.direction.width() != w || view.direction.height() != h) {
    throw ShapeError("zenith_azimuth: normal map and ray map differ in size");
  }
  ZenithAzimuth out{Map(w, h), Map(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d = cam.rotation * view.direction_at(x, y);
      zenith_azimuth_at(normals.at(x, y), d, out.zenith(x, y), out.azimuth(x, y));
    }
  }
  return out;
}

}  // namespace polarbench
