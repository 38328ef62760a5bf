// SPDX-License-Identifier: Apache-2.0
#pragma once

// Geometry <-> polarization coupling (surface azimuth -> AoP, zenith -> DoP via
// the Fresnel equations) and the rectified-stereo geometry utilities.
//
// Frames: world and camera coordinates are right-handed with x right, y down,
// z forward (into the scene). Normal maps store the depth-gradient normal
// (-dz/dx, -dz/dy, 1) normalized, i.e. the surface normal pointing away from
// the camera, expressed in camera coordinates; front-facing pixels have n_z > 0.

#include <Eigen/Core>

#include "polarbench/image.hpp"

namespace polarbench {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole camera. `rotation` maps world to camera coordinates; `center` is
/// the optical center in world meters. `baseline_to_ref` is the signed offset
/// (meters, along the rig's x axis) from the reference camera.
struct CameraModel {
  double fx = 1000.0;
  double fy = 1000.0;
  double cx = 0.0;
  double cy = 0.0;
  Vec3 center = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double baseline_to_ref = 0.0;

  /// Throws ConfigError when focal lengths are not positive or the rotation
  /// is not orthonormal within 1e-9.
  void validate() const;

  /// Unit viewing direction through pixel (u, v) in camera coordinates.
  Vec3 ray_camera(double u, double v) const;
  /// Same direction expressed in world coordinates.
  Vec3 ray_world(double u, double v) const;
  /// World point -> camera coordinates.
  Vec3 to_camera(const Vec3& world) const { return rotation * (world - center); }
  /// Pixel coordinates of a camera-frame point (z > 0 assumed).
  Eigen::Vector2d project_camera(const Vec3& p) const {
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
  }
};

/// Camera with its principal point at the image center.
CameraModel centered_camera(int width, int height, double focal_px, Vec3 center = Vec3::Zero(),
                            double baseline_to_ref = 0.0);

struct DepthMap {
  Map depth;  // meters
  Mask valid;
};

struct DisparityMap {
  Map disparity;  // pixels, >= 0
  Mask valid;
};

struct NormalMap {
  Map n;  // 3 channels: x, y, z
  Mask valid;

  Vec3 at(int x, int y) const { return {n(x, y, 0), n(x, y, 1), n(x, y, 2)}; }
  void set(int x, int y, const Vec3& v) {
    n(x, y, 0) = v.x();
    n(x, y, 1) = v.y();
    n(x, y, 2) = v.z();
  }
};

enum class ReflectionMode { diffuse, specular };

struct Material {
  double refractive_index = 1.5;
  ReflectionMode mode = ReflectionMode::diffuse;

  /// Throws ConfigError unless the index lies in (1, 3].
  void validate() const;
};

/// Per-pixel viewing rays as Plücker lines: unit direction d and moment
/// m = o x d, both in world coordinates.
struct PluckerRayMap {
  Map direction;  // 3 channels
  Map moment;     // 3 channels

  Vec3 direction_at(int x, int y) const { return {direction(x, y, 0), direction(x, y, 1), direction(x, y, 2)}; }
  Vec3 moment_at(int x, int y) const { return {moment(x, y, 0), moment(x, y, 1), moment(x, y, 2)}; }
};

struct ZenithAzimuth {
  Map zenith;   // [0, pi/2]
  Map azimuth;  // [0, 2 pi)
};

/// Disparity below this is treated as a point at infinity.
inline constexpr double kEpsDisparity = 1e-4;

/// Diffuse: theta = phi mod pi. Specular: theta = (phi - pi/2) mod pi.
double aop_from_azimuth(double phi, ReflectionMode mode);

/// Fresnel DoP of diffusely reflected light. zenith in [0, pi/2), n > 1.
double dop_diffuse(double zenith, double n);

/// Fresnel DoP of specularly reflected light; equals 1 at the Brewster angle.
double dop_specular(double zenith, double n);

double dop_from_zenith(double zenith, const Material& material);

/// z = f B / d with f = fx and B = |baseline_to_ref|. Throws DomainError for a
/// zero baseline; pixels with d <= kEpsDisparity become invalid.
DepthMap depth_from_disparity(const DisparityMap& d, const CameraModel& cam);

/// d = f B / z on valid pixels.
DisparityMap disparity_from_depth(const DepthMap& z, const CameraModel& cam);

/// Surface normals from depth gradients. Derivatives are taken with respect
/// to metric camera coordinates using central differences of back-projected
/// points (one-sided at borders and depth discontinuities).
NormalMap normals_from_depth(const DepthMap& z, const CameraModel& cam);

PluckerRayMap plucker_rays(const CameraModel& cam, int width, int height);

/// Zenith angle between the viewing ray and the normal (folded into
/// [0, pi/2]) and azimuth atan2(n_y, n_x) in [0, 2 pi), for one pixel.
/// Both vectors in camera coordinates.
void zenith_azimuth_at(const Vec3& normal_cam, const Vec3& view_dir_cam, double& zenith, double& azimuth);

ZenithAzimuth zenith_azimuth(const NormalMap& normals, const PluckerRayMap& view, const CameraModel& cam);

}  // namespace polarbench
