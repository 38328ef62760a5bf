// SPDX-License-Identifier: Apache-2.0
#pragma once

// Procedural multi-view ground truth from ray-cast analytic primitives.
// Polarization is assigned in closed form from the hit normal and material,
// so every stored AoP/DoP is exact ground truth.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polarbench/fresnel_geom.hpp"
#include "polarbench/polar_core.hpp"

namespace polarbench {

/// Albedo pattern. Checker and noise periods are in meters on the surface.
struct Texture {
  enum class Kind { constant, checker, noise };
  Kind kind = Kind::constant;
  double a = 0.5;        // constant value / first checker value / noise minimum
  double b = 0.5;        // second checker value / noise maximum
  double period = 0.05;  // checker square size or noise feature size
  std::uint64_t seed = 0;
  double edge = 0.0;  // checker transition width as a fraction of the period; 0 is a hard edge

  static Texture constant(double v) { return {Kind::constant, v, v, 1.0, 0, 0.0}; }
  static Texture checker(double a, double b, double period, double edge = 0.0) {
    return {Kind::checker, a, b, period, 0, edge};
  }
  static Texture noise(double lo, double hi, double period, std::uint64_t seed) {
    return {Kind::noise, lo, hi, period, seed, 0.0};
  }

  /// Albedo at 2D surface coordinates (meters).
  double sample(double s, double t) const;
};

struct Sphere {
  Vec3 center = Vec3(0, 0, 2);
  double radius = 0.1;
};

/// Plane through `point` with unit `normal`. With `half_extent` set it is the
/// rectangle |s| <= hx, |t| <= hy in the plane's (s, t) basis.
struct Plane {
  Vec3 point = Vec3(0, 0, 2);
  Vec3 normal = Vec3(0, 0, -1);
  std::optional<Eigen::Vector2d> half_extent;
};

/// Paraboloid cap z = apex.z + curvature * ((x - apex.x)^2 + (y - apex.y)^2)
/// over the square |x - apex.x|, |y - apex.y| <= half_extent (world frame).
/// Positive curvature bulges towards a camera looking down +z.
struct ParaboloidPatch {
  Vec3 apex = Vec3(0, 0, 2);
  double curvature = 2.0;
  double half_extent = 0.1;
};

struct Primitive {
  std::variant<Sphere, Plane, ParaboloidPatch> shape;
  Material material;
  Texture albedo;
};

struct RigCamera {
  CameraModel camera;
  PolarizerAngle polarizer = PolarizerAngle::none();
};

/// Whose viewing rays set the zenith of each surface point.
///  reference: every view carries the polarization state leaving the surface
///             towards the reference camera (narrow-baseline approximation);
///  per_view:  each view recomputes zenith from its own rays, so side views
///             see viewpoint-dependent DoP.
enum class PolarizationFrame { reference, per_view };

struct SceneSpec {
  std::string name = "scene";
  int width = 256;
  int height = 256;
  std::vector<Primitive> primitives;
  double light = 1.0;  // headlight radiance scale, light sits at the reference camera
  double background_depth = 3.0;
  Texture background = Texture::constant(0.3);
  std::vector<RigCamera> rig;
  int reference = 0;  // index into rig
  bool supersample_silhouettes = true;
  PolarizationFrame polarization_frame = PolarizationFrame::reference;

  /// Throws ConfigError on invalid materials, sizes, textures or an empty rig.
  /// A scene without primitives is rejected unless `allow_empty`.
  void validate(bool allow_empty = false) const;
};

/// Three-camera rig: [0] left (0 deg polarizer), [1] reference (none),
/// [2] right (45 deg polarizer), separated by `baseline_m`.
std::vector<RigCamera> easypolar_rig(int width, int height, double focal_px, double baseline_m);

/// +1 when a reference pixel x corresponds to source pixel x + d (camera left
/// of the reference), -1 when it corresponds to x - d.
double source_offset_sign(const CameraModel& source);

struct ViewGroundTruth {
  IntensityImage i_un;
  DepthMap depth;       // camera z, meters
  NormalMap normals;
  PolarParams params;   // GT AoP / DoP
  DisparityMap disparity;  // this view's pixels -> reference view (0 for the reference)
  Mask occlusion;          // this view's pixel is hidden from the reference camera
  Grid<std::int32_t> primitive;  // hit primitive index, -1 for background
};

struct SceneBundle {
  SceneSpec spec;
  std::vector<ViewGroundTruth> views;
  /// Per rig view k: disparity in reference-view coordinates (reference pixel
  /// x maps to view-k pixel x + source_offset_sign * d) and the mask of
  /// reference pixels hidden from view k.
  std::vector<DisparityMap> ref_disparity;
  std::vector<Mask> ref_occlusion;

  const ViewGroundTruth& reference() const { return views.at(spec.reference); }
};

/// Render one rig view (ref_disparity / ref_occlusion are not filled).
ViewGroundTruth render_view(const SceneSpec& scene, int cam_index);

/// Render every rig view plus cross-view disparity and occlusion. The rig must
/// be rectified: identical rotation and intrinsics, centers offset along the
/// camera x axis only.
SceneBundle render_rig(const SceneSpec& scene);

/// Fixed corpus of named scenes. Focal length and baseline are drawn from the
/// seed (f in [800, 1600] px, B in [0.03, 0.05] m).
std::vector<SceneSpec> scene_library(std::uint64_t seed = 0, int size = 256);

/// One library scene by name; throws ConfigError for an unknown name.
SceneSpec library_scene(const std::string& name, std::uint64_t seed = 0, int size = 256);

std::vector<std::string> library_scene_names();

/// Replace the scene's rig with an EasyPolar rig at the given focal length
/// and baseline.
void set_easypolar_rig(SceneSpec& scene, double focal_px, double baseline_m);

}  // namespace polarbench
