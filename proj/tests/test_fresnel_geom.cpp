// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "fresnel_golden.hpp"
#include "polarbench/fresnel_geom.hpp"
#include "polarbench/polar_core.hpp"

using namespace polarbench;

namespace {

double deg(double d) { return d * kPi / 180.0; }

constexpr double kIndices[] = {1.3, 1.5, 1.8, 2.4};

// Front-surface depth of a sphere seen by `cam`, 0 where the ray misses.
DepthMap sphere_depth(const CameraModel& cam, int w, int h, const Vec3& c, double r) {
  DepthMap out{Map(w, h), Mask(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 d = cam.ray_camera(x, y);
      const double b = -d.dot(c);
      const double disc = b * b - (c.squaredNorm() - r * r);
      if (disc < 0) continue;
      const double t = -b - std::sqrt(disc);
      out.depth(x, y) = t * d.z();
      out.valid(x, y) = 1;
    }
  }
  return out;
}

}  // namespace

TEST(AopFromAzimuth, WorkedValues) {
  EXPECT_NEAR(aop_from_azimuth(deg(30), ReflectionMode::diffuse), deg(30), 1e-15);
  EXPECT_NEAR(aop_from_azimuth(deg(30), ReflectionMode::specular), deg(120), 1e-14);
  EXPECT_NEAR(aop_from_azimuth(deg(210), ReflectionMode::diffuse), deg(30), 1e-14);
}

TEST(AopFromAzimuth, BranchesDifferByQuarterTurn) {
  for (int i = 0; i < 720; ++i) {
    const double phi = 2 * kPi * i / 720.0;
    const double d = aop_from_azimuth(phi, ReflectionMode::diffuse) - aop_from_azimuth(phi, ReflectionMode::specular);
    EXPECT_NEAR(aop_distance(d, kPi / 2), 0.0, 1e-12);
  }
}

TEST(FresnelDop, ZeroAtNormalIncidence) {
  for (double n : kIndices) {
    EXPECT_EQ(dop_diffuse(0.0, n), 0.0);
    EXPECT_EQ(dop_specular(0.0, n), 0.0);
  }
}

TEST(FresnelDop, MatchesHighPrecisionOracle) {
  for (const auto& s : golden::kFresnelSamples) {
    EXPECT_NEAR(dop_diffuse(deg(s.zenith_deg), s.n), s.diffuse, 1e-9) << s.zenith_deg << " " << s.n;
    EXPECT_NEAR(dop_specular(deg(s.zenith_deg), s.n), s.specular, 1e-9) << s.zenith_deg << " " << s.n;
  }
}

TEST(FresnelDop, BrewsterPeak) {
  for (double n : kIndices) {
    EXPECT_NEAR(dop_specular(std::atan(n), n), 1.0, 1e-9);
    // Locate the maximum independently: coarse grid, then golden-section search.
    double best = 0, best_z = 0;
    for (int i = 0; i <= 8900; ++i) {
      const double z = deg(i * 0.01);
      const double v = dop_specular(z, n);
      if (v > best) best = v, best_z = z;
    }
    double lo = best_z - deg(0.01), hi = best_z + deg(0.01);
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 200; ++it) {
      const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
      // dop_specular clamps at 1; compare the unclamped curve through its
      // reciprocal distance to the peak instead.
      auto f = [&](double z) {
        const double s2 = std::sin(z) * std::sin(z);
        return 2 * s2 * std::cos(z) * std::sqrt(n * n - s2) / (n * n - s2 - n * n * s2 + 2 * s2 * s2);
      };
      if (f(a) > f(b)) hi = b; else lo = a;
    }
    EXPECT_NEAR(0.5 * (lo + hi), std::atan(n), 1e-6);
  }
}

TEST(FresnelDop, RangeOnDenseGrid) {
  for (double n : kIndices) {
    for (int i = 0; i <= 899; ++i) {
      const double z = deg(i * 0.1);
      const double d = dop_diffuse(z, n), s = dop_specular(z, n);
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST(FresnelDop, DiffuseMonotone) {
  double prev = -1;
  for (int i = 0; i < 90; ++i) {
    const double v = dop_diffuse(deg(i), 1.5);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(FresnelDop, DomainErrors) {
  EXPECT_THROW(dop_diffuse(kPi / 2, 1.5), DomainError);
  EXPECT_THROW(dop_specular(2.0, 1.5), DomainError);
  EXPECT_THROW(dop_diffuse(-0.1, 1.5), DomainError);
  EXPECT_THROW(dop_diffuse(0.3, 1.0), DomainError);
  EXPECT_THROW((Material{1.0, ReflectionMode::diffuse}.validate()), ConfigError);
  EXPECT_THROW((Material{3.5, ReflectionMode::diffuse}.validate()), ConfigError);
  EXPECT_NO_THROW((Material{3.0, ReflectionMode::specular}.validate()));
}

TEST(Stereo, DepthDisparityWorkedValues) {
  CameraModel cam = centered_camera(4, 1, 1200.0, Vec3(0.04, 0, 0), 0.04);
  DisparityMap d{Map(4, 1), Mask(4, 1, 1, 1)};
  d.disparity[0] = 24.0;
  d.disparity[1] = 0.0;
  d.disparity[2] = 5e-5;
  d.disparity[3] = 12.0;
  const auto z = depth_from_disparity(d, cam);
  EXPECT_DOUBLE_EQ(z.depth[0], 2.0);
  EXPECT_FALSE(z.valid[1]);
  EXPECT_FALSE(z.valid[2]);
  EXPECT_DOUBLE_EQ(z.depth[3], 4.0);

  DepthMap zz{Map(2, 1), Mask(2, 1, 1, 1)};
  zz.depth[0] = 2.0;
  zz.depth[1] = 1e300;
  const auto back = disparity_from_depth(zz, cam);
  EXPECT_DOUBLE_EQ(back.disparity[0], 24.0);
  EXPECT_LT(back.disparity[1], 1e-290);
}

TEST(Stereo, ZeroBaselineThrows) {
  CameraModel cam = centered_camera(2, 2, 1000.0);
  EXPECT_THROW(depth_from_disparity({Map(2, 2), Mask(2, 2)}, cam), DomainError);
}

TEST(Stereo, RoundTripIsIdentity) {
  CameraModel cam = centered_camera(50, 40, 950.0, Vec3(-0.036, 0, 0), -0.036);
  DisparityMap d{Map(50, 40), Mask(50, 40, 1, 1)};
  for (std::size_t i = 0; i < d.disparity.size(); ++i) d.disparity[i] = 0.5 + 0.37 * (i % 97);
  const auto back = disparity_from_depth(depth_from_disparity(d, cam), cam);
  for (std::size_t i = 0; i < d.disparity.size(); ++i) {
    ASSERT_TRUE(back.valid[i]);
    EXPECT_NEAR(back.disparity[i], d.disparity[i], 1e-9);
  }
}

TEST(Stereo, PlaneDisparityMatchesProjection) {
  // Plane n . X = c in the reference frame; a left camera at -B sees
  // reference pixel u at u + f B / z(u).
  const int w = 64, h = 48;
  const double f = 1100, B = 0.04;
  CameraModel ref = centered_camera(w, h, f);
  CameraModel left = centered_camera(w, h, f, Vec3(-B, 0, 0), -B);
  const Vec3 n = Vec3(0.2, -0.1, 1.0).normalized();
  const double c = 2.5;
  DepthMap z{Map(w, h), Mask(w, h, 1, 1)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Vec3 r = ref.ray_camera(x, y);
      z.depth(x, y) = c / n.dot(r) * r.z();
    }
  }
  const auto d = disparity_from_depth(z, left);
  for (int y = 0; y < h; y += 5) {
    for (int x = 0; x < w; x += 5) {
      const Vec3 r = ref.ray_camera(x, y);
      const Vec3 p = r * (c / n.dot(r));
      const auto uv = left.project_camera(left.to_camera(p));
      EXPECT_NEAR(uv.x() - x, d.disparity(x, y), 1e-6);
      EXPECT_NEAR(uv.y(), y, 1e-9);
    }
  }
}

TEST(Normals, ConstantDepthFacesCamera) {
  CameraModel cam = centered_camera(16, 12, 500.0);
  DepthMap z{Map(16, 12, 1, 3.0), Mask(16, 12, 1, 1)};
  const auto n = normals_from_depth(z, cam);
  for (int y = 0; y < 12; ++y) {
    for (int x = 0; x < 16; ++x) {
      ASSERT_TRUE(n.valid(x, y));
      EXPECT_NEAR((n.at(x, y) - Vec3(0, 0, 1)).norm(), 0.0, 1e-12);
    }
  }
}

TEST(Normals, MetricRamp) {
  // z = z0 + X, so dz/dX = 1 and dz/dY = 0 in metric units.
  CameraModel cam = centered_camera(20, 10, 400.0);
  const double z0 = 2.0;
  DepthMap z{Map(20, 10), Mask(20, 10, 1, 1)};
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) z.depth(x, y) = z0 / (1.0 - (x - cam.cx) / cam.fx);
  const auto n = normals_from_depth(z, cam);
  const Vec3 expect = Vec3(-1, 0, 1) / std::sqrt(2.0);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 20; ++x) EXPECT_NEAR((n.at(x, y) - expect).norm(), 0.0, 1e-9);
}

TEST(Normals, IsolatedPixelInvalid) {
  CameraModel cam = centered_camera(3, 3, 100.0);
  DepthMap z{Map(3, 3, 1, 1.0), Mask(3, 3)};
  z.valid(1, 1) = 1;
  const auto n = normals_from_depth(z, cam);
  EXPECT_FALSE(n.valid(1, 1));
}

TEST(Normals, SphereCloseToClosedForm) {
  const int w = 128, h = 128;
  CameraModel cam = centered_camera(w, h, 300.0);
  const Vec3 c(0.05, -0.03, 2.0);
  const double r = 0.5;
  const auto z = sphere_depth(cam, w, h, c, r);
  const auto n = normals_from_depth(z, cam);
  double sum = 0;
  int count = 0;
  for (int y = 2; y < h - 2; ++y) {
    for (int x = 2; x < w - 2; ++x) {
      bool interior = true;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) interior = interior && z.valid(x + dx, y + dy);
      if (!interior) continue;
      ASSERT_TRUE(n.valid(x, y));
      EXPECT_NEAR(n.at(x, y).norm(), 1.0, 1e-12);
      EXPECT_GT(n.at(x, y).z(), 0.0);
      const Vec3 d = cam.ray_camera(x, y);
      const Vec3 p = d * (z.depth(x, y) / d.z());
      const Vec3 truth = (c - p).normalized();
      sum += std::acos(std::clamp(truth.dot(n.at(x, y)), -1.0, 1.0));
      ++count;
    }
  }
  ASSERT_GT(count, 1000);
  EXPECT_LT(sum / count * 180 / kPi, 1.0);
}

TEST(Plucker, WorkedValues) {
  CameraModel cam = centered_camera(5, 5, 100.0);
  auto rays = plucker_rays(cam, 5, 5);
  EXPECT_NEAR((rays.direction_at(2, 2) - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_EQ(rays.moment_at(2, 2).norm(), 0.0);
  cam.center = Vec3(1, 0, 0);
  rays = plucker_rays(cam, 5, 5);
  EXPECT_NEAR((rays.moment_at(2, 2) - Vec3(0, -1, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(rays.direction_at(2, 2).dot(rays.moment_at(2, 2)), 0.0, 1e-15);
}

TEST(Plucker, ExhaustiveUnitAndOrthogonal) {
  CameraModel cam = centered_camera(64, 48, 700.0, Vec3(0.3, -1.2, 4.0));
  cam.rotation = Eigen::AngleAxisd(0.3, Vec3(0.2, 1.0, -0.4).normalized()).toRotationMatrix();
  cam.validate();
  const auto rays = plucker_rays(cam, 64, 48);
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      EXPECT_NEAR(rays.direction_at(x, y).norm(), 1.0, 1e-9);
      EXPECT_NEAR(rays.direction_at(x, y).dot(rays.moment_at(x, y)), 0.0, 1e-9);
    }
  }
}

TEST(CameraModel, Validation) {
  CameraModel cam;
  cam.fx = 0;
  EXPECT_THROW(cam.validate(), ConfigError);
  cam.fx = 100;
  cam.rotation(0, 1) = 0.1;
  EXPECT_THROW(cam.validate(), ConfigError);
}

TEST(ZenithAzimuth, AxisAnchors) {
  double z, a;
  const Vec3 view = Vec3(0.1, -0.2, 1.0).normalized();
  zenith_azimuth_at(view, view, z, a);
  EXPECT_NEAR(z, 0.0, 1e-15);
  zenith_azimuth_at(-view, view, z, a);
  EXPECT_NEAR(z, 0.0, 1e-15);
  zenith_azimuth_at(Vec3(1, 0, 1).normalized(), Vec3(0, 0, 1), z, a);
  EXPECT_EQ(a, 0.0);
  EXPECT_NEAR(z, kPi / 4, 1e-15);
  zenith_azimuth_at(Vec3(0, 1, 1).normalized(), Vec3(0, 0, 1), z, a);
  EXPECT_NEAR(a, kPi / 2, 1e-15);
  zenith_azimuth_at(Vec3(0, -1, 1).normalized(), Vec3(0, 0, 1), z, a);
  EXPECT_NEAR(a, 1.5 * kPi, 1e-15);
}

TEST(ZenithAzimuth, SphereMatchesClosedForm) {
  const int w = 96, h = 96;
  CameraModel cam = centered_camera(w, h, 250.0);
  const Vec3 c(0, 0, 2.0);
  const double r = 0.6;
  const auto z = sphere_depth(cam, w, h, c, r);
  NormalMap normals{Map(w, h, 3), Mask(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!z.valid(x, y)) continue;
      const Vec3 d = cam.ray_camera(x, y);
      normals.set(x, y, (c - d * (z.depth(x, y) / d.z())).normalized());
      normals.valid(x, y) = 1;
    }
  }
  const auto za = zenith_azimuth(normals, plucker_rays(cam, w, h), cam);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!normals.valid(x, y)) continue;
      const Vec3 n = normals.at(x, y);
      double phi = std::atan2(n.y(), n.x());
      if (phi < 0) phi += 2 * kPi;
      EXPECT_NEAR(std::fmod(std::fabs(za.azimuth(x, y) - phi) + kPi, 2 * kPi) - kPi, 0.0, 1e-6);
      const double zen = std::acos(std::clamp(n.dot(cam.ray_camera(x, y)), -1.0, 1.0));
      EXPECT_NEAR(za.zenith(x, y), zen, 1e-6);
      EXPECT_GE(za.azimuth(x, y), 0.0);
      EXPECT_LT(za.azimuth(x, y), 2 * kPi);
    }
  }
}
