// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <random>

#include "polarbench/io/artifacts.hpp"
#include "polarbench/io/pfm.hpp"
#include "polarbench/io/png.hpp"
#include "polarbench/io/scene_json.hpp"

using namespace polarbench;
using namespace polarbench::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("polarbench_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST(Pfm, RoundTripIsBitExactForFloats) {
  const auto dir = scratch("pfm");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> u(-10, 10);
  Map m(13, 7);
  for (double& v : m.values()) v = u(rng);
  m(0, 0) = std::numeric_limits<float>::infinity();
  m(1, 0) = -0.0f;
  write_pfm(dir / "a.pfm", m);
  const Map r = read_pfm(dir / "a.pfm");
  ASSERT_TRUE(r.same_shape(m));
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(r[i]), std::bit_cast<std::uint64_t>(m[i]));
  }
  write_pfm(dir / "b.pfm", r);
  EXPECT_EQ(slurp(dir / "a.pfm"), slurp(dir / "b.pfm"));
}

TEST(Pfm, LayoutIsLittleEndianBottomUp) {
  const auto dir = scratch("pfm_layout");
  Map m(2, 2);
  m(0, 0) = 1;
  m(1, 0) = 2;
  m(0, 1) = 3;
  m(1, 1) = 4;
  write_pfm(dir / "m.pfm", m);
  const std::string bytes = slurp(dir / "m.pfm");
  const std::string header = "Pf\n2 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  float first;
  std::memcpy(&first, bytes.data() + header.size(), 4);  // host is little-endian in CI
  EXPECT_EQ(first, 3.0f);
}

TEST(Pfm, ReadsBigEndianAndRejectsGarbage) {
  const auto dir = scratch("pfm_be");
  {
    std::ofstream out(dir / "be.pfm", std::ios::binary);
    out << "Pf\n1 1\n1.0\n";
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(2.5f);
    const unsigned char be[4] = {static_cast<unsigned char>(bits >> 24), static_cast<unsigned char>(bits >> 16),
                                 static_cast<unsigned char>(bits >> 8), static_cast<unsigned char>(bits)};
    out.write(reinterpret_cast<const char*>(be), 4);
  }
  EXPECT_EQ(read_pfm(dir / "be.pfm")(0, 0), 2.5);
  {
    std::ofstream out(dir / "bad.pfm", std::ios::binary);
    out << "PF\n1 1\n-1.0\n";
  }
  EXPECT_THROW(read_pfm(dir / "bad.pfm"), IoError);
  {
    std::ofstream out(dir / "short.pfm", std::ios::binary);
    out << "Pf\n4 4\n-1.0\nab";
  }
  EXPECT_THROW(read_pfm(dir / "short.pfm"), IoError);
  EXPECT_THROW(read_pfm(dir / "missing.pfm"), IoError);
}

TEST(Png, RoundTripAndVisuals) {
  const auto dir = scratch("png");
  Map aop(4, 2), dop(4, 2, 1, 1.0);
  Mask valid(4, 2, 1, 1);
  for (int x = 0; x < 4; ++x) aop(x, 0) = aop(x, 1) = x * kPi / 4;
  valid(3, 1) = 0;
  const Rgb8 v = aop_visual(aop, dop, valid);
  // Hue 0 is red, hue 1/4 (AoP 45 deg) yellow-green, invalid black.
  EXPECT_EQ(v.data[0], 255);
  EXPECT_EQ(v.data[1], 0);
  EXPECT_EQ(v.data[2], 0);
  const std::size_t last = (1 * 4 + 3) * 3;
  EXPECT_EQ(v.data[last] + v.data[last + 1] + v.data[last + 2], 0);
  write_png(dir / "a.png", v);
  const Rgb8 r = read_png(dir / "a.png");
  EXPECT_EQ(r.width, 4);
  EXPECT_EQ(r.height, 2);
  EXPECT_EQ(r.channels, 3);
  EXPECT_EQ(r.data, v.data);
  const Rgb8 g = gray_visual(dop, 0.0, 2.0);
  EXPECT_EQ(g.data[0], 128);
  write_png(dir / "g.png", g);
  EXPECT_EQ(read_png(dir / "g.png").data, g.data);
  // Zero DoP washes out to white.
  const Rgb8 w = aop_visual(aop, Map(4, 2), valid);
  EXPECT_EQ(w.data[3], 255);
  EXPECT_EQ(w.data[4], 255);
  EXPECT_EQ(w.data[5], 255);
}

TEST(Manifest, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Manifest, WriteReadAndMissingRole) {
  const auto dir = scratch("manifest");
  {
    std::ofstream(dir / "x.txt") << "abc";
  }
  RunManifest m;
  m.kind = "test";
  m.tool_version = "1";
  m.config_hash = "h";
  m.add(dir, "x", "x.txt");
  m.metadata["k"] = 3;
  m.write(dir);
  const RunManifest r = RunManifest::read(dir);
  EXPECT_EQ(r.kind, "test");
  EXPECT_EQ(r.require("x").sha256, sha256_hex("abc"));
  EXPECT_EQ(r.require("x").bytes, 3u);
  EXPECT_EQ(r.metadata["k"], 3);
  EXPECT_THROW(r.require("y"), IoError);
  EXPECT_THROW(RunManifest::read(dir / "nope"), IoError);
}

TEST(SceneJson, LibraryScenesRoundTrip) {
  for (const auto& spec : scene_library(3, 48)) {
    const std::string text = scene_to_json(spec).dump(2);
    const SceneSpec back = scene_from_json_text(text);
    EXPECT_EQ(scene_to_json(back).dump(2), text) << spec.name;
    const auto a = render_view(spec, spec.reference), b = render_view(back, back.reference);
    EXPECT_EQ(a.i_un, b.i_un) << spec.name;
    EXPECT_EQ(a.params.aop, b.params.aop) << spec.name;
  }
}

TEST(SceneJson, CompactRigForm) {
  const std::string text = R"({
    "name": "ball",
    "width": 32, "height": 24,
    "primitives": [
      {"type": "sphere", "center": [0, 0, 2], "radius": 0.2,
       "material": {"refractive_index": 1.6, "mode": "specular"},
       "albedo": {"kind": "checker", "a": 0.2, "b": 0.8, "period": 0.05}}
    ],
    "rig": {"focal_px": 300, "baseline_m": 0.04}
  })";
  const SceneSpec s = scene_from_json_text(text);
  EXPECT_EQ(s.rig.size(), 3u);
  EXPECT_EQ(s.reference, 1);
  EXPECT_EQ(s.rig[2].polarizer, PolarizerAngle::degrees(45));
  EXPECT_EQ(std::get<Sphere>(s.primitives[0].shape).radius, 0.2);
  EXPECT_EQ(s.primitives[0].material.mode, ReflectionMode::specular);
}

TEST(SceneJson, ErrorsAreLineAnchored) {
  const std::string unknown = "{\n  \"name\": \"x\",\n  \"primitives\": [],\n  \"colour\": 1\n}";
  try {
    scene_from_json_text(unknown, "s.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("s.json:4:", 0), 0u) << e.what();
  }
  try {
    scene_from_json_text("{\n\"name\": \"x\",,\n}", "t.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("t.json:2:", 0), 0u) << e.what();
  }
  const std::string bad_type = "{\n \"primitives\": [{\"type\": \"cube\"}],\n \"rig\": {\"focal_px\": 1, \"baseline_m\": 1}\n}";
  EXPECT_THROW(scene_from_json_text(bad_type), ConfigError);
  const std::string bad_radius =
      R"({"primitives": [{"type": "sphere", "center": [0,0,2], "radius": -1}], "rig": {"focal_px": 100, "baseline_m": 0.04}})";
  EXPECT_THROW(scene_from_json_text(bad_radius), ConfigError);
}

TEST(Artifacts, BundleRoundTrip) {
  const auto dir = scratch("bundle");
  const SceneBundle b = render_rig(library_scene("two_planes", 0, 32));
  RunManifest man;
  write_bundle(dir, b, man);
  man.write(dir);
  const SceneBundle r = read_bundle(dir);
  ASSERT_EQ(r.views.size(), b.views.size());
  for (std::size_t k = 0; k < b.views.size(); ++k) {
    for (std::size_t i = 0; i < b.views[k].i_un.size(); ++i) {
      EXPECT_EQ(r.views[k].i_un[i], static_cast<double>(static_cast<float>(b.views[k].i_un[i])));
    }
    EXPECT_EQ(r.views[k].params.valid, b.views[k].params.valid);
    EXPECT_EQ(r.views[k].occlusion, b.views[k].occlusion);
    EXPECT_EQ(r.views[k].primitive, b.views[k].primitive);
    EXPECT_EQ(r.views[k].normals.n.channels(), 3);
  }
  EXPECT_EQ(r.ref_occlusion, b.ref_occlusion);
  EXPECT_EQ(r.spec.name, "two_planes");
  fs::remove(dir / "view1_dop.pfm");
  try {
    read_bundle(dir);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("view1_dop.pfm"), std::string::npos);
  }
}

TEST(Artifacts, CaptureRoundTrips) {
  const auto dir = scratch("captures");
  const SceneBundle b = render_rig(library_scene("sphere_on_plane", 0, 32));
  NoiseModel n;
  n.seed = 5;
  RunManifest m1, m2, m3;
  const CaptureSet c = capture_easypolar(b, n, {CameraResponse::scalar(0.9, 0.01), {}, {}});
  write_capture_easypolar(dir / "e", c, m1);
  m1.write(dir / "e");
  const CaptureSet cr = read_capture_easypolar(dir / "e");
  EXPECT_EQ(cr.rig[2].center, c.rig[2].center);
  EXPECT_EQ(cr.noise.seed, 5u);
  EXPECT_EQ(cr.mismatch.left.gain(0, 0), 0.9);
  EXPECT_EQ(cr.i0_left.width(), 32);
  write_capture_dofp(dir / "f", capture_dofp(b, n), m2);
  m2.write(dir / "f");
  EXPECT_EQ(read_capture_dofp(dir / "f").pattern, default_mosaic_pattern());
  EXPECT_EQ(m2.artifacts.size(), 1u);
  write_capture_dot(dir / "d", capture_dot(b, n, Eigen::Vector2d(0.5, 0.25)), m3);
  m3.write(dir / "d");
  EXPECT_EQ(read_capture_dot(dir / "d").drift, Eigen::Vector2d(0.5, 0.25));
  EXPECT_EQ(m3.artifacts.size(), 4u);
  EXPECT_THROW(read_capture_dofp(dir / "d"), IoError);
}
