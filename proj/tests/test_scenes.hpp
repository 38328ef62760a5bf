// SPDX-License-Identifier: Apache-2.0
// Small hand-built scenes shared by the test suites.
#pragma once

#include "polarbench/scene_synth.hpp"

namespace polarbench::testing {

// Fronto-parallel plane at depth z filling the view; integer disparity when
// f * B / z is an integer.
inline SceneSpec plane_rig(int w, int h, double f, double B, double z, Texture tex, Material m = {}) {
  SceneSpec s;
  s.width = w;
  s.height = h;
  s.primitives = {Primitive{Plane{Vec3(0, 0, z), Vec3(0, 0, -1), std::nullopt}, m, tex}};
  s.background_depth = 2 * z;
  set_easypolar_rig(s, f, B);
  return s;
}

// Plane tilted about the vertical axis, so it carries a uniform nonzero DoP.
inline SceneSpec tilted_plane_rig(int w, int h, double f, double B, double z, double tilt, Texture tex,
                                  Material m = {}) {
  SceneSpec s = plane_rig(w, h, f, B, z, tex, m);
  std::get<Plane>(s.primitives[0].shape).normal = Vec3(std::sin(tilt), 0, -std::cos(tilt));
  return s;
}

// Overwrite the stored polarization of every view with constants.
inline void set_uniform_polarization(SceneBundle& b, double dop, double aop) {
  for (auto& v : b.views) {
    for (double& p : v.params.dop.values()) p = dop;
    for (double& p : v.params.aop.values()) p = aop;
    for (auto& m : v.params.valid.values()) m = 1;
  }
}

}  // namespace polarbench::testing
