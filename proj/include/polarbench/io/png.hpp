// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "polarbench/image.hpp"

namespace polarbench::io {

struct Rgb8 {
  int width = 0;
  int height = 0;
  int channels = 3;  // 1 gray, 3 rgb
  std::vector<std::uint8_t> data;  // interleaved, rows top-down
};

void write_png(const std::filesystem::path& path, const Rgb8& img);
Rgb8 read_png(const std::filesystem::path& path);

/// Linear gray: lo -> 0, hi -> 255, clamped. Invalid pixels are black.
Rgb8 gray_visual(const Map& m, double lo, double hi, const Mask* valid = nullptr);

/// Cyclic hue over [0, pi), saturation = DoP, full value; invalid pixels black.
Rgb8 aop_visual(const Map& aop, const Map& dop, const Mask& valid);

}  // namespace polarbench::io
