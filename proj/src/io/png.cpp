// SPDX-License-Identifier: Apache-2.0
#include "polarbench/io/png.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "polarbench/polar_core.hpp"

namespace polarbench::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

void write_png(const std::filesystem::path& path, const Rgb8& img) {
  if (img.channels != 1 && img.channels != 3) throw ShapeError("write_png: 1 or 3 channels");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
    throw ShapeError("write_png: buffer size mismatch");
  }
  FilePtr f(std::fopen(path.c_str(), "wb"));
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing '" + path.string() + "'");
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width, img.height, 8, img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  for (int y = 0; y < img.height; ++y) png_write_row(png, img.data.data() + y * stride);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Rgb8 read_png(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng failed reading '" + path.string() + "'");
  }
  png_init_io(png, f.get());
  png_read_png(png, info, PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_EXPAND,
               nullptr);
  Rgb8 img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  const auto rows = png_get_rows(png, info);
  const std::size_t stride = static_cast<std::size_t>(img.width) * img.channels;
  img.data.resize(stride * img.height);
  for (int y = 0; y < img.height; ++y) std::copy(rows[y], rows[y] + stride, img.data.begin() + y * stride);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

Rgb8 gray_visual(const Map& m, double lo, double hi, const Mask* valid) {
  if (!(hi > lo)) throw DomainError("gray_visual: empty range");
  Rgb8 img{m.width(), m.height(), 1, std::vector<std::uint8_t>(m.plane_size())};
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      if (valid && !(*valid)(x, y)) continue;
      img.data[static_cast<std::size_t>(y) * m.width() + x] = to_byte((m(x, y) - lo) / (hi - lo));
    }
  }
  return img;
}

Rgb8 aop_visual(const Map& aop, const Map& dop, const Mask& valid) {
  require_same_shape(aop, dop, "aop_visual");
  Rgb8 img{aop.width(), aop.height(), 3, std::vector<std::uint8_t>(aop.plane_size() * 3)};
  for (int y = 0; y < aop.height(); ++y) {
    for (int x = 0; x < aop.width(); ++x) {
      if (!valid(x, y)) continue;
      // HSV with V = 1.
      const double h = wrap_pi(aop(x, y)) / kPi * 6.0;
      const double s = std::clamp(dop(x, y), 0.0, 1.0);
      const int sector = std::min(static_cast<int>(h), 5);
      const double f = h - sector;
      const double p = 1.0 - s, q = 1.0 - s * f, t = 1.0 - s * (1.0 - f);
      double r = 1, g = 1, b = 1;
      switch (sector) {
        case 0: r = 1; g = t; b = p; break;
        case 1: r = q; g = 1; b = p; break;
        case 2: r = p; g = 1; b = t; break;
        case 3: r = p; g = q; b = 1; break;
        case 4: r = t; g = p; b = 1; break;
        default: r = 1; g = p; b = q; break;
      }
      std::uint8_t* px = img.data.data() + (static_cast<std::size_t>(y) * aop.width() + x) * 3;
      px[0] = to_byte(r);
      px[1] = to_byte(g);
      px[2] = to_byte(b);
    }
  }
  return img;
}

}  // namespace polarbench::io
