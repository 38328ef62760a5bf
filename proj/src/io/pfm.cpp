// SPDX-License-Identifier: Apache-2.0
#include "polarbench/io/pfm.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace polarbench::io {

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

void write_floats(const std::filesystem::path& path, int w, int h, const std::vector<float>& rows_top_down) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "Pf\n" << w << " " << h << "\n-1.0\n";
  std::vector<std::uint32_t> row(static_cast<std::size_t>(w));
  for (int y = h - 1; y >= 0; --y) {
    for (int x = 0; x < w; ++x) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(rows_top_down[static_cast<std::size_t>(y) * w + x]);
      if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
      row[x] = bits;
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 4));
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Map& m, int channel) {
  if (channel < 0 || channel >= m.channels()) throw ShapeError("write_pfm: channel out of range");
  const auto plane = m.plane(channel);
  write_floats(path, m.width(), m.height(), std::vector<float>(plane.begin(), plane.end()));
}

void write_pfm(const std::filesystem::path& path, const Mask& m) {
  std::vector<float> v(m.plane_size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = m[i] ? 1.0f : 0.0f;
  write_floats(path, m.width(), m.height(), v);
}

Map read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string magic;
  int w = 0, h = 0;
  double scale = 0.0;
  in >> magic >> w >> h >> scale;
  if (!in || magic != "Pf") throw IoError("'" + path.string() + "' is not a single-channel PFM");
  if (w <= 0 || h <= 0 || scale == 0.0) throw IoError("'" + path.string() + "' has a malformed PFM header");
  in.get();  // single whitespace before the raster
  const bool little = scale < 0.0;
  const bool swap = little != (std::endian::native == std::endian::little);
  std::vector<std::uint32_t> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
  if (in.gcount() != static_cast<std::streamsize>(raw.size() * 4)) throw IoError("'" + path.string() + "' is truncated");
  Map m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::uint32_t bits = raw[static_cast<std::size_t>(h - 1 - y) * w + x];
      if (swap) bits = byteswap32(bits);
      m(x, y) = std::bit_cast<float>(bits);
    }
  }
  return m;
}

Mask read_pfm_mask(const std::filesystem::path& path) {
  const Map m = read_pfm(path);
  Mask out(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] != 0.0;
  return out;
}

}  // namespace polarbench::io
