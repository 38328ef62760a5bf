// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polarbench/error.hpp"

namespace polarbench {

/// Planar multi-channel pixel grid. Channel c occupies the contiguous range
/// [c * width * height, (c + 1) * width * height), rows top to bottom.
template <class T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw ShapeError("grid dimensions must be non-negative with at least one channel");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& operator()(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::span<T> plane(int c) { return std::span<T>(data_).subspan(c * plane_size(), plane_size()); }
  std::span<const T> plane(int c) const {
    return std::span<const T>(data_).subspan(c * plane_size(), plane_size());
  }

  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  template <class U>
  bool same_shape(const Grid<U>& other) const {
    return width_ == other.width() && height_ == other.height() && channels_ == other.channels();
  }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
  }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using Map = Grid<double>;
using Mask = Grid<std::uint8_t>;

template <class A, class B>
void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a.width()) + "x" +
                     std::to_string(a.height()) + "x" + std::to_string(a.channels()) + " vs " +
                     std::to_string(b.width()) + "x" + std::to_string(b.height()) + "x" +
                     std::to_string(b.channels()) + ")");
  }
}

/// Linear radiance image, white level 1.0, no gamma. Values are finite and
/// non-negative; the constructors from raw grids enforce that.
class IntensityImage : public Grid<double> {
 public:
  IntensityImage() = default;
  IntensityImage(int width, int height, int channels = 1, double fill = 0.0)
      : Grid<double>(width, height, channels, fill) {
    check();
  }
  explicit IntensityImage(Grid<double> grid) : Grid<double>(std::move(grid)) { check(); }

 private:
  void check() const {
    for (double v : values()) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError("intensity image holds a negative or non-finite value");
      }
    }
  }
};

}  // namespace polarbench
