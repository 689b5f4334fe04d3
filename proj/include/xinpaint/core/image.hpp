/*
Copyright 2026 The xinpaint Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef XINPAINT_CORE_IMAGE_HPP_
#define XINPAINT_CORE_IMAGE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/grid.hpp"

namespace xinpaint {

// H x W x C intensities in [0, 1], row-major with interleaved channels.
// Channels is 1 (gray) or 3 (RGB).
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    check_shape();
    check_value(fill);
    data_.assign(expected_size(), fill);
  }

  ImageBuffer(int width, int height, int channels, std::vector<double> data)
      : width_(width), height_(height), channels_(channels),
        data_(std::move(data)) {
    check_shape();
    if (data_.size() != expected_size()) {
      throw DimensionMismatch(
          "image of " + shape_string(width, height) + "x" +
          std::to_string(channels) + " needs " +
          std::to_string(expected_size()) + " samples, got " +
          std::to_string(data_.size()));
    }
    for (double v : data_) check_value(v);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  double at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  void set(int x, int y, int c, double v) {
    check_value(v);
    data_[index(x, y, c)] = v;
  }

  std::span<const double> data() const { return data_; }

  bool same_shape(const ImageBuffer& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  std::string shape() const {
    return shape_string(width_, height_) + "x" + std::to_string(channels_);
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t expected_size() const {
    return static_cast<std::size_t>(width_) * height_ * channels_;
  }
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  void check_shape() const {
    if (width_ < 1 || height_ < 1) {
      throw InvalidArgument("image dimensions must be positive, got " +
                            shape_string(width_, height_));
    }
    if (channels_ != 1 && channels_ != 3) {
      throw InvalidArgument("image must have 1 or 3 channels, got " +
                            std::to_string(channels_));
    }
  }
  static void check_value(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("intensity outside [0,1]: " + std::to_string(v));
    }
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Binary grid; 1 = masked/unknown, 0 = known.
class MaskGrid {
 public:
  MaskGrid() = default;
  MaskGrid(int width, int height, bool fill = false)
      : grid_(width, height, fill ? 1 : 0) {}
  MaskGrid(int width, int height, std::vector<std::uint8_t> cells)
      : grid_(width, height, std::move(cells)) {
    for (std::uint8_t c : grid_.cells()) {
      if (c > 1) {
        throw InvalidArgument("mask cells must be 0 or 1, got " +
                              std::to_string(c));
      }
    }
  }

  int width() const { return grid_.width(); }
  int height() const { return grid_.height(); }
  std::size_t size() const { return grid_.size(); }

  bool at(int x, int y) const { return grid_.at(x, y) != 0; }
  bool clamped(int x, int y) const { return grid_.clamped(x, y) != 0; }
  void set(int x, int y, bool v) { grid_.at(x, y) = v ? 1 : 0; }

  std::span<const std::uint8_t> cells() const { return grid_.cells(); }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint8_t c : grid_.cells()) n += c;
    return n;
  }

  bool same_shape(const MaskGrid& other) const {
    return grid_.same_shape(other.grid_);
  }

  friend bool operator==(const MaskGrid&, const MaskGrid&) = default;

 private:
  Grid<std::uint8_t> grid_;
};

// Per-pixel class identifiers.
using SemanticMap = Grid<std::uint32_t>;

inline void require_same_dims(const ImageBuffer& image, const MaskGrid& mask,
                              const char* what) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw DimensionMismatch(std::string(what) + ": image is " +
                            shape_string(image.width(), image.height()) +
                            " but mask is " +
                            shape_string(mask.width(), mask.height()));
  }
}

}  // namespace xinpaint

#endif  // XINPAINT_CORE_IMAGE_HPP_
