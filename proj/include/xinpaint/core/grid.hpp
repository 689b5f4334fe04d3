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

#ifndef XINPAINT_CORE_GRID_HPP_
#define XINPAINT_CORE_GRID_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xinpaint/core/error.hpp"

namespace xinpaint {

// Row-major 2D array of single-valued cells.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw InvalidArgument("grid dimensions must be positive, got " +
                            std::to_string(width) + "x" +
                            std::to_string(height));
    }
    cells_.assign(static_cast<std::size_t>(width) * height, fill);
  }
  Grid(int width, int height, std::vector<T> cells)
      : Grid(width, height) {
    if (cells.size() != cells_.size()) {
      throw DimensionMismatch("grid of " + std::to_string(width) + "x" +
                              std::to_string(height) + " needs " +
                              std::to_string(cells_.size()) + " cells, got " +
                              std::to_string(cells.size()));
    }
    cells_ = std::move(cells);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }

  T& at(int x, int y) { return cells_[index(x, y)]; }
  const T& at(int x, int y) const { return cells_[index(x, y)]; }

  // Coordinates outside the grid are clamped to the nearest border cell.
  const T& clamped(int x, int y) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }

  std::span<T> cells() { return cells_; }
  std::span<const T> cells() const { return cells_; }
  std::span<const T> row(int y) const {
    return std::span<const T>(cells_).subspan(
        static_cast<std::size_t>(y) * width_, width_);
  }

  bool same_shape(const Grid& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

inline std::string shape_string(int width, int height) {
  return std::to_string(width) + "x" + std::to_string(height);
}

}  // namespace xinpaint

#endif  // XINPAINT_CORE_GRID_HPP_
