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

// Procedural mask families (box, cellular automata, free-form strokes) and
// the binary morphology they are built from.

#ifndef XINPAINT_MASKGEN_HPP_
#define XINPAINT_MASKGEN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/image.hpp"
#include "xinpaint/core/rng.hpp"

namespace xinpaint {

enum class MaskType { kBox, kCellularAutomata, kFreeForm };

inline constexpr std::array<MaskType, 3> kAllMaskTypes = {
    MaskType::kBox, MaskType::kCellularAutomata, MaskType::kFreeForm};

inline std::string_view to_string(MaskType type) {
  switch (type) {
    case MaskType::kBox:
      return "box";
    case MaskType::kCellularAutomata:
      return "cellular_automata";
    case MaskType::kFreeForm:
      return "free_form";
  }
  return "unknown";
}

// Accepts the canonical names plus the short command-line spellings.
inline MaskType parse_mask_type(std::string_view name) {
  if (name == "box") return MaskType::kBox;
  if (name == "cellular_automata" || name == "ca") {
    return MaskType::kCellularAutomata;
  }
  if (name == "free_form" || name == "freeform") return MaskType::kFreeForm;
  throw InvalidArgument("unknown mask type '" + std::string(name) + "'");
}

template <typename T>
struct Interval {
  T low;
  T high;

  bool contains(T v) const { return low <= v && v <= high; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct BoxParams {
  // Per-axis extent of the rectangle as a fraction of the image dimension.
  Interval<double> fraction_range{0.30, 0.70};

  void validate() const {
    if (!(fraction_range.low > 0.0 && fraction_range.low <= fraction_range.high &&
          fraction_range.high <= 1.0)) {
      throw InvalidArgument("box fraction_range must satisfy 0 < low <= high <= 1");
    }
  }
  friend bool operator==(const BoxParams&, const BoxParams&) = default;
};

struct CaParams {
  int downscale = 1;  // one of 1, 2, 4, 8
  int steps = 2;      // 2..5 majority-vote iterations
  double init_density = 0.5;
  int dilation_radius = 1;

  void validate() const {
    if (downscale != 1 && downscale != 2 && downscale != 4 && downscale != 8) {
      throw InvalidArgument("ca downscale must be 1, 2, 4 or 8, got " +
                            std::to_string(downscale));
    }
    if (steps < 2 || steps > 5) {
      throw InvalidArgument("ca steps must be in [2, 5], got " +
                            std::to_string(steps));
    }
    if (!(init_density >= 0.0 && init_density <= 1.0)) {
      throw InvalidArgument("ca init_density must be in [0, 1]");
    }
    if (dilation_radius < 0) {
      throw InvalidArgument("ca dilation_radius must be >= 0");
    }
  }

  // Draws downscale uniformly from {1,2,4,8} and steps from {2..5}.
  static CaParams sample(SeededRng& rng, double init_density = 0.5,
                         int dilation_radius = 1) {
    static constexpr std::array<int, 4> kFactors = {1, 2, 4, 8};
    CaParams p;
    p.downscale = kFactors[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    p.steps = static_cast<int>(rng.uniform_int(2, 5));
    p.init_density = init_density;
    p.dilation_radius = dilation_radius;
    return p;
  }

  friend bool operator==(const CaParams&, const CaParams&) = default;
};

// Lengths and widths are fractions of min(width, height).
struct BrushParams {
  Interval<int> stroke_count{1, 4};
  Interval<int> vertices{4, 12};
  Interval<double> segment_length{0.04, 0.15};
  Interval<double> brush_width{0.04, 0.15};
  double angle_jitter = std::numbers::pi / 4;

  void validate() const {
    if (stroke_count.low < 0 || stroke_count.low > stroke_count.high) {
      throw InvalidArgument("brush stroke_count must satisfy 0 <= low <= high");
    }
    if (vertices.low < 1 || vertices.low > vertices.high) {
      throw InvalidArgument("brush vertices must satisfy 1 <= low <= high");
    }
    if (!(segment_length.low > 0.0 && segment_length.low <= segment_length.high)) {
      throw InvalidArgument("brush segment_length must satisfy 0 < low <= high");
    }
    if (!(brush_width.low > 0.0 && brush_width.low <= brush_width.high)) {
      throw InvalidArgument("brush brush_width must satisfy 0 < low <= high");
    }
    if (!(angle_jitter >= 0.0)) {
      throw InvalidArgument("brush angle_jitter must be >= 0");
    }
  }
  friend bool operator==(const BrushParams&, const BrushParams&) = default;
};

// ---------------------------------------------------------------------------
// Morphology and resampling

inline double missing_fraction(const MaskGrid& mask) {
  return static_cast<double>(mask.count()) / static_cast<double>(mask.size());
}

// One majority-vote step over the 3x3 neighborhood, center included. Borders
// use replicate padding so every cell sees exactly nine votes.
inline MaskGrid ca_step(const MaskGrid& grid) {
  const int w = grid.width();
  const int h = grid.height();
  // Column sums of three vertically adjacent cells, then a horizontal pass.
  std::vector<std::uint8_t> vsum(static_cast<std::size_t>(w) * h);
  const auto cells = grid.cells();
  for (int y = 0; y < h; ++y) {
    const std::size_t up = static_cast<std::size_t>(std::max(y - 1, 0)) * w;
    const std::size_t mid = static_cast<std::size_t>(y) * w;
    const std::size_t down = static_cast<std::size_t>(std::min(y + 1, h - 1)) * w;
    for (int x = 0; x < w; ++x) {
      vsum[mid + x] = static_cast<std::uint8_t>(cells[up + x] + cells[mid + x] +
                                                cells[down + x]);
    }
  }
  std::vector<std::uint8_t> out(vsum.size());
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const int votes = vsum[row + std::max(x - 1, 0)] + vsum[row + x] +
                        vsum[row + std::min(x + 1, w - 1)];
      out[row + x] = votes >= 5 ? 1 : 0;
    }
  }
  return MaskGrid(w, h, std::move(out));
}

namespace morph_detail {

// 1D running-window OR of length 2r+1 over n cells spaced `stride` apart.
inline void dilate_line(const std::uint8_t* src, std::uint8_t* dst, int n,
                        std::size_t stride, int radius) {
  int in_window = 0;
  // Window for position 0 covers [0, radius].
  for (int i = 0; i <= std::min(radius, n - 1); ++i) in_window += src[i * stride];
  for (int i = 0; i < n; ++i) {
    dst[i * stride] = in_window > 0 ? 1 : 0;
    const int enter = i + radius + 1;
    const int leave = i - radius;
    if (enter < n) in_window += src[enter * stride];
    if (leave >= 0) in_window -= src[leave * stride];
  }
}

}  // namespace morph_detail

// Binary dilation with a (2r+1)x(2r+1) square element. Cells outside the
// grid count as 0.
inline MaskGrid dilate(const MaskGrid& grid, int radius) {
  if (radius < 0) {
    throw InvalidArgument("dilation radius must be >= 0, got " +
                          std::to_string(radius));
  }
  if (radius == 0) return grid;
  const int w = grid.width();
  const int h = grid.height();
  const auto cells = grid.cells();
  std::vector<std::uint8_t> horiz(cells.size());
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    morph_detail::dilate_line(cells.data() + row, horiz.data() + row, w, 1,
                              radius);
  }
  std::vector<std::uint8_t> out(cells.size());
  for (int x = 0; x < w; ++x) {
    morph_detail::dilate_line(horiz.data() + x, out.data() + x, h,
                              static_cast<std::size_t>(w), radius);
  }
  return MaskGrid(w, h, std::move(out));
}

// Every cell becomes a factor x factor block.
inline MaskGrid upscale_nearest(const MaskGrid& grid, int factor) {
  if (factor < 1) {
    throw InvalidArgument("upscale factor must be >= 1, got " +
                          std::to_string(factor));
  }
  if (factor == 1) return grid;
  const int w = grid.width() * factor;
  const int h = grid.height() * factor;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out[static_cast<std::size_t>(y) * w + x] =
          grid.at(x / factor, y / factor) ? 1 : 0;
    }
  }
  return MaskGrid(w, h, std::move(out));
}

// Keeps the top-left width x height window.
inline MaskGrid crop(const MaskGrid& grid, int width, int height) {
  if (width > grid.width() || height > grid.height()) {
    throw InvalidArgument("crop " + shape_string(width, height) +
                          " exceeds grid " +
                          shape_string(grid.width(), grid.height()));
  }
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const auto row = grid.cells().subspan(
        static_cast<std::size_t>(y) * grid.width(), width);
    std::copy(row.begin(), row.end(),
              out.begin() + static_cast<std::ptrdiff_t>(y) * width);
  }
  return MaskGrid(width, height, std::move(out));
}

// ---------------------------------------------------------------------------
// Generators

// A single filled axis-aligned rectangle. Extents are drawn per axis from
// [ceil(low*dim), floor(high*dim)]; the corner is uniform over placements that
// keep the rectangle inside the image.
inline MaskGrid box_mask(int width, int height, const BoxParams& params,
                         SeededRng& rng) {
  params.validate();
  if (width < 4 || height < 4) {
    throw InvalidArgument("box mask needs an image of at least 4x4, got " +
                          shape_string(width, height));
  }
  // Tolerance keeps products like 0.3 * 100 from rounding up to 31.
  constexpr double kEps = 1e-9;
  auto extent_range = [&](int dim) {
    const int lo = std::max(
        1, static_cast<int>(std::ceil(params.fraction_range.low * dim - kEps)));
    const int hi = static_cast<int>(
        std::floor(params.fraction_range.high * dim + kEps));
    if (lo > hi) {
      throw InvalidArgument("image " + shape_string(width, height) +
                            " too small to fit the minimum rectangle");
    }
    return Interval<int>{lo, hi};
  };
  const Interval<int> wr = extent_range(width);
  const Interval<int> hr = extent_range(height);
  const int rw = static_cast<int>(rng.uniform_int(wr.low, wr.high));
  const int rh = static_cast<int>(rng.uniform_int(hr.low, hr.high));
  const int x0 = static_cast<int>(rng.uniform_int(0, width - rw));
  const int y0 = static_cast<int>(rng.uniform_int(0, height - rh));
  MaskGrid mask(width, height);
  for (int y = y0; y < y0 + rh; ++y) {
    for (int x = x0; x < x0 + rw; ++x) mask.set(x, y, true);
  }
  return mask;
}

// Random init on a grid downscaled by `downscale` (ceil division), `steps`
// majority votes, nearest upscale, crop to size, then dilation when
// downscaled.
inline MaskGrid ca_mask(int width, int height, const CaParams& params,
                        SeededRng& rng) {
  params.validate();
  const int d = params.downscale;
  if (width < d || height < d) {
    throw InvalidArgument("ca mask of " + shape_string(width, height) +
                          " is smaller than downscale factor " +
                          std::to_string(d));
  }
  const int cw = (width + d - 1) / d;
  const int ch = (height + d - 1) / d;
  std::vector<std::uint8_t> init(static_cast<std::size_t>(cw) * ch);
  for (auto& cell : init) cell = rng.bernoulli(params.init_density) ? 1 : 0;
  MaskGrid grid(cw, ch, std::move(init));
  for (int i = 0; i < params.steps; ++i) grid = ca_step(grid);
  grid = crop(upscale_nearest(grid, d), width, height);
  if (d > 1) grid = dilate(grid, params.dilation_radius);
  return grid;
}

namespace stroke_detail {

struct Point {
  double x;
  double y;
};

// Marks every cell whose center lies within `radius` of segment ab; this
// renders the segment body and round caps at both ends.
inline void stamp_capsule(MaskGrid& mask, Point a, Point b, double radius) {
  const int x_lo = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius)));
  const int x_hi = std::min(mask.width() - 1,
                            static_cast<int>(std::ceil(std::max(a.x, b.x) + radius)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius)));
  const int y_hi = std::min(mask.height() - 1,
                            static_cast<int>(std::ceil(std::max(a.y, b.y) + radius)));
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  const double r2 = radius * radius;
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      double t = 0.0;
      if (len2 > 0.0) {
        t = std::clamp(((x - a.x) * dx + (y - a.y) * dy) / len2, 0.0, 1.0);
      }
      const double px = a.x + t * dx - x;
      const double py = a.y + t * dy - y;
      if (px * px + py * py <= r2) mask.set(x, y, true);
    }
  }
}

}  // namespace stroke_detail

// Random thick polylines. Each stroke starts at a uniform point with a uniform
// heading; every segment turns by a uniform angle in [-jitter, jitter].
// Vertices are clamped to the image so strokes stay on canvas.
inline MaskGrid freeform_mask(int width, int height, const BrushParams& params,
                              SeededRng& rng) {
  params.validate();
  if (width < 16 || height < 16) {
    throw InvalidArgument("free-form mask needs an image of at least 16x16, got " +
                          shape_string(width, height));
  }
  using stroke_detail::Point;
  const double scale = std::min(width, height);
  MaskGrid mask(width, height);
  const auto strokes =
      rng.uniform_int(params.stroke_count.low, params.stroke_count.high);
  for (std::int64_t s = 0; s < strokes; ++s) {
    const auto vertices =
        rng.uniform_int(params.vertices.low, params.vertices.high);
    const double brush = scale * rng.uniform_real(params.brush_width.low,
                                                  params.brush_width.high);
    Point p{rng.uniform_real(0.0, width - 1), rng.uniform_real(0.0, height - 1)};
    double heading = rng.uniform_real(0.0, 2.0 * std::numbers::pi);
    stroke_detail::stamp_capsule(mask, p, p, brush / 2);
    for (std::int64_t v = 1; v < vertices; ++v) {
      heading += rng.uniform_real(-params.angle_jitter, params.angle_jitter);
      const double len = scale * rng.uniform_real(params.segment_length.low,
                                                  params.segment_length.high);
      const Point q{std::clamp(p.x + len * std::cos(heading), 0.0, width - 1.0),
                    std::clamp(p.y + len * std::sin(heading), 0.0, height - 1.0)};
      stroke_detail::stamp_capsule(mask, p, q, brush / 2);
      p = q;
    }
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Family-level dispatch used by the pipeline.

// Generator configuration shared by every mask of a run. CA downscale and
// step count are drawn per mask unless pinned here.
struct MaskConfig {
  BoxParams box;
  BrushParams brush;
  std::optional<int> ca_downscale;
  std::optional<int> ca_steps;
  double ca_init_density = 0.5;
  int ca_dilation_radius = 1;

  friend bool operator==(const MaskConfig&, const MaskConfig&) = default;
};

struct GeneratedMask {
  MaskGrid mask;
  MaskType type;
  std::optional<CaParams> ca;  // realized parameters for CA masks
};

// CA parameters are drawn from a split sub-stream so that regenerating with
// the realized parameters pinned consumes the same main-stream draws.
inline CaParams resolve_ca_params(const MaskConfig& config,
                                  const SeededRng& rng) {
  SeededRng param_rng = rng.split("ca-params");
  CaParams p = CaParams::sample(param_rng, config.ca_init_density,
                                config.ca_dilation_radius);
  if (config.ca_downscale) p.downscale = *config.ca_downscale;
  if (config.ca_steps) p.steps = *config.ca_steps;
  p.validate();
  return p;
}

inline GeneratedMask generate_mask(MaskType type, int width, int height,
                                   const MaskConfig& config, SeededRng& rng) {
  switch (type) {
    case MaskType::kBox:
      return {box_mask(width, height, config.box, rng), type, std::nullopt};
    case MaskType::kCellularAutomata: {
      const CaParams p = resolve_ca_params(config, rng);
      return {ca_mask(width, height, p, rng), type, p};
    }
    case MaskType::kFreeForm:
      return {freeform_mask(width, height, config.brush, rng), type,
              std::nullopt};
  }
  throw InvalidArgument("unknown mask type");
}

// Uniform choice among the three families, from its own sub-stream.
inline MaskType sample_mask_type(const SeededRng& rng) {
  SeededRng type_rng = rng.split("type");
  return kAllMaskTypes[static_cast<std::size_t>(type_rng.uniform_int(0, 2))];
}

}  // namespace xinpaint

#endif  // XINPAINT_MASKGEN_HPP_
