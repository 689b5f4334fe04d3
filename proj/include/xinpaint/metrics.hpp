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

// Full-reference fidelity metrics on the [0,1] intensity domain and their
// mean +/- std aggregation.
//
// Conventions:
//   PSNR  10*log10(1/MSE) over all samples; identical images give +inf.
//   SSIM  luma (0.299, 0.587, 0.114) for RGB, 11x11 Gaussian window with
//         sigma 1.5 and replicate padding, K1 = 0.01, K2 = 0.03, range 1,
//         averaged over every pixel position.
//   MAE   mean |a - b| over all samples. Lower is better.

#ifndef XINPAINT_METRICS_HPP_
#define XINPAINT_METRICS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/image.hpp"

namespace xinpaint {

inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;
inline constexpr std::array<double, 3> kLumaWeights = {0.299, 0.587, 0.114};

namespace metrics_detail {

inline void require_same_shape(const ImageBuffer& a, const ImageBuffer& b,
                               const char* metric) {
  if (!a.same_shape(b)) {
    throw DimensionMismatch(std::string(metric) + ": images differ in shape (" +
                            a.shape() + " vs " + b.shape() + ")");
  }
}

// Neumaier-compensated sum of f(a_i, b_i). Keeps uniform differences exact,
// e.g. a constant 0.1 offset yields exactly 20 dB.
template <typename F>
double compensated_sum(const ImageBuffer& a, const ImageBuffer& b, F f) {
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double v = f(da[i], db[i]);
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace metrics_detail

inline double mae(const ImageBuffer& a, const ImageBuffer& b) {
  metrics_detail::require_same_shape(a, b, "mae");
  const double sum = metrics_detail::compensated_sum(
      a, b, [](double x, double y) { return std::abs(x - y); });
  return sum / static_cast<double>(a.data().size());
}

inline double mse(const ImageBuffer& a, const ImageBuffer& b) {
  metrics_detail::require_same_shape(a, b, "mse");
  const double sum = metrics_detail::compensated_sum(a, b, [](double x, double y) {
    const double d = x - y;
    return d * d;
  });
  return sum / static_cast<double>(a.data().size());
}

// Returns kPsnrInfinity when the images are identical.
inline double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  metrics_detail::require_same_shape(a, b, "psnr");
  const double e = mse(a, b);
  if (e == 0.0) return kPsnrInfinity;
  return 10.0 * std::log10(1.0 / e);
}

// Single-plane intensities used by SSIM.
inline std::vector<double> to_luma(const ImageBuffer& image) {
  const auto d = image.data();
  if (image.channels() == 1) return {d.begin(), d.end()};
  std::vector<double> out(image.pixel_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = kLumaWeights[0] * d[3 * i] + kLumaWeights[1] * d[3 * i + 1] +
             kLumaWeights[2] * d[3 * i + 2];
  }
  return out;
}

// Normalized 1D Gaussian taps; the 2D window is their outer product.
inline std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> taps{};
  constexpr int half = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - half;
    taps[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

namespace metrics_detail {

// Separable Gaussian blur with replicate padding.
inline std::vector<double> blur(std::span<const double> plane, int w, int h,
                                const std::array<double, kSsimWindow>& taps) {
  constexpr int half = kSsimWindow / 2;
  std::vector<double> tmp(plane.size());
  for (int y = 0; y < h; ++y) {
    const double* row = plane.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        const int xx = x + k < 0 ? 0 : (x + k >= w ? w - 1 : x + k);
        acc += taps[k + half] * row[xx];
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<double> out(plane.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        const int yy = y + k < 0 ? 0 : (y + k >= h ? h - 1 : y + k);
        acc += taps[k + half] * tmp[static_cast<std::size_t>(yy) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return out;
}

}  // namespace metrics_detail

// Local SSIM index at every pixel position.
inline std::vector<double> ssim_map(const ImageBuffer& a, const ImageBuffer& b) {
  metrics_detail::require_same_shape(a, b, "ssim");
  const int w = a.width();
  const int h = a.height();
  if (w < kSsimWindow || h < kSsimWindow) {
    throw InvalidArgument("ssim: image " + shape_string(w, h) +
                          " is smaller than the " + std::to_string(kSsimWindow) +
                          "x" + std::to_string(kSsimWindow) + " window");
  }
  const std::vector<double> x = to_luma(a);
  const std::vector<double> y = to_luma(b);
  const std::size_t n = x.size();
  std::vector<double> xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto taps = gaussian_taps();
  const auto mu_x = metrics_detail::blur(x, w, h, taps);
  const auto mu_y = metrics_detail::blur(y, w, h, taps);
  const auto e_xx = metrics_detail::blur(xx, w, h, taps);
  const auto e_yy = metrics_detail::blur(yy, w, h, taps);
  const auto e_xy = metrics_detail::blur(xy, w, h, taps);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = mu_x[i];
    const double my = mu_y[i];
    const double vx = e_xx[i] - mx * mx;
    const double vy = e_yy[i] - my * my;
    const double cov = e_xy[i] - mx * my;
    out[i] = ((2.0 * mx * my + kSsimC1) * (2.0 * cov + kSsimC2)) /
             ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
  }
  return out;
}

inline double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  const std::vector<double> m = ssim_map(a, b);
  double sum = 0.0;
  for (double v : m) sum += v;
  return sum / static_cast<double>(m.size());
}

// ---------------------------------------------------------------------------
// Aggregation

struct AggregateStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t n = 0;

  friend bool operator==(const AggregateStats&, const AggregateStats&) = default;
};

// Infinite values (the PSNR sentinel) are left out and counted.
struct Summary {
  std::optional<AggregateStats> stats;
  std::size_t excluded = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
};

inline Summary summarize(std::span<const double> values) {
  Summary s;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (double v : values) {
    if (std::isnan(v)) throw InvalidArgument("cannot aggregate NaN");
    if (std::isinf(v)) {
      ++s.excluded;
      continue;
    }
    // Welford update.
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  if (n > 0) {
    s.stats = AggregateStats{mean, std::sqrt(std::max(m2, 0.0) / static_cast<double>(n)), n};
  }
  return s;
}

// Mean and population std of the finite values. Throws on an empty list or
// when nothing finite remains.
inline AggregateStats aggregate(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("aggregate: empty list");
  const Summary s = summarize(values);
  if (!s.stats) {
    throw InvalidArgument("aggregate: all " + std::to_string(s.excluded) +
                          " value(s) are infinite");
  }
  return *s.stats;
}

}  // namespace xinpaint

#endif  // XINPAINT_METRICS_HPP_
