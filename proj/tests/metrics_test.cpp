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

#include <gtest/gtest.h>

#include <cmath>

#include "support/test_support.hpp"
#include "xinpaint/metrics.hpp"

namespace xinpaint {
namespace {

namespace oracle = testing::oracle;

ImageBuffer add_noise(const ImageBuffer& gt, double amplitude, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> d(gt.data().begin(), gt.data().end());
  for (double& v : d) v = std::clamp(v + u(g), 0.0, 1.0);
  return ImageBuffer(gt.width(), gt.height(), gt.channels(), std::move(d));
}

TEST(Mae, Examples) {
  std::mt19937_64 g(1);
  const ImageBuffer x = testing::random_real_image(g, 16, 16, 3);
  EXPECT_EQ(mae(x, x), 0.0);
  EXPECT_EQ(mae(ImageBuffer(8, 8, 1, 0.0), ImageBuffer(8, 8, 1, 1.0)), 1.0);
  EXPECT_THROW(mae(x, ImageBuffer(16, 16, 1)), DimensionMismatch);
}

TEST(Psnr, Examples) {
  std::mt19937_64 g(2);
  const ImageBuffer x = testing::random_real_image(g, 16, 16, 1);
  EXPECT_EQ(psnr(x, x), kPsnrInfinity);
  EXPECT_EQ(psnr(ImageBuffer(64, 64, 1, 0.0), ImageBuffer(64, 64, 1, 0.1)), 20.0);
  EXPECT_EQ(psnr(ImageBuffer(37, 11, 3, 0.1), ImageBuffer(37, 11, 3, 0.0)), 20.0);
  // Offsets that are not exactly 0.1 in binary land within a few ulps.
  EXPECT_NEAR(psnr(ImageBuffer(64, 64, 1, 0.3), ImageBuffer(64, 64, 1, 0.4)), 20.0, 1e-12);
  EXPECT_THROW(psnr(x, ImageBuffer(15, 16, 1)), DimensionMismatch);
}

TEST(Ssim, Examples) {
  std::mt19937_64 g(3);
  const ImageBuffer x = testing::random_real_image(g, 20, 14, 3);
  EXPECT_EQ(ssim(x, x), 1.0);
  const double c1 = 0.3;
  const double c2 = 0.7;
  const double expect = (2 * c1 * c2 + kSsimC1) / (c1 * c1 + c2 * c2 + kSsimC1);
  EXPECT_NEAR(ssim(ImageBuffer(16, 16, 1, c1), ImageBuffer(16, 16, 1, c2)), expect, 1e-12);
  EXPECT_THROW(ssim(ImageBuffer(10, 30, 1), ImageBuffer(10, 30, 1)), InvalidArgument);
  EXPECT_NO_THROW(ssim(ImageBuffer(11, 11, 1), ImageBuffer(11, 11, 1)));
}

TEST(Ssim, GaussianTapsNormalized) {
  const auto taps = gaussian_taps();
  double sum = 0;
  for (double t : taps) sum += t;
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_EQ(taps[0], taps[10]);
  EXPECT_GT(taps[5], taps[4]);
}

TEST(Metrics, MatchNaiveOracles) {
  std::mt19937_64 g(64);
  for (int i = 0; i < 25; ++i) {
    const int c = i % 3 == 0 ? 3 : 1;
    const ImageBuffer a = testing::random_real_image(g, 64, 64, c);
    const ImageBuffer b = i % 2 ? add_noise(a, 0.2, i) : testing::random_real_image(g, 64, 64, c);
    EXPECT_NEAR(mae(a, b), oracle::mae(a, b), 1e-12);
    EXPECT_NEAR(psnr(a, b), oracle::psnr(a, b), 1e-9);
    EXPECT_NEAR(ssim(a, b), oracle::ssim(a, b), 1e-6);
  }
}

TEST(Metrics, Symmetric) {
  std::mt19937_64 g(5);
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer a = testing::random_real_image(g, 24, 20, 3);
    const ImageBuffer b = add_noise(a, 0.3, i);
    EXPECT_EQ(mae(a, b), mae(b, a));
    EXPECT_EQ(psnr(a, b), psnr(b, a));
    EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-15);
  }
}

TEST(Metrics, MonotoneInNoiseAmplitude) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ImageBuffer gt = testing::smooth_noise_image(seed, 48, 48);
    double last_psnr = kPsnrInfinity;
    double last_ssim = 1.0;
    double last_mae = 0.0;
    for (double amp : {0.05, 0.1, 0.2}) {
      const ImageBuffer noisy = add_noise(gt, amp, seed * 31 + 7);
      const double p = psnr(gt, noisy);
      const double s = ssim(gt, noisy);
      const double m = mae(gt, noisy);
      EXPECT_LT(p, last_psnr) << "seed " << seed << " amp " << amp;
      EXPECT_LT(s, last_ssim);
      EXPECT_GT(m, last_mae);
      last_psnr = p;
      last_ssim = s;
      last_mae = m;
    }
  }
}

TEST(Metrics, RangeInvariants) {
  std::mt19937_64 g(6);
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer a = testing::random_real_image(g, 16, 16, 1);
    const ImageBuffer b = testing::random_real_image(g, 16, 16, 1);
    EXPECT_GE(ssim(a, b), -1.0);
    EXPECT_LE(ssim(a, b), 1.0);
    EXPECT_GE(mae(a, b), 0.0);
    EXPECT_LE(mae(a, b), 1.0);
    EXPECT_GE(psnr(a, b), 0.0);
  }
}

// ---------------------------------------------------------------------------
// Aggregation

TEST(Aggregate, Examples) {
  const std::vector<double> v{1, 2, 3};
  const AggregateStats s = aggregate(v);
  EXPECT_DOUBLE_EQ(s.mean, 2.0);
  EXPECT_NEAR(s.std, 0.816496580927726, 1e-15);
  EXPECT_EQ(s.n, 3u);
  const std::vector<double> one{5};
  EXPECT_EQ(aggregate(one), (AggregateStats{5.0, 0.0, 1}));
  EXPECT_THROW(aggregate(std::vector<double>{}), InvalidArgument);
}

TEST(Aggregate, MatchesTwoPassOracle) {
  SeededRng rng(2024, "agg");
  std::vector<double> v(1000);
  for (double& x : v) x = rng.uniform_real(-50.0, 150.0);
  const AggregateStats s = aggregate(v);
  const auto o = oracle::two_pass(v);
  EXPECT_NEAR(s.mean, o.mean, 1e-12);
  EXPECT_NEAR(s.std, o.std, 1e-12);
  EXPECT_EQ(s.n, 1000u);
}

TEST(Aggregate, InfinityExcludedAndCounted) {
  const std::vector<double> v{10.0, kPsnrInfinity, 20.0, kPsnrInfinity};
  const Summary s = summarize(v);
  ASSERT_TRUE(s.stats);
  EXPECT_EQ(s.excluded, 2u);
  EXPECT_EQ(s.stats->n, 2u);
  EXPECT_DOUBLE_EQ(s.stats->mean, 15.0);
  EXPECT_DOUBLE_EQ(s.stats->std, 5.0);
  const std::vector<double> all_inf{kPsnrInfinity};
  EXPECT_FALSE(summarize(all_inf).stats);
  EXPECT_THROW(aggregate(all_inf), InvalidArgument);
  const std::vector<double> nan{std::nan("")};
  EXPECT_THROW(summarize(nan), InvalidArgument);
}

}  // namespace
}  // namespace xinpaint
