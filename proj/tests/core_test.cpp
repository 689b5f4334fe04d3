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

#include <atomic>
#include <set>

#include "support/test_support.hpp"
#include "xinpaint/xinpaint.hpp"

namespace xinpaint {
namespace {

using testing::TempDir;

TEST(ImageBuffer, ValidatesShapeAndRange) {
  EXPECT_THROW(ImageBuffer(0, 3, 1), InvalidArgument);
  EXPECT_THROW(ImageBuffer(3, 3, 2), InvalidArgument);
  EXPECT_THROW(ImageBuffer(2, 2, 1, std::vector<double>{0, 0, 0}), DimensionMismatch);
  EXPECT_THROW(ImageBuffer(1, 1, 1, std::vector<double>{1.5}), InvalidArgument);
  EXPECT_THROW(ImageBuffer(1, 1, 1, std::vector<double>{-0.1}), InvalidArgument);
  const ImageBuffer img(3, 2, 3, 0.25);
  EXPECT_EQ(img.data().size(), 18u);
  EXPECT_EQ(img.pixel_count(), 6u);
}

TEST(MaskGrid, RejectsNonBinaryCells) {
  EXPECT_THROW(MaskGrid(2, 1, std::vector<std::uint8_t>{0, 2}), InvalidArgument);
  EXPECT_THROW(MaskGrid(2, 2, std::vector<std::uint8_t>{0, 1}), DimensionMismatch);
  const MaskGrid m(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1});
  EXPECT_TRUE(m.at(0, 0));
  EXPECT_FALSE(m.at(1, 0));
  EXPECT_EQ(m.count(), 2u);
}

// ---------------------------------------------------------------------------
// SeededRng

TEST(SeededRng, EqualSeedAndStreamGiveEqualDraws) {
  SeededRng a(1234, "stream");
  SeededRng b(1234, "stream");
  for (int i = 0; i < 10000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64()) << i;
}

TEST(SeededRng, StreamsAndSeedsDiffer) {
  SeededRng a(1, "x");
  SeededRng b(1, "y");
  SeededRng c(2, "x");
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    same_ab += va == b.next_u64();
    same_ac += va == c.next_u64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

// Frozen first draws pin the generator across platforms.
TEST(SeededRng, FrozenDraws) {
  SeededRng r(7, "mask");
  EXPECT_EQ(r.next_u64(), 7774087463100582240ULL);
  EXPECT_EQ(r.next_u64(), 15491837809101559605ULL);
  EXPECT_EQ(r.next_u64(), 12802453653535834669ULL);
  EXPECT_EQ(SeededRng(7, "mask").draw_at(2), 12802453653535834669ULL);
  EXPECT_EQ(kRngAlgorithm, std::string_view("splitmix64-ctr/1"));
}

TEST(SeededRng, SplitDoesNotAdvanceParent) {
  SeededRng parent(9, "p");
  const SeededRng child = parent.split("c");
  EXPECT_EQ(parent.counter(), 0u);
  EXPECT_EQ(child.stream(), "p/c");
  SeededRng direct(9, "p/c");
  SeededRng child_copy = child;
  EXPECT_EQ(child_copy.next_u64(), direct.next_u64());
}

TEST(SeededRng, UniformIntStaysInRangeAndCoversIt) {
  SeededRng r(5, "u");
  std::set<std::int64_t> seen;
  for (int i = 0; i < 5000; ++i) {
    const auto v = r.uniform_int(-3, 3);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 3);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
  EXPECT_EQ(r.uniform_int(4, 4), 4);
  EXPECT_THROW(r.uniform_int(5, 4), InvalidArgument);
}

TEST(SeededRng, UniformIsHalfOpenUnitInterval) {
  SeededRng r(11, "f");
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double v = r.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(SeededRng, ShuffleIsAPermutation) {
  std::vector<int> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  SeededRng r(3, "s");
  r.shuffle(std::span<int>(v));
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  int fixed = 0;
  for (int i = 0; i < 100; ++i) fixed += v[i] == i;
  EXPECT_LT(fixed, 10);
}

// ---------------------------------------------------------------------------
// PNG I/O

TEST(PngIo, LoadGrayScalesByInverse255) {
  TempDir dir("png");
  auto raw = png_detail::gray8(2, 2);
  raw.pixels = {0, 255, 128, 64};
  png_detail::write_png(raw, dir.str("g.png"));
  const ImageBuffer img = load_image(dir.str("g.png"));
  ASSERT_EQ(img.channels(), 1);
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_EQ(img.at(1, 0), 1.0);
  EXPECT_EQ(img.at(0, 1), 128 / 255.0);
  EXPECT_EQ(img.at(1, 1), 64 / 255.0);
}

TEST(PngIo, ImageRoundTripIsIdentity) {
  TempDir dir("png");
  std::mt19937_64 g(1);
  for (int c : {1, 3}) {
    const ImageBuffer img = testing::random_image(g, 17, 9, c);
    save_image(img, dir.str("a.png"));
    const ImageBuffer back = load_image(dir.str("a.png"));
    EXPECT_EQ(back.channels(), c);
    EXPECT_TRUE(std::equal(img.data().begin(), img.data().end(), back.data().begin()));
    save_image(back, dir.str("b.png"));
    EXPECT_EQ(testing::slurp(dir.str("a.png")), testing::slurp(dir.str("b.png")));
  }
}

TEST(PngIo, SaveQuantizesToNearestLevel) {
  TempDir dir("png");
  const ImageBuffer img(2, 1, 1, std::vector<double>{0.5, 0.999});
  save_image(img, dir.str("q.png"));
  const ImageBuffer back = load_image(dir.str("q.png"));
  EXPECT_EQ(back.at(0, 0), 128 / 255.0);
  EXPECT_EQ(back.at(1, 0), 1.0);
}

TEST(PngIo, SixteenBitIsRejected) {
  TempDir dir("png");
  png_detail::RawPng raw;
  raw.width = 2;
  raw.height = 2;
  raw.bit_depth = 16;
  raw.color_type = PNG_COLOR_TYPE_GRAY;
  raw.pixels.assign(8, 0x12);
  png_detail::write_png(raw, dir.str("deep.png"));
  try {
    load_image(dir.str("deep.png"));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported bit depth"), std::string::npos);
    EXPECT_EQ(e.path(), dir.str("deep.png"));
  }
}

TEST(PngIo, GrayAlphaIsRejected) {
  TempDir dir("png");
  // Gray+alpha is a supported libpng format but not an accepted image type.
  png_detail::RawPng raw;
  raw.width = 1;
  raw.height = 1;
  raw.bit_depth = 8;
  raw.color_type = PNG_COLOR_TYPE_GRAY_ALPHA;
  raw.pixels = {1, 2};
  png_detail::write_png(raw, dir.str("ga.png"));
  try {
    load_image(dir.str("ga.png"));
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported color type"), std::string::npos);
  }
}

TEST(PngIo, MissingAndCorruptFiles) {
  TempDir dir("png");
  try {
    load_image(dir.str("nope.png"));
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(e.path(), dir.str("nope.png"));
    EXPECT_EQ(e.cause(), "no such file");
  }
  testing::spit(dir.path() / "empty.png", "");
  try {
    load_mask(dir.str("empty.png"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("corrupt stream"), std::string::npos);
  }
  // Valid signature, truncated body.
  auto raw = png_detail::gray8(8, 8);
  auto bytes = png_detail::encode_png(raw);
  bytes.resize(bytes.size() / 2);
  png_detail::write_file(dir.str("trunc.png"), bytes);
  try {
    load_image(dir.str("trunc.png"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("corrupt stream"), std::string::npos);
  }
}

TEST(MaskIo, EncodingUses255ForMasked) {
  TempDir dir("mask");
  save_mask(MaskGrid(4, 4, true), dir.str("ones.png"));
  const auto ones = png_detail::read_png(dir.str("ones.png"));
  EXPECT_EQ(ones.pixels, std::vector<std::uint8_t>(16, 255));
  save_mask(MaskGrid(4, 4, false), dir.str("zeros.png"));
  EXPECT_EQ(png_detail::read_png(dir.str("zeros.png")).pixels,
            std::vector<std::uint8_t>(16, 0));
}

TEST(MaskIo, LoadMapsPixelsToCells) {
  TempDir dir("mask");
  auto raw = png_detail::gray8(2, 2);
  raw.pixels = {255, 0, 0, 255};
  png_detail::write_png(raw, dir.str("m.png"));
  const MaskGrid m = load_mask(dir.str("m.png"));
  EXPECT_EQ(std::vector<std::uint8_t>(m.cells().begin(), m.cells().end()),
            (std::vector<std::uint8_t>{1, 0, 0, 1}));
}

TEST(MaskIo, NonBinaryReportsCount) {
  TempDir dir("mask");
  auto raw = png_detail::gray8(2, 2);
  raw.pixels = {255, 128, 7, 0};
  png_detail::write_png(raw, dir.str("m.png"));
  try {
    load_mask(dir.str("m.png"));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("non-binary mask: 2 pixel(s)"), std::string::npos)
        << e.what();
  }
}

TEST(MaskIo, RoundTripIsExact) {
  TempDir dir("mask");
  std::mt19937_64 g(2);
  for (int i = 0; i < 20; ++i) {
    const MaskGrid m = testing::random_mask(g, 1 + i, 23 - i);
    save_mask(m, dir.str("m.png"));
    EXPECT_EQ(load_mask(dir.str("m.png")), m);
  }
}

TEST(MaskIo, RgbMaskIsRejected) {
  TempDir dir("mask");
  save_image(ImageBuffer(2, 2, 3, 1.0), dir.str("rgb.png"));
  EXPECT_THROW(load_mask(dir.str("rgb.png")), FormatError);
}

TEST(SemanticIo, RoundTripAndLabelRange) {
  TempDir dir("sem");
  SemanticMap m(3, 2, std::vector<std::uint32_t>{0, 1, 2, 3, 254, 255});
  save_semantic(m, dir.str("s.png"));
  EXPECT_EQ(load_semantic(dir.str("s.png")), m);
  SemanticMap big(1, 1, std::vector<std::uint32_t>{256});
  EXPECT_THROW(save_semantic(big, dir.str("b.png")), InvalidArgument);
}

TEST(PngIo, UnwritablePathIsIoError) {
  EXPECT_THROW(save_mask(MaskGrid(2, 2), "/nonexistent-dir/x/m.png"), IoError);
}

// ---------------------------------------------------------------------------
// Manifest

RunManifest sample_manifest() {
  RunManifest m;
  m.track = 2;
  m.split_tag = SplitTag::kShared;
  m.images = {{"b", "imgs/b.png", "sem/b.png"}, {"a", "/abs/a.png", "sem/a.png"}};
  MaskAssignment stored;
  stored.image_id = "b";
  stored.type = MaskType::kBox;
  stored.mask = "masks/b.png";
  MaskAssignment generated;
  generated.image_id = "a";
  generated.type = MaskType::kCellularAutomata;
  generated.seed = 18446744073709551615ULL;
  generated.ca = CaParams{4, 3, 0.5, 1};
  MaskAssignment brush;
  brush.image_id = "a";
  brush.type = MaskType::kFreeForm;
  brush.seed = 5;
  brush.brush = BrushParams{};
  m.masks = {stored, generated, brush};
  return m;
}

TEST(Manifest, SerializationRoundTripsByteIdentically) {
  const RunManifest m = sample_manifest();
  const std::string text = serialize_manifest(m);
  const RunManifest back = parse_manifest(text, "mem");
  EXPECT_EQ(back, m);
  EXPECT_EQ(serialize_manifest(back), text);
  // Sorted keys: "format" precedes "images" precedes "masks".
  EXPECT_LT(text.find("\"format\""), text.find("\"images\""));
  EXPECT_LT(text.find("\"images\""), text.find("\"masks\""));
  EXPECT_NE(text.find("\"rng_algorithm\": \"splitmix64-ctr/1\""), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
}

TEST(Manifest, FileRoundTrip) {
  TempDir dir("man");
  const RunManifest m = sample_manifest();
  save_manifest(m, dir.str("m.json"));
  EXPECT_EQ(load_manifest(dir.str("m.json")), m);
}

TEST(Manifest, ValidationRules) {
  RunManifest m = sample_manifest();
  m.images[0].semantic.reset();
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = sample_manifest();
  m.masks[0].image_id = "zzz";
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = sample_manifest();
  m.masks[0].mask.reset();
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = sample_manifest();
  m.images.push_back(m.images[0]);
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = sample_manifest();
  m.track = 3;
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = sample_manifest();
  m.track = 1;
  m.images[0].semantic.reset();
  EXPECT_NO_THROW(m.validate());
}

TEST(Manifest, ParseErrorsAreFormatErrors) {
  EXPECT_THROW(parse_manifest("{not json", "x.json"), FormatError);
  EXPECT_THROW(parse_manifest("{\"format\": \"other/9\"}", "x.json"), FormatError);
  std::string text = serialize_manifest(sample_manifest());
  const auto pos = text.find("\"track\": 2");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 10, "\"track\": 7");
  EXPECT_THROW(parse_manifest(text, "x.json"), FormatError);
}

TEST(Manifest, ResolvePathUsesManifestDirectory) {
  EXPECT_EQ(resolve_path("/data/run", "masks/a.png"), "/data/run/masks/a.png");
  EXPECT_EQ(resolve_path("/data/run", "/abs/a.png"), "/abs/a.png");
  EXPECT_EQ(resolve_path("", "rel.png"), "rel.png");
}

TEST(Manifest, SeededAssignmentRegeneratesMask) {
  MaskAssignment a;
  a.image_id = "x";
  a.type = MaskType::kCellularAutomata;
  a.seed = 99;
  MaskConfig config;
  SeededRng rng(99, "mask");
  const GeneratedMask g = generate_mask(a.type, 40, 30, config, rng);
  a.ca = g.ca;
  EXPECT_EQ(resolve_mask(a, 40, 30, ""), g.mask);
}

TEST(Manifest, StoredMaskDimensionsChecked) {
  TempDir dir("man");
  save_mask(MaskGrid(4, 4), dir.str("m.png"));
  MaskAssignment a;
  a.image_id = "x";
  a.mask = "m.png";
  EXPECT_EQ(resolve_mask(a, 4, 4, dir.path()), MaskGrid(4, 4));
  EXPECT_THROW(resolve_mask(a, 5, 4, dir.path()), DimensionMismatch);
}

// ---------------------------------------------------------------------------
// parallel_for

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (int jobs : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), jobs, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  for (int jobs : {1, 4}) {
    try {
      parallel_for(50, jobs, [](std::size_t i) {
        if (i == 7 || i == 31) throw Error("fail " + std::to_string(i));
      });
      FAIL();
    } catch (const Error& e) {
      EXPECT_STREQ(e.what(), "fail 7");
    }
  }
}

}  // namespace
}  // namespace xinpaint
