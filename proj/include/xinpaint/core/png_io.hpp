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

// PNG codecs for images, masks and semantic maps. Only 8-bit grayscale and
// 8-bit RGB are accepted on input; output is always 8-bit, non-interlaced,
// with no time or text chunks so encodings are byte-stable.

#ifndef XINPAINT_CORE_PNG_IO_HPP_
#define XINPAINT_CORE_PNG_IO_HPP_

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/image.hpp"

namespace xinpaint {

namespace png_detail {

struct RawPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<std::uint8_t> pixels;  // rows packed, 8-bit samples
};

struct ReadState {
  const std::uint8_t* data = nullptr;
  std::size_t size = 0;
  std::size_t offset = 0;
  char message[256] = {};
  RawPng* out = nullptr;
  std::vector<png_bytep> rows;
};

struct WriteState {
  std::vector<std::uint8_t> bytes;
  char message[256] = {};
};

[[noreturn]] inline void on_error(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(buf, 256, "%s", msg);
  png_longjmp(png, 1);
}

inline void on_warning(png_structp, png_const_charp) {}

inline void read_from_memory(png_structp png, png_bytep dst, png_size_t n) {
  auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
  if (st->offset + n > st->size) png_error(png, "unexpected end of stream");
  std::memcpy(dst, st->data + st->offset, n);
  st->offset += n;
}

inline void write_to_memory(png_structp png, png_bytep src, png_size_t n) {
  auto* st = static_cast<WriteState*>(png_get_io_ptr(png));
  st->bytes.insert(st->bytes.end(), src, src + n);
}

inline void flush_noop(png_structp) {}

inline bool supported(int bit_depth, int color_type) {
  return bit_depth == 8 &&
         (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_RGB);
}

// Returns false and fills st.message on libpng failure. Pixel rows are only
// decoded when the format is one we support.
inline bool decode(ReadState& st) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, st.message,
                                           on_error, on_warning);
  if (png == nullptr) {
    std::snprintf(st.message, sizeof st.message, "cannot allocate decoder");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::snprintf(st.message, sizeof st.message, "cannot allocate decoder");
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &st, read_from_memory);
  png_read_info(png, info);
  RawPng& out = *st.out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.color_type = png_get_color_type(png, info);
  if (supported(out.bit_depth, out.color_type)) {
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    out.pixels.resize(stride * out.height);
    st.rows.resize(out.height);
    for (int y = 0; y < out.height; ++y) {
      st.rows[y] = out.pixels.data() + stride * y;
    }
    png_read_image(png, st.rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

inline bool encode(WriteState& st, const RawPng& raw) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, st.message,
                                            on_error, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &st, write_to_memory, flush_noop);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, raw.width, raw.height, raw.bit_depth,
               raw.color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const int samples = raw.color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t stride =
      static_cast<std::size_t>(raw.width) * samples * (raw.bit_depth / 8);
  for (int y = 0; y < raw.height; ++y) {
    png_write_row(png, raw.pixels.data() + stride * y);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw IoError(path, "no such file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path,
                       const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path, "write failed");
}

// Decodes any PNG header, rejecting unsupported formats with a FormatError.
inline RawPng read_png(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw FormatError(path, "corrupt stream: not a PNG file");
  }
  RawPng raw;
  ReadState st;
  st.data = bytes.data();
  st.size = bytes.size();
  st.out = &raw;
  if (!decode(st)) {
    throw FormatError(path, std::string("corrupt stream: ") + st.message);
  }
  if (raw.bit_depth != 8) {
    throw FormatError(path, "unsupported bit depth " +
                                std::to_string(raw.bit_depth) +
                                " (only 8-bit is accepted)");
  }
  if (!supported(raw.bit_depth, raw.color_type)) {
    throw FormatError(path, "unsupported color type " +
                                std::to_string(raw.color_type) +
                                " (only grayscale or RGB is accepted)");
  }
  return raw;
}

// Encodes raw samples. Exposed for tests that need to fabricate PNGs of
// unsupported formats.
inline std::vector<std::uint8_t> encode_png(const RawPng& raw) {
  WriteState st;
  if (!encode(st, raw)) {
    throw Error(std::string("PNG encoding failed: ") + st.message);
  }
  return std::move(st.bytes);
}

inline void write_png(const RawPng& raw, const std::string& path) {
  write_file(path, encode_png(raw));
}

inline RawPng gray8(int width, int height) {
  RawPng raw;
  raw.width = width;
  raw.height = height;
  raw.bit_depth = 8;
  raw.color_type = PNG_COLOR_TYPE_GRAY;
  raw.pixels.resize(static_cast<std::size_t>(width) * height);
  return raw;
}

inline void require_gray(const RawPng& raw, const std::string& path,
                         const char* what) {
  if (raw.color_type != PNG_COLOR_TYPE_GRAY) {
    throw FormatError(path, std::string("unsupported color type: ") + what +
                                " must be 8-bit grayscale");
  }
}

}  // namespace png_detail

inline std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Loads an 8-bit gray or RGB PNG; samples are normalized by v/255.
inline ImageBuffer load_image(const std::string& path) {
  const png_detail::RawPng raw = png_detail::read_png(path);
  const int channels = raw.color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  std::vector<double> data(raw.pixels.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = raw.pixels[i] / 255.0;
  }
  return ImageBuffer(raw.width, raw.height, channels, std::move(data));
}

// Writes the image as 8-bit PNG, rounding to the nearest level.
inline void save_image(const ImageBuffer& image, const std::string& path) {
  png_detail::RawPng raw;
  raw.width = image.width();
  raw.height = image.height();
  raw.bit_depth = 8;
  raw.color_type =
      image.channels() == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  raw.pixels.reserve(image.data().size());
  for (double v : image.data()) raw.pixels.push_back(quantize(v));
  png_detail::write_png(raw, path);
}

// Masks are stored as 8-bit gray with 255 = masked and 0 = known.
inline void save_mask(const MaskGrid& mask, const std::string& path) {
  png_detail::RawPng raw = png_detail::gray8(mask.width(), mask.height());
  const auto cells = mask.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    raw.pixels[i] = cells[i] ? 255 : 0;
  }
  png_detail::write_png(raw, path);
}

inline MaskGrid load_mask(const std::string& path) {
  const png_detail::RawPng raw = png_detail::read_png(path);
  png_detail::require_gray(raw, path, "mask");
  std::vector<std::uint8_t> cells(raw.pixels.size());
  std::size_t bad = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::uint8_t v = raw.pixels[i];
    if (v != 0 && v != 255) ++bad;
    cells[i] = v == 255 ? 1 : 0;
  }
  if (bad > 0) {
    throw FormatError(path, "non-binary mask: " + std::to_string(bad) +
                                " pixel(s) outside {0, 255}");
  }
  return MaskGrid(raw.width, raw.height, std::move(cells));
}

// Semantic maps are 8-bit gray; the pixel value is the class id.
inline SemanticMap load_semantic(const std::string& path) {
  const png_detail::RawPng raw = png_detail::read_png(path);
  png_detail::require_gray(raw, path, "semantic map");
  std::vector<std::uint32_t> labels(raw.pixels.begin(), raw.pixels.end());
  return SemanticMap(raw.width, raw.height, std::move(labels));
}

inline void save_semantic(const SemanticMap& map, const std::string& path) {
  png_detail::RawPng raw = png_detail::gray8(map.width(), map.height());
  const auto labels = map.cells();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 255) {
      throw InvalidArgument("class id " + std::to_string(labels[i]) +
                            " does not fit an 8-bit semantic PNG (" + path +
                            ")");
    }
    raw.pixels[i] = static_cast<std::uint8_t>(labels[i]);
  }
  png_detail::write_png(raw, path);
}

}  // namespace xinpaint

#endif  // XINPAINT_CORE_PNG_IO_HPP_
