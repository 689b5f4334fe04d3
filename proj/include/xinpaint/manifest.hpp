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

// RunManifest: the declarative description of a benchmark run, serialized as
// canonical JSON (sorted keys, two-space indent, trailing newline). The schema
// is documented in docs/manifest.md.

#ifndef XINPAINT_MANIFEST_HPP_
#define XINPAINT_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xinpaint/core/error.hpp"
#include "xinpaint/core/png_io.hpp"
#include "xinpaint/core/rng.hpp"
#include "xinpaint/maskgen.hpp"

namespace xinpaint {

using Json = nlohmann::json;

inline constexpr std::string_view kManifestFormat = "xinpaint-manifest/1";

enum class SplitTag { kTrack1Only, kTrack2Only, kShared };

inline std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kTrack1Only:
      return "track1-only";
    case SplitTag::kTrack2Only:
      return "track2-only";
    case SplitTag::kShared:
      return "shared";
  }
  return "unknown";
}

inline SplitTag parse_split_tag(std::string_view s) {
  if (s == "track1-only") return SplitTag::kTrack1Only;
  if (s == "track2-only") return SplitTag::kTrack2Only;
  if (s == "shared") return SplitTag::kShared;
  throw InvalidArgument("unknown split tag '" + std::string(s) + "'");
}

struct ImageEntry {
  std::string id;
  std::string image;                    // ground-truth PNG
  std::optional<std::string> semantic;  // semantic PNG (track 2)

  friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

// A mask is either a stored PNG, a generation seed, or both (generated and
// then written out). Generator parameters are kept with the seed so the mask
// can be regenerated from the manifest alone.
struct MaskAssignment {
  std::string image_id;
  MaskType type = MaskType::kBox;
  std::optional<std::string> mask;
  std::optional<std::uint64_t> seed;
  std::optional<BoxParams> box;
  std::optional<CaParams> ca;
  std::optional<BrushParams> brush;

  friend bool operator==(const MaskAssignment&, const MaskAssignment&) = default;
};

struct RunManifest {
  std::vector<ImageEntry> images;
  std::vector<MaskAssignment> masks;
  int track = 1;
  std::optional<SplitTag> split_tag;

  // Throws InvalidArgument describing the first violated invariant.
  void validate() const {
    if (track != 1 && track != 2) {
      throw InvalidArgument("manifest track must be 1 or 2, got " +
                            std::to_string(track));
    }
    std::set<std::string> ids;
    for (const ImageEntry& e : images) {
      if (e.id.empty()) throw InvalidArgument("manifest image with empty id");
      if (!ids.insert(e.id).second) {
        throw InvalidArgument("duplicate image id '" + e.id + "'");
      }
      if (track == 2 && !e.semantic) {
        throw InvalidArgument("track 2 image '" + e.id +
                              "' has no semantic map");
      }
    }
    for (const MaskAssignment& m : masks) {
      if (!ids.contains(m.image_id)) {
        throw InvalidArgument("mask assignment references undeclared image '" +
                              m.image_id + "'");
      }
      if (!m.mask && !m.seed) {
        throw InvalidArgument("mask assignment for '" + m.image_id +
                              "' has neither a mask path nor a seed");
      }
    }
  }

  const ImageEntry* find_image(std::string_view id) const {
    for (const ImageEntry& e : images) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

// ---------------------------------------------------------------------------
// JSON mapping

inline Json to_json(const BoxParams& p) {
  return Json{{"fraction_range", {p.fraction_range.low, p.fraction_range.high}}};
}

inline Json to_json(const CaParams& p) {
  return Json{{"downscale", p.downscale},
              {"steps", p.steps},
              {"init_density", p.init_density},
              {"dilation_radius", p.dilation_radius}};
}

inline Json to_json(const BrushParams& p) {
  return Json{{"stroke_count", {p.stroke_count.low, p.stroke_count.high}},
              {"vertices", {p.vertices.low, p.vertices.high}},
              {"segment_length", {p.segment_length.low, p.segment_length.high}},
              {"brush_width", {p.brush_width.low, p.brush_width.high}},
              {"angle_jitter", p.angle_jitter}};
}

namespace manifest_detail {

template <typename T>
Interval<T> interval(const Json& j, const char* key) {
  const Json& a = j.at(key);
  if (!a.is_array() || a.size() != 2) {
    throw InvalidArgument(std::string("'") + key + "' must be a [low, high] pair");
  }
  return {a[0].get<T>(), a[1].get<T>()};
}

}  // namespace manifest_detail

inline BoxParams box_params_from_json(const Json& j) {
  BoxParams p;
  p.fraction_range = manifest_detail::interval<double>(j, "fraction_range");
  p.validate();
  return p;
}

inline CaParams ca_params_from_json(const Json& j) {
  CaParams p;
  p.downscale = j.at("downscale").get<int>();
  p.steps = j.at("steps").get<int>();
  p.init_density = j.at("init_density").get<double>();
  p.dilation_radius = j.at("dilation_radius").get<int>();
  p.validate();
  return p;
}

inline BrushParams brush_params_from_json(const Json& j) {
  using manifest_detail::interval;
  BrushParams p;
  p.stroke_count = interval<int>(j, "stroke_count");
  p.vertices = interval<int>(j, "vertices");
  p.segment_length = interval<double>(j, "segment_length");
  p.brush_width = interval<double>(j, "brush_width");
  p.angle_jitter = j.at("angle_jitter").get<double>();
  p.validate();
  return p;
}

inline Json to_json(const MaskConfig& c) {
  Json j{{"box", to_json(c.box)},
         {"brush", to_json(c.brush)},
         {"ca_init_density", c.ca_init_density},
         {"ca_dilation_radius", c.ca_dilation_radius}};
  if (c.ca_downscale) j["ca_downscale"] = *c.ca_downscale;
  if (c.ca_steps) j["ca_steps"] = *c.ca_steps;
  return j;
}

inline Json to_json(const MaskAssignment& m) {
  Json j{{"image_id", m.image_id}, {"mask_type", std::string(to_string(m.type))}};
  if (m.mask) j["mask"] = *m.mask;
  if (m.seed) j["seed"] = *m.seed;
  if (m.box) j["params"] = to_json(*m.box);
  if (m.ca) j["params"] = to_json(*m.ca);
  if (m.brush) j["params"] = to_json(*m.brush);
  return j;
}

inline MaskAssignment mask_assignment_from_json(const Json& j) {
  MaskAssignment m;
  m.image_id = j.at("image_id").get<std::string>();
  m.type = parse_mask_type(j.at("mask_type").get<std::string>());
  if (j.contains("mask")) m.mask = j.at("mask").get<std::string>();
  if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("params")) {
    const Json& p = j.at("params");
    switch (m.type) {
      case MaskType::kBox:
        m.box = box_params_from_json(p);
        break;
      case MaskType::kCellularAutomata:
        m.ca = ca_params_from_json(p);
        break;
      case MaskType::kFreeForm:
        m.brush = brush_params_from_json(p);
        break;
    }
  }
  return m;
}

inline Json to_json(const RunManifest& m) {
  Json images = Json::array();
  for (const ImageEntry& e : m.images) {
    Json j{{"id", e.id}, {"image", e.image}};
    if (e.semantic) j["semantic"] = *e.semantic;
    images.push_back(std::move(j));
  }
  Json masks = Json::array();
  for (const MaskAssignment& a : m.masks) masks.push_back(to_json(a));
  Json j{{"format", std::string(kManifestFormat)},
         {"rng_algorithm", std::string(kRngAlgorithm)},
         {"track", m.track},
         {"images", std::move(images)},
         {"masks", std::move(masks)}};
  if (m.split_tag) j["split_tag"] = std::string(to_string(*m.split_tag));
  return j;
}

inline RunManifest manifest_from_json(const Json& j) {
  if (j.value("format", std::string()) != kManifestFormat) {
    throw InvalidArgument("unsupported manifest format (expected '" +
                          std::string(kManifestFormat) + "')");
  }
  if (j.value("rng_algorithm", std::string()) != kRngAlgorithm) {
    throw InvalidArgument("manifest was produced with rng algorithm '" +
                          j.value("rng_algorithm", std::string()) +
                          "', this build implements '" +
                          std::string(kRngAlgorithm) + "'");
  }
  RunManifest m;
  m.track = j.at("track").get<int>();
  for (const Json& e : j.at("images")) {
    ImageEntry entry;
    entry.id = e.at("id").get<std::string>();
    entry.image = e.at("image").get<std::string>();
    if (e.contains("semantic")) entry.semantic = e.at("semantic").get<std::string>();
    m.images.push_back(std::move(entry));
  }
  for (const Json& a : j.at("masks")) {
    m.masks.push_back(mask_assignment_from_json(a));
  }
  if (j.contains("split_tag")) {
    m.split_tag = parse_split_tag(j.at("split_tag").get<std::string>());
  }
  m.validate();
  return m;
}

// Canonical text form: keys sorted, two-space indent, trailing newline.
inline std::string canonical_json(const Json& j) { return j.dump(2) + "\n"; }

inline std::string serialize_manifest(const RunManifest& m) {
  m.validate();
  return canonical_json(to_json(m));
}

inline RunManifest parse_manifest(std::string_view text,
                                  const std::string& origin = "<manifest>") {
  try {
    return manifest_from_json(Json::parse(text));
  } catch (const Json::exception& e) {
    throw FormatError(origin, std::string("invalid manifest: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(origin, std::string("invalid manifest: ") + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) throw IoError(path, "no such file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(path, "write failed");
}

inline RunManifest load_manifest(const std::string& path) {
  return parse_manifest(read_text_file(path), path);
}

inline void save_manifest(const RunManifest& m, const std::string& path) {
  write_text_file(path, serialize_manifest(m));
}

// Relative paths inside a manifest are relative to the manifest's directory.
inline std::string resolve_path(const std::filesystem::path& base_dir,
                                const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base_dir.empty()) return path.string();
  return (base_dir / path).lexically_normal().string();
}

// Loads the stored mask, or regenerates it from seed and parameters at the
// given image size.
inline MaskGrid resolve_mask(const MaskAssignment& a, int width, int height,
                             const std::filesystem::path& base_dir) {
  if (a.mask) {
    MaskGrid m = load_mask(resolve_path(base_dir, *a.mask));
    if (m.width() != width || m.height() != height) {
      throw DimensionMismatch("mask for '" + a.image_id + "' is " +
                              shape_string(m.width(), m.height()) +
                              " but image is " + shape_string(width, height));
    }
    return m;
  }
  if (!a.seed) {
    throw InvalidArgument("mask for '" + a.image_id +
                          "' has neither a path nor a seed");
  }
  MaskConfig config;
  if (a.box) config.box = *a.box;
  if (a.brush) config.brush = *a.brush;
  if (a.ca) {
    config.ca_downscale = a.ca->downscale;
    config.ca_steps = a.ca->steps;
    config.ca_init_density = a.ca->init_density;
    config.ca_dilation_radius = a.ca->dilation_radius;
  }
  SeededRng rng(*a.seed, "mask");
  return generate_mask(a.type, width, height, config, rng).mask;
}

}  // namespace xinpaint

#endif  // XINPAINT_MANIFEST_HPP_
