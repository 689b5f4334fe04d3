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

// Benchmark curation: class frequency statistics, class selection, coverage
// filtering, three-way track splitting and label translation.

#ifndef XINPAINT_DATASET_HPP_
#define XINPAINT_DATASET_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/image.hpp"
#include "xinpaint/core/rng.hpp"

namespace xinpaint {

using ClassId = std::uint32_t;

struct ClassCounts {
  std::uint64_t image_count = 0;  // images containing the class
  std::uint64_t pixel_count = 0;  // pixels labelled with the class

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

class ClassStats {
 public:
  void add(const SemanticMap& map) {
    std::map<ClassId, std::uint64_t> local;
    for (ClassId label : map.cells()) ++local[label];
    for (const auto& [id, pixels] : local) {
      ClassCounts& c = counts_[id];
      ++c.image_count;
      c.pixel_count += pixels;
    }
    ++total_images_;
  }

  // Associative; lets per-worker partial statistics be combined.
  void merge(const ClassStats& other) {
    for (const auto& [id, c] : other.counts_) {
      counts_[id].image_count += c.image_count;
      counts_[id].pixel_count += c.pixel_count;
    }
    total_images_ += other.total_images_;
  }

  void set(ClassId id, ClassCounts counts) { counts_[id] = counts; }

  const std::map<ClassId, ClassCounts>& counts() const { return counts_; }
  std::uint64_t total_images() const { return total_images_; }
  void set_total_images(std::uint64_t n) { total_images_ = n; }

  ClassCounts at(ClassId id) const {
    const auto it = counts_.find(id);
    return it == counts_.end() ? ClassCounts{} : it->second;
  }

  friend bool operator==(const ClassStats&, const ClassStats&) = default;

 private:
  std::map<ClassId, ClassCounts> counts_;
  std::uint64_t total_images_ = 0;
};

inline ClassStats compute_class_stats(std::span<const SemanticMap> maps) {
  if (maps.empty()) throw InvalidArgument("compute_class_stats: no maps");
  ClassStats stats;
  for (const SemanticMap& m : maps) stats.add(m);
  return stats;
}

namespace dataset_detail {

// Class ids ordered by descending key, ties by ascending id.
template <typename Key>
std::vector<ClassId> ranked(const ClassStats& stats, Key key) {
  std::vector<std::pair<std::uint64_t, ClassId>> v;
  for (const auto& [id, c] : stats.counts()) v.emplace_back(key(c), id);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<ClassId> ids;
  for (const auto& [_, id] : v) ids.push_back(id);
  return ids;
}

}  // namespace dataset_detail

// Union of the top-k_image classes by image count and the top-k_pixel
// classes by pixel count.
inline std::set<ClassId> select_classes(const ClassStats& stats,
                                        std::size_t k_image,
                                        std::size_t k_pixel) {
  if (k_image < 1 || k_pixel < 1) {
    throw InvalidArgument("select_classes: k_image and k_pixel must be >= 1");
  }
  const auto by_image = dataset_detail::ranked(
      stats, [](const ClassCounts& c) { return c.image_count; });
  const auto by_pixel = dataset_detail::ranked(
      stats, [](const ClassCounts& c) { return c.pixel_count; });
  std::set<ClassId> out;
  for (std::size_t i = 0; i < std::min(k_image, by_image.size()); ++i) {
    out.insert(by_image[i]);
  }
  for (std::size_t i = 0; i < std::min(k_pixel, by_pixel.size()); ++i) {
    out.insert(by_pixel[i]);
  }
  return out;
}

// Fraction of pixels whose label is in `allowed`.
inline double coverage(const SemanticMap& map, const std::set<ClassId>& allowed) {
  std::size_t hit = 0;
  for (ClassId label : map.cells()) hit += allowed.contains(label) ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(map.size());
}

inline bool passes_coverage(const SemanticMap& map,
                            const std::set<ClassId>& allowed, double threshold) {
  std::size_t hit = 0;
  for (ClassId label : map.cells()) hit += allowed.contains(label) ? 1 : 0;
  // Relative slack absorbs representation error in threshold * total
  // without admitting a whole pixel less.
  return static_cast<double>(hit) >=
         threshold * static_cast<double>(map.size()) * (1.0 - 1e-12);
}

// Ids whose maps have coverage >= threshold, in input order.
inline std::vector<std::string> filter_by_coverage(
    std::span<const std::pair<std::string, SemanticMap>> pairs,
    const std::set<ClassId>& allowed, double threshold = 0.90) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw InvalidArgument("coverage threshold must be in (0, 1]");
  }
  std::vector<std::string> kept;
  for (const auto& [id, map] : pairs) {
    if (passes_coverage(map, allowed, threshold)) kept.push_back(id);
  }
  return kept;
}

struct TrackSplit {
  std::vector<std::string> track1_only;
  std::vector<std::string> track2_only;
  std::vector<std::string> shared;

  friend bool operator==(const TrackSplit&, const TrackSplit&) = default;
};

// Uniform permutation cut into contiguous thirds. Remainders go to track 1,
// then track 2.
inline TrackSplit three_way_split(std::vector<std::string> ids, SeededRng& rng) {
  if (ids.size() < 3) {
    throw InvalidArgument("three_way_split needs at least 3 ids, got " +
                          std::to_string(ids.size()));
  }
  rng.shuffle(std::span<std::string>(ids));
  const std::size_t base = ids.size() / 3;
  const std::size_t rem = ids.size() % 3;
  const std::size_t n1 = base + (rem >= 1 ? 1 : 0);
  const std::size_t n2 = base + (rem >= 2 ? 1 : 0);
  TrackSplit s;
  s.track1_only.assign(ids.begin(), ids.begin() + n1);
  s.track2_only.assign(ids.begin() + n1, ids.begin() + n1 + n2);
  s.shared.assign(ids.begin() + n1 + n2, ids.end());
  return s;
}

// Source class -> target class. Labels without an entry translate to
// unmapped_id.
struct LabelMapping {
  std::map<ClassId, ClassId> pairs;
  ClassId unmapped_id = 255;
};

// Two columns per line (source target), separated by whitespace or a comma.
// Blank lines and lines starting with '#' are ignored.
inline LabelMapping parse_label_mapping(const std::string& text,
                                        const std::string& origin) {
  LabelMapping mapping;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first[0] == '#') continue;
    long long source = 0;
    long long target = 0;
    std::string extra;
    try {
      std::size_t used = 0;
      source = std::stoll(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
      std::string second;
      if (!(fields >> second)) throw std::invalid_argument("missing target");
      target = std::stoll(second, &used);
      if (used != second.size()) throw std::invalid_argument(second);
    } catch (const std::exception&) {
      throw FormatError(origin, "line " + std::to_string(line_no) +
                                    ": expected two integer class ids");
    }
    if (fields >> extra) {
      throw FormatError(origin, "line " + std::to_string(line_no) +
                                    ": more than two columns");
    }
    if (source < 0 || target < 0 || source > UINT32_MAX || target > UINT32_MAX) {
      throw FormatError(origin, "line " + std::to_string(line_no) +
                                    ": class ids must be non-negative");
    }
    if (!mapping.pairs.emplace(static_cast<ClassId>(source),
                               static_cast<ClassId>(target)).second) {
      throw FormatError(origin, "line " + std::to_string(line_no) +
                                    ": duplicate source class " +
                                    std::to_string(source));
    }
  }
  return mapping;
}

struct Translation {
  SemanticMap map;
  std::size_t unmapped_pixels = 0;
};

inline Translation translate_labels(const SemanticMap& map,
                                    const LabelMapping& mapping) {
  std::vector<ClassId> out(map.cells().begin(), map.cells().end());
  std::size_t unmapped = 0;
  for (ClassId& label : out) {
    const auto it = mapping.pairs.find(label);
    if (it == mapping.pairs.end()) {
      label = mapping.unmapped_id;
      ++unmapped;
    } else {
      label = it->second;
    }
  }
  return {SemanticMap(map.width(), map.height(), std::move(out)), unmapped};
}

}  // namespace xinpaint

#endif  // XINPAINT_DATASET_HPP_
