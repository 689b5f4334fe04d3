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

// Server-side scoring of a submission directory against a RunManifest.

#ifndef XINPAINT_EVALUATE_HPP_
#define XINPAINT_EVALUATE_HPP_

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "xinpaint/core/error.hpp"
#include "xinpaint/core/parallel.hpp"
#include "xinpaint/core/png_io.hpp"
#include "xinpaint/manifest.hpp"
#include "xinpaint/maskgen.hpp"
#include "xinpaint/metrics.hpp"
#include "xinpaint/plugin.hpp"
#include "xinpaint/records.hpp"

namespace xinpaint {

struct PluginSpec {
  std::string name;
  std::string command;
};

struct AbsentImage {
  std::string image_id;
  std::string reason;

  friend bool operator==(const AbsentImage&, const AbsentImage&) = default;
};

struct PluginFailure {
  std::string name;
  std::string message;
};

struct EvaluationResult {
  std::vector<MetricRecord> records;  // sorted by image id
  std::vector<AbsentImage> absent;    // sorted by image id
  std::map<std::string, double> run_metrics;  // scalar plug-in values
  std::vector<PluginFailure> plugin_failures;
};

struct EvaluateOptions {
  std::filesystem::path manifest_dir;  // base for relative manifest paths
  int jobs = 1;
  std::vector<PluginSpec> plugins;
};

// Scores one output against its ground truth.
inline MetricRecord score_image(std::string image_id, MaskType type,
                                const ImageBuffer& gt, const ImageBuffer& output,
                                const MaskGrid& mask) {
  require_same_dims(gt, mask, "score_image");
  MetricRecord r;
  r.image_id = std::move(image_id);
  r.mask_type = type;
  r.missing_fraction = missing_fraction(mask);
  r.psnr = psnr(gt, output);
  r.ssim = ssim(gt, output);
  r.mae = mae(gt, output);
  return r;
}

namespace evaluate_detail {

// Maps each image id to its single mask assignment.
inline std::map<std::string, const MaskAssignment*> mask_by_image(
    const RunManifest& manifest) {
  std::map<std::string, const MaskAssignment*> out;
  for (const MaskAssignment& m : manifest.masks) {
    if (!out.emplace(m.image_id, &m).second) {
      throw InvalidArgument("image '" + m.image_id +
                            "' has more than one mask assignment; evaluation "
                            "needs exactly one per image");
    }
  }
  for (const ImageEntry& e : manifest.images) {
    if (!out.contains(e.id)) {
      throw InvalidArgument("image '" + e.id + "' has no mask assignment");
    }
  }
  return out;
}

// Temporary directory pair of symlinks <id>.png, removed on destruction.
class PluginStage {
 public:
  PluginStage() {
    static std::atomic<unsigned> counter{0};
    root_ = std::filesystem::temp_directory_path() /
            ("xinpaint-plugin-" + std::to_string(::getpid()) + "-" +
             std::to_string(counter++));
    std::filesystem::create_directories(root_ / "gt");
    std::filesystem::create_directories(root_ / "out");
  }
  ~PluginStage() {
    std::error_code ec;
    std::filesystem::remove_all(root_, ec);
  }
  PluginStage(const PluginStage&) = delete;
  PluginStage& operator=(const PluginStage&) = delete;

  void add(const std::string& id, const std::string& gt, const std::string& out) {
    std::filesystem::create_symlink(std::filesystem::absolute(gt),
                                    gt_dir() / (id + ".png"));
    std::filesystem::create_symlink(std::filesystem::absolute(out),
                                    out_dir() / (id + ".png"));
  }
  std::filesystem::path gt_dir() const { return root_ / "gt"; }
  std::filesystem::path out_dir() const { return root_ / "out"; }

 private:
  std::filesystem::path root_;
};

}  // namespace evaluate_detail

inline std::string output_path_for(const std::filesystem::path& outputs_dir,
                                   const std::string& image_id) {
  return (outputs_dir / (image_id + ".png")).string();
}

// Runs every plug-in serially over the scored ids. Failures are recorded and
// do not affect native metrics.
inline void attach_plugins(EvaluationResult& result, const RunManifest& manifest,
                           const EvaluateOptions& options,
                           const std::filesystem::path& outputs_dir) {
  if (options.plugins.empty() || result.records.empty()) return;
  evaluate_detail::PluginStage stage;
  std::set<std::string> ids;
  for (const MetricRecord& r : result.records) {
    const ImageEntry* e = manifest.find_image(r.image_id);
    stage.add(r.image_id, resolve_path(options.manifest_dir, e->image),
              output_path_for(outputs_dir, r.image_id));
    ids.insert(r.image_id);
  }
  for (const PluginSpec& spec : options.plugins) {
    try {
      const PluginResult pr = run_plugin_metric(
          spec.name, spec.command, stage.gt_dir().string(), stage.out_dir().string());
      check_plugin_ids(pr, ids);
      if (pr.is_scalar()) {
        result.run_metrics[spec.name] = *pr.scalar;
      } else {
        for (MetricRecord& r : result.records) {
          r.plugin_values[spec.name] = pr.per_image.at(r.image_id);
        }
      }
    } catch (const PluginError& e) {
      result.plugin_failures.push_back({spec.name, e.what()});
    }
  }
}

// Scores outputs_dir/<image_id>.png for every manifest image. Missing or
// mis-sized outputs are reported in `absent` and the run continues; problems
// with the ground truth or mask abort with an error naming the image.
inline EvaluationResult evaluate_run(const RunManifest& manifest,
                                     const std::filesystem::path& outputs_dir,
                                     const EvaluateOptions& options = {}) {
  manifest.validate();
  const auto masks = evaluate_detail::mask_by_image(manifest);
  std::vector<const ImageEntry*> entries;
  for (const ImageEntry& e : manifest.images) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(),
            [](const ImageEntry* a, const ImageEntry* b) { return a->id < b->id; });

  std::vector<std::optional<MetricRecord>> scored(entries.size());
  std::vector<std::optional<AbsentImage>> missing(entries.size());
  parallel_for(entries.size(), options.jobs, [&](std::size_t i) {
    const ImageEntry& e = *entries[i];
    const std::string out_path = output_path_for(outputs_dir, e.id);
    std::error_code ec;
    if (!std::filesystem::exists(out_path, ec)) {
      missing[i] = AbsentImage{e.id, "missing output file " + out_path};
      return;
    }
    ImageBuffer gt;
    MaskGrid mask;
    try {
      gt = load_image(resolve_path(options.manifest_dir, e.image));
      mask = resolve_mask(*masks.at(e.id), gt.width(), gt.height(),
                          options.manifest_dir);
    } catch (const Error& err) {
      throw Error("image '" + e.id + "': " + err.what());
    }
    try {
      const ImageBuffer out = load_image(out_path);
      if (!out.same_shape(gt)) {
        throw DimensionMismatch("output is " + out.shape() +
                                " but ground truth is " + gt.shape());
      }
      scored[i] = score_image(e.id, masks.at(e.id)->type, gt, out, mask);
    } catch (const Error& err) {
      missing[i] = AbsentImage{e.id, err.what()};
    }
  });

  EvaluationResult result;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (scored[i]) result.records.push_back(std::move(*scored[i]));
    if (missing[i]) result.absent.push_back(std::move(*missing[i]));
  }
  attach_plugins(result, manifest, options, outputs_dir);
  return result;
}

inline nlohmann::json to_json(const EvaluationResult& r) {
  nlohmann::json records = nlohmann::json::array();
  for (const MetricRecord& rec : r.records) records.push_back(to_json(rec));
  nlohmann::json absent = nlohmann::json::array();
  for (const AbsentImage& a : r.absent) {
    absent.push_back({{"image_id", a.image_id}, {"reason", a.reason}});
  }
  nlohmann::json run = nlohmann::json::object();
  for (const auto& [name, v] : r.run_metrics) run[name] = number_to_json(v);
  nlohmann::json failures = nlohmann::json::array();
  for (const PluginFailure& f : r.plugin_failures) {
    failures.push_back({{"plugin", f.name}, {"message", f.message}});
  }
  return {{"records", std::move(records)},
          {"absent", std::move(absent)},
          {"run_metrics", std::move(run)},
          {"plugin_failures", std::move(failures)}};
}

}  // namespace xinpaint

#endif  // XINPAINT_EVALUATE_HPP_
