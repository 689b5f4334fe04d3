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

// xinpaint command-line front end.
//
// Exit status: 0 success, 1 domain error, 2 usage error. Usage errors are
// detected before anything is written. Every successful subcommand writes
// run_record.json under --out.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xinpaint/xinpaint.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace xinpaint {
namespace {

// Bad flag values or combinations; exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::uint64_t seed = 0;
  int jobs = default_jobs();
  std::string out = ".";
};

// Generator overrides shared by genmask and degrade --gen.
struct GeneratorFlags {
  std::string type = "mixed";
  std::vector<double> box_range;
  std::optional<int> ca_downscale;
  std::optional<int> ca_steps;
  double ca_density = 0.5;
  int ca_radius = 1;
  std::vector<int> brush_strokes;
  std::vector<int> brush_vertices;
  std::vector<double> brush_length;
  std::vector<double> brush_width;
  std::optional<double> brush_jitter;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--type", type, "Mask family")
        ->check(CLI::IsMember({"box", "ca", "freeform", "mixed"}));
    cmd->add_option("--box-range", box_range,
                    "Box extent fraction range LOW HIGH (default 0.3 0.7)")
        ->expected(2);
    cmd->add_option("--ca-downscale", ca_downscale,
                    "Pin CA downscale factor (1, 2, 4 or 8; default random)");
    cmd->add_option("--ca-steps", ca_steps, "Pin CA step count (2-5; default random)");
    cmd->add_option("--ca-density", ca_density, "CA initial masked probability");
    cmd->add_option("--ca-radius", ca_radius, "CA dilation radius");
    cmd->add_option("--brush-strokes", brush_strokes, "Stroke count range LOW HIGH")
        ->expected(2);
    cmd->add_option("--brush-vertices", brush_vertices,
                    "Vertices per stroke range LOW HIGH")
        ->expected(2);
    cmd->add_option("--brush-length", brush_length,
                    "Segment length range, fraction of min dimension")
        ->expected(2);
    cmd->add_option("--brush-width", brush_width,
                    "Brush width range, fraction of min dimension")
        ->expected(2);
    cmd->add_option("--brush-jitter", brush_jitter, "Max turn per segment (radians)");
  }

  std::optional<MaskType> fixed_type() const {
    if (type == "mixed") return std::nullopt;
    return parse_mask_type(type);
  }

  MaskConfig config() const {
    MaskConfig c;
    if (!box_range.empty()) c.box.fraction_range = {box_range[0], box_range[1]};
    c.ca_downscale = ca_downscale;
    c.ca_steps = ca_steps;
    c.ca_init_density = ca_density;
    c.ca_dilation_radius = ca_radius;
    if (!brush_strokes.empty()) c.brush.stroke_count = {brush_strokes[0], brush_strokes[1]};
    if (!brush_vertices.empty()) c.brush.vertices = {brush_vertices[0], brush_vertices[1]};
    if (!brush_length.empty()) c.brush.segment_length = {brush_length[0], brush_length[1]};
    if (!brush_width.empty()) c.brush.brush_width = {brush_width[0], brush_width[1]};
    if (brush_jitter) c.brush.angle_jitter = *brush_jitter;
    try {
      c.box.validate();
      c.brush.validate();
      CaParams probe;
      probe.downscale = ca_downscale.value_or(1);
      probe.steps = ca_steps.value_or(2);
      probe.init_density = ca_density;
      probe.dilation_radius = ca_radius;
      probe.validate();
    } catch (const InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

// ---------------------------------------------------------------------------
// Helpers

void write_json(const fs::path& path, const json& j) {
  write_text_file(path.string(), canonical_json(j));
}

void write_run_record(const GlobalFlags& g, const std::string& subcommand,
                      json config) {
  write_json(fs::path(g.out) / "run_record.json",
             {{"toolkit", "xinpaint"},
              {"version", std::string(kVersion)},
              {"subcommand", subcommand},
              {"seed", g.seed},
              {"rng_algorithm", std::string(kRngAlgorithm)},
              {"config", std::move(config)}});
}

void require_dir(const std::string& path, const char* flag) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) {
    throw UsageError(std::string(flag) + ": not a directory: " + path);
  }
}

void require_file(const std::string& path, const char* flag) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw UsageError(std::string(flag) + ": no such file: " + path);
  }
}

// PNG files in a directory keyed by stem, sorted by id.
std::map<std::string, std::string> list_pngs(const std::string& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    out.emplace(entry.path().stem().string(), entry.path().string());
  }
  return out;
}

std::string absolute_string(const std::string& p) {
  return fs::absolute(p).lexically_normal().string();
}

void make_out_dir(const GlobalFlags& g) { fs::create_directories(g.out); }

json mask_params_json(MaskType type, const MaskConfig& config,
                      const std::optional<CaParams>& ca) {
  switch (type) {
    case MaskType::kBox:
      return to_json(config.box);
    case MaskType::kCellularAutomata:
      return to_json(*ca);
    case MaskType::kFreeForm:
      return to_json(config.brush);
  }
  return json::object();
}

struct SeededMask {
  GeneratedMask generated;
  std::uint64_t seed;
};

SeededMask generate_seeded(std::optional<MaskType> fixed, int width, int height,
                           const MaskConfig& config, std::uint64_t mask_seed) {
  SeededRng rng(mask_seed, "mask");
  const MaskType type = fixed ? *fixed : sample_mask_type(rng);
  return {generate_mask(type, width, height, config, rng), mask_seed};
}

void attach_params(MaskAssignment& a, const SeededMask& m, const MaskConfig& config) {
  a.seed = m.seed;
  switch (m.generated.type) {
    case MaskType::kBox:
      a.box = config.box;
      break;
    case MaskType::kCellularAutomata:
      a.ca = m.generated.ca;
      break;
    case MaskType::kFreeForm:
      a.brush = config.brush;
      break;
  }
}

// ---------------------------------------------------------------------------
// genmask

struct GenmaskFlags {
  int width = 0;
  int height = 0;
  int count = 1;
  GeneratorFlags gen;
};

int run_genmask(const GlobalFlags& g, const GenmaskFlags& f) {
  if (f.width < 1 || f.height < 1) throw UsageError("--width/--height must be positive");
  if (f.count < 1) throw UsageError("--count must be >= 1");
  const MaskConfig config = f.gen.config();
  const std::optional<MaskType> fixed = f.gen.fixed_type();

  std::vector<SeededMask> masks(static_cast<std::size_t>(f.count));
  const SeededRng seeds(g.seed, "genmask");
  parallel_for(masks.size(), g.jobs, [&](std::size_t i) {
    masks[i] = generate_seeded(fixed, f.width, f.height, config, seeds.draw_at(i));
  });

  make_out_dir(g);
  fs::create_directories(fs::path(g.out) / "masks");
  json list = json::array();
  for (std::size_t i = 0; i < masks.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "mask_%05zu.png", i);
    const fs::path rel = fs::path("masks") / name;
    save_mask(masks[i].generated.mask, (fs::path(g.out) / rel).string());
    list.push_back({{"file", rel.generic_string()},
                    {"mask_type", std::string(to_string(masks[i].generated.type))},
                    {"seed", masks[i].seed},
                    {"params", mask_params_json(masks[i].generated.type, config,
                                                masks[i].generated.ca)},
                    {"missing_fraction", missing_fraction(masks[i].generated.mask)}});
  }
  write_json(fs::path(g.out) / "masks.json",
             {{"rng_algorithm", std::string(kRngAlgorithm)},
              {"seed", g.seed},
              {"width", f.width},
              {"height", f.height},
              {"masks", std::move(list)}});
  write_run_record(g, "genmask",
                   {{"type", f.gen.type},
                    {"width", f.width},
                    {"height", f.height},
                    {"count", f.count},
                    {"generator", to_json(config)}});
  std::cerr << "genmask: wrote " << masks.size() << " mask(s) to " << g.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// degrade

struct DegradeFlags {
  std::string images;
  std::string masks;
  bool gen = false;
  int track = 1;
  std::string semantics;
  GeneratorFlags gen_flags;
};

int run_degrade(const GlobalFlags& g, const DegradeFlags& f) {
  require_dir(f.images, "--images");
  if (f.gen == !f.masks.empty()) {
    throw UsageError("exactly one of --masks DIR or --gen is required");
  }
  if (!f.masks.empty()) require_dir(f.masks, "--masks");
  if (f.track == 2 && f.semantics.empty()) {
    throw UsageError("--track 2 requires --semantics DIR");
  }
  if (f.track == 1 && !f.semantics.empty()) {
    throw UsageError("--semantics is only valid with --track 2");
  }
  if (!f.semantics.empty()) require_dir(f.semantics, "--semantics");
  const MaskConfig config = f.gen_flags.config();
  const std::optional<MaskType> fixed = f.gen_flags.fixed_type();

  const auto images = list_pngs(f.images);
  if (images.empty()) throw Error("no PNG images in " + f.images);
  const auto mask_files = f.masks.empty() ? decltype(images){} : list_pngs(f.masks);
  const auto semantic_files =
      f.semantics.empty() ? decltype(images){} : list_pngs(f.semantics);

  std::vector<std::pair<std::string, std::string>> items(images.begin(), images.end());
  for (const auto& [id, _] : items) {
    if (!f.masks.empty() && !mask_files.contains(id)) {
      throw Error("image '" + id + "': no mask " + id + ".png in " + f.masks);
    }
    if (f.track == 2 && !semantic_files.contains(id)) {
      throw Error("image '" + id + "': no semantic map " + id + ".png in " +
                  f.semantics);
    }
  }

  make_out_dir(g);
  const fs::path out(g.out);
  fs::create_directories(out / "inputs");
  fs::create_directories(out / "masks");
  if (f.track == 2) fs::create_directories(out / "semantics");

  std::vector<MaskAssignment> assignments(items.size());
  parallel_for(items.size(), g.jobs, [&](std::size_t i) {
    const auto& [id, path] = items[i];
    try {
      const ImageBuffer gt = load_image(path);
      MaskAssignment a;
      a.image_id = id;
      MaskGrid mask;
      if (f.gen) {
        const SeededMask m = generate_seeded(fixed, gt.width(), gt.height(), config,
                                             SeededRng(g.seed, "degrade/" + id).next_u64());
        mask = m.generated.mask;
        a.type = m.generated.type;
        attach_params(a, m, config);
      } else {
        mask = load_mask(mask_files.at(id));
        a.type = f.gen_flags.fixed_type().value_or(MaskType::kBox);
      }
      std::optional<SemanticMap> semantic;
      if (f.track == 2) semantic = load_semantic(semantic_files.at(id));
      const DegradedRecord rec = degrade_pair(gt, semantic, mask, f.track);
      save_image(rec.input, (out / "inputs" / (id + ".png")).string());
      save_mask(rec.mask, (out / "masks" / (id + ".png")).string());
      if (rec.semantic) {
        save_semantic(*rec.semantic, (out / "semantics" / (id + ".png")).string());
      }
      a.mask = "masks/" + id + ".png";
      assignments[i] = std::move(a);
    } catch (const Error& e) {
      throw Error("image '" + id + "': " + e.what());
    }
  });

  RunManifest manifest;
  manifest.track = f.track;
  for (const auto& [id, path] : items) {
    ImageEntry e{id, absolute_string(path), std::nullopt};
    if (f.track == 2) e.semantic = "semantics/" + id + ".png";
    manifest.images.push_back(std::move(e));
  }
  manifest.masks = std::move(assignments);
  save_manifest(manifest, (out / "manifest.json").string());
  write_run_record(g, "degrade",
                   {{"images", absolute_string(f.images)},
                    {"masks", f.masks.empty() ? json(nullptr) : json(absolute_string(f.masks))},
                    {"gen", f.gen},
                    {"type", f.gen_flags.type},
                    {"track", f.track},
                    {"semantics", f.semantics.empty() ? json(nullptr)
                                                      : json(absolute_string(f.semantics))},
                    {"generator", to_json(config)}});
  std::cerr << "degrade: wrote " << items.size() << " record(s) to " << g.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// filter

struct FilterFlags {
  std::string semantics;
  std::size_t k_image = 0;
  std::size_t k_pixel = 0;
  double threshold = 0.90;
  std::string mapping;
  std::string images;
};

int run_filter(const GlobalFlags& g, const FilterFlags& f) {
  require_dir(f.semantics, "--semantics");
  if (f.k_image < 1 || f.k_pixel < 1) throw UsageError("--k-image and --k-pixel must be >= 1");
  if (!(f.threshold > 0.0 && f.threshold <= 1.0)) {
    throw UsageError("--threshold must be in (0, 1]");
  }
  if (!f.mapping.empty()) require_file(f.mapping, "--mapping");
  if (!f.images.empty()) require_dir(f.images, "--images");

  const auto files = list_pngs(f.semantics);
  if (files.empty()) throw Error("no semantic PNGs in " + f.semantics);
  std::optional<LabelMapping> mapping;
  if (!f.mapping.empty()) {
    mapping = parse_label_mapping(read_text_file(f.mapping), f.mapping);
  }
  std::vector<std::pair<std::string, SemanticMap>> maps;
  std::size_t unmapped = 0;
  for (const auto& [id, path] : files) {
    SemanticMap m = load_semantic(path);
    if (mapping) {
      Translation t = translate_labels(m, *mapping);
      unmapped += t.unmapped_pixels;
      m = std::move(t.map);
    }
    maps.emplace_back(id, std::move(m));
  }
  std::map<std::string, std::string> image_files;
  if (!f.images.empty()) {
    image_files = list_pngs(f.images);
    for (const auto& [id, _] : maps) {
      if (!image_files.contains(id)) {
        throw Error("semantic map '" + id + "' has no image in " + f.images);
      }
    }
  }

  ClassStats stats;
  for (const auto& [_, m] : maps) stats.add(m);
  const std::set<ClassId> selected = select_classes(stats, f.k_image, f.k_pixel);
  const std::vector<std::string> kept = filter_by_coverage(maps, selected, f.threshold);

  make_out_dir(g);
  const fs::path out(g.out);
  {
    std::ostringstream csv;
    csv << "class_id,image_count,pixel_count\n";
    for (const auto& [id, c] : stats.counts()) {
      csv << id << ',' << c.image_count << ',' << c.pixel_count << '\n';
    }
    write_text_file((out / "class_stats.csv").string(), csv.str());
  }
  {
    std::ostringstream sel;
    for (ClassId id : selected) sel << id << '\n';
    write_text_file((out / "selected_classes.txt").string(), sel.str());
  }
  {
    std::ostringstream k;
    for (const std::string& id : kept) k << id << '\n';
    write_text_file((out / "kept.txt").string(), k.str());
  }
  if (!f.images.empty()) {
    RunManifest manifest;
    manifest.track = 2;
    if (mapping) fs::create_directories(out / "semantics");
    std::set<std::string> kept_set(kept.begin(), kept.end());
    for (const auto& [id, m] : maps) {
      if (!kept_set.contains(id)) continue;
      std::string semantic = absolute_string(files.at(id));
      if (mapping) {
        save_semantic(m, (out / "semantics" / (id + ".png")).string());
        semantic = "semantics/" + id + ".png";
      }
      manifest.images.push_back({id, absolute_string(image_files.at(id)), semantic});
    }
    save_manifest(manifest, (out / "manifest.json").string());
  }
  if (unmapped > 0) {
    std::cerr << "filter: warning: " << unmapped
              << " pixel(s) had labels absent from the mapping\n";
  }
  write_run_record(g, "filter",
                   {{"semantics", absolute_string(f.semantics)},
                    {"k_image", f.k_image},
                    {"k_pixel", f.k_pixel},
                    {"threshold", f.threshold},
                    {"mapping", f.mapping.empty() ? json(nullptr) : json(absolute_string(f.mapping))},
                    {"images", f.images.empty() ? json(nullptr) : json(absolute_string(f.images))},
                    {"selected_classes", selected.size()},
                    {"kept", kept.size()},
                    {"unmapped_pixels", unmapped}});
  std::cerr << "filter: kept " << kept.size() << " of " << maps.size()
            << " image(s) using " << selected.size() << " class(es)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// split

struct SplitFlags {
  std::string ids;
  std::string manifest;
};

std::vector<std::string> read_id_list(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> ids;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') continue;
    if (!seen.insert(line).second) throw FormatError(path, "duplicate id '" + line + "'");
    ids.push_back(line);
  }
  return ids;
}

RunManifest sub_manifest(const RunManifest& src, const fs::path& src_dir,
                         const std::vector<std::string>& ids, SplitTag tag) {
  const std::set<std::string> keep(ids.begin(), ids.end());
  RunManifest m;
  m.split_tag = tag;
  bool all_semantic = true;
  for (const ImageEntry& e : src.images) {
    if (!keep.contains(e.id)) continue;
    ImageEntry copy{e.id, absolute_string(resolve_path(src_dir, e.image)), std::nullopt};
    if (e.semantic) copy.semantic = absolute_string(resolve_path(src_dir, *e.semantic));
    all_semantic = all_semantic && copy.semantic.has_value();
    m.images.push_back(std::move(copy));
  }
  for (const MaskAssignment& a : src.masks) {
    if (!keep.contains(a.image_id)) continue;
    MaskAssignment copy = a;
    if (copy.mask) copy.mask = absolute_string(resolve_path(src_dir, *copy.mask));
    m.masks.push_back(std::move(copy));
  }
  switch (tag) {
    case SplitTag::kTrack1Only:
      m.track = 1;
      break;
    case SplitTag::kTrack2Only:
      if (!all_semantic) {
        throw Error("track2-only split contains images without semantic maps");
      }
      m.track = 2;
      break;
    case SplitTag::kShared:
      m.track = all_semantic ? 2 : 1;
      break;
  }
  return m;
}

int run_split(const GlobalFlags& g, const SplitFlags& f) {
  if (f.ids.empty() == f.manifest.empty()) {
    throw UsageError("exactly one of --ids FILE or --manifest FILE is required");
  }
  if (!f.ids.empty()) require_file(f.ids, "--ids");
  if (!f.manifest.empty()) require_file(f.manifest, "--manifest");

  std::optional<RunManifest> manifest;
  std::vector<std::string> ids;
  if (!f.ids.empty()) {
    ids = read_id_list(f.ids);
  } else {
    manifest = load_manifest(f.manifest);
    for (const ImageEntry& e : manifest->images) ids.push_back(e.id);
  }
  std::sort(ids.begin(), ids.end());
  SeededRng rng(g.seed, "split");
  const TrackSplit split = three_way_split(ids, rng);

  std::vector<std::pair<SplitTag, RunManifest>> subs;
  if (manifest) {
    const fs::path dir = fs::path(f.manifest).parent_path();
    subs.emplace_back(SplitTag::kTrack1Only,
                      sub_manifest(*manifest, dir, split.track1_only, SplitTag::kTrack1Only));
    subs.emplace_back(SplitTag::kTrack2Only,
                      sub_manifest(*manifest, dir, split.track2_only, SplitTag::kTrack2Only));
    subs.emplace_back(SplitTag::kShared,
                      sub_manifest(*manifest, dir, split.shared, SplitTag::kShared));
  }

  make_out_dir(g);
  const fs::path out(g.out);
  write_json(out / "splits.json", {{"rng_algorithm", std::string(kRngAlgorithm)},
                                   {"seed", g.seed},
                                   {"track1-only", split.track1_only},
                                   {"track2-only", split.track2_only},
                                   {"shared", split.shared}});
  for (const auto& [tag, m] : subs) {
    save_manifest(m, (out / ("manifest_" + std::string(to_string(tag)) + ".json")).string());
  }
  write_run_record(g, "split",
                   {{"ids", f.ids.empty() ? json(nullptr) : json(absolute_string(f.ids))},
                    {"manifest", f.manifest.empty() ? json(nullptr)
                                                    : json(absolute_string(f.manifest))},
                    {"count", ids.size()}});
  std::cerr << "split: " << split.track1_only.size() << " / " << split.track2_only.size()
            << " / " << split.shared.size() << " (track1-only / track2-only / shared)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateFlags {
  std::string manifest;
  std::string outputs;
  std::vector<std::string> plugins;
};

int run_evaluate(const GlobalFlags& g, const EvaluateFlags& f) {
  require_file(f.manifest, "--manifest");
  require_dir(f.outputs, "--outputs");
  EvaluateOptions options;
  options.jobs = g.jobs;
  options.manifest_dir = fs::path(f.manifest).parent_path();
  std::set<std::string> names;
  for (const std::string& spec : f.plugins) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw UsageError("--plugin expects NAME=COMMAND, got '" + spec + "'");
    }
    PluginSpec p{spec.substr(0, eq), spec.substr(eq + 1)};
    if (!names.insert(p.name).second) throw UsageError("duplicate plugin name '" + p.name + "'");
    options.plugins.push_back(std::move(p));
  }

  const RunManifest manifest = load_manifest(f.manifest);
  const EvaluationResult result = evaluate_run(manifest, f.outputs, options);

  make_out_dir(g);
  const fs::path out(g.out);
  write_text_file((out / "records.csv").string(), records_to_csv(result.records));
  write_json(out / "records.json", to_json(result));
  if (!result.records.empty()) {
    const MaskTypeTable table = per_mask_type_table(result.records);
    write_text_file((out / "by_mask_type.csv").string(), table_to_csv(table));
    write_text_file((out / "by_mask_type.txt").string(), table_to_text(table));
    std::cout << table_to_text(table);
  }
  for (const auto& [name, v] : result.run_metrics) {
    std::cout << name << " = " << format_number(v) << "\n";
  }
  json plugin_config = json::array();
  for (const PluginSpec& p : options.plugins) {
    plugin_config.push_back({{"name", p.name}, {"command", p.command}});
  }
  write_run_record(g, "evaluate",
                   {{"manifest", absolute_string(f.manifest)},
                    {"outputs", absolute_string(f.outputs)},
                    {"plugins", std::move(plugin_config)}});
  for (const AbsentImage& a : result.absent) {
    std::cerr << "evaluate: warning: image '" << a.image_id << "' absent: " << a.reason
              << "\n";
  }
  for (const PluginFailure& p : result.plugin_failures) {
    std::cerr << "xinpaint: error: " << p.message << "\n";
  }
  std::cerr << "evaluate: scored " << result.records.size() << " image(s), "
            << result.absent.size() << " absent\n";
  return result.plugin_failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// report

struct ReportFlags {
  std::string records;
  bool by_mask_type = false;
  std::vector<std::string> scatter;
  std::string compare;
};

int run_report(const GlobalFlags& g, const ReportFlags& f) {
  require_file(f.records, "--records");
  if (!f.by_mask_type && f.scatter.empty() && f.compare.empty()) {
    throw UsageError("report needs at least one of --by-mask-type, --scatter, --compare");
  }
  if (!f.compare.empty()) require_file(f.compare, "--compare");
  const auto records = records_from_csv(read_text_file(f.records), f.records);

  std::optional<MaskTypeTable> table;
  if (f.by_mask_type) table = per_mask_type_table(records);
  std::vector<std::pair<std::string, std::vector<ScatterPoint>>> series;
  for (const std::string& metric : f.scatter) {
    series.emplace_back(metric, scatter_series(records, metric));
  }
  std::optional<RunComparison> cmp;
  if (!f.compare.empty()) {
    cmp = compare_runs(records, records_from_csv(read_text_file(f.compare), f.compare));
  }

  make_out_dir(g);
  const fs::path out(g.out);
  if (table) {
    write_text_file((out / "by_mask_type.csv").string(), table_to_csv(*table));
    write_text_file((out / "by_mask_type.txt").string(), table_to_text(*table));
    std::cout << table_to_text(*table);
  }
  for (const auto& [metric, points] : series) {
    write_text_file((out / ("scatter_" + metric + ".csv")).string(), scatter_to_csv(points));
  }
  if (cmp) {
    write_text_file((out / "comparison.csv").string(), comparison_to_csv(*cmp));
    write_text_file((out / "comparison_summary.csv").string(),
                    comparison_summary_to_csv(*cmp));
    std::cout << comparison_summary_to_csv(*cmp);
  }
  write_run_record(g, "report",
                   {{"records", absolute_string(f.records)},
                    {"by_mask_type", f.by_mask_type},
                    {"scatter", f.scatter},
                    {"compare", f.compare.empty() ? json(nullptr) : json(absolute_string(f.compare))}});
  return 0;
}

}  // namespace
}  // namespace xinpaint

int main(int argc, char** argv) {
  using namespace xinpaint;
  CLI::App app{"xinpaint: extreme inpainting benchmark toolkit"};
  app.set_version_flag("--version", "xinpaint " + std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags global;
  app.add_option("--seed", global.seed, "Random seed (64-bit)");
  app.add_option("--jobs", global.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", global.out, "Output directory");

  GenmaskFlags genmask;
  CLI::App* cmd_genmask = app.add_subcommand("genmask", "Generate masks");
  cmd_genmask->add_option("--width", genmask.width, "Mask width")->required();
  cmd_genmask->add_option("--height", genmask.height, "Mask height")->required();
  cmd_genmask->add_option("--count", genmask.count, "Number of masks");
  genmask.gen.add_to(cmd_genmask);

  DegradeFlags degrade;
  CLI::App* cmd_degrade = app.add_subcommand("degrade", "Mask images into benchmark inputs");
  cmd_degrade->add_option("--images", degrade.images, "Ground-truth PNG directory")->required();
  cmd_degrade->add_option("--masks", degrade.masks, "Mask PNG directory (<id>.png)");
  cmd_degrade->add_flag("--gen", degrade.gen, "Generate masks from --seed");
  cmd_degrade->add_option("--track", degrade.track, "Track 1 or 2")
      ->check(CLI::IsMember({1, 2}));
  cmd_degrade->add_option("--semantics", degrade.semantics, "Semantic map directory (track 2)");
  degrade.gen_flags.add_to(cmd_degrade);

  FilterFlags filter;
  CLI::App* cmd_filter = app.add_subcommand("filter", "Select classes and filter by coverage");
  cmd_filter->add_option("--semantics", filter.semantics, "Semantic map directory")->required();
  cmd_filter->add_option("--k-image", filter.k_image, "Top classes by image count")->required();
  cmd_filter->add_option("--k-pixel", filter.k_pixel, "Top classes by pixel count")->required();
  cmd_filter->add_option("--threshold", filter.threshold, "Minimum covered fraction");
  cmd_filter->add_option("--mapping", filter.mapping, "Two-column label mapping file");
  cmd_filter->add_option("--images", filter.images, "Image directory; emits a track 2 manifest");

  SplitFlags split;
  CLI::App* cmd_split = app.add_subcommand("split", "Three-way track split");
  cmd_split->add_option("--ids", split.ids, "File with one image id per line");
  cmd_split->add_option("--manifest", split.manifest, "Manifest to split");

  EvaluateFlags evaluate;
  CLI::App* cmd_evaluate = app.add_subcommand("evaluate", "Score a submission");
  cmd_evaluate->add_option("--manifest", evaluate.manifest, "Run manifest")->required();
  cmd_evaluate->add_option("--outputs", evaluate.outputs, "Directory of <id>.png outputs")
      ->required();
  cmd_evaluate->add_option("--plugin", evaluate.plugins, "External metric NAME=COMMAND");

  ReportFlags report;
  CLI::App* cmd_report = app.add_subcommand("report", "Analysis tables from records CSV");
  cmd_report->add_option("--records", report.records, "Records CSV")->required();
  cmd_report->add_flag("--by-mask-type", report.by_mask_type, "Per-mask-type table");
  cmd_report->add_option("--scatter", report.scatter, "Scatter series for METRIC");
  cmd_report->add_option("--compare", report.compare, "Second records CSV to compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*cmd_genmask) return run_genmask(global, genmask);
    if (*cmd_degrade) return run_degrade(global, degrade);
    if (*cmd_filter) return run_filter(global, filter);
    if (*cmd_split) return run_split(global, split);
    if (*cmd_evaluate) return run_evaluate(global, evaluate);
    if (*cmd_report) return run_report(global, report);
  } catch (const UsageError& e) {
    std::cerr << "xinpaint: usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "xinpaint: error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "xinpaint: error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
