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

// Reports built from metric records: per-mask-type tables, the masked-input
// baseline, missing-fraction scatter series and paired run comparison.

#ifndef XINPAINT_ANALYSIS_HPP_
#define XINPAINT_ANALYSIS_HPP_

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "xinpaint/core/error.hpp"
#include "xinpaint/core/parallel.hpp"
#include "xinpaint/core/png_io.hpp"
#include "xinpaint/degrade.hpp"
#include "xinpaint/evaluate.hpp"
#include "xinpaint/manifest.hpp"
#include "xinpaint/metrics.hpp"
#include "xinpaint/records.hpp"

namespace xinpaint {

struct MetricSummary {
  std::string metric;
  Summary summary;

  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct MaskTypeRow {
  MaskType type;
  std::size_t records = 0;
  std::vector<MetricSummary> metrics;  // in table column order

  const MetricSummary* find(std::string_view metric) const {
    for (const MetricSummary& m : metrics) {
      if (m.metric == metric) return &m;
    }
    return nullptr;
  }

  friend bool operator==(const MaskTypeRow&, const MaskTypeRow&) = default;
};

struct MaskTypeTable {
  std::vector<std::string> metrics;  // column order
  std::vector<MaskTypeRow> rows;     // box, cellular_automata, free_form

  const MaskTypeRow* find(MaskType type) const {
    for (const MaskTypeRow& r : rows) {
      if (r.type == type) return &r;
    }
    return nullptr;
  }

  friend bool operator==(const MaskTypeTable&, const MaskTypeTable&) = default;
};

// LPIPS first when present, then PSNR, SSIM, MAE, then other plug-in metrics
// alphabetically.
inline std::vector<std::string> table_metric_order(
    const std::vector<MetricRecord>& records) {
  const std::vector<std::string> plugins = plugin_columns(records);
  std::vector<std::string> order;
  if (std::find(plugins.begin(), plugins.end(), "lpips") != plugins.end()) {
    order.push_back("lpips");
  }
  for (std::string_view m : kNativeMetrics) order.emplace_back(m);
  for (const std::string& p : plugins) {
    if (p != "lpips") order.push_back(p);
  }
  return order;
}

// Values are sorted before aggregation so the result does not depend on
// record order.
inline MaskTypeTable per_mask_type_table(const std::vector<MetricRecord>& records) {
  if (records.empty()) throw InvalidArgument("per_mask_type_table: no records");
  MaskTypeTable table;
  table.metrics = table_metric_order(records);
  for (MaskType type : kAllMaskTypes) {
    MaskTypeRow row{type, 0, {}};
    for (const MetricRecord& r : records) row.records += r.mask_type == type ? 1 : 0;
    if (row.records == 0) continue;
    for (const std::string& metric : table.metrics) {
      std::vector<double> values;
      for (const MetricRecord& r : records) {
        if (r.mask_type != type) continue;
        if (const auto v = r.metric(metric)) values.push_back(*v);
      }
      std::sort(values.begin(), values.end());
      row.metrics.push_back({metric, summarize(values)});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

// Long format: one line per (mask type, metric). Empty mean/std when every
// value was excluded.
inline std::string table_to_csv(const MaskTypeTable& table) {
  std::ostringstream out;
  out << "mask_type,metric,mean,std,n,excluded\n";
  for (const MaskTypeRow& row : table.rows) {
    for (const MetricSummary& m : row.metrics) {
      out << to_string(row.type) << ',' << m.metric << ',';
      if (m.summary.stats) {
        out << format_number(m.summary.stats->mean) << ','
            << format_number(m.summary.stats->std) << ',' << m.summary.stats->n;
      } else {
        out << ",,0";
      }
      out << ',' << m.summary.excluded << '\n';
    }
  }
  return out.str();
}

namespace analysis_detail {

inline std::string pad(std::string s, std::size_t width) {
  // Count code points so the UTF-8 plus-minus sign pads like one column.
  std::size_t cols = 0;
  for (unsigned char c : s) cols += (c & 0xC0) != 0x80 ? 1 : 0;
  if (cols < width) s.append(width - cols, ' ');
  return s;
}

inline std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace analysis_detail

// Aligned plain-text rendering: "mean ± std" per metric, with a note when
// infinite PSNR values were excluded.
inline std::string table_to_text(const MaskTypeTable& table, int digits = 4) {
  using analysis_detail::pad;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"Mask Type", "N"};
  for (const std::string& m : table.metrics) header.push_back(analysis_detail::upper(m));
  cells.push_back(header);
  for (const MaskTypeRow& row : table.rows) {
    std::vector<std::string> line = {std::string(to_string(row.type)),
                                     std::to_string(row.records)};
    for (const MetricSummary& m : row.metrics) {
      std::string cell;
      if (m.summary.stats) {
        cell = analysis_detail::fixed(m.summary.stats->mean, digits) + " ± " +
               analysis_detail::fixed(m.summary.stats->std, digits);
      } else {
        cell = "n/a";
      }
      if (m.summary.excluded > 0) {
        cell += " (" + std::to_string(m.summary.excluded) + " inf excluded)";
      }
      line.push_back(cell);
    }
    cells.push_back(line);
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      std::size_t cols = 0;
      for (unsigned char ch : line[c]) cols += (ch & 0xC0) != 0x80 ? 1 : 0;
      widths[c] = std::max(widths[c], cols);
    }
  }
  std::ostringstream out;
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      text += c + 1 == line.size() ? line[c] : pad(line[c], widths[c] + 2);
    }
    out << text << '\n';
  }
  return out.str();
}

// Metrics of every degraded input against its ground truth, one record per
// mask assignment (an image may carry several).
inline std::vector<MetricRecord> masked_baseline_records(
    const RunManifest& manifest, const std::filesystem::path& manifest_dir,
    int jobs = 1) {
  manifest.validate();
  std::vector<MetricRecord> records(manifest.masks.size());
  parallel_for(manifest.masks.size(), jobs, [&](std::size_t i) {
    const MaskAssignment& a = manifest.masks[i];
    try {
      const ImageEntry* e = manifest.find_image(a.image_id);
      const ImageBuffer gt = load_image(resolve_path(manifest_dir, e->image));
      const MaskGrid mask = resolve_mask(a, gt.width(), gt.height(), manifest_dir);
      records[i] = score_image(a.image_id, a.type, gt, apply_mask(gt, mask), mask);
    } catch (const Error& err) {
      throw Error("image '" + a.image_id + "': " + err.what());
    }
  });
  std::stable_sort(records.begin(), records.end(),
                   [](const MetricRecord& x, const MetricRecord& y) {
                     return x.image_id < y.image_id;
                   });
  return records;
}

inline MaskTypeTable masked_baseline(const RunManifest& manifest,
                                     const std::filesystem::path& manifest_dir,
                                     int jobs = 1) {
  return per_mask_type_table(masked_baseline_records(manifest, manifest_dir, jobs));
}

struct ScatterPoint {
  double missing_fraction = 0.0;
  double value = 0.0;
  MaskType mask_type = MaskType::kBox;
  std::string image_id;

  friend bool operator==(const ScatterPoint&, const ScatterPoint&) = default;
};

// One point per record, ordered by missing fraction then image id.
inline std::vector<ScatterPoint> scatter_series(
    const std::vector<MetricRecord>& records, std::string_view metric) {
  std::vector<ScatterPoint> points;
  for (const MetricRecord& r : records) {
    const auto v = r.metric(metric);
    if (!v) {
      throw InvalidArgument("unknown metric '" + std::string(metric) +
                            "' (record '" + r.image_id + "' has no such value)");
    }
    points.push_back({r.missing_fraction, *v, r.mask_type, r.image_id});
  }
  std::sort(points.begin(), points.end(),
            [](const ScatterPoint& a, const ScatterPoint& b) {
              if (a.missing_fraction != b.missing_fraction) {
                return a.missing_fraction < b.missing_fraction;
              }
              return a.image_id < b.image_id;
            });
  return points;
}

inline std::string scatter_to_csv(const std::vector<ScatterPoint>& points) {
  std::ostringstream out;
  out << "missing_fraction,value,mask_type,image_id\n";
  for (const ScatterPoint& p : points) {
    out << format_number(p.missing_fraction) << ',' << format_number(p.value)
        << ',' << to_string(p.mask_type) << ',' << csv::escape(p.image_id) << '\n';
  }
  return out.str();
}

struct PairedRecord {
  std::string image_id;
  MetricRecord run_a;
  MetricRecord run_b;
  std::map<std::string, double> deltas;  // run_b - run_a
};

struct RunComparison {
  std::vector<std::string> metrics;
  std::vector<PairedRecord> pairs;  // sorted by image id
  std::map<std::string, Summary> delta_summary;
};

// b - a, except that equal values (including two infinite PSNRs) give 0.
inline double metric_delta(double a, double b) { return a == b ? 0.0 : b - a; }

inline RunComparison compare_runs(const std::vector<MetricRecord>& run_a,
                                  const std::vector<MetricRecord>& run_b) {
  auto index = [](const std::vector<MetricRecord>& run, const char* label) {
    std::map<std::string, const MetricRecord*> by_id;
    for (const MetricRecord& r : run) {
      if (!by_id.emplace(r.image_id, &r).second) {
        throw InvalidArgument(std::string("compare_runs: duplicate image id '") +
                              r.image_id + "' in " + label);
      }
    }
    return by_id;
  };
  const auto a = index(run_a, "first run");
  const auto b = index(run_b, "second run");
  RunComparison cmp;
  for (const auto& [id, ra] : a) {
    const auto it = b.find(id);
    if (it != b.end()) cmp.pairs.push_back({id, *ra, *it->second, {}});
  }
  if (cmp.pairs.empty()) {
    throw InvalidArgument("compare_runs: the runs share no image ids");
  }
  for (std::string_view m : kNativeMetrics) cmp.metrics.emplace_back(m);
  // Plug-in metrics present on both sides of every pair.
  std::set<std::string> common;
  bool first = true;
  for (const PairedRecord& p : cmp.pairs) {
    std::set<std::string> here;
    for (const auto& [name, _] : p.run_a.plugin_values) {
      if (p.run_b.plugin_values.contains(name)) here.insert(name);
    }
    if (first) {
      common = std::move(here);
      first = false;
    } else {
      std::set<std::string> keep;
      std::set_intersection(common.begin(), common.end(), here.begin(), here.end(),
                            std::inserter(keep, keep.begin()));
      common = std::move(keep);
    }
  }
  cmp.metrics.insert(cmp.metrics.end(), common.begin(), common.end());
  for (const std::string& m : cmp.metrics) {
    std::vector<double> deltas;
    for (PairedRecord& p : cmp.pairs) {
      const double d = metric_delta(*p.run_a.metric(m), *p.run_b.metric(m));
      p.deltas[m] = d;
      deltas.push_back(d);
    }
    std::sort(deltas.begin(), deltas.end());
    cmp.delta_summary[m] = summarize(deltas);
  }
  return cmp;
}

// Columns: image_id,mask_type then <metric>_a,<metric>_b,<metric>_delta for
// every compared metric.
inline std::string comparison_to_csv(const RunComparison& cmp) {
  std::ostringstream out;
  out << "image_id,mask_type";
  for (const std::string& m : cmp.metrics) {
    out << ',' << m << "_a," << m << "_b," << m << "_delta";
  }
  out << '\n';
  for (const PairedRecord& p : cmp.pairs) {
    out << csv::escape(p.image_id) << ',' << to_string(p.run_a.mask_type);
    for (const std::string& m : cmp.metrics) {
      out << ',' << format_number(*p.run_a.metric(m)) << ','
          << format_number(*p.run_b.metric(m)) << ','
          << format_number(p.deltas.at(m));
    }
    out << '\n';
  }
  return out.str();
}

inline std::string comparison_summary_to_csv(const RunComparison& cmp) {
  std::ostringstream out;
  out << "metric,mean_delta,std_delta,n,excluded\n";
  for (const std::string& m : cmp.metrics) {
    const Summary& s = cmp.delta_summary.at(m);
    out << m << ',';
    if (s.stats) {
      out << format_number(s.stats->mean) << ',' << format_number(s.stats->std)
          << ',' << s.stats->n;
    } else {
      out << ",,0";
    }
    out << ',' << s.excluded << '\n';
  }
  return out.str();
}

}  // namespace xinpaint

#endif  // XINPAINT_ANALYSIS_HPP_
