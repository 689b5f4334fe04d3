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

#ifndef XINPAINT_RECORDS_HPP_
#define XINPAINT_RECORDS_HPP_

#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "xinpaint/core/error.hpp"
#include "xinpaint/maskgen.hpp"
#include "xinpaint/metrics.hpp"

namespace xinpaint {

// Per-image scores plus the mask metadata needed for analysis.
struct MetricRecord {
  std::string image_id;
  MaskType mask_type = MaskType::kBox;
  double missing_fraction = 0.0;
  double psnr = 0.0;  // may be kPsnrInfinity
  double ssim = 0.0;
  double mae = 0.0;
  std::map<std::string, double> plugin_values;

  // Native metric by name, then plug-in values; nullopt if unknown.
  std::optional<double> metric(std::string_view name) const {
    if (name == "psnr") return psnr;
    if (name == "ssim") return ssim;
    if (name == "mae") return mae;
    if (name == "missing_fraction") return missing_fraction;
    const auto it = plugin_values.find(std::string(name));
    if (it == plugin_values.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const MetricRecord&, const MetricRecord&) = default;
};

inline constexpr std::array<std::string_view, 3> kNativeMetrics = {"psnr", "ssim",
                                                                   "mae"};

// Shortest decimal text that parses back to the same double; "inf" for the
// PSNR sentinel.
inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  if (s == "inf" || s == "+inf") return kPsnrInfinity;
  if (s == "-inf") return -kPsnrInfinity;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

// ---------------------------------------------------------------------------
// CSV

namespace csv {

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits CSV text into rows of fields, honoring double-quoted fields.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_has_data = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      row_has_data = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      row_has_data = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (row_has_data || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      row_has_data = false;
    } else {
      field += c;
      row_has_data = true;
    }
  }
  if (quoted) throw InvalidArgument("unterminated quoted CSV field");
  if (row_has_data || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace csv

// Union of plug-in metric names, sorted.
inline std::vector<std::string> plugin_columns(
    const std::vector<MetricRecord>& records) {
  std::set<std::string> names;
  for (const MetricRecord& r : records) {
    for (const auto& [name, _] : r.plugin_values) names.insert(name);
  }
  return {names.begin(), names.end()};
}

// Header: image_id,mask_type,missing_fraction,psnr,ssim,mae then one column
// per plug-in metric. Records lacking a plug-in value leave the cell empty.
inline std::string records_to_csv(const std::vector<MetricRecord>& records) {
  const std::vector<std::string> extra = plugin_columns(records);
  std::ostringstream out;
  out << "image_id,mask_type,missing_fraction,psnr,ssim,mae";
  for (const std::string& name : extra) out << ',' << csv::escape(name);
  out << '\n';
  for (const MetricRecord& r : records) {
    out << csv::escape(r.image_id) << ',' << to_string(r.mask_type) << ','
        << format_number(r.missing_fraction) << ',' << format_number(r.psnr)
        << ',' << format_number(r.ssim) << ',' << format_number(r.mae);
    for (const std::string& name : extra) {
      out << ',';
      const auto it = r.plugin_values.find(name);
      if (it != r.plugin_values.end()) out << format_number(it->second);
    }
    out << '\n';
  }
  return out.str();
}

inline std::vector<MetricRecord> records_from_csv(std::string_view text,
                                                  const std::string& origin) {
  const auto rows = csv::parse(text);
  static constexpr std::array<std::string_view, 6> kFixed = {
      "image_id", "mask_type", "missing_fraction", "psnr", "ssim", "mae"};
  if (rows.empty() || rows[0].size() < kFixed.size()) {
    throw FormatError(origin, "records CSV lacks the standard header");
  }
  for (std::size_t i = 0; i < kFixed.size(); ++i) {
    if (rows[0][i] != kFixed[i]) {
      throw FormatError(origin, "records CSV column " + std::to_string(i + 1) +
                                    " must be '" + std::string(kFixed[i]) + "'");
    }
  }
  const std::vector<std::string>& header = rows[0];
  std::vector<MetricRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw FormatError(origin, "row " + std::to_string(r + 1) + " has " +
                                    std::to_string(row.size()) +
                                    " fields, header has " +
                                    std::to_string(header.size()));
    }
    try {
      MetricRecord rec;
      rec.image_id = row[0];
      rec.mask_type = parse_mask_type(row[1]);
      rec.missing_fraction = parse_number(row[2]);
      rec.psnr = parse_number(row[3]);
      rec.ssim = parse_number(row[4]);
      rec.mae = parse_number(row[5]);
      for (std::size_t c = kFixed.size(); c < row.size(); ++c) {
        if (!row[c].empty()) rec.plugin_values[header[c]] = parse_number(row[c]);
      }
      records.push_back(std::move(rec));
    } catch (const InvalidArgument& e) {
      throw FormatError(origin, "row " + std::to_string(r + 1) + ": " + e.what());
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// JSON. Non-finite numbers are written as strings ("inf").

inline nlohmann::json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_number(j.get<std::string>());
  return j.get<double>();
}

inline nlohmann::json to_json(const MetricRecord& r) {
  nlohmann::json plugins = nlohmann::json::object();
  for (const auto& [name, v] : r.plugin_values) plugins[name] = number_to_json(v);
  return {{"image_id", r.image_id},
          {"mask_type", std::string(to_string(r.mask_type))},
          {"missing_fraction", number_to_json(r.missing_fraction)},
          {"psnr", number_to_json(r.psnr)},
          {"ssim", number_to_json(r.ssim)},
          {"mae", number_to_json(r.mae)},
          {"plugin_values", std::move(plugins)}};
}

inline MetricRecord record_from_json(const nlohmann::json& j) {
  MetricRecord r;
  r.image_id = j.at("image_id").get<std::string>();
  r.mask_type = parse_mask_type(j.at("mask_type").get<std::string>());
  r.missing_fraction = number_from_json(j.at("missing_fraction"));
  r.psnr = number_from_json(j.at("psnr"));
  r.ssim = number_from_json(j.at("ssim"));
  r.mae = number_from_json(j.at("mae"));
  if (j.contains("plugin_values")) {
    for (const auto& [name, v] : j.at("plugin_values").items()) {
      r.plugin_values[name] = number_from_json(v);
    }
  }
  return r;
}

}  // namespace xinpaint

#endif  // XINPAINT_RECORDS_HPP_
