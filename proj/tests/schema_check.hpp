// Copyright 2026 The screenrep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Checks a serialized cluster-report cell against the golden schema plus
// the cross-field rules the schema format cannot express.

#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "screenrep/color_analysis.hpp"

namespace testsupport {

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

inline bool has_type(const nlohmann::json& v, const std::string& type) {
  if (type == "string") return v.is_string();
  if (type == "unsigned") return v.is_number_unsigned();
  if (type == "number") return v.is_number();
  if (type == "array") return v.is_array();
  if (type == "object") return v.is_object();
  return false;
}

inline void check_object(const nlohmann::json& v, const nlohmann::json& rules,
                         const std::string& where, std::vector<std::string>& problems) {
  if (!v.is_object()) {
    problems.push_back(where + ": not an object");
    return;
  }
  for (const auto& key : rules["required"]) {
    if (!v.contains(key.get<std::string>())) {
      problems.push_back(where + ": missing " + key.get<std::string>());
    }
  }
  for (const auto& [key, _] : v.items()) {
    if (!rules["types"].contains(key)) problems.push_back(where + ": unexpected " + key);
  }
  for (const auto& [key, type] : rules["types"].items()) {
    if (v.contains(key) && !has_type(v[key], type.get<std::string>())) {
      problems.push_back(where + "." + key + ": expected " + type.get<std::string>());
    }
  }
  if (rules.contains("enums")) {
    for (const auto& [key, allowed] : rules["enums"].items()) {
      if (!v.contains(key)) continue;
      bool ok = false;
      for (const auto& a : allowed) ok = ok || a == v[key];
      if (!ok) problems.push_back(where + "." + key + ": value not allowed");
    }
  }
}

inline std::vector<std::string> cluster_cell_problems(const nlohmann::json& cell,
                                                      const nlohmann::json& schema) {
  std::vector<std::string> problems;
  check_object(cell, schema["cell"], "cell", problems);
  if (!problems.empty()) return problems;

  const auto& clusters = cell["clusters"];
  const bool ok = cell["status"] == "ok";
  if (ok && (cell["selected_k"].get<std::size_t>() < 2 ||
             clusters.size() != cell["selected_k"].get<std::size_t>())) {
    problems.push_back("cell: selected_k does not match clusters");
  }
  if (!ok && !clusters.empty()) problems.push_back("cell: insufficient cell has clusters");

  double total = 0.0;
  double previous = 101.0;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const std::string where = "clusters[" + std::to_string(i) + "]";
    check_object(clusters[i], schema["cluster"], where, problems);
    if (!problems.empty()) return problems;
    const auto& rgb = clusters[i]["centroid_rgb"];
    if (rgb.size() != 3) {
      problems.push_back(where + ".centroid_rgb: expected 3 channels");
      continue;
    }
    std::array<int, 3> ch{};
    for (std::size_t c = 0; c < 3; ++c) {
      if (!rgb[c].is_number_unsigned() || rgb[c].get<int>() > 255) {
        problems.push_back(where + ".centroid_rgb: channel outside 0..255");
        return problems;
      }
      ch[c] = rgb[c].get<int>();
    }
    const double b = clusters[i]["brightness_pct"].get<double>();
    const screenrep::Rgb color{static_cast<std::uint8_t>(ch[0]),
                               static_cast<std::uint8_t>(ch[1]),
                               static_cast<std::uint8_t>(ch[2])};
    if (b != screenrep::brightness_hsb(color)) {
      problems.push_back(where + ".brightness_pct: does not match centroid");
    }
    if (b > previous) problems.push_back(where + ": not in descending brightness");
    previous = b;
    const double p = clusters[i]["proportion_pct"].get<double>();
    if (!(p > 0.0 && p <= 100.0)) problems.push_back(where + ".proportion_pct: out of range");
    total += p;
  }
  if (ok && std::abs(total - 100.0) > 1e-9) problems.push_back("cell: proportions do not sum to 100");
  for (const auto& [k, s] : cell["silhouette_by_k"].items()) {
    if (!s.is_number() || s.get<double>() < -1.0 || s.get<double>() > 1.0) {
      problems.push_back("silhouette_by_k." + k + ": out of range");
    }
  }
  return problems;
}

}  // namespace testsupport
