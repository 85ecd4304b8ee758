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

#include "screenrep/engine_config.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace screenrep {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfig, "config: " + what);
}

double number_of(const json& v, const std::string& key) {
  if (!v.is_number()) config_error(key + " must be a number");
  return v.get<double>();
}

std::int64_t integer_of(const json& v, const std::string& key) {
  if (!v.is_number_integer()) config_error(key + " must be an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > INT64_MAX) {
    config_error(key + " is too large");
  }
  return v.get<std::int64_t>();
}

int small_int_of(const json& v, const std::string& key) {
  const std::int64_t i = integer_of(v, key);
  if (i < INT32_MIN || i > INT32_MAX) config_error(key + " is out of range");
  return static_cast<int>(i);
}

Eigen::Vector3d point_of(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 3) config_error(key + " must be [x, y, z]");
  return {number_of(v[0], key), number_of(v[1], key), number_of(v[2], key)};
}

}  // namespace

void EngineConfig::validate() const {
  const MetricsConfig& m = metrics;
  if (!(m.confidence_min >= 0.0 && m.confidence_min <= 1.0)) {
    config_error("confidence_min must lie in [0, 1]");
  }
  if (m.k_pixels < 1) config_error("k_pixels must be >= 1");
  if (clusters.k_min < 2) config_error("k_min must be >= 2");
  if (clusters.k_min > clusters.k_max) {
    config_error("k_min (" + std::to_string(clusters.k_min) +
                 ") exceeds k_max (" + std::to_string(clusters.k_max) + ")");
  }
  if (clusters.restarts < 1) config_error("restarts must be >= 1");
  if (jobs < 1) config_error("jobs must be >= 1");
  if (m.exact_sample_limit < 1) config_error("exact_sample_limit must be >= 1");
  for (const auto& [id, cam] : m.intrinsics_override) {
    try {
      cam.validate();
    } catch (const Error& e) {
      config_error("intrinsics_override." + id + ": " + e.what());
    }
  }
}

EngineConfig parse_engine_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("top level must be an object");

  EngineConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "confidence_min") {
      cfg.metrics.confidence_min = number_of(v, key);
    } else if (key == "k_pixels") {
      cfg.metrics.k_pixels = small_int_of(v, key);
    } else if (key == "k_min") {
      cfg.clusters.k_min = small_int_of(v, key);
    } else if (key == "k_max") {
      cfg.clusters.k_max = small_int_of(v, key);
    } else if (key == "restarts") {
      cfg.clusters.restarts = small_int_of(v, key);
    } else if (key == "seed") {
      const std::int64_t seed = integer_of(v, key);
      if (seed < 0) config_error("seed must be non-negative");
      cfg.metrics.seed = static_cast<std::uint64_t>(seed);
      cfg.clusters.seed = cfg.metrics.seed;
    } else if (key == "weight_by_faces") {
      if (!v.is_boolean()) config_error("weight_by_faces must be a boolean");
      cfg.metrics.weight_by_faces = v.get<bool>();
    } else if (key == "jobs") {
      cfg.jobs = small_int_of(v, key);
    } else if (key == "exact_sample_limit") {
      const std::int64_t limit = integer_of(v, key);
      if (limit < 1) config_error("exact_sample_limit must be >= 1");
      cfg.metrics.exact_sample_limit = static_cast<std::size_t>(limit);
    } else if (key == "intrinsics_override") {
      if (!v.is_object()) config_error("intrinsics_override must be an object");
      for (const auto& [id, cam] : v.items()) {
        const std::string where = "intrinsics_override." + id;
        if (!cam.is_object()) config_error(where + " must be an object");
        CameraIntrinsics c;
        for (const auto& [field, value] : cam.items()) {
          if (field == "focal_px") {
            c.focal_px = number_of(value, where + ".focal_px");
          } else if (field == "cx") {
            c.cx = number_of(value, where + ".cx");
          } else if (field == "cy") {
            c.cy = number_of(value, where + ".cy");
          } else {
            config_error("unknown field " + where + "." + field);
          }
        }
        if (!cam.contains("focal_px") || !cam.contains("cx") ||
            !cam.contains("cy")) {
          config_error(where + " needs focal_px, cx and cy");
        }
        cfg.metrics.intrinsics_override[id] = c;
      }
    } else if (key == "head_model_override") {
      if (!v.is_object()) config_error("head_model_override must be an object");
      HeadModel::Points pts;
      for (const HeadPoint p : kHeadPoints) {
        const std::string name(to_string(p));
        if (!v.contains(name)) {
          config_error("head_model_override is missing " + name);
        }
        pts[static_cast<std::size_t>(p)] =
            point_of(v.at(name), "head_model_override." + name);
      }
      for (const auto& [name, _] : v.items()) {
        if (!parse_head_point(name)) {
          config_error("unknown head model point " + name);
        }
      }
      try {
        cfg.metrics.head_model = HeadModel(pts);
      } catch (const Error& e) {
        config_error(std::string("head_model_override: ") + e.what());
      }
    } else {
      config_error("unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

EngineConfig load_engine_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot read config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_engine_config(text.str());
}

nlohmann::ordered_json to_json(const EngineConfig& config) {
  const MetricsConfig& m = config.metrics;
  nlohmann::ordered_json doc;
  doc["confidence_min"] = m.confidence_min;
  doc["k_pixels"] = m.k_pixels;
  doc["k_min"] = config.clusters.k_min;
  doc["k_max"] = config.clusters.k_max;
  doc["restarts"] = config.clusters.restarts;
  doc["seed"] = m.seed;
  doc["weight_by_faces"] = m.weight_by_faces;
  doc["exact_sample_limit"] = m.exact_sample_limit;
  nlohmann::ordered_json intr = nlohmann::ordered_json::object();
  for (const auto& [id, cam] : m.intrinsics_override) {
    intr[id] = {{"focal_px", cam.focal_px}, {"cx", cam.cx}, {"cy", cam.cy}};
  }
  doc["intrinsics_override"] = std::move(intr);
  nlohmann::ordered_json model = nlohmann::ordered_json::object();
  for (const HeadPoint p : kHeadPoints) {
    const Eigen::Vector3d& v = m.head_model.point(p);
    model[std::string(to_string(p))] = {v.x(), v.y(), v.z()};
  }
  doc["head_model"] = std::move(model);
  doc["fingerprint"] = m.fingerprint();
  return doc;
}

}  // namespace screenrep
