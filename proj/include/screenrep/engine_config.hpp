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

// Engine configuration: a flat JSON document whose values override the
// built-in defaults; command-line flags override both.
//
//   {"confidence_min": 0.0, "k_pixels": 3, "k_min": 2, "k_max": 8,
//    "restarts": 10, "seed": 42, "weight_by_faces": false, "jobs": 1,
//    "exact_sample_limit": 10000000,
//    "intrinsics_override": {"<video_id>": {"focal_px": f, "cx": x, "cy": y}},
//    "head_model_override": {"nose_tip": [x, y, z], "chin": [...],
//                            "left_eye_outer": [...], "right_eye_outer": [...],
//                            "mouth_left": [...], "mouth_right": [...]}}

#pragma once

#include <filesystem>
#include <string_view>

#include "json.hpp"
#include "screenrep/color_analysis.hpp"
#include "screenrep/representation_metrics.hpp"

namespace screenrep {

struct EngineConfig {
  MetricsConfig metrics;
  ClusterSettings clusters;
  int jobs = 1;

  // Throws Error(kConfig) on the first violated constraint.
  void validate() const;
};

// Throws Error(kConfig) for malformed or invalid documents.
EngineConfig parse_engine_config(std::string_view json_text);

// Throws Error(kIo) when the file cannot be read.
EngineConfig load_engine_config(const std::filesystem::path& path);

// Settings that affect results; `jobs` is left out so reports do not depend
// on the degree of parallelism.
nlohmann::ordered_json to_json(const EngineConfig& config);

}  // namespace screenrep
