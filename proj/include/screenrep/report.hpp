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

// Report artifacts of an analysis run: report.json, report.csv and the
// plot-data arrays. Report bodies hold no timestamps or host details, so
// equal inputs and configuration give byte-identical files.

#pragma once

#include <map>
#include <string>

#include "json.hpp"
#include "screenrep/color_analysis.hpp"
#include "screenrep/engine_config.hpp"
#include "screenrep/records.hpp"
#include "screenrep/representation_metrics.hpp"

namespace screenrep {

struct AnalysisResult {
  EngineConfig config;
  std::map<Category, CategoryCounts> corpus_counts;
  RepresentationSummary summary;
  ClusterReport clusters;
};

AnalysisResult analyze(const CorpusIndex& corpus, const EngineConfig& config);

// {"category", "gender", "n_faces", "status", "selected_k",
//  "clusters": [{"centroid_rgb": [r, g, b], "proportion_pct": p,
//                "brightness_pct": b}],
//  "silhouette_by_k": {"2": s, ...}}
// status is "ok" or "insufficient_data".
nlohmann::ordered_json to_json(const ClusterCell& cell);

// Sections: config, corpus, screen_time, head_pose, eye_gaze, variability,
// face_color, diagnostics.
nlohmann::ordered_json report_json(const AnalysisResult& result);

// Header "category,gender,metric,value", one row per scalar.
std::string report_csv(const AnalysisResult& result);

// File name (relative to plotdata/) -> file content.
std::map<std::string, std::string> plot_data(const AnalysisResult& result);

}  // namespace screenrep
