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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "schema_check.hpp"
#include "screenrep/engine_config.hpp"
#include "screenrep/error.hpp"
#include "screenrep/fixture.hpp"
#include "screenrep/report.hpp"

using namespace screenrep;
using namespace testsupport;

namespace {

ErrorCode config_code(const std::string& text) {
  try {
    parse_engine_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

ClusterCell example_cell() {
  ClusterCell cell;
  cell.category = Category::kDrama;
  cell.gender = Gender::kFemale;
  cell.n_faces = 50;
  cell.selected_k = 2;
  cell.clusters = {{{170, 128, 107}, 20, 40.0, brightness_hsb({170, 128, 107})},
                   {{89, 66, 52}, 30, 60.0, brightness_hsb({89, 66, 52})}};
  cell.silhouette_by_k = {{2, 0.75}, {3, 0.5}};
  return cell;
}

AnalysisResult run_fixture(int jobs) {
  const Fixture fx = generate_fixture(parse_fixture_spec(R"({"seed": 4,
    "defaults": {"frames": 30},
    "videos": [{"video_id": "d", "category": "drama", "female_presence_pct": 60, "male_presence_pct": 60},
               {"video_id": "a", "category": "ads", "sample_fps": 4, "female_presence_pct": 30, "male_presence_pct": 80},
               {"video_id": "t", "category": "talkshow", "female_presence_pct": 10, "unknown_faces": 3}]})"));
  EngineConfig cfg;
  cfg.jobs = jobs;
  return analyze(build_corpus(fx.metas, fx.records), cfg);
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const EngineConfig c = parse_engine_config("{}");
  CHECK(c.metrics.confidence_min == 0.0);
  CHECK(c.metrics.k_pixels == 3);
  CHECK(c.clusters.k_min == 2);
  CHECK(c.clusters.k_max == 8);
  CHECK(c.clusters.restarts == 10);
  CHECK(c.clusters.seed == 42);
  CHECK(c.metrics.seed == 42);
  CHECK_FALSE(c.metrics.weight_by_faces);
  CHECK(c.jobs == 1);
  CHECK(c.metrics.head_model == HeadModel::default_model());
}

TEST_CASE("values and overrides") {
  const EngineConfig c = parse_engine_config(R"({
    "confidence_min": 0.6, "k_pixels": 4, "k_min": 3, "k_max": 5, "restarts": 2,
    "seed": 7, "weight_by_faces": true, "jobs": 3,
    "intrinsics_override": {"v1": {"focal_px": 800, "cx": 320, "cy": 240}},
    "head_model_override": {"nose_tip": [0, 0, 0], "chin": [0, -300, -60],
      "left_eye_outer": [-200, 160, -130], "right_eye_outer": [200, 160, -130],
      "mouth_left": [-140, -140, -120], "mouth_right": [140, -140, -120]}})");
  CHECK(c.metrics.confidence_min == 0.6);
  CHECK(c.clusters.k_min == 3);
  CHECK(c.clusters.seed == 7);
  CHECK(c.metrics.weight_by_faces);
  CHECK(c.metrics.intrinsics_override.at("v1") == CameraIntrinsics{800, 320, 240});
  CHECK(c.metrics.head_model.point(HeadPoint::kChin).y() == -300.0);
}

TEST_CASE("invalid configurations") {
  CHECK(config_code(R"({"k_min": 5, "k_max": 3})") == ErrorCode::kConfig);
  CHECK(config_code(R"({"k_min": 1})") == ErrorCode::kConfig);
  CHECK(config_code(R"({"restarts": 0})") == ErrorCode::kConfig);
  CHECK(config_code(R"({"confidence_min": 1.5})") == ErrorCode::kConfig);
  CHECK(config_code(R"({"k_pixels": "three"})") == ErrorCode::kConfig);
  CHECK(config_code(R"({"colour_space": "lab"})") == ErrorCode::kConfig);
  CHECK(config_code(R"({"intrinsics_override": {"v": {"focal_px": -1, "cx": 0, "cy": 0}}})") ==
        ErrorCode::kConfig);
  CHECK(config_code(R"({"head_model_override": {"nose_tip": [0, 0, 0]}})") == ErrorCode::kConfig);
  CHECK(config_code("[1, 2]") == ErrorCode::kConfig);
  CHECK(config_code("{") == ErrorCode::kConfig);
  try {
    load_engine_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(classify(e.code()) == ErrorClass::kIo);
  }
}

}  // TEST_SUITE

TEST_SUITE("report") {

TEST_CASE("cluster cell matches the golden file byte for byte") {
  std::ifstream in(std::string(SCREENREP_GOLDEN_DIR) + "/cluster_cell.json");
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(to_json(example_cell()).dump(2) + "\n" == golden.str());
  const auto schema = load_json(std::string(SCREENREP_GOLDEN_DIR) + "/cluster_cell.schema.json");
  CHECK(cluster_cell_problems(nlohmann::json::parse(golden.str()), schema).empty());
}

TEST_CASE("schema check rejects malformed cells") {
  const auto schema = load_json(std::string(SCREENREP_GOLDEN_DIR) + "/cluster_cell.schema.json");
  auto cell = nlohmann::json::parse(to_json(example_cell()).dump());
  cell["clusters"][0]["brightness_pct"] = 50.0;
  CHECK_FALSE(cluster_cell_problems(cell, schema).empty());
  cell = nlohmann::json::parse(to_json(example_cell()).dump());
  cell.erase("selected_k");
  CHECK_FALSE(cluster_cell_problems(cell, schema).empty());
  cell = nlohmann::json::parse(to_json(example_cell()).dump());
  std::swap(cell["clusters"][0], cell["clusters"][1]);
  CHECK_FALSE(cluster_cell_problems(cell, schema).empty());
}

TEST_CASE("insufficient cell serialization") {
  ClusterCell cell;
  cell.category = Category::kAds;
  cell.gender = Gender::kMale;
  cell.n_faces = 4;
  cell.insufficient_data = true;
  const auto j = to_json(cell);
  CHECK(j["status"] == "insufficient_data");
  CHECK(j["clusters"].empty());
  CHECK(j["silhouette_by_k"].is_object());
}

TEST_CASE("report is deterministic and independent of jobs") {
  const AnalysisResult a = run_fixture(1);
  const AnalysisResult b = run_fixture(3);
  CHECK(report_json(a).dump(2) == report_json(b).dump(2));
  CHECK(report_csv(a) == report_csv(b));
  CHECK(plot_data(a) == plot_data(b));

  const auto doc = report_json(a);
  std::vector<std::string> keys;
  for (const auto& [k, _] : doc.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"config", "corpus", "screen_time", "head_pose",
                                         "eye_gaze", "variability", "face_color",
                                         "diagnostics"});
  CHECK(doc["corpus"]["ads"]["sampled_seconds"] == 7.5);
  CHECK(report_csv(a).rfind("category,gender,metric,value\n", 0) == 0);
  CHECK(plot_data(a).count("screen_time.json") == 1);

  const auto schema = load_json(std::string(SCREENREP_GOLDEN_DIR) + "/cluster_cell.schema.json");
  for (const auto& cell : doc["face_color"]) {
    CHECK(cluster_cell_problems(nlohmann::json::parse(cell.dump()), schema).empty());
  }
}

}  // TEST_SUITE
