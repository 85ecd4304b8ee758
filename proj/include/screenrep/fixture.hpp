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

// Synthetic corpus generator with planted ground truth.
//
// A fixture spec is a JSON document:
//
//   {"seed": 7,
//    "defaults": {"sample_fps": 1, "frames": 100,
//                 "frame_width": 1280, "frame_height": 720},
//    "planting": {"female": {...}, "male": {...}},
//    "videos": [{"video_id": "d1", "category": "drama", "frames": 100,
//                "sample_fps": 1, "female_presence_pct": 40,
//                "male_presence_pct": 70, "unknown_faces": 2,
//                "planting": {"female": {...}}}]}
//
// A planting block (all fields optional, per-video blocks override the
// top-level ones field by field):
//
//   {"head_up_pct": 70, "head_pitch_deg": [5, 25], "yaw_max_deg": 20,
//    "gaze_up_pct": 40, "gaze_pitch_deg": [5, 30],
//    "tones": [[200, 160, 140], [90, 60, 50]], "tone_mix_pct": [70, 30],
//    "tone_jitter": 3}
//
// Female faces occupy the first round(frames * female_presence_pct / 100)
// frames of a video and male faces the last round(frames *
// male_presence_pct / 100) frames; unknown-gender faces sit in the first
// `unknown_faces` frames. Expected analytics assume the default engine
// configuration.

#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "screenrep/records.hpp"

namespace screenrep {

struct GenderPlanting {
  double head_up_pct = 50.0;
  double head_pitch_min_deg = 5.0;
  double head_pitch_max_deg = 25.0;
  double yaw_max_deg = 20.0;
  double gaze_up_pct = 50.0;
  double gaze_pitch_min_deg = 5.0;
  double gaze_pitch_max_deg = 30.0;
  std::vector<Rgb> tones = {{196, 150, 128}, {112, 78, 62}};
  std::vector<double> tone_mix_pct = {50.0, 50.0};
  int tone_jitter = 3;
};

struct FixtureVideo {
  VideoMeta meta;
  int frames = 0;
  double female_presence_pct = 0.0;
  double male_presence_pct = 0.0;
  int unknown_faces = 0;
  GenderPlanting female;
  GenderPlanting male;
};

struct FixtureSpec {
  std::uint64_t seed = 1;
  std::vector<FixtureVideo> videos;
};

// Throws Error(kConfig) for invalid specs.
FixtureSpec parse_fixture_spec(std::string_view json_text);

struct Fixture {
  std::vector<VideoMeta> metas;
  std::vector<FrameRecord> records;
  // Same section layout as report.json: screen_time, head_pose, eye_gaze,
  // variability, face_color, diagnostics.
  nlohmann::ordered_json expected;
};

Fixture generate_fixture(const FixtureSpec& spec);

}  // namespace screenrep
