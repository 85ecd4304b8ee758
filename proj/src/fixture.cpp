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

#include "screenrep/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include <Eigen/Geometry>

#include "screenrep/color_analysis.hpp"
#include "screenrep/pose_solver.hpp"
#include "screenrep/random.hpp"
#include "screenrep/representation_metrics.hpp"

namespace screenrep {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kDeg = 3.14159265358979323846 / 180.0;

[[noreturn]] void spec_error(const std::string& what) {
  throw Error(ErrorCode::kConfig, "fixture spec: " + what);
}

double num(const json& v, const std::string& key) {
  if (!v.is_number()) spec_error(key + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) spec_error(key + " must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < 0 || i > 10'000'000) spec_error(key + " out of range");
  return static_cast<int>(i);
}

void read_range(const json& v, const std::string& key, double& lo, double& hi) {
  if (!v.is_array() || v.size() != 2) spec_error(key + " must be [min, max]");
  lo = num(v[0], key);
  hi = num(v[1], key);
}

void read_planting(const json& v, const std::string& where, GenderPlanting& p) {
  if (!v.is_object()) spec_error(where + " must be an object");
  for (const auto& [key, value] : v.items()) {
    const std::string k = where + "." + key;
    if (key == "head_up_pct") {
      p.head_up_pct = num(value, k);
    } else if (key == "head_pitch_deg") {
      read_range(value, k, p.head_pitch_min_deg, p.head_pitch_max_deg);
    } else if (key == "yaw_max_deg") {
      p.yaw_max_deg = num(value, k);
    } else if (key == "gaze_up_pct") {
      p.gaze_up_pct = num(value, k);
    } else if (key == "gaze_pitch_deg") {
      read_range(value, k, p.gaze_pitch_min_deg, p.gaze_pitch_max_deg);
    } else if (key == "tones") {
      if (!value.is_array() || value.empty()) spec_error(k + " must be a list");
      p.tones.clear();
      for (const auto& t : value) {
        if (!t.is_array() || t.size() != 3) spec_error(k + " entries are [r,g,b]");
        std::array<int, 3> ch{};
        for (std::size_t c = 0; c < 3; ++c) {
          ch[c] = integer(t[c], k);
          if (ch[c] > 255) spec_error(k + " channels must be 0..255");
        }
        p.tones.push_back({static_cast<std::uint8_t>(ch[0]),
                           static_cast<std::uint8_t>(ch[1]),
                           static_cast<std::uint8_t>(ch[2])});
      }
    } else if (key == "tone_mix_pct") {
      if (!value.is_array()) spec_error(k + " must be a list");
      p.tone_mix_pct.clear();
      for (const auto& m : value) p.tone_mix_pct.push_back(num(m, k));
    } else if (key == "tone_jitter") {
      p.tone_jitter = integer(value, k);
    } else {
      spec_error("unknown key " + k);
    }
  }
}

void check_planting(const GenderPlanting& p, const std::string& where) {
  auto pct = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 100.0)) spec_error(where + "." + name + " must be 0..100");
  };
  pct(p.head_up_pct, "head_up_pct");
  pct(p.gaze_up_pct, "gaze_up_pct");
  auto pitch = [&](double lo, double hi, const char* name) {
    if (!(lo > 0.0 && lo <= hi && hi <= 60.0)) {
      spec_error(where + "." + name + " must satisfy 0 < min <= max <= 60");
    }
  };
  pitch(p.head_pitch_min_deg, p.head_pitch_max_deg, "head_pitch_deg");
  pitch(p.gaze_pitch_min_deg, p.gaze_pitch_max_deg, "gaze_pitch_deg");
  if (!(p.yaw_max_deg >= 0.0 && p.yaw_max_deg <= 45.0)) {
    spec_error(where + ".yaw_max_deg must be 0..45");
  }
  if (p.tones.size() != p.tone_mix_pct.size()) {
    spec_error(where + ": tones and tone_mix_pct differ in length");
  }
  double total = 0.0;
  for (const double m : p.tone_mix_pct) {
    if (m < 0.0) spec_error(where + ".tone_mix_pct must be non-negative");
    total += m;
  }
  if (std::abs(total - 100.0) > 1e-9) spec_error(where + ".tone_mix_pct must sum to 100");
  if (p.tone_jitter > 20) spec_error(where + ".tone_jitter must be <= 20");
  for (const Rgb& t : p.tones) {
    for (const int c : {t.r, t.g, t.b}) {
      if (c < p.tone_jitter || c > 255 - p.tone_jitter) {
        spec_error(where + ": tone channels must stay within jitter of 0..255");
      }
    }
  }
}

// Even spread of `hits` positives over n slots: slot j is positive iff
// floor((j + 1) * hits / n) > floor(j * hits / n).
bool spread_hit(std::int64_t j, std::int64_t hits, std::int64_t n) {
  return (j + 1) * hits / n > j * hits / n;
}

std::int64_t round_share(std::int64_t n, double pct) {
  return std::llround(static_cast<double>(n) * pct / 100.0);
}

// Largest-remainder apportionment of n items by percentages.
std::vector<std::int64_t> apportion(std::int64_t n, const std::vector<double>& pct) {
  std::vector<std::int64_t> counts(pct.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < pct.size(); ++i) {
    const double exact = static_cast<double>(n) * pct[i] / 100.0;
    counts[i] = static_cast<std::int64_t>(std::floor(exact));
    assigned += counts[i];
    remainders.push_back({exact - std::floor(exact), i});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    ++counts[remainders[i % remainders.size()].second];
  }
  return counts;
}

// 68 points of a generic face in the head model frame (x toward image right
// for a frontal face, y up, z out of the face). The six solver points match
// HeadModel::default_model().
std::array<Eigen::Vector3d, kLandmarkCount> synthetic_face_layout() {
  std::array<Eigen::Vector3d, kLandmarkCount> p;
  for (int i = 0; i <= 16; ++i) {
    const double phi = 3.14159265358979323846 * i / 16.0;
    const double c = std::cos(phi);
    p[i] = {-280.0 * c, 120.0 - 450.0 * std::sin(phi), -65.0 - 185.0 * c * c};
  }
  for (int i = 0; i < 5; ++i) {
    p[17 + i] = {-250.0 + 50.0 * i, 230.0, -120.0};
    p[22 + i] = {50.0 + 50.0 * i, 230.0, -120.0};
  }
  p[27] = {0.0, 200.0, -110.0};
  p[28] = {0.0, 133.0, -75.0};
  p[29] = {0.0, 66.0, -40.0};
  p[30] = {0.0, 0.0, 0.0};
  for (int i = 0; i < 5; ++i) p[31 + i] = {-60.0 + 30.0 * i, -40.0, -60.0};
  // Eyes: outer corner, two upper lid points, inner corner, two lower.
  const std::array<std::array<double, 2>, 6> eye = {
      {{-225, 170}, {-175, 190}, {-125, 190}, {-75, 170}, {-125, 150}, {-175, 150}}};
  for (int i = 0; i < 6; ++i) {
    p[36 + i] = {eye[i][0], eye[i][1], -135.0};
    // Mirror image for the other eye: inner corner first, outer at 45.
    const int m = (9 - i) % 6;
    p[42 + i] = {-eye[m][0], eye[m][1], -135.0};
  }
  for (int i = 0; i < 12; ++i) {
    const double a = 3.14159265358979323846 * (1.0 - i / 6.0);
    p[48 + i] = {150.0 * std::cos(a), -150.0 + 40.0 * std::sin(a), -125.0};
  }
  for (int i = 0; i < 8; ++i) {
    const double a = 3.14159265358979323846 * (1.0 - i / 4.0);
    p[60 + i] = {100.0 * std::cos(a), -150.0 + 20.0 * std::sin(a), -125.0};
  }
  return p;
}

Eigen::Matrix3d planted_rotation(double yaw_deg, double pitch_up_deg,
                                 double roll_deg) {
  // Frontal: model +z toward the camera, model +y up on screen.
  const Eigen::Matrix3d frontal =
      Eigen::AngleAxisd(3.14159265358979323846, Eigen::Vector3d::UnitX())
          .toRotationMatrix();
  return (Eigen::AngleAxisd(yaw_deg * kDeg, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(-pitch_up_deg * kDeg, Eigen::Vector3d::UnitX()))
             .toRotationMatrix() *
         frontal *
         Eigen::AngleAxisd(roll_deg * kDeg, Eigen::Vector3d::UnitZ())
             .toRotationMatrix();
}

struct CellTruth {
  std::map<double, std::uint64_t> credits_by_fps;
  std::uint64_t frames_present = 0;
  std::uint64_t head_up = 0, head_down = 0, gaze_up = 0, gaze_down = 0;
  std::vector<double> head_y, gaze_y;
  std::vector<Rgb> colors;
  std::map<std::size_t, std::vector<Rgb>> colors_by_tone;
  std::vector<Rgb> tones;
};

struct FaceBuilder {
  std::mt19937_64& rng;
  const std::array<Eigen::Vector3d, kLandmarkCount>& layout;
  const CameraIntrinsics& cam;

  Landmarks landmarks(const Eigen::Matrix3d& r, double lateral_sign) {
    Pose pose;
    pose.rotation = r;
    pose.translation = {lateral_sign * uniform(rng, 150.0, 350.0),
                        uniform(rng, -120.0, 120.0), uniform(rng, 2000.0, 3000.0)};
    const auto uv = project_points(layout, pose, cam);
    Landmarks out;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      out[i] = {uv[i].x(), uv[i].y()};
    }
    return out;
  }

  static std::vector<Rgb> jaw_pixels(const Rgb& face) {
    std::vector<Rgb> px(12, face);
    const Rgb shadow = round_to_rgb(
        Eigen::Vector3d(face.r, face.g, face.b) * 0.55);
    px.insert(px.end(), 5, shadow);
    px.insert(px.end(), 3, Rgb{20, 15, 10});
    return px;
  }
};

ordered_json box_entry(const CellKey& key, std::vector<double> ys) {
  std::sort(ys.begin(), ys.end());
  const BoxStats b = box_stats_sorted(ys);
  ordered_json j;
  j["category"] = to_string(key.first);
  j["gender"] = to_string(key.second);
  j["n"] = b.n;
  j["min"] = b.min;
  j["lower_whisker"] = b.lower_whisker;
  j["q1"] = b.q1;
  j["median"] = b.median;
  j["q3"] = b.q3;
  j["upper_whisker"] = b.upper_whisker;
  j["max"] = b.max;
  return j;
}

ordered_json direction_entry(const CellKey& key, std::uint64_t up,
                             std::uint64_t down) {
  ordered_json j;
  j["category"] = to_string(key.first);
  j["gender"] = to_string(key.second);
  j["up_count"] = up;
  j["down_count"] = down;
  const double n = static_cast<double>(up + down);
  const double larger = 100.0 * static_cast<double>(std::max(up, down)) / n;
  j["up_pct"] = up >= down ? larger : 100.0 - larger;
  j["down_pct"] = up >= down ? 100.0 - larger : larger;
  return j;
}

}  // namespace

FixtureSpec parse_fixture_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    spec_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) spec_error("top level must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "seed" && key != "defaults" && key != "planting" &&
        key != "videos") {
      spec_error("unknown key " + key);
    }
  }

  FixtureSpec spec;
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) spec_error("seed must be a non-negative integer");
    spec.seed = s.get<std::uint64_t>();
  }

  double fps = 1.0;
  int frames = 100;
  int width = 1280;
  int height = 720;
  if (doc.contains("defaults")) {
    const json& d = doc["defaults"];
    if (!d.is_object()) spec_error("defaults must be an object");
    for (const auto& [key, v] : d.items()) {
      if (key == "sample_fps") fps = num(v, "defaults.sample_fps");
      else if (key == "frames") frames = integer(v, "defaults.frames");
      else if (key == "frame_width") width = integer(v, "defaults.frame_width");
      else if (key == "frame_height") height = integer(v, "defaults.frame_height");
      else spec_error("unknown key defaults." + key);
    }
  }

  GenderPlanting base_female;
  GenderPlanting base_male;
  if (doc.contains("planting")) {
    const json& p = doc["planting"];
    if (!p.is_object()) spec_error("planting must be an object");
    for (const auto& [key, v] : p.items()) {
      if (key == "female") read_planting(v, "planting.female", base_female);
      else if (key == "male") read_planting(v, "planting.male", base_male);
      else spec_error("unknown key planting." + key);
    }
  }

  if (!doc.contains("videos") || !doc["videos"].is_array() ||
      doc["videos"].empty()) {
    spec_error("videos must be a non-empty list");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc["videos"].size(); ++i) {
    const json& v = doc["videos"][i];
    const std::string where = "videos[" + std::to_string(i) + "]";
    if (!v.is_object()) spec_error(where + " must be an object");
    FixtureVideo fv;
    fv.meta.sample_fps = fps;
    fv.meta.frame_width = width;
    fv.meta.frame_height = height;
    fv.frames = frames;
    fv.female = base_female;
    fv.male = base_male;
    bool has_category = false;
    for (const auto& [key, value] : v.items()) {
      const std::string k = where + "." + key;
      if (key == "video_id") {
        if (!value.is_string() || value.get<std::string>().empty()) {
          spec_error(k + " must be a non-empty string");
        }
        fv.meta.video_id = value.get<std::string>();
      } else if (key == "category") {
        const auto c = value.is_string()
                           ? parse_category(value.get<std::string>())
                           : std::nullopt;
        if (!c) spec_error(k + " must be drama, ads or talkshow");
        fv.meta.category = *c;
        has_category = true;
      } else if (key == "sample_fps") {
        fv.meta.sample_fps = num(value, k);
      } else if (key == "frames") {
        fv.frames = integer(value, k);
      } else if (key == "year") {
        fv.meta.year = integer(value, k);
      } else if (key == "female_presence_pct") {
        fv.female_presence_pct = num(value, k);
      } else if (key == "male_presence_pct") {
        fv.male_presence_pct = num(value, k);
      } else if (key == "unknown_faces") {
        fv.unknown_faces = integer(value, k);
      } else if (key == "planting") {
        if (!value.is_object()) spec_error(k + " must be an object");
        for (const auto& [g, pv] : value.items()) {
          if (g == "female") read_planting(pv, k + ".female", fv.female);
          else if (g == "male") read_planting(pv, k + ".male", fv.male);
          else spec_error("unknown key " + k + "." + g);
        }
      } else {
        spec_error("unknown key " + k);
      }
    }
    if (fv.meta.video_id.empty()) spec_error(where + ".video_id is required");
    if (!has_category) spec_error(where + ".category is required");
    if (!ids.insert(fv.meta.video_id).second) {
      spec_error("duplicate video_id " + fv.meta.video_id);
    }
    if (!(fv.meta.sample_fps > 0.0)) spec_error(where + ".sample_fps must be positive");
    if (fv.meta.frame_width < kMinFrameSide || fv.meta.frame_height < kMinFrameSide) {
      spec_error(where + ": frame sides must be >= 16");
    }
    for (const double pct : {fv.female_presence_pct, fv.male_presence_pct}) {
      if (!(pct >= 0.0 && pct <= 100.0)) {
        spec_error(where + ": presence percentages must be 0..100");
      }
    }
    if (fv.unknown_faces > fv.frames) {
      spec_error(where + ".unknown_faces exceeds frames");
    }
    check_planting(fv.female, where + ".planting.female");
    check_planting(fv.male, where + ".planting.male");
    spec.videos.push_back(std::move(fv));
  }
  return spec;
}

Fixture generate_fixture(const FixtureSpec& spec) {
  Fixture out;
  std::mt19937_64 rng(spec.seed);
  const auto layout = synthetic_face_layout();

  std::map<CellKey, CellTruth> truth;
  std::map<Category, std::map<double, std::uint64_t>> sampled;
  std::uint64_t frames_total = 0;
  std::uint64_t faces_total = 0;
  std::uint64_t unknown_total = 0;
  std::uint64_t gaze_missing = 0;

  for (const FixtureVideo& fv : spec.videos) {
    out.metas.push_back(fv.meta);
    const CameraIntrinsics cam =
        CameraIntrinsics::for_frame(fv.meta.frame_width, fv.meta.frame_height);
    FaceBuilder builder{rng, layout, cam};
    const std::int64_t n = fv.frames;

    struct GenderPlan {
      Gender gender;
      const GenderPlanting* planting;
      std::int64_t first, count;
      std::vector<std::size_t> tone_of_face;
      std::vector<Eigen::Vector3i> jitter;
      std::int64_t gaze_faces = 0;
    };
    std::array<GenderPlan, 2> plans = {
        GenderPlan{Gender::kFemale, &fv.female, 0,
                   round_share(n, fv.female_presence_pct), {}, {}},
        GenderPlan{Gender::kMale, &fv.male, 0,
                   round_share(n, fv.male_presence_pct), {}, {}}};
    plans[1].first = n - plans[1].count;

    for (GenderPlan& plan : plans) {
      const GenderPlanting& p = *plan.planting;
      const auto per_tone = apportion(plan.count, p.tone_mix_pct);
      for (std::size_t t = 0; t < per_tone.size(); ++t) {
        // Antithetic jitter: pairs (+d, -d) so each tone group averages to
        // the planted tone exactly; an unpaired last face gets no jitter.
        for (std::int64_t i = 0; i < per_tone[t]; ++i) {
          plan.tone_of_face.push_back(t);
          if (i % 2 == 1) {
            plan.jitter.push_back(-plan.jitter.back());
          } else if (i + 1 == per_tone[t]) {
            plan.jitter.push_back(Eigen::Vector3i::Zero());
          } else {
            Eigen::Vector3i d;
            for (int c = 0; c < 3; ++c) {
              d[c] = static_cast<int>(std::floor(
                         uniform01(rng) * (2 * p.tone_jitter + 1))) -
                     p.tone_jitter;
            }
            plan.jitter.push_back(d);
          }
        }
      }
      for (std::int64_t j = 0; j < plan.count; ++j) {
        if (j % 7 != 6) ++plan.gaze_faces;
      }
    }

    std::array<std::int64_t, 2> face_no{0, 0};
    std::array<std::int64_t, 2> gaze_no{0, 0};
    for (std::int64_t f = 0; f < n; ++f) {
      FrameRecord rec;
      rec.video_id = fv.meta.video_id;
      rec.frame_index = f;
      ++frames_total;
      ++sampled[fv.meta.category][fv.meta.sample_fps];

      for (std::size_t g = 0; g < plans.size(); ++g) {
        GenderPlan& plan = plans[g];
        if (f < plan.first || f >= plan.first + plan.count) continue;
        const GenderPlanting& p = *plan.planting;
        const CellKey key{fv.meta.category, plan.gender};
        CellTruth& cell = truth[key];
        const std::int64_t j = face_no[g]++;

        FaceObservation face;
        face.gender = plan.gender;
        face.gender_confidence = 0.55 + 0.44 * uniform01(rng);

        const bool head_up =
            spread_hit(j, round_share(plan.count, p.head_up_pct), plan.count);
        const double pitch =
            uniform(rng, p.head_pitch_min_deg, p.head_pitch_max_deg);
        const double yaw = uniform(rng, -p.yaw_max_deg, p.yaw_max_deg);
        const double roll = uniform(rng, -8.0, 8.0);
        const Eigen::Matrix3d r =
            planted_rotation(yaw, head_up ? pitch : -pitch, roll);
        face.landmarks = builder.landmarks(r, g == 0 ? -1.0 : 1.0);
        const double head_y = (r * Eigen::Vector3d::UnitZ()).normalized().y();
        cell.head_y.push_back(head_y);
        ++(head_up ? cell.head_up : cell.head_down);

        if (j % 7 == 6) {
          ++gaze_missing;
        } else {
          const std::int64_t m = gaze_no[g]++;
          const bool gaze_up =
              spread_hit(m, round_share(plan.gaze_faces, p.gaze_up_pct),
                         plan.gaze_faces);
          const double gp =
              uniform(rng, p.gaze_pitch_min_deg, p.gaze_pitch_max_deg) * kDeg;
          const double gy = uniform(rng, -25.0, 25.0) * kDeg;
          const Eigen::Vector3d dir =
              Eigen::Vector3d(std::sin(gy) * std::cos(gp),
                              (gaze_up ? -1.0 : 1.0) * std::sin(gp),
                              -std::cos(gy) * std::cos(gp))
                  .normalized();
          const Vec3 v{dir.x(), dir.y(), dir.z()};
          face.gaze_left = v;
          if (j % 5 != 4) face.gaze_right = v;
          std::optional<Eigen::Vector3d> right;
          if (face.gaze_right) right = dir;
          cell.gaze_y.push_back(mean_gaze(dir, right)->y());
          ++(gaze_up ? cell.gaze_up : cell.gaze_down);
        }

        const std::size_t tone_index = plan.tone_of_face[j];
        const Rgb tone = p.tones[tone_index];
        const Eigen::Vector3i& d = plan.jitter[j];
        const Rgb color{static_cast<std::uint8_t>(tone.r + d[0]),
                        static_cast<std::uint8_t>(tone.g + d[1]),
                        static_cast<std::uint8_t>(tone.b + d[2])};
        face.jaw_pixels = FaceBuilder::jaw_pixels(color);
        cell.colors.push_back(color);
        cell.colors_by_tone[tone_index].push_back(color);
        cell.tones = p.tones;

        rec.faces.push_back(std::move(face));
        ++faces_total;
        ++cell.frames_present;
        ++cell.credits_by_fps[fv.meta.sample_fps];
      }

      if (f < fv.unknown_faces) {
        FaceObservation face;
        face.gender = Gender::kUnknown;
        face.gender_confidence = 0.3;
        face.landmarks = builder.landmarks(
            planted_rotation(uniform(rng, -10.0, 10.0), 5.0, 0.0), 0.0);
        face.jaw_pixels = FaceBuilder::jaw_pixels({128, 128, 128});
        rec.faces.push_back(std::move(face));
        ++faces_total;
        ++unknown_total;
      }
      out.records.push_back(std::move(rec));
    }
  }

  // Expected analytics, laid out like report.json.
  ordered_json& e = out.expected;
  ordered_json st = ordered_json::array();
  for (const Category c : kAllCategories) {
    std::array<double, 2> seconds{0.0, 0.0};
    for (std::size_t g = 0; g < 2; ++g) {
      auto it = truth.find({c, kReportedGenders[g]});
      if (it == truth.end()) continue;
      for (const auto& [fps, cnt] : it->second.credits_by_fps) {
        seconds[g] += static_cast<double>(cnt) / fps;
      }
    }
    const double total = seconds[0] + seconds[1];
    for (std::size_t g = 0; g < 2; ++g) {
      auto it = truth.find({c, kReportedGenders[g]});
      ordered_json j;
      j["category"] = to_string(c);
      j["gender"] = to_string(kReportedGenders[g]);
      j["seconds"] = seconds[g];
      j["share_pct"] = total > 0.0 ? 100.0 * seconds[g] / total : 0.0;
      j["frames_present"] = it == truth.end() ? 0 : it->second.frames_present;
      st.push_back(std::move(j));
    }
  }
  e["screen_time"] = std::move(st);

  ordered_json head = ordered_json::array();
  ordered_json gaze = ordered_json::array();
  ordered_json head_box = ordered_json::array();
  ordered_json gaze_box = ordered_json::array();
  ordered_json colors = ordered_json::array();
  for (const auto& [key, cell] : truth) {
    if (cell.head_up + cell.head_down > 0) {
      head.push_back(direction_entry(key, cell.head_up, cell.head_down));
      head_box.push_back(box_entry(key, cell.head_y));
    }
    if (cell.gaze_up + cell.gaze_down > 0) {
      gaze.push_back(direction_entry(key, cell.gaze_up, cell.gaze_down));
      gaze_box.push_back(box_entry(key, cell.gaze_y));
    }
    if (cell.colors.empty()) continue;

    ordered_json c;
    c["category"] = to_string(key.first);
    c["gender"] = to_string(key.second);
    c["n_faces"] = cell.colors.size();
    const std::set<Rgb> distinct(cell.colors.begin(), cell.colors.end());
    if (distinct.size() < 3) {
      c["status"] = "insufficient_data";
      c["selected_k"] = 0;
      c["clusters"] = ordered_json::array();
    } else {
      struct Entry {
        Rgb centroid;
        double proportion, brightness;
      };
      std::vector<Entry> entries;
      for (const auto& [t, group] : cell.colors_by_tone) {
        std::array<std::int64_t, 3> sum{0, 0, 0};
        for (const Rgb& rgb : group) {
          sum[0] += rgb.r;
          sum[1] += rgb.g;
          sum[2] += rgb.b;
        }
        const auto n = static_cast<std::int64_t>(group.size());
        // Mean rounded half up, in integer arithmetic.
        auto mean = [n](std::int64_t s) {
          return static_cast<std::uint8_t>((2 * s + n) / (2 * n));
        };
        const Rgb centroid{mean(sum[0]), mean(sum[1]), mean(sum[2])};
        entries.push_back({centroid,
                           100.0 * static_cast<double>(group.size()) /
                               static_cast<double>(cell.colors.size()),
                           brightness_hsb(centroid)});
      }
      std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.brightness > b.brightness;
      });
      c["status"] = "ok";
      c["selected_k"] = entries.size();
      ordered_json clusters = ordered_json::array();
      for (const Entry& en : entries) {
        ordered_json x;
        x["centroid_rgb"] = {en.centroid.r, en.centroid.g, en.centroid.b};
        x["proportion_pct"] = en.proportion;
        x["brightness_pct"] = en.brightness;
        clusters.push_back(std::move(x));
      }
      c["clusters"] = std::move(clusters);
    }
    colors.push_back(std::move(c));
  }
  e["head_pose"] = std::move(head);
  e["eye_gaze"] = std::move(gaze);
  e["variability"] = {{"head", std::move(head_box)}, {"gaze", std::move(gaze_box)}};
  e["face_color"] = std::move(colors);
  e["diagnostics"] = {{"frames_total", frames_total},
                      {"faces_total", faces_total},
                      {"faces_unknown_gender", unknown_total},
                      {"gaze_missing", gaze_missing}};
  return out;
}

}  // namespace screenrep
