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

#include "screenrep/records.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <istream>
#include <set>
#include <utility>

#include "json.hpp"

namespace screenrep {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Category category) {
  switch (category) {
    case Category::kDrama: return "drama";
    case Category::kAds: return "ads";
    case Category::kTalkshow: return "talkshow";
  }
  return "drama";
}

std::string_view to_string(Gender gender) {
  switch (gender) {
    case Gender::kMale: return "male";
    case Gender::kFemale: return "female";
    case Gender::kUnknown: return "unknown";
  }
  return "unknown";
}

std::optional<Category> parse_category(std::string_view text) {
  if (text == "drama") return Category::kDrama;
  if (text == "ads") return Category::kAds;
  if (text == "talkshow") return Category::kTalkshow;
  return std::nullopt;
}

std::optional<Gender> parse_gender(std::string_view text) {
  if (text == "male") return Gender::kMale;
  if (text == "female") return Gender::kFemale;
  if (text == "unknown") return Gender::kUnknown;
  return std::nullopt;
}

namespace {

// Walks a parsed JSON line, raising ParseError with the field path of the
// value being read.
class Reader {
 public:
  explicit Reader(std::size_t line) : line_(line) {}

  [[noreturn]] void fail(ErrorCode code, const std::string& path,
                         const std::string& detail) const {
    throw ParseError(code, line_, path, detail);
  }

  const json& field(const json& obj, const std::string& path,
                    const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(ErrorCode::kSchema, join(path, key), "missing");
    return *it;
  }

  void only_keys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(ErrorCode::kSchema, join(path, key), "unexpected field");
      }
    }
  }

  void expect_object(const json& v, const std::string& path) const {
    if (!v.is_object()) fail(ErrorCode::kSchema, path, "expected object");
  }

  void expect_array(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(ErrorCode::kSchema, path, "expected array");
  }

  std::string string(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(ErrorCode::kSchema, path, "expected string");
    return v.get<std::string>();
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(ErrorCode::kSchema, path, "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorCode::kRange, path, "not finite");
    return d;
  }

  std::int64_t integer(const json& v, const std::string& path) const {
    if (!v.is_number_integer()) {
      fail(ErrorCode::kSchema, path, "expected integer");
    }
    if (v.is_number_unsigned() &&
        v.get<std::uint64_t>() >
            static_cast<std::uint64_t>(INT64_MAX)) {
      fail(ErrorCode::kRange, path, "integer too large");
    }
    return v.get<std::int64_t>();
  }

  std::size_t line() const { return line_; }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }
  static std::string index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

 private:
  std::size_t line_;
};

json parse_json_line(std::string_view line, std::size_t line_no) {
  try {
    return json::parse(line.begin(), line.end());
  } catch (const json::parse_error& e) {
    throw ParseError(ErrorCode::kSyntax, line_no, "", e.what());
  }
}

std::optional<Vec3> read_gaze(const Reader& r, const json& face,
                              const std::string& path, const char* key) {
  auto it = face.find(key);
  if (it == face.end() || it->is_null()) return std::nullopt;
  const std::string p = Reader::join(path, key);
  r.expect_array(*it, p);
  if (it->size() != 3) {
    r.fail(ErrorCode::kSchema, p,
           "expected 3, got " + std::to_string(it->size()));
  }
  Vec3 v{};
  for (std::size_t i = 0; i < 3; ++i) {
    v[i] = r.number((*it)[i], Reader::index(p, i));
  }
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (std::abs(norm - 1.0) > kGazeNormTolerance) {
    r.fail(ErrorCode::kRange, p,
           "norm " + std::to_string(norm) + " outside 1 +/- 1e-3");
  }
  return v;
}

FaceObservation read_face(const Reader& r, const json& face,
                          const std::string& path) {
  r.expect_object(face, path);
  r.only_keys(face, path,
              {"landmarks", "gender", "gender_confidence", "gaze_left",
               "gaze_right", "jaw_pixels"});
  FaceObservation out;

  const std::string lm_path = Reader::join(path, "landmarks");
  const json& lms = r.field(face, path, "landmarks");
  r.expect_array(lms, lm_path);
  if (lms.size() != kLandmarkCount) {
    r.fail(ErrorCode::kSchema, lm_path,
           "expected 68, got " + std::to_string(lms.size()));
  }
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    const std::string p = Reader::index(lm_path, i);
    const json& pt = lms[i];
    r.expect_array(pt, p);
    if (pt.size() != 2) {
      r.fail(ErrorCode::kSchema, p,
             "expected 2, got " + std::to_string(pt.size()));
    }
    out.landmarks[i] = {r.number(pt[0], Reader::index(p, 0)),
                        r.number(pt[1], Reader::index(p, 1))};
  }

  const std::string g_path = Reader::join(path, "gender");
  const auto gender = parse_gender(r.string(r.field(face, path, "gender"), g_path));
  if (!gender) {
    r.fail(ErrorCode::kSchema, g_path,
           "expected \"male\", \"female\" or \"unknown\"");
  }
  out.gender = *gender;

  const std::string c_path = Reader::join(path, "gender_confidence");
  out.gender_confidence =
      r.number(r.field(face, path, "gender_confidence"), c_path);
  if (out.gender_confidence < 0.0 || out.gender_confidence > 1.0) {
    r.fail(ErrorCode::kRange, c_path, "expected value in [0, 1]");
  }

  out.gaze_left = read_gaze(r, face, path, "gaze_left");
  out.gaze_right = read_gaze(r, face, path, "gaze_right");

  const std::string px_path = Reader::join(path, "jaw_pixels");
  const json& pixels = r.field(face, path, "jaw_pixels");
  r.expect_array(pixels, px_path);
  if (pixels.empty()) r.fail(ErrorCode::kSchema, px_path, "must be non-empty");
  if (pixels.size() > kMaxJawPixels) {
    r.fail(ErrorCode::kRange, px_path,
           "at most 4096 samples, got " + std::to_string(pixels.size()));
  }
  out.jaw_pixels.reserve(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const std::string p = Reader::index(px_path, i);
    const json& px = pixels[i];
    r.expect_array(px, p);
    if (px.size() != 3) {
      r.fail(ErrorCode::kSchema, p,
             "expected 3, got " + std::to_string(px.size()));
    }
    std::array<std::uint8_t, 3> ch{};
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string cp = Reader::index(p, c);
      const std::int64_t v = r.integer(px[c], cp);
      if (v < 0 || v > 255) r.fail(ErrorCode::kRange, cp, "expected 0..255");
      ch[c] = static_cast<std::uint8_t>(v);
    }
    out.jaw_pixels.push_back({ch[0], ch[1], ch[2]});
  }
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  });
}

template <typename T, typename ParseLine>
std::vector<T> parse_all(std::istream& in, ParseLine parse_line) {
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    out.push_back(parse_line(line, line_no));
  }
  return out;
}

template <typename T, typename ParseLine>
ScanResult<T> scan_all(std::istream& in, ParseLine parse_line) {
  ScanResult<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      out.items.push_back(parse_line(line, line_no));
      out.lines.push_back(line_no);
    } catch (const ParseError& e) {
      out.errors.push_back(e);
    }
  }
  return out;
}

}  // namespace

FrameRecord parse_frame_record_line(std::string_view line, std::size_t line_no) {
  const json doc = parse_json_line(line, line_no);
  const Reader r(line_no);
  r.expect_object(doc, "");
  r.only_keys(doc, "", {"video_id", "frame_index", "faces"});

  FrameRecord rec;
  rec.video_id = r.string(r.field(doc, "", "video_id"), "video_id");
  if (rec.video_id.empty()) r.fail(ErrorCode::kSchema, "video_id", "empty");
  rec.frame_index = r.integer(r.field(doc, "", "frame_index"), "frame_index");
  if (rec.frame_index < 0) {
    r.fail(ErrorCode::kRange, "frame_index", "must be non-negative");
  }
  const json& faces = r.field(doc, "", "faces");
  r.expect_array(faces, "faces");
  rec.faces.reserve(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    rec.faces.push_back(read_face(r, faces[i], Reader::index("faces", i)));
  }
  return rec;
}

std::vector<FrameRecord> parse_frame_records(std::istream& in) {
  return parse_all<FrameRecord>(in, parse_frame_record_line);
}

ScanResult<FrameRecord> scan_frame_records(std::istream& in) {
  return scan_all<FrameRecord>(in, parse_frame_record_line);
}

VideoMeta parse_video_meta_line(std::string_view line, std::size_t line_no) {
  const json doc = parse_json_line(line, line_no);
  const Reader r(line_no);
  r.expect_object(doc, "");
  r.only_keys(doc, "",
              {"video_id", "category", "sample_fps", "frame_width",
               "frame_height", "year"});

  VideoMeta meta;
  meta.video_id = r.string(r.field(doc, "", "video_id"), "video_id");
  if (meta.video_id.empty()) r.fail(ErrorCode::kSchema, "video_id", "empty");

  const auto category =
      parse_category(r.string(r.field(doc, "", "category"), "category"));
  if (!category) {
    r.fail(ErrorCode::kSchema, "category",
           "expected \"drama\", \"ads\" or \"talkshow\"");
  }
  meta.category = *category;

  meta.sample_fps = r.number(r.field(doc, "", "sample_fps"), "sample_fps");
  if (!(meta.sample_fps > 0.0)) {
    r.fail(ErrorCode::kRange, "sample_fps", "must be positive");
  }

  for (auto [key, dst] : {std::pair{"frame_width", &meta.frame_width},
                          std::pair{"frame_height", &meta.frame_height}}) {
    const std::int64_t v = r.integer(r.field(doc, "", key), key);
    if (v < kMinFrameSide || v > INT32_MAX) {
      r.fail(ErrorCode::kRange, key, "must be at least 16");
    }
    *dst = static_cast<int>(v);
  }

  if (auto it = doc.find("year"); it != doc.end() && !it->is_null()) {
    const std::int64_t y = r.integer(*it, "year");
    if (y < INT32_MIN || y > INT32_MAX) {
      r.fail(ErrorCode::kRange, "year", "out of range");
    }
    meta.year = static_cast<int>(y);
  }
  return meta;
}

std::vector<VideoMeta> parse_video_metas(std::istream& in) {
  return parse_all<VideoMeta>(in, parse_video_meta_line);
}

ScanResult<VideoMeta> scan_video_metas(std::istream& in) {
  return scan_all<VideoMeta>(in, parse_video_meta_line);
}

std::string serialize(const FrameRecord& record) {
  ordered_json doc;
  doc["video_id"] = record.video_id;
  doc["frame_index"] = record.frame_index;
  ordered_json faces = ordered_json::array();
  for (const auto& face : record.faces) {
    ordered_json f;
    ordered_json lms = ordered_json::array();
    for (const auto& p : face.landmarks) lms.push_back({p.x, p.y});
    f["landmarks"] = std::move(lms);
    f["gender"] = to_string(face.gender);
    f["gender_confidence"] = face.gender_confidence;
    f["gaze_left"] = face.gaze_left ? ordered_json(*face.gaze_left) : nullptr;
    f["gaze_right"] = face.gaze_right ? ordered_json(*face.gaze_right) : nullptr;
    ordered_json px = ordered_json::array();
    for (const auto& c : face.jaw_pixels) px.push_back({c.r, c.g, c.b});
    f["jaw_pixels"] = std::move(px);
    faces.push_back(std::move(f));
  }
  doc["faces"] = std::move(faces);
  return doc.dump();
}

std::string serialize(const VideoMeta& meta) {
  ordered_json doc;
  doc["video_id"] = meta.video_id;
  doc["category"] = to_string(meta.category);
  doc["sample_fps"] = meta.sample_fps;
  doc["frame_width"] = meta.frame_width;
  doc["frame_height"] = meta.frame_height;
  doc["year"] = meta.year ? ordered_json(*meta.year) : nullptr;
  return doc.dump();
}

std::span<const FrameRecord> CorpusIndex::frames(
    const std::string& video_id) const {
  auto it = records_.find(video_id);
  if (it == records_.end()) return {};
  return it->second;
}

std::size_t CorpusIndex::total_frames() const {
  std::size_t total = 0;
  for (const auto& [_, c] : counts_) total += c.frames;
  return total;
}

std::vector<CorpusViolation> check_corpus(std::span<const VideoMeta> metas,
                                          std::span<const FrameRecord> records,
                                          std::span<const std::size_t> lines) {
  std::vector<CorpusViolation> out;
  std::map<std::string, const VideoMeta*> by_id;
  for (const auto& m : metas) {
    if (!by_id.emplace(m.video_id, &m).second) {
      out.push_back({0, ErrorCode::kDuplicateVideo,
                     "duplicate video_id \"" + m.video_id + "\" in metadata"});
    }
  }

  std::map<std::string, std::int64_t> last_index;
  std::map<std::string, std::set<std::int64_t>> seen;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const FrameRecord& rec = records[i];
    const std::size_t line = i < lines.size() ? lines[i] : 0;
    const std::string where =
        line ? "line " + std::to_string(line) + ": "
             : "record " + std::to_string(i + 1) + ": ";

    auto meta_it = by_id.find(rec.video_id);
    if (meta_it == by_id.end()) {
      out.push_back({line, ErrorCode::kUnknownVideo,
                     where + "unknown video_id \"" + rec.video_id + "\""});
      continue;
    }
    if (!seen[rec.video_id].insert(rec.frame_index).second) {
      out.push_back({line, ErrorCode::kDuplicateFrame,
                     where + "duplicate frame_index " +
                         std::to_string(rec.frame_index) + " in video \"" +
                         rec.video_id + "\""});
      continue;
    }
    auto [last_it, first] = last_index.emplace(rec.video_id, rec.frame_index);
    if (!first) {
      if (rec.frame_index <= last_it->second) {
        out.push_back({line, ErrorCode::kNonIncreasingFrame,
                       where + "frame_index " +
                           std::to_string(rec.frame_index) +
                           " not greater than previous " +
                           std::to_string(last_it->second) + " in video \"" +
                           rec.video_id + "\""});
      }
      last_it->second = std::max(last_it->second, rec.frame_index);
    }

    const VideoMeta& meta = *meta_it->second;
    const double w = meta.frame_width;
    const double h = meta.frame_height;
    for (std::size_t f = 0; f < rec.faces.size(); ++f) {
      const auto& lms = rec.faces[f].landmarks;
      for (std::size_t k = 0; k < lms.size(); ++k) {
        const ImagePoint p = lms[k];
        if (p.x < -0.5 * w || p.x > 1.5 * w || p.y < -0.5 * h ||
            p.y > 1.5 * h) {
          out.push_back({line, ErrorCode::kRange,
                         where + "faces[" + std::to_string(f) +
                             "].landmarks[" + std::to_string(k) +
                             "]: outside frame bounds"});
          break;
        }
      }
    }
  }
  return out;
}

CorpusIndex build_corpus(std::vector<VideoMeta> metas,
                         std::vector<FrameRecord> records) {
  const auto violations = check_corpus(metas, records);
  if (!violations.empty()) {
    throw Error(violations.front().code, violations.front().message);
  }

  CorpusIndex index;
  for (const Category c : kAllCategories) index.counts_[c] = {};
  for (auto& m : metas) {
    ++index.counts_[m.category].videos;
    index.records_[m.video_id];
    index.videos_.emplace(m.video_id, std::move(m));
  }
  for (auto& rec : records) {
    ++index.counts_[index.videos_.at(rec.video_id).category].frames;
    index.records_[rec.video_id].push_back(std::move(rec));
  }
  return index;
}

}  // namespace screenrep
