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

// Frame-observation data model and the JSONL interchange format.
//
// One line of a records file holds one sampled frame:
//
//   {"video_id": str, "frame_index": int,
//    "faces": [{"landmarks": [[x,y] x 68], "gender": "male"|"female"|"unknown",
//               "gender_confidence": float,
//               "gaze_left": [x,y,z]|null, "gaze_right": [x,y,z]|null,
//               "jaw_pixels": [[r,g,b], ...]}]}
//
// A metadata file holds one VideoMeta object per line:
//
//   {"video_id": str, "category": "drama"|"ads"|"talkshow",
//    "sample_fps": float, "frame_width": int, "frame_height": int,
//    "year": int|null}
//
// Image coordinates follow the usual convention: x to the right, y downward.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screenrep/error.hpp"

namespace screenrep {

inline constexpr std::size_t kLandmarkCount = 68;
inline constexpr std::size_t kMaxJawPixels = 4096;
inline constexpr int kMinFrameSide = 16;
inline constexpr double kGazeNormTolerance = 1e-3;

enum class Category { kDrama, kAds, kTalkshow };
enum class Gender { kMale, kFemale, kUnknown };

inline constexpr std::array<Category, 3> kAllCategories = {
    Category::kDrama, Category::kAds, Category::kTalkshow};

std::string_view to_string(Category category);
std::string_view to_string(Gender gender);
std::optional<Category> parse_category(std::string_view text);
std::optional<Gender> parse_gender(std::string_view text);

struct ImagePoint {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const ImagePoint&) const = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  auto operator<=>(const Rgb&) const = default;
};

using Vec3 = std::array<double, 3>;
using Landmarks = std::array<ImagePoint, kLandmarkCount>;

struct VideoMeta {
  std::string video_id;
  Category category = Category::kDrama;
  double sample_fps = 1.0;
  int frame_width = 0;
  int frame_height = 0;
  std::optional<int> year;

  bool operator==(const VideoMeta&) const = default;
};

struct FaceObservation {
  Landmarks landmarks{};
  Gender gender = Gender::kUnknown;
  double gender_confidence = 0.0;
  std::optional<Vec3> gaze_left;
  std::optional<Vec3> gaze_right;
  std::vector<Rgb> jaw_pixels;

  bool operator==(const FaceObservation&) const = default;
};

struct FrameRecord {
  std::string video_id;
  std::int64_t frame_index = 0;
  std::vector<FaceObservation> faces;

  bool operator==(const FrameRecord&) const = default;
};

// Parsing. Each non-empty line is one object; blank lines are skipped but
// still counted for line numbers. The first violation throws ParseError.
FrameRecord parse_frame_record_line(std::string_view line, std::size_t line_no);
std::vector<FrameRecord> parse_frame_records(std::istream& in);

VideoMeta parse_video_meta_line(std::string_view line, std::size_t line_no);
std::vector<VideoMeta> parse_video_metas(std::istream& in);

// Lenient scan used by validation: collects every line-level violation and
// keeps the lines that parsed.
template <typename T>
struct ScanResult {
  std::vector<T> items;
  std::vector<std::size_t> lines;  // 1-based source line of each item
  std::vector<ParseError> errors;
};

ScanResult<FrameRecord> scan_frame_records(std::istream& in);
ScanResult<VideoMeta> scan_video_metas(std::istream& in);

// Canonical single-line serialization (no trailing newline).
std::string serialize(const FrameRecord& record);
std::string serialize(const VideoMeta& meta);

struct CategoryCounts {
  std::size_t videos = 0;
  std::size_t frames = 0;

  bool operator==(const CategoryCounts&) const = default;
};

// Immutable, validated view of a corpus: metadata by video id plus each
// video's frames in frame_index order.
class CorpusIndex {
 public:
  CorpusIndex() = default;

  const std::map<std::string, VideoMeta>& videos() const { return videos_; }
  const std::map<std::string, std::vector<FrameRecord>>& records() const {
    return records_;
  }
  // Frames of one video; empty for a known video without records.
  std::span<const FrameRecord> frames(const std::string& video_id) const;
  const std::map<Category, CategoryCounts>& counts() const { return counts_; }
  std::size_t total_frames() const;

 private:
  friend CorpusIndex build_corpus(std::vector<VideoMeta> metas,
                                  std::vector<FrameRecord> records);

  std::map<std::string, VideoMeta> videos_;
  std::map<std::string, std::vector<FrameRecord>> records_;
  std::map<Category, CategoryCounts> counts_;
};

// A corpus-level violation. `line` is the 1-based source line when known,
// otherwise 0.
struct CorpusViolation {
  std::size_t line = 0;
  ErrorCode code = ErrorCode::kSchema;
  std::string message;
};

// Checks metadata and records against each other: unique video ids, known
// video ids, strictly increasing frame indices per video, and landmark
// coordinates inside the frame's tolerance box. `lines` may be empty.
std::vector<CorpusViolation> check_corpus(
    std::span<const VideoMeta> metas, std::span<const FrameRecord> records,
    std::span<const std::size_t> lines = {});

// Throws Error with the first violation reported by check_corpus.
CorpusIndex build_corpus(std::vector<VideoMeta> metas,
                         std::vector<FrameRecord> records);

}  // namespace screenrep
