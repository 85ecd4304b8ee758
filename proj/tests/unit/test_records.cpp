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

#include <random>
#include <sstream>

#include "doctest.h"
#include "screenrep/error.hpp"
#include "screenrep/records.hpp"
#include "support.hpp"

using namespace screenrep;
using namespace testsupport;

namespace {

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

FrameRecord random_record(std::mt19937_64& rng, const std::string& id, long frame) {
  std::uniform_real_distribution<double> u(-100.0, 800.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> ch(0, 255);
  std::uniform_int_distribution<int> small(0, 3);
  FrameRecord r;
  r.video_id = id;
  r.frame_index = frame;
  const int faces = small(rng);
  for (int f = 0; f < faces; ++f) {
    FaceObservation face;
    for (auto& p : face.landmarks) p = {u(rng), u(rng)};
    face.gender = static_cast<Gender>(small(rng) % 3);
    face.gender_confidence = std::uniform_real_distribution<double>(0, 1)(rng);
    auto direction = [&] {
      Eigen::Vector3d v(unit(rng), unit(rng), unit(rng) - 2.0);
      v.normalize();
      return Vec3{v.x(), v.y(), v.z()};
    };
    if (small(rng) > 0) face.gaze_left = direction();
    if (small(rng) > 1) face.gaze_right = direction();
    const int px = 1 + small(rng) * 7;
    for (int i = 0; i < px; ++i) {
      face.jaw_pixels.push_back({static_cast<std::uint8_t>(ch(rng)),
                                 static_cast<std::uint8_t>(ch(rng)),
                                 static_cast<std::uint8_t>(ch(rng))});
    }
    r.faces.push_back(face);
  }
  return r;
}

}  // namespace

TEST_SUITE("records") {

TEST_CASE("one face with 68 landmarks and three jaw pixels") {
  const auto r = parse_frame_record_line(
      record_line("v1", 0, {face_json("female", 0.91)}), 1);
  CHECK(r.video_id == "v1");
  REQUIRE(r.faces.size() == 1);
  CHECK(r.faces[0].gender == Gender::kFemale);
  CHECK(r.faces[0].gender_confidence == 0.91);
  CHECK(r.faces[0].jaw_pixels.size() == 3);
  CHECK(r.faces[0].jaw_pixels[0] == Rgb{200, 160, 140});
  CHECK_FALSE(r.faces[0].gaze_left.has_value());
}

TEST_CASE("67 landmarks is a schema error at its line") {
  std::istringstream in(record_line("v1", 0) + "\n" +
                        record_line("v1", 1, {face_json("male", 0.8, 67)}) + "\n");
  try {
    parse_frame_records(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::kSchema);
    CHECK(e.line() == 2);
    CHECK(e.path() == "faces[0].landmarks");
    CHECK(std::string(e.what()).find("landmarks: expected 68, got 67") !=
          std::string::npos);
  }
}

TEST_CASE("empty stream gives no records") {
  std::istringstream in("");
  CHECK(parse_frame_records(in).empty());
  std::istringstream blank("\n\n");
  CHECK(parse_frame_records(blank).empty());
}

TEST_CASE("malformed JSON is a syntax error with a line number") {
  std::istringstream in(record_line("v1", 0) + "\n\n{\"video_id\": \n");
  try {
    parse_frame_records(in);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code() == ErrorCode::kSyntax);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("range and schema violations") {
  const std::string bad_channel =
      R"({"video_id":"v","frame_index":0,"faces":[{"landmarks":)" + landmarks_json(68) +
      R"(,"gender":"male","gender_confidence":0.5,"jaw_pixels":[[256,0,0]]}]})";
  CHECK(code_of([&] { parse_frame_record_line(bad_channel, 1); }) == ErrorCode::kRange);
  CHECK(code_of([&] {
          parse_frame_record_line(record_line("v", 0, {face_json("male", 1.2)}), 1);
        }) == ErrorCode::kRange);
  CHECK(code_of([&] {
          parse_frame_record_line(record_line("v", 0, {face_json("robot", 0.5)}), 1);
        }) == ErrorCode::kSchema);
  CHECK(code_of([&] {
          parse_frame_record_line(R"({"video_id":"v","frame_index":0,"faces":[],"x":1})", 1);
        }) == ErrorCode::kSchema);
  CHECK(code_of([&] {
          parse_frame_record_line(R"({"video_id":"v","frame_index":-1,"faces":[]})", 1);
        }) == ErrorCode::kRange);
  CHECK(code_of([&] { parse_video_meta_line(R"({"video_id":"v","category":"news","sample_fps":1,"frame_width":64,"frame_height":64})", 1); }) ==
        ErrorCode::kSchema);
  CHECK(code_of([&] { parse_video_meta_line(R"({"video_id":"v","category":"ads","sample_fps":0,"frame_width":64,"frame_height":64})", 1); }) ==
        ErrorCode::kRange);
}

TEST_CASE("serialize then parse is the identity") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const FrameRecord r = random_record(rng, "vid" + std::to_string(i % 3), i);
    CHECK(parse_frame_record_line(serialize(r), 1) == r);
  }
  VideoMeta m{"a b", Category::kTalkshow, 4.0, 1920, 1080, 2019};
  CHECK(parse_video_meta_line(serialize(m), 1) == m);
  m.year.reset();
  CHECK(parse_video_meta_line(serialize(m), 1) == m);
}

TEST_CASE("corpus index groups records per video") {
  std::istringstream meta(meta_line("a", "drama") + "\n" + meta_line("b", "ads", 4) + "\n");
  std::istringstream recs(record_line("a", 0) + "\n" + record_line("b", 0) + "\n" +
                          record_line("a", 1) + "\n" + record_line("b", 3) + "\n" +
                          record_line("a", 5) + "\n");
  const CorpusIndex c = build_corpus(parse_video_metas(meta), parse_frame_records(recs));
  CHECK(c.frames("a").size() == 3);
  CHECK(c.frames("b").size() == 2);
  CHECK(c.frames("a")[2].frame_index == 5);
  CHECK(c.total_frames() == 5);
  CHECK(c.counts().at(Category::kDrama) == CategoryCounts{1, 3});
  CHECK(c.counts().at(Category::kAds) == CategoryCounts{1, 2});
  CHECK(c.counts().at(Category::kTalkshow) == CategoryCounts{0, 0});
}

TEST_CASE("corpus violations") {
  const std::vector<VideoMeta> metas = {parse_video_meta_line(meta_line("a", "drama"), 1)};
  auto rec = [](const std::string& id, long f) {
    return parse_frame_record_line(record_line(id, f), 1);
  };
  CHECK(code_of([&] { build_corpus(metas, {rec("x", 0)}); }) == ErrorCode::kUnknownVideo);
  CHECK(code_of([&] { build_corpus(metas, {rec("a", 4), rec("a", 4)}); }) ==
        ErrorCode::kDuplicateFrame);
  CHECK(code_of([&] { build_corpus(metas, {rec("a", 4), rec("a", 2)}); }) ==
        ErrorCode::kNonIncreasingFrame);
  CHECK(code_of([&] { build_corpus({metas[0], metas[0]}, {}); }) ==
        ErrorCode::kDuplicateVideo);

  FrameRecord far = parse_frame_record_line(record_line("a", 0, {face_json("male", 0.9)}), 1);
  far.faces[0].landmarks[3] = {2000.0, 10.0};  // frame is 640 wide
  CHECK(code_of([&] { build_corpus(metas, {far}); }) == ErrorCode::kRange);

  const std::vector<std::size_t> lines = {7, 9};
  const auto v = check_corpus(metas, std::vector{rec("a", 1), rec("zz", 0)}, lines);
  REQUIRE(v.size() == 1);
  CHECK(v[0].line == 9);
}

TEST_CASE("lenient scan keeps going past bad lines") {
  std::istringstream in(record_line("a", 0) + "\n" +
                        record_line("a", 1, {face_json("male", 0.8, 67)}) + "\n" +
                        "not json\n" + record_line("a", 3) + "\n");
  const auto s = scan_frame_records(in);
  CHECK(s.items.size() == 2);
  CHECK(s.lines == std::vector<std::size_t>{1, 4});
  REQUIRE(s.errors.size() == 2);
  CHECK(s.errors[0].line() == 2);
  CHECK(s.errors[1].code() == ErrorCode::kSyntax);
}

}  // TEST_SUITE
