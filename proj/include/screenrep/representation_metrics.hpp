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

// Representation statistics as mergeable per-(category, gender) aggregates.
//
// A face counts toward a gender cell when its label is male or female and
// its confidence is at least confidence_min. Screen time credits a frame
// once per gender present (or once per face with weight_by_faces). Direction
// statistics are per face. Box statistics use linear interpolation between
// order statistics at position p * (n - 1) and Tukey 1.5 * IQR whiskers.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "screenrep/color_analysis.hpp"
#include "screenrep/pose_solver.hpp"
#include "screenrep/records.hpp"

namespace screenrep {

struct MetricsConfig {
  double confidence_min = 0.0;
  bool weight_by_faces = false;
  int k_pixels = 3;
  std::uint64_t seed = 42;
  HeadModel head_model = HeadModel::default_model();
  std::map<std::string, CameraIntrinsics> intrinsics_override;
  // Above this many samples a cell's y values are kept as a histogram.
  std::size_t exact_sample_limit = 10'000'000;
  SolverOptions solver;

  CameraIntrinsics intrinsics_for(const VideoMeta& meta) const;

  // Stable hash of every field that affects a summary.
  std::string fingerprint() const;
};

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double lower_whisker = 0.0;
  double upper_whisker = 0.0;
  std::size_t n = 0;

  bool operator==(const BoxStats&) const = default;
};

// Box statistics of a non-empty sorted sample. Whiskers are the most
// extreme samples inside the 1.5 * IQR fences, clamped to the quartiles.
BoxStats box_stats_sorted(std::span<const double> sorted);

// Multiset of normalized-y samples in [-1, 1]. Samples are stored sorted,
// so merging is order independent. Past `exact_limit` samples the set turns
// into a fixed-width histogram (kSketchBins bins) whose quantiles carry an
// absolute error of at most one bin width (2 / kSketchBins).
class SampleSet {
 public:
  static constexpr std::size_t kSketchBins = 1u << 16;

  explicit SampleSet(std::size_t exact_limit = 10'000'000)
      : limit_(exact_limit) {}
  static SampleSet from_values(std::vector<double> values,
                               std::size_t exact_limit);

  void merge(const SampleSet& other);

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool is_sketch() const { return !bins_.empty(); }
  // Sorted samples; empty once the set has become a sketch.
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::uint64_t>& bins() const { return bins_; }

  BoxStats box_stats() const;

  bool operator==(const SampleSet&) const = default;

 private:
  void to_sketch();
  double value_at_rank(std::size_t rank) const;

  std::size_t limit_;
  std::size_t count_ = 0;
  std::vector<double> values_;
  std::vector<std::uint64_t> bins_;
  double min_ = 0.0;
  double max_ = 0.0;
};

struct SourceStats {
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  SampleSet y;

  bool operator==(const SourceStats&) const = default;
};

struct CellStats {
  // Screen-time credits (frames, or faces when weighting by faces) keyed
  // by the sample rate of the contributing video.
  std::map<double, std::uint64_t> credits_by_fps;
  std::uint64_t frames_present = 0;
  std::uint64_t faces = 0;
  SourceStats head;
  SourceStats gaze;
  std::vector<Rgb> face_colors;  // sorted

  double seconds() const;
  const SourceStats& source(DirectionSource s) const {
    return s == DirectionSource::kHead ? head : gaze;
  }

  bool operator==(const CellStats&) const = default;
};

struct Diagnostics {
  std::uint64_t frames_total = 0;
  std::uint64_t faces_total = 0;
  std::uint64_t faces_unknown_gender = 0;
  std::uint64_t faces_below_confidence = 0;
  std::uint64_t head_pose_failures = 0;
  std::uint64_t head_pose_nonconverged = 0;
  std::uint64_t gaze_missing = 0;
  std::uint64_t gaze_invalid = 0;

  bool operator==(const Diagnostics&) const = default;
};

class RepresentationSummary {
 public:
  explicit RepresentationSummary(std::string fingerprint = {},
                                 std::size_t exact_sample_limit = 10'000'000)
      : fingerprint_(std::move(fingerprint)), limit_(exact_sample_limit) {}

  const std::string& fingerprint() const { return fingerprint_; }
  const std::map<CellKey, CellStats>& cells() const { return cells_; }
  // Every sampled frame, keyed by category and sample rate.
  const std::map<Category, std::map<double, std::uint64_t>>& sampled_frames()
      const {
    return sampled_frames_;
  }
  const Diagnostics& diagnostics() const { return diagnostics_; }

  // Total sampled duration of a category in seconds.
  double category_seconds(Category category) const;

  bool operator==(const RepresentationSummary&) const = default;

 private:
  friend RepresentationSummary summarize_video(const VideoMeta&,
                                               std::span<const FrameRecord>,
                                               const MetricsConfig&);
  friend RepresentationSummary merge(const RepresentationSummary&,
                                     const RepresentationSummary&);

  std::string fingerprint_;
  std::size_t limit_;
  std::map<CellKey, CellStats> cells_;
  std::map<Category, std::map<double, std::uint64_t>> sampled_frames_;
  Diagnostics diagnostics_;
};

RepresentationSummary summarize_video(const VideoMeta& meta,
                                      std::span<const FrameRecord> frames,
                                      const MetricsConfig& config);

// Per-video summaries computed on `jobs` worker threads, then merged.
RepresentationSummary summarize_corpus(const CorpusIndex& corpus,
                                       const MetricsConfig& config,
                                       int jobs = 1);

// Counts and seconds add, samples and colors merge as multisets. Throws
// Error(kIncompatibleSummaries) when the fingerprints differ.
RepresentationSummary merge(const RepresentationSummary& a,
                            const RepresentationSummary& b);

inline constexpr std::array<Gender, 2> kReportedGenders = {Gender::kMale,
                                                           Gender::kFemale};

struct ScreenTime {
  double seconds = 0.0;
  // Share of the category's male + female seconds.
  double share_pct = 0.0;
  std::uint64_t frames_present = 0;
};

// Every (category, male|female) cell, zero when absent.
std::map<CellKey, ScreenTime> screen_time(const RepresentationSummary& summary);
std::map<CellKey, ScreenTime> screen_time(const CorpusIndex& corpus,
                                          const MetricsConfig& config);

struct DirectionShare {
  std::uint64_t up = 0;
  std::uint64_t down = 0;
  double up_pct = 0.0;
  double down_pct = 0.0;
};

// Cells without classified samples are omitted. up_pct + down_pct == 100
// exactly.
std::map<CellKey, DirectionShare> direction_proportions(
    const RepresentationSummary& summary, DirectionSource source);
std::map<CellKey, DirectionShare> direction_proportions(
    const CorpusIndex& corpus, DirectionSource source,
    const MetricsConfig& config);

std::map<CellKey, BoxStats> variability_summary(
    const RepresentationSummary& summary, DirectionSource source);
std::map<CellKey, BoxStats> variability_summary(const CorpusIndex& corpus,
                                                DirectionSource source,
                                                const MetricsConfig& config);

// Face colors per cell, the input of cluster_report.
std::map<CellKey, std::vector<Rgb>> face_colors(
    const RepresentationSummary& summary);

}  // namespace screenrep
