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

#include "screenrep/representation_metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iterator>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace screenrep {

CameraIntrinsics MetricsConfig::intrinsics_for(const VideoMeta& meta) const {
  auto it = intrinsics_override.find(meta.video_id);
  if (it != intrinsics_override.end()) return it->second;
  return CameraIntrinsics::for_frame(meta.frame_width, meta.frame_height);
}

std::string MetricsConfig::fingerprint() const {
  nlohmann::ordered_json doc;
  doc["confidence_min"] = confidence_min;
  doc["weight_by_faces"] = weight_by_faces;
  doc["k_pixels"] = k_pixels;
  doc["seed"] = seed;
  nlohmann::ordered_json model = nlohmann::ordered_json::array();
  for (const auto& p : head_model.points()) model.push_back({p.x(), p.y(), p.z()});
  doc["head_model"] = std::move(model);
  nlohmann::ordered_json intr = nlohmann::ordered_json::object();
  for (const auto& [id, cam] : intrinsics_override) {
    intr[id] = {cam.focal_px, cam.cx, cam.cy};
  }
  doc["intrinsics_override"] = std::move(intr);
  doc["exact_sample_limit"] = exact_sample_limit;
  doc["solver"] = {solver.max_iterations, solver.step_tolerance,
                   solver.relative_improvement_tolerance,
                   solver.initial_damping, solver.damping_factor,
                   solver.rank_tolerance};

  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : doc.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

double quantile_sorted(std::span<const double> v, double p) {
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::size_t sketch_bin(double y) {
  const double unit = (std::clamp(y, -1.0, 1.0) + 1.0) / 2.0;
  return std::min<std::size_t>(
      static_cast<std::size_t>(unit * SampleSet::kSketchBins),
      SampleSet::kSketchBins - 1);
}

double bin_center(std::size_t bin) {
  return -1.0 + (static_cast<double>(bin) + 0.5) * 2.0 /
                    static_cast<double>(SampleSet::kSketchBins);
}

void add_counts(std::map<double, std::uint64_t>& into,
                const std::map<double, std::uint64_t>& from) {
  for (const auto& [k, v] : from) into[k] += v;
}

double seconds_of(const std::map<double, std::uint64_t>& credits) {
  double s = 0.0;
  for (const auto& [fps, n] : credits) s += static_cast<double>(n) / fps;
  return s;
}

void merge_source(SourceStats& into, const SourceStats& from) {
  into.up += from.up;
  into.down += from.down;
  into.y.merge(from.y);
}

}  // namespace

BoxStats box_stats_sorted(std::span<const double> sorted) {
  BoxStats b;
  b.n = sorted.size();
  if (sorted.empty()) return b;
  b.min = sorted.front();
  b.max = sorted.back();
  b.q1 = quantile_sorted(sorted, 0.25);
  b.median = quantile_sorted(sorted, 0.5);
  b.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lower_whisker = *std::lower_bound(sorted.begin(), sorted.end(), lo_fence);
  b.upper_whisker =
      *std::prev(std::upper_bound(sorted.begin(), sorted.end(), hi_fence));
  b.lower_whisker = std::min(b.lower_whisker, b.q1);
  b.upper_whisker = std::max(b.upper_whisker, b.q3);
  return b;
}

SampleSet SampleSet::from_values(std::vector<double> values,
                                 std::size_t exact_limit) {
  SampleSet s(exact_limit);
  std::sort(values.begin(), values.end());
  s.count_ = values.size();
  if (!values.empty()) {
    s.min_ = values.front();
    s.max_ = values.back();
  }
  s.values_ = std::move(values);
  if (s.count_ > s.limit_) s.to_sketch();
  return s;
}

void SampleSet::to_sketch() {
  if (is_sketch()) return;
  bins_.assign(kSketchBins, 0);
  for (const double y : values_) ++bins_[sketch_bin(y)];
  values_.clear();
  values_.shrink_to_fit();
}

void SampleSet::merge(const SampleSet& other) {
  if (other.empty()) return;
  if (empty()) {
    const std::size_t limit = limit_;
    *this = other;
    limit_ = limit;
    if (count_ > limit_) to_sketch();
    return;
  }
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
  const std::size_t total = count_ + other.count_;
  if (is_sketch() || other.is_sketch() || total > limit_) {
    to_sketch();
    if (other.is_sketch()) {
      for (std::size_t i = 0; i < kSketchBins; ++i) bins_[i] += other.bins_[i];
    } else {
      for (const double y : other.values_) ++bins_[sketch_bin(y)];
    }
  } else {
    std::vector<double> merged;
    merged.reserve(total);
    std::merge(values_.begin(), values_.end(), other.values_.begin(),
               other.values_.end(), std::back_inserter(merged));
    values_ = std::move(merged);
  }
  count_ = total;
}

double SampleSet::value_at_rank(std::size_t rank) const {
  std::uint64_t seen = 0;
  for (std::size_t b = 0; b < kSketchBins; ++b) {
    seen += bins_[b];
    if (seen > rank) return std::clamp(bin_center(b), min_, max_);
  }
  return max_;
}

BoxStats SampleSet::box_stats() const {
  if (!is_sketch()) return box_stats_sorted(values_);

  BoxStats b;
  b.n = count_;
  b.min = min_;
  b.max = max_;
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(count_ - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    const double v_lo = value_at_rank(lo);
    const double v_hi = value_at_rank(std::min(lo + 1, count_ - 1));
    return v_lo + frac * (v_hi - v_lo);
  };
  b.q1 = quantile(0.25);
  b.median = quantile(0.5);
  b.q3 = quantile(0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lower_whisker = b.q1;
  for (std::size_t i = 0; i < kSketchBins; ++i) {
    if (bins_[i] == 0) continue;
    const double v = std::clamp(bin_center(i), min_, max_);
    if (v >= lo_fence) {
      b.lower_whisker = std::min(v, b.q1);
      break;
    }
  }
  b.upper_whisker = b.q3;
  for (std::size_t i = kSketchBins; i-- > 0;) {
    if (bins_[i] == 0) continue;
    const double v = std::clamp(bin_center(i), min_, max_);
    if (v <= hi_fence) {
      b.upper_whisker = std::max(v, b.q3);
      break;
    }
  }
  return b;
}

double CellStats::seconds() const { return seconds_of(credits_by_fps); }

double RepresentationSummary::category_seconds(Category category) const {
  auto it = sampled_frames_.find(category);
  return it == sampled_frames_.end() ? 0.0 : seconds_of(it->second);
}

RepresentationSummary summarize_video(const VideoMeta& meta,
                                      std::span<const FrameRecord> frames,
                                      const MetricsConfig& config) {
  RepresentationSummary out(config.fingerprint(), config.exact_sample_limit);
  const CameraIntrinsics cam = config.intrinsics_for(meta);
  cam.validate();

  struct Pending {
    std::vector<double> head_y;
    std::vector<double> gaze_y;
  };
  std::map<CellKey, Pending> pending;
  Diagnostics& diag = out.diagnostics_;

  for (const FrameRecord& frame : frames) {
    ++diag.frames_total;
    ++out.sampled_frames_[meta.category][meta.sample_fps];

    std::array<bool, 2> present{false, false};
    for (const FaceObservation& face : frame.faces) {
      ++diag.faces_total;
      if (face.gender == Gender::kUnknown) {
        ++diag.faces_unknown_gender;
        continue;
      }
      if (face.gender_confidence < config.confidence_min) {
        ++diag.faces_below_confidence;
        continue;
      }
      const CellKey key{meta.category, face.gender};
      CellStats& cell = out.cells_[key];
      Pending& buf = pending[key];
      ++cell.faces;
      present[face.gender == Gender::kMale ? 0 : 1] = true;
      if (config.weight_by_faces) ++cell.credits_by_fps[meta.sample_fps];

      try {
        const auto pts = head_points_from_landmarks(face.landmarks);
        const PnpSolution sol =
            solve_pnp(pts, config.head_model, cam, config.solver);
        if (!sol.converged()) ++diag.head_pose_nonconverged;
        const DirectionSample s =
            classify_vertical(forward_vector(sol.pose), DirectionSource::kHead);
        ++(s.vertical == Vertical::kUp ? cell.head.up : cell.head.down);
        buf.head_y.push_back(s.y_normalized);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateInput) throw;
        ++diag.head_pose_failures;
      }

      std::optional<Eigen::Vector3d> left;
      std::optional<Eigen::Vector3d> right;
      if (face.gaze_left) left = to_eigen(*face.gaze_left);
      if (face.gaze_right) right = to_eigen(*face.gaze_right);
      try {
        const auto gaze = mean_gaze(left, right);
        if (!gaze) {
          ++diag.gaze_missing;
        } else {
          const DirectionSample s =
              classify_vertical(*gaze, DirectionSource::kGaze);
          ++(s.vertical == Vertical::kUp ? cell.gaze.up : cell.gaze.down);
          buf.gaze_y.push_back(s.y_normalized);
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInvalidDirection) throw;
        ++diag.gaze_invalid;
      }

      cell.face_colors.push_back(
          estimate_face_color(face.jaw_pixels, config.k_pixels, config.seed));
    }

    for (std::size_t g = 0; g < 2; ++g) {
      if (!present[g]) continue;
      CellStats& cell =
          out.cells_[{meta.category, g == 0 ? Gender::kMale : Gender::kFemale}];
      ++cell.frames_present;
      if (!config.weight_by_faces) ++cell.credits_by_fps[meta.sample_fps];
    }
  }

  for (auto& [key, cell] : out.cells_) {
    std::sort(cell.face_colors.begin(), cell.face_colors.end());
    Pending& buf = pending[key];
    cell.head.y = SampleSet::from_values(std::move(buf.head_y),
                                         config.exact_sample_limit);
    cell.gaze.y = SampleSet::from_values(std::move(buf.gaze_y),
                                         config.exact_sample_limit);
  }
  return out;
}

RepresentationSummary merge(const RepresentationSummary& a,
                            const RepresentationSummary& b) {
  if (a.fingerprint_ != b.fingerprint_ || a.limit_ != b.limit_) {
    throw Error(ErrorCode::kIncompatibleSummaries,
                "merge: summaries computed with different configurations (" +
                    a.fingerprint_ + " vs " + b.fingerprint_ + ")");
  }
  RepresentationSummary out = a;
  for (const auto& [key, cell] : b.cells_) {
    auto [it, inserted] = out.cells_.try_emplace(key);
    CellStats& dst = it->second;
    if (inserted) {
      dst = cell;
      continue;
    }
    add_counts(dst.credits_by_fps, cell.credits_by_fps);
    dst.frames_present += cell.frames_present;
    dst.faces += cell.faces;
    merge_source(dst.head, cell.head);
    merge_source(dst.gaze, cell.gaze);
    std::vector<Rgb> colors;
    colors.reserve(dst.face_colors.size() + cell.face_colors.size());
    std::merge(dst.face_colors.begin(), dst.face_colors.end(),
               cell.face_colors.begin(), cell.face_colors.end(),
               std::back_inserter(colors));
    dst.face_colors = std::move(colors);
  }
  for (const auto& [cat, counts] : b.sampled_frames_) {
    add_counts(out.sampled_frames_[cat], counts);
  }
  Diagnostics& d = out.diagnostics_;
  const Diagnostics& e = b.diagnostics_;
  d.frames_total += e.frames_total;
  d.faces_total += e.faces_total;
  d.faces_unknown_gender += e.faces_unknown_gender;
  d.faces_below_confidence += e.faces_below_confidence;
  d.head_pose_failures += e.head_pose_failures;
  d.head_pose_nonconverged += e.head_pose_nonconverged;
  d.gaze_missing += e.gaze_missing;
  d.gaze_invalid += e.gaze_invalid;
  return out;
}

RepresentationSummary summarize_corpus(const CorpusIndex& corpus,
                                       const MetricsConfig& config, int jobs) {
  std::vector<const VideoMeta*> videos;
  for (const auto& [_, meta] : corpus.videos()) videos.push_back(&meta);
  std::vector<RepresentationSummary> parts(
      videos.size(),
      RepresentationSummary(config.fingerprint(), config.exact_sample_limit));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < videos.size(); i = next++) {
      try {
        parts[i] = summarize_video(*videos[i], corpus.frames(videos[i]->video_id),
                                   config);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp<long>(
      jobs, 1, static_cast<long>(std::max<std::size_t>(videos.size(), 1))));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  RepresentationSummary total(config.fingerprint(), config.exact_sample_limit);
  for (const auto& p : parts) total = merge(total, p);
  return total;
}

std::map<CellKey, ScreenTime> screen_time(const RepresentationSummary& summary) {
  std::map<CellKey, ScreenTime> out;
  for (const Category c : kAllCategories) {
    double total = 0.0;
    for (const Gender g : kReportedGenders) {
      ScreenTime st;
      if (auto it = summary.cells().find({c, g}); it != summary.cells().end()) {
        st.seconds = it->second.seconds();
        st.frames_present = it->second.frames_present;
      }
      total += st.seconds;
      out[{c, g}] = st;
    }
    if (total > 0.0) {
      for (const Gender g : kReportedGenders) {
        out[{c, g}].share_pct = 100.0 * out[{c, g}].seconds / total;
      }
    }
  }
  return out;
}

std::map<CellKey, DirectionShare> direction_proportions(
    const RepresentationSummary& summary, DirectionSource source) {
  std::map<CellKey, DirectionShare> out;
  for (const auto& [key, cell] : summary.cells()) {
    const SourceStats& s = cell.source(source);
    const std::uint64_t n = s.up + s.down;
    if (n == 0) continue;
    DirectionShare d;
    d.up = s.up;
    d.down = s.down;
    // The larger share is computed directly and lies in [50, 100], so the
    // subtraction is exact and the two shares sum to exactly 100.
    const double larger =
        100.0 * static_cast<double>(std::max(s.up, s.down)) /
        static_cast<double>(n);
    if (s.up >= s.down) {
      d.up_pct = larger;
      d.down_pct = 100.0 - larger;
    } else {
      d.down_pct = larger;
      d.up_pct = 100.0 - larger;
    }
    out[key] = d;
  }
  return out;
}

std::map<CellKey, BoxStats> variability_summary(
    const RepresentationSummary& summary, DirectionSource source) {
  std::map<CellKey, BoxStats> out;
  for (const auto& [key, cell] : summary.cells()) {
    const SampleSet& y = cell.source(source).y;
    if (y.empty()) continue;
    out[key] = y.box_stats();
  }
  return out;
}

std::map<CellKey, std::vector<Rgb>> face_colors(
    const RepresentationSummary& summary) {
  std::map<CellKey, std::vector<Rgb>> out;
  for (const auto& [key, cell] : summary.cells()) {
    if (!cell.face_colors.empty()) out[key] = cell.face_colors;
  }
  return out;
}

std::map<CellKey, ScreenTime> screen_time(const CorpusIndex& corpus,
                                          const MetricsConfig& config) {
  return screen_time(summarize_corpus(corpus, config));
}

std::map<CellKey, DirectionShare> direction_proportions(
    const CorpusIndex& corpus, DirectionSource source,
    const MetricsConfig& config) {
  return direction_proportions(summarize_corpus(corpus, config), source);
}

std::map<CellKey, BoxStats> variability_summary(const CorpusIndex& corpus,
                                                DirectionSource source,
                                                const MetricsConfig& config) {
  return variability_summary(summarize_corpus(corpus, config), source);
}

}  // namespace screenrep
