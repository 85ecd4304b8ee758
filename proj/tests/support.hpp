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

// Test-side oracles and builders. The oracles are deliberately naive and
// share no code with the library.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "screenrep/color_analysis.hpp"
#include "screenrep/pose_solver.hpp"
#include "screenrep/records.hpp"

namespace testsupport {

using Points = std::vector<std::vector<double>>;

inline screenrep::PointMatrix to_matrix(const Points& pts) {
  const auto d = pts.empty() ? 0 : static_cast<Eigen::Index>(pts[0].size());
  screenrep::PointMatrix m(static_cast<Eigen::Index>(pts.size()), d);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), j) = pts[i][j];
  }
  return m;
}

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

// Sum of squared distances to cluster means for one labeling.
inline double partition_inertia(const Points& pts, const std::vector<int>& labels,
                                int k) {
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    std::vector<double> mean(pts[0].size(), 0.0);
    int n = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (labels[i] != c) continue;
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += pts[i][j];
      ++n;
    }
    if (n == 0) continue;
    for (double& v : mean) v /= n;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (labels[i] == c) total += sq_dist(pts[i], mean);
    }
  }
  return total;
}

// Minimum inertia over all k^n labelings with every cluster non-empty.
inline double exhaustive_min_inertia(const Points& pts, int k) {
  const std::size_t n = pts.size();
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::uint64_t>(k);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t c = code;
    std::vector<int> used(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(c % k);
      c /= k;
      used[labels[i]] = 1;
    }
    bool all = true;
    for (int u : used) all = all && u;
    if (all) best = std::min(best, partition_inertia(pts, labels, k));
  }
  return best;
}

// Mean silhouette straight from the definition.
inline double direct_silhouette(const Points& pts, const std::vector<int>& labels) {
  const std::size_t n = pts.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> other_labels;
    double own = 0.0;
    int own_n = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || labels[j] != labels[i]) continue;
      own += std::sqrt(sq_dist(pts[i], pts[j]));
      ++own_n;
    }
    if (own_n == 0) continue;  // singleton
    const double a = own / own_n;
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[j] == labels[i]) continue;
      const int l = labels[j];
      bool seen = false;
      for (int x : other_labels) seen = seen || x == l;
      if (seen) continue;
      other_labels.push_back(l);
      double d = 0.0;
      int m = 0;
      for (std::size_t q = 0; q < n; ++q) {
        if (labels[q] != l) continue;
        d += std::sqrt(sq_dist(pts[i], pts[q]));
        ++m;
      }
      b = std::min(b, d / m);
    }
    const double den = std::max(a, b);
    if (den > 0.0) sum += (b - a) / den;
  }
  return sum / static_cast<double>(n);
}

inline Eigen::Matrix3d frontal() {
  return Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()).toRotationMatrix();
}

// Uniformly random axis, angle uniform in [0, max_angle].
inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> g;
  Eigen::Vector3d axis(g(rng), g(rng), g(rng));
  axis.normalize();
  std::uniform_real_distribution<double> u(0.0, max_angle);
  return Eigen::AngleAxisd(u(rng), axis).toRotationMatrix();
}

// Face whose six solver landmarks are exact projections of the default head
// model; the remaining landmarks sit at the principal point.
inline screenrep::FaceObservation posed_face(
    screenrep::Gender gender, const Eigen::Matrix3d& rotation,
    const screenrep::CameraIntrinsics& cam,
    const Eigen::Vector3d& translation = {0.0, 0.0, 2500.0}) {
  using namespace screenrep;
  const HeadModel model = HeadModel::default_model();
  Pose pose;
  pose.rotation = rotation;
  pose.translation = translation;
  const auto uv = project_points(model.points(), pose, cam);
  FaceObservation f;
  for (auto& p : f.landmarks) p = {cam.cx, cam.cy};
  for (std::size_t i = 0; i < kHeadPointCount; ++i) {
    f.landmarks[kHeadLandmarkIndices[i]] = {uv[i].x(), uv[i].y()};
  }
  f.gender = gender;
  f.gender_confidence = 0.9;
  f.jaw_pixels = {{200, 160, 140}, {200, 160, 140}, {40, 30, 20}};
  return f;
}

// Face tilted up (positive) or down (negative) by `deg` from frontal.
inline Eigen::Matrix3d tilted(double deg) {
  return Eigen::AngleAxisd(-deg * M_PI / 180.0, Eigen::Vector3d::UnitX())
             .toRotationMatrix() *
         frontal();
}

inline screenrep::Landmarks grid_landmarks(double x0 = 100.0, double y0 = 100.0) {
  screenrep::Landmarks lm{};
  for (std::size_t i = 0; i < lm.size(); ++i) {
    lm[i] = {x0 + static_cast<double>(i % 10) * 5.0,
             y0 + static_cast<double>(i / 10) * 5.0};
  }
  return lm;
}

inline std::string landmarks_json(int count, double x0 = 100.0) {
  std::ostringstream s;
  s << '[';
  for (int i = 0; i < count; ++i) {
    s << (i ? "," : "") << '[' << x0 + i % 10 << ',' << 100 + i / 10 << ']';
  }
  s << ']';
  return s.str();
}

inline std::string meta_line(const std::string& id, const std::string& category,
                             double fps = 1.0) {
  std::ostringstream s;
  s << R"({"video_id":")" << id << R"(","category":")" << category
    << R"(","sample_fps":)" << fps << R"(,"frame_width":640,"frame_height":480})";
  return s.str();
}

inline std::string face_json(const std::string& gender, double confidence,
                             int landmarks = 68) {
  std::ostringstream s;
  s << R"({"landmarks":)" << landmarks_json(landmarks) << R"(,"gender":")" << gender
    << R"(","gender_confidence":)" << confidence
    << R"(,"gaze_left":null,"gaze_right":null,"jaw_pixels":[[200,160,140],[190,150,130],[20,20,20]]})";
  return s.str();
}

inline std::string record_line(const std::string& id, long frame,
                               const std::vector<std::string>& faces = {}) {
  std::ostringstream s;
  s << R"({"video_id":")" << id << R"(","frame_index":)" << frame << R"(,"faces":[)";
  for (std::size_t i = 0; i < faces.size(); ++i) s << (i ? "," : "") << faces[i];
  s << "]}";
  return s.str();
}

}  // namespace testsupport
