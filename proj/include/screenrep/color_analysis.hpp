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

// Face color estimation and corpus-level skin-tone clustering.
//
// Colors are clustered in raw RGB with Euclidean distance. Every result is a
// function of (inputs, seed) only.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "screenrep/records.hpp"

namespace screenrep {

// n x d, one point per row.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PointMatrix to_points(std::span<const Rgb> colors);

// Number of distinct rows (exact comparison).
std::size_t count_distinct(const PointMatrix& points);

struct ColorClustering {
  int k = 0;
  PointMatrix centroids;        // k x d
  std::vector<int> assignment;  // point -> cluster
  std::vector<std::size_t> sizes;
  double inertia = 0.0;
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 100;
  double shift_tolerance = 1e-6;
  // Single-point transfer passes after Lloyd converges.
  bool transfer_refinement = true;
};

// k-means++ seeding followed by Lloyd iterations. Assignment ties go to the
// lowest cluster index; an empty cluster is re-seeded at the point farthest
// from its current centroid. Single-point transfers then polish the result
// unless disabled in the options.
//
// Throws Error(kEmptyInput) for no points and Error(kInfeasibleK) when k < 1
// or k exceeds the number of distinct points.
ColorClustering kmeans(const PointMatrix& points, int k, std::uint64_t seed,
                       const KMeansOptions& options = {});

// Lowest-inertia result over seeds seed, seed+1, ..., seed+restarts-1.
ColorClustering best_kmeans(const PointMatrix& points, int k,
                            std::uint64_t seed, int restarts);

// Mean silhouette coefficient with Euclidean distance. Points in singleton
// clusters score 0, as do points with a = b = 0. Labels may be any integers.
// Throws Error(kUndefinedSilhouette) with fewer than two clusters or points.
double silhouette(const PointMatrix& points, std::span<const int> assignment);

struct KSelection {
  int k = 0;
  ColorClustering clustering;
  std::map<int, double> scores;  // k -> silhouette
};

// Argmax of silhouette over k in [k_min, k_max]; ties go to the smaller k.
KSelection select_k(const PointMatrix& points, int k_min, int k_max,
                    std::uint64_t seed, int restarts);

// Centroid of the largest pixel cluster, rounded to integer channels. The
// pixel list is sorted first, so the result does not depend on pixel order.
Rgb estimate_face_color(std::span<const Rgb> jaw_pixels, int k_pixels,
                        std::uint64_t seed);

// B channel of HSB in percent, rounded to one decimal.
double brightness_hsb(const Rgb& color);

// Channels rounded to the nearest integer and clamped to [0, 255].
Rgb round_to_rgb(const Eigen::Vector3d& color);

using CellKey = std::pair<Category, Gender>;

struct ClusterEntry {
  Rgb centroid;
  std::size_t size = 0;
  double proportion_pct = 0.0;
  double brightness_pct = 0.0;
};

struct ClusterCell {
  Category category = Category::kDrama;
  Gender gender = Gender::kUnknown;
  std::size_t n_faces = 0;
  bool insufficient_data = false;
  int selected_k = 0;
  std::vector<ClusterEntry> clusters;  // descending brightness
  std::map<int, double> silhouette_by_k;
};

struct ClusterSettings {
  int k_min = 2;
  int k_max = 8;
  std::uint64_t seed = 42;
  int restarts = 10;
};

struct ClusterReport {
  std::vector<ClusterCell> cells;  // in key order
};

// Per-cell k selection over face colors. Cells with at most k_min distinct
// colors are marked insufficient_data; k_max is capped at the distinct count.
ClusterReport cluster_report(
    const std::map<CellKey, std::vector<Rgb>>& face_colors,
    const ClusterSettings& settings);

}  // namespace screenrep
