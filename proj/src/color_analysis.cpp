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

#include "screenrep/color_analysis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "screenrep/random.hpp"

namespace screenrep {

namespace {

double squared_distance(const PointMatrix& a, Eigen::Index i,
                        const PointMatrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

bool row_less(const PointMatrix& m, Eigen::Index a, Eigen::Index b) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (m(a, c) != m(b, c)) return m(a, c) < m(b, c);
  }
  return false;
}

PointMatrix seed_plus_plus(const PointMatrix& points, int k,
                           std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  PointMatrix centers(k, points.cols());
  const auto first = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n)), n - 1);
  centers.row(0) = points.row(first);

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    d2[i] = squared_distance(points, i, centers, 0);
  }
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    const double target = uniform01(rng) * total;
    Eigen::Index chosen = -1;
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      cumulative += d2[i];
      chosen = i;
      if (cumulative > target) break;
    }
    // chosen == -1 only if every point coincides with a center, which the
    // distinct-point precondition rules out.
    centers.row(c) = points.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points, i, centers, c));
    }
  }
  return centers;
}

double inertia_of(const PointMatrix& points, const PointMatrix& centroids,
                  std::span<const int> assignment) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += squared_distance(points, i, centroids, assignment[i]);
  }
  return total;
}

// Hartigan single-point transfers: move a point whenever that lowers the
// inertia, updating both means in place. Stops after a pass without moves.
// Lloyd fixed points are not always Hartigan fixed points, so this escapes
// some local optima Lloyd gets stuck in.
void transfer_refine(const PointMatrix& points, PointMatrix& centroids,
                     std::vector<int>& assignment, std::vector<std::size_t>& sizes,
                     int max_passes) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centroids.rows());
  for (int pass = 0; pass < max_passes; ++pass) {
    bool moved = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int from = assignment[i];
      const auto n_from = static_cast<double>(sizes[from]);
      if (sizes[from] <= 1) continue;
      const double removal =
          n_from / (n_from - 1.0) * squared_distance(points, i, centroids, from);
      int to = -1;
      double best_add = removal;
      for (int c = 0; c < k; ++c) {
        if (c == from) continue;
        const auto n_to = static_cast<double>(sizes[c]);
        const double add =
            n_to / (n_to + 1.0) * squared_distance(points, i, centroids, c);
        if (add < best_add) {
          best_add = add;
          to = c;
        }
      }
      // Relative margin keeps rounding noise from cycling a point back and
      // forth.
      if (to < 0 || removal - best_add <= 1e-12 * (1.0 + removal)) continue;
      const auto n_to = static_cast<double>(sizes[to]);
      centroids.row(from) = (centroids.row(from) * n_from - points.row(i)) / (n_from - 1.0);
      centroids.row(to) = (centroids.row(to) * n_to + points.row(i)) / (n_to + 1.0);
      --sizes[from];
      ++sizes[to];
      assignment[i] = to;
      moved = true;
    }
    if (!moved) break;
  }
  // Exact means, free of the incremental updates' rounding.
  centroids.setZero();
  for (Eigen::Index i = 0; i < n; ++i) centroids.row(assignment[i]) += points.row(i);
  for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(sizes[c]);
}

}  // namespace

PointMatrix to_points(std::span<const Rgb> colors) {
  PointMatrix m(static_cast<Eigen::Index>(colors.size()), 3);
  for (std::size_t i = 0; i < colors.size(); ++i) {
    m(i, 0) = colors[i].r;
    m(i, 1) = colors[i].g;
    m(i, 2) = colors[i].b;
  }
  return m;
}

std::size_t count_distinct(const PointMatrix& points) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return row_less(points, a, b);
  });
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (points.row(order[i]) != points.row(order[i - 1])) ++distinct;
  }
  return distinct;
}

ColorClustering kmeans(const PointMatrix& points, int k, std::uint64_t seed,
                       const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "kmeans: no points");
  if (k < 1) throw Error(ErrorCode::kInfeasibleK, "kmeans: k must be >= 1");
  const std::size_t distinct = count_distinct(points);
  if (static_cast<std::size_t>(k) > distinct) {
    throw Error(ErrorCode::kInfeasibleK,
                "kmeans: k = " + std::to_string(k) + " exceeds " +
                    std::to_string(distinct) + " distinct points");
  }

  std::mt19937_64 rng(seed);
  ColorClustering out;
  out.k = k;
  out.centroids = seed_plus_plus(points, k, rng);
  out.assignment.assign(static_cast<std::size_t>(n), 0);
  out.sizes.assign(static_cast<std::size_t>(k), 0);

  [[maybe_unused]] double previous_inertia =
      std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    out.iterations = iter;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points, i, out.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, out.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      out.assignment[i] = best;
    }

    PointMatrix next = PointMatrix::Zero(k, points.cols());
    std::fill(out.sizes.begin(), out.sizes.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.row(out.assignment[i]) += points.row(i);
      ++out.sizes[out.assignment[i]];
    }
    std::vector<int> empty;
    for (int c = 0; c < k; ++c) {
      if (out.sizes[c] > 0) {
        next.row(c) /= static_cast<double>(out.sizes[c]);
      } else {
        empty.push_back(c);
      }
    }

#ifndef NDEBUG
    const double current = inertia_of(points, next, out.assignment);
    assert(current <= previous_inertia * (1.0 + 1e-12) + 1e-12);
    previous_inertia = current;
#endif

    if (!empty.empty()) {
      std::vector<double> spread(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) {
        spread[i] = squared_distance(points, i, next, out.assignment[i]);
      }
      for (const int c : empty) {
        const auto far = static_cast<Eigen::Index>(
            std::max_element(spread.begin(), spread.end()) - spread.begin());
        next.row(c) = points.row(far);
        spread[far] = -1.0;
      }
    }

    const double shift = (next - out.centroids).cwiseAbs().maxCoeff();
    out.centroids = std::move(next);
    if (shift < options.shift_tolerance) break;
  }

  if (options.transfer_refinement) {
    // Reassign against the final centroids first so sizes match; keep the
    // Lloyd result if that empties a cluster.
    const std::vector<int> lloyd_assignment = out.assignment;
    const std::vector<std::size_t> lloyd_sizes = out.sizes;
    std::fill(out.sizes.begin(), out.sizes.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points, i, out.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, out.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      out.assignment[i] = best;
      ++out.sizes[best];
    }
    if (std::find(out.sizes.begin(), out.sizes.end(), 0) == out.sizes.end()) {
      transfer_refine(points, out.centroids, out.assignment, out.sizes,
                      options.max_iterations);
    } else {
      out.assignment = lloyd_assignment;
      out.sizes = lloyd_sizes;
    }
  }

  out.inertia = inertia_of(points, out.centroids, out.assignment);
  return out;
}

ColorClustering best_kmeans(const PointMatrix& points, int k,
                            std::uint64_t seed, int restarts) {
  if (restarts < 1) {
    throw Error(ErrorCode::kConfig, "kmeans restarts must be >= 1");
  }
  ColorClustering best = kmeans(points, k, seed);
  for (int r = 1; r < restarts; ++r) {
    ColorClustering c = kmeans(points, k, seed + static_cast<std::uint64_t>(r));
    if (c.inertia < best.inertia) best = std::move(c);
  }
  return best;
}

double silhouette(const PointMatrix& points, std::span<const int> assignment) {
  const Eigen::Index n = points.rows();
  if (static_cast<std::size_t>(n) != assignment.size()) {
    throw Error(ErrorCode::kArity, "silhouette: assignment size mismatch");
  }
  std::vector<int> labels(assignment.begin(), assignment.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  if (n < 2 || labels.size() < 2) {
    throw Error(ErrorCode::kUndefinedSilhouette,
                "silhouette: need at least two points in two clusters");
  }
  const std::size_t kc = labels.size();
  std::vector<std::size_t> cluster(static_cast<std::size_t>(n));
  std::vector<std::size_t> sizes(kc, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    cluster[i] = static_cast<std::size_t>(
        std::lower_bound(labels.begin(), labels.end(), assignment[i]) -
        labels.begin());
    ++sizes[cluster[i]];
  }

  std::vector<double> sums(kc);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t own = cluster[i];
    if (sizes[own] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[cluster[j]] += std::sqrt(squared_distance(points, i, points, j));
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kc; ++c) {
      if (c != own) b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

KSelection select_k(const PointMatrix& points, int k_min, int k_max,
                    std::uint64_t seed, int restarts) {
  if (k_min < 2 || k_min > k_max) {
    throw Error(ErrorCode::kConfig,
                "select_k: need 2 <= k_min <= k_max, got k_min = " +
                    std::to_string(k_min) + ", k_max = " + std::to_string(k_max));
  }
  KSelection out;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    ColorClustering c = best_kmeans(points, k, seed, restarts);
    const double score = silhouette(points, c.assignment);
    out.scores[k] = score;
    if (score > best_score) {
      best_score = score;
      out.k = k;
      out.clustering = std::move(c);
    }
  }
  return out;
}

Rgb round_to_rgb(const Eigen::Vector3d& color) {
  auto channel = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
  };
  return {channel(color.x()), channel(color.y()), channel(color.z())};
}

Rgb estimate_face_color(std::span<const Rgb> jaw_pixels, int k_pixels,
                        std::uint64_t seed) {
  if (jaw_pixels.empty()) {
    throw Error(ErrorCode::kEmptyInput, "estimate_face_color: no jaw pixels");
  }
  if (k_pixels < 1) {
    throw Error(ErrorCode::kConfig, "k_pixels must be >= 1");
  }
  std::vector<Rgb> sorted(jaw_pixels.begin(), jaw_pixels.end());
  std::sort(sorted.begin(), sorted.end());
  const PointMatrix points = to_points(sorted);
  const std::size_t distinct = count_distinct(points);
  const int k = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(k_pixels), distinct));

  const ColorClustering c = kmeans(points, k, seed);
  std::vector<double> contribution(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    contribution[c.assignment[i]] +=
        squared_distance(points, i, c.centroids, c.assignment[i]);
  }
  int largest = 0;
  for (int j = 1; j < k; ++j) {
    if (c.sizes[j] > c.sizes[largest] ||
        (c.sizes[j] == c.sizes[largest] &&
         contribution[j] < contribution[largest])) {
      largest = j;
    }
  }
  return round_to_rgb(c.centroids.row(largest).transpose());
}

double brightness_hsb(const Rgb& color) {
  const int top = std::max({color.r, color.g, color.b});
  return std::round(1000.0 * top / 255.0) / 10.0;
}

ClusterReport cluster_report(
    const std::map<CellKey, std::vector<Rgb>>& face_colors,
    const ClusterSettings& settings) {
  ClusterReport report;
  for (const auto& [key, colors] : face_colors) {
    ClusterCell cell;
    cell.category = key.first;
    cell.gender = key.second;
    cell.n_faces = colors.size();

    // Canonical order keeps the result independent of collection order.
    std::vector<Rgb> sorted = colors;
    std::sort(sorted.begin(), sorted.end());
    const PointMatrix points = to_points(sorted);
    const std::size_t distinct = count_distinct(points);
    if (distinct < static_cast<std::size_t>(settings.k_min) + 1) {
      cell.insufficient_data = true;
      report.cells.push_back(std::move(cell));
      continue;
    }

    const int k_max = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(settings.k_max), distinct));
    KSelection sel = select_k(points, settings.k_min, k_max, settings.seed,
                              settings.restarts);
    cell.selected_k = sel.k;
    cell.silhouette_by_k = sel.scores;

    struct Ranked {
      ClusterEntry entry;
      Eigen::Vector3d exact;
    };
    std::vector<Ranked> ranked;
    for (int c = 0; c < sel.k; ++c) {
      const std::size_t size = sel.clustering.sizes[c];
      if (size == 0) continue;
      const Eigen::Vector3d exact = sel.clustering.centroids.row(c).transpose();
      ClusterEntry e;
      e.centroid = round_to_rgb(exact);
      e.size = size;
      e.proportion_pct = 100.0 * static_cast<double>(size) /
                         static_cast<double>(cell.n_faces);
      e.brightness_pct = brightness_hsb(e.centroid);
      ranked.push_back({e, exact});
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const Ranked& a, const Ranked& b) {
                if (a.entry.brightness_pct != b.entry.brightness_pct) {
                  return a.entry.brightness_pct > b.entry.brightness_pct;
                }
                if (a.exact.maxCoeff() != b.exact.maxCoeff()) {
                  return a.exact.maxCoeff() > b.exact.maxCoeff();
                }
                return std::lexicographical_compare(
                    b.exact.begin(), b.exact.end(), a.exact.begin(),
                    a.exact.end());
              });
    for (auto& r : ranked) cell.clusters.push_back(r.entry);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

}  // namespace screenrep
