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

// Head pose from six landmark correspondences, and the vertical-direction
// statistics derived from head and gaze directions.
//
// Camera frame: x right, y down, z away from the camera along the optical
// axis. "Up on screen" therefore means a negative y component.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "screenrep/records.hpp"

namespace screenrep {

// Pinhole camera without skew or distortion.
struct CameraIntrinsics {
  double focal_px = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  // focal = frame width, principal point at the frame center.
  static CameraIntrinsics for_frame(int width, int height);

  // Throws Error(kConfig) when focal_px <= 0 or the principal point is not
  // finite.
  void validate() const;

  bool operator==(const CameraIntrinsics&) const = default;
};

enum class HeadPoint {
  kNoseTip,
  kChin,
  kLeftEyeOuter,
  kRightEyeOuter,
  kMouthLeft,
  kMouthRight,
};

inline constexpr std::size_t kHeadPointCount = 6;
inline constexpr std::array<HeadPoint, kHeadPointCount> kHeadPoints = {
    HeadPoint::kNoseTip,      HeadPoint::kChin,      HeadPoint::kLeftEyeOuter,
    HeadPoint::kRightEyeOuter, HeadPoint::kMouthLeft, HeadPoint::kMouthRight};

// Index into the 68-point layout for each HeadPoint, in label order.
inline constexpr std::array<std::size_t, kHeadPointCount> kHeadLandmarkIndices =
    {30, 8, 36, 45, 48, 54};

std::string_view to_string(HeadPoint point);
std::optional<HeadPoint> parse_head_point(std::string_view text);

// Six labeled 3D points of a generic head. The model frame is right-handed
// with +z pointing out of the face, so a face looking straight into the
// camera has rotation diag(1, -1, -1).
class HeadModel {
 public:
  using Points = std::array<Eigen::Vector3d, kHeadPointCount>;

  // Throws Error(kDegenerateInput) if the points are coplanar or collapsed.
  explicit HeadModel(const Points& points);

  // Generic anthropometric six-point model, model units ~ millimetres.
  static HeadModel default_model();

  const Points& points() const { return points_; }
  const Eigen::Vector3d& point(HeadPoint p) const {
    return points_[static_cast<std::size_t>(p)];
  }
  // RMS distance of the points from their centroid.
  double scale() const { return scale_; }

  bool operator==(const HeadModel& other) const;

 private:
  Points points_;
  double scale_ = 0.0;
};

struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double reproj_rmse = 0.0;
};

// True when R^T R = I within `tol` (max-abs) and det(R) is within `tol` of 1.
bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9);

// Nearest rotation in the Frobenius sense (SVD with determinant correction).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

// Angle of the relative rotation a^T b, in radians.
double geodesic_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

// Pinhole projection of model points. Throws Error(kBehindCamera) if any
// transformed point has z <= 0.
std::vector<Eigen::Vector2d> project_points(
    std::span<const Eigen::Vector3d> points3d, const Pose& pose,
    const CameraIntrinsics& cam);

struct SolverOptions {
  int max_iterations = 50;
  double step_tolerance = 1e-10;
  double relative_improvement_tolerance = 1e-12;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  // Rank test on the linear initialization: ratio of the 11th to the 1st
  // singular value of the 12x12 system.
  double rank_tolerance = 1e-9;
};

enum class SolveStatus { kConverged, kMaxIterations };

struct PnpSolution {
  Pose pose;
  double initial_rmse = 0.0;  // after the linear initialization
  int iterations = 0;
  SolveStatus status = SolveStatus::kConverged;

  bool converged() const { return status == SolveStatus::kConverged; }
};

// Pose that minimizes the summed squared reprojection error of the six model
// points. A direct linear transform gives the starting pose, which damped
// Gauss-Newton then refines over rotation increment and translation.
//
// Throws Error(kArity) unless exactly six image points are given, and
// Error(kDegenerateInput) when the linear system is rank deficient or the
// input is not finite. Hitting the iteration cap is reported through
// PnpSolution::status with the best iterate.
PnpSolution solve_pnp(std::span<const Eigen::Vector2d> points2d,
                      const HeadModel& model, const CameraIntrinsics& cam,
                      const SolverOptions& options = {});

// The six image points of HeadModel labels, read from a 68-point layout.
std::array<Eigen::Vector2d, kHeadPointCount> head_points_from_landmarks(
    const Landmarks& landmarks);

// Facing direction of the head in camera coordinates: R * (0, 0, 1).
Eigen::Vector3d forward_vector(const Pose& pose);

// Yaw (positive toward image right) and pitch (positive upward) of a
// forward vector relative to looking straight into the camera, in degrees.
// Kept for diagnostics; reports classify on the vertical component only.
struct HeadAngles {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
};
HeadAngles head_angles(const Eigen::Vector3d& forward);

enum class DirectionSource { kHead, kGaze };
enum class Vertical { kUp, kDown };

std::string_view to_string(DirectionSource source);
std::string_view to_string(Vertical vertical);

struct DirectionSample {
  DirectionSource source = DirectionSource::kHead;
  double y_normalized = 0.0;
  Vertical vertical = Vertical::kDown;
};

// Up iff the renormalized y component is negative; exactly horizontal counts
// as down. Throws Error(kInvalidDirection) for vectors shorter than 1e-6 or
// with non-finite components.
DirectionSample classify_vertical(const Eigen::Vector3d& direction,
                                  DirectionSource source = DirectionSource::kHead);

// Normalized mean of the available eye-gaze vectors. Throws
// Error(kInvalidDirection) when the two vectors cancel out.
std::optional<Eigen::Vector3d> mean_gaze(
    const std::optional<Eigen::Vector3d>& left,
    const std::optional<Eigen::Vector3d>& right);

inline Eigen::Vector3d to_eigen(const Vec3& v) { return {v[0], v[1], v[2]}; }

}  // namespace screenrep
