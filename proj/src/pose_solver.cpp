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

#include "screenrep/pose_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace screenrep {

namespace {

using Matrix12d = Eigen::Matrix<double, 12, 12>;
using Matrix34d = Eigen::Matrix<double, 3, 4>;
using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

constexpr double kPi = 3.14159265358979323846;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d exp_so3(const Eigen::Vector3d& omega) {
  const double angle = omega.norm();
  if (angle < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
}

// Sum of squared pixel residuals; +inf if any point lands behind the camera.
double reprojection_cost(const HeadModel::Points& model,
                         std::span<const Eigen::Vector2d> observed,
                         const Eigen::Matrix3d& r, const Eigen::Vector3d& t,
                         const CameraIntrinsics& cam) {
  double cost = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Eigen::Vector3d pc = r * model[i] + t;
    if (!(pc.z() > 0.0)) return std::numeric_limits<double>::infinity();
    const double u = cam.focal_px * pc.x() / pc.z() + cam.cx;
    const double v = cam.focal_px * pc.y() / pc.z() + cam.cy;
    cost += (u - observed[i].x()) * (u - observed[i].x()) +
            (v - observed[i].y()) * (v - observed[i].y());
  }
  return cost;
}

double rmse_from_cost(double cost) {
  return std::sqrt(cost / static_cast<double>(kHeadPointCount));
}

[[noreturn]] void degenerate(const std::string& why) {
  throw Error(ErrorCode::kDegenerateInput, "solve_pnp: " + why);
}

// Linear pose estimate from the six correspondences.
Pose dlt_initialize(const HeadModel::Points& model,
                    std::span<const Eigen::Vector2d> observed,
                    const CameraIntrinsics& cam, double rank_tolerance) {
  // Condition the 3D side: centroid at the origin, unit RMS radius per axis.
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : model) centroid += p;
  centroid /= static_cast<double>(model.size());
  double spread = 0.0;
  for (const auto& p : model) spread += (p - centroid).squaredNorm();
  const double s = std::sqrt(spread / (3.0 * static_cast<double>(model.size())));

  Matrix12d a = Matrix12d::Zero();
  for (std::size_t i = 0; i < model.size(); ++i) {
    const Eigen::Vector4d xh((model[i] - centroid).x() / s,
                             (model[i] - centroid).y() / s,
                             (model[i] - centroid).z() / s, 1.0);
    const double x = (observed[i].x() - cam.cx) / cam.focal_px;
    const double y = (observed[i].y() - cam.cy) / cam.focal_px;
    a.block<1, 4>(2 * i, 0) = xh.transpose();
    a.block<1, 4>(2 * i, 8) = -x * xh.transpose();
    a.block<1, 4>(2 * i + 1, 4) = xh.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -y * xh.transpose();
  }

  Eigen::JacobiSVD<Matrix12d> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || !(sv(10) > rank_tolerance * sv(0))) {
    degenerate("linear system is rank deficient");
  }
  const Eigen::Matrix<double, 12, 1> p = svd.matrixV().col(11);
  Matrix34d proj_normalized;
  proj_normalized << p.segment<4>(0).transpose(), p.segment<4>(4).transpose(),
      p.segment<4>(8).transpose();

  // Undo the conditioning: P = P' * [I/s, -c/s; 0, 1].
  Eigen::Matrix4d cond = Eigen::Matrix4d::Identity();
  cond.topLeftCorner<3, 3>() /= s;
  cond.topRightCorner<3, 1>() = -centroid / s;
  Matrix34d proj = proj_normalized * cond;

  // Cheirality fixes the overall sign: most points in front of the camera.
  int in_front = 0;
  for (const auto& pt : model) {
    if (proj.row(2).dot(pt.homogeneous()) > 0.0) ++in_front;
  }
  if (2 * in_front < static_cast<int>(model.size())) proj = -proj;

  const Eigen::Matrix3d m = proj.leftCols<3>();
  Eigen::JacobiSVD<Eigen::Matrix3d> msvd(m, Eigen::ComputeFullU |
                                                Eigen::ComputeFullV);
  const double scale = msvd.singularValues().mean();
  if (!(scale > 0.0)) degenerate("projection block has zero scale");

  Pose pose;
  pose.rotation = nearest_rotation(m);
  pose.translation = proj.col(3) / scale;
  return pose;
}

}  // namespace

CameraIntrinsics CameraIntrinsics::for_frame(int width, int height) {
  return {static_cast<double>(width), 0.5 * width, 0.5 * height};
}

void CameraIntrinsics::validate() const {
  if (!(focal_px > 0.0) || !std::isfinite(focal_px)) {
    throw Error(ErrorCode::kConfig, "camera focal_px must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::kConfig, "camera principal point must be finite");
  }
}

std::string_view to_string(HeadPoint point) {
  switch (point) {
    case HeadPoint::kNoseTip: return "nose_tip";
    case HeadPoint::kChin: return "chin";
    case HeadPoint::kLeftEyeOuter: return "left_eye_outer";
    case HeadPoint::kRightEyeOuter: return "right_eye_outer";
    case HeadPoint::kMouthLeft: return "mouth_left";
    case HeadPoint::kMouthRight: return "mouth_right";
  }
  return "nose_tip";
}

std::optional<HeadPoint> parse_head_point(std::string_view text) {
  for (const HeadPoint p : kHeadPoints) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

HeadModel::HeadModel(const Points& points) : points_(points) {
  Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
  for (const auto& p : points_) {
    if (!p.allFinite()) {
      throw Error(ErrorCode::kDegenerateInput, "head model: non-finite point");
    }
    centroid += p;
  }
  centroid /= static_cast<double>(points_.size());

  Eigen::Matrix<double, kHeadPointCount, 3> centered;
  double sq = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    centered.row(i) = (points_[i] - centroid).transpose();
    sq += centered.row(i).squaredNorm();
  }
  scale_ = std::sqrt(sq / static_cast<double>(points_.size()));

  const Eigen::Vector3d sv =
      Eigen::JacobiSVD<Eigen::Matrix<double, kHeadPointCount, 3>>(centered)
          .singularValues();
  if (!(sv(0) > 0.0) || sv(2) <= 1e-9 * sv(0)) {
    throw Error(ErrorCode::kDegenerateInput,
                "head model points are coplanar (rank of centered points < 3)");
  }
}

HeadModel HeadModel::default_model() {
  return HeadModel(Points{
      Eigen::Vector3d(0.0, 0.0, 0.0),          // nose tip
      Eigen::Vector3d(0.0, -330.0, -65.0),     // chin
      Eigen::Vector3d(-225.0, 170.0, -135.0),  // left eye, outer corner
      Eigen::Vector3d(225.0, 170.0, -135.0),   // right eye, outer corner
      Eigen::Vector3d(-150.0, -150.0, -125.0),  // mouth, left corner
      Eigen::Vector3d(150.0, -150.0, -125.0),   // mouth, right corner
  });
}

bool HeadModel::operator==(const HeadModel& other) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i] != other.points_[i]) return false;
  }
  return true;
}

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
  if (!r.allFinite()) return false;
  const double ortho =
      (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  Eigen::Vector3d d(1.0, 1.0, (u * v.transpose()).determinant() < 0 ? -1.0 : 1.0);
  return u * d.asDiagonal() * v.transpose();
}

double geodesic_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d rel = nearest_rotation(a.transpose() * b);
  return Eigen::AngleAxisd(Eigen::Quaterniond(rel)).angle();
}

std::vector<Eigen::Vector2d> project_points(
    std::span<const Eigen::Vector3d> points3d, const Pose& pose,
    const CameraIntrinsics& cam) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(points3d.size());
  for (std::size_t i = 0; i < points3d.size(); ++i) {
    const Eigen::Vector3d pc = pose.rotation * points3d[i] + pose.translation;
    if (!(pc.z() > 0.0)) {
      throw Error(ErrorCode::kBehindCamera,
                  "project_points: point " + std::to_string(i) +
                      " has non-positive depth");
    }
    out.emplace_back(cam.focal_px * pc.x() / pc.z() + cam.cx,
                     cam.focal_px * pc.y() / pc.z() + cam.cy);
  }
  return out;
}

PnpSolution solve_pnp(std::span<const Eigen::Vector2d> points2d,
                      const HeadModel& model, const CameraIntrinsics& cam,
                      const SolverOptions& options) {
  if (points2d.size() != kHeadPointCount) {
    throw Error(ErrorCode::kArity, "solve_pnp: expected 6 correspondences, got " +
                                       std::to_string(points2d.size()));
  }
  cam.validate();
  for (const auto& p : points2d) {
    if (!p.allFinite()) degenerate("non-finite image point");
  }
  const HeadModel::Points& pts = model.points();

  PnpSolution sol;
  Pose init = dlt_initialize(pts, points2d, cam, options.rank_tolerance);
  double cost = reprojection_cost(pts, points2d, init.rotation,
                                  init.translation, cam);
  if (!std::isfinite(cost)) {
    degenerate("linear initialization places points behind the camera");
  }
  sol.initial_rmse = rmse_from_cost(cost);

  Eigen::Matrix3d r = init.rotation;
  Eigen::Vector3d t = init.translation;
  double lambda = options.initial_damping;
  sol.status = SolveStatus::kMaxIterations;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    sol.iterations = iter + 1;
    if (cost == 0.0) {
      sol.status = SolveStatus::kConverged;
      break;
    }

    // Residual and Jacobian w.r.t. (omega, t) with R <- exp([omega]x) R.
    Eigen::Matrix<double, 12, 6> jac;
    Eigen::Matrix<double, 12, 1> res;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Eigen::Vector3d rp = r * pts[i];
      const Eigen::Vector3d pc = rp + t;
      const double iz = 1.0 / pc.z();
      const double f = cam.focal_px;
      res(2 * i) = f * pc.x() * iz + cam.cx - points2d[i].x();
      res(2 * i + 1) = f * pc.y() * iz + cam.cy - points2d[i].y();

      Eigen::Matrix<double, 2, 3> dproj;
      dproj << f * iz, 0.0, -f * pc.x() * iz * iz,  //
          0.0, f * iz, -f * pc.y() * iz * iz;
      jac.block<2, 3>(2 * i, 0) = -dproj * skew(rp);
      jac.block<2, 3>(2 * i, 3) = dproj;
    }
    const Matrix6d h = jac.transpose() * jac;
    const Vector6d g = jac.transpose() * res;

    const Vector6d step =
        (h + lambda * Matrix6d::Identity()).ldlt().solve(-g);
    if (!step.allFinite()) {
      lambda *= options.damping_factor;
      continue;
    }
    if (step.cwiseAbs().maxCoeff() < options.step_tolerance) {
      sol.status = SolveStatus::kConverged;
      break;
    }

    const Eigen::Matrix3d r_new = exp_so3(step.head<3>()) * r;
    const Eigen::Vector3d t_new = t + step.tail<3>();
    const double cost_new = reprojection_cost(pts, points2d, r_new, t_new, cam);
    if (cost_new < cost) {
      const double improvement = (cost - cost_new) / cost;
      r = r_new;
      t = t_new;
      cost = cost_new;
      lambda /= options.damping_factor;
      if (improvement < options.relative_improvement_tolerance) {
        sol.status = SolveStatus::kConverged;
        break;
      }
    } else {
      lambda *= options.damping_factor;
    }
  }

  // Re-project onto SO(3) to remove drift from the composed increments. The
  // correction is at round-off level, so keep it only if it does not raise
  // the residual.
  const Eigen::Matrix3d r_clean = nearest_rotation(r);
  const double cost_clean = reprojection_cost(pts, points2d, r_clean, t, cam);
  if (cost_clean <= cost || !is_rotation(r)) {
    r = r_clean;
    cost = cost_clean;
  }

  sol.pose.rotation = r;
  sol.pose.translation = t;
  sol.pose.reproj_rmse = rmse_from_cost(cost);
  return sol;
}

std::array<Eigen::Vector2d, kHeadPointCount> head_points_from_landmarks(
    const Landmarks& landmarks) {
  std::array<Eigen::Vector2d, kHeadPointCount> out;
  for (std::size_t i = 0; i < kHeadPointCount; ++i) {
    const ImagePoint& p = landmarks[kHeadLandmarkIndices[i]];
    out[i] = Eigen::Vector2d(p.x, p.y);
  }
  return out;
}

Eigen::Vector3d forward_vector(const Pose& pose) {
  return (pose.rotation * Eigen::Vector3d::UnitZ()).normalized();
}

HeadAngles head_angles(const Eigen::Vector3d& forward) {
  const Eigen::Vector3d f = forward.normalized();
  const double toward = -f.z();
  return {std::atan2(f.x(), toward) * 180.0 / kPi,
          std::atan2(-f.y(), std::hypot(f.x(), toward)) * 180.0 / kPi};
}

std::string_view to_string(DirectionSource source) {
  return source == DirectionSource::kHead ? "head" : "gaze";
}

std::string_view to_string(Vertical vertical) {
  return vertical == Vertical::kUp ? "up" : "down";
}

DirectionSample classify_vertical(const Eigen::Vector3d& direction,
                                  DirectionSource source) {
  const double norm = direction.norm();
  if (!std::isfinite(norm) || norm < 1e-6) {
    throw Error(ErrorCode::kInvalidDirection,
                "classify_vertical: direction has near-zero or non-finite norm");
  }
  DirectionSample out;
  out.source = source;
  out.y_normalized = direction.y() / norm;
  out.vertical = out.y_normalized < 0.0 ? Vertical::kUp : Vertical::kDown;
  return out;
}

std::optional<Eigen::Vector3d> mean_gaze(
    const std::optional<Eigen::Vector3d>& left,
    const std::optional<Eigen::Vector3d>& right) {
  if (!left && !right) return std::nullopt;
  if (left && !right) return *left;
  if (right && !left) return *right;
  const Eigen::Vector3d mean = 0.5 * (*left + *right);
  const double norm = mean.norm();
  if (!std::isfinite(norm) || norm < 1e-6) {
    throw Error(ErrorCode::kInvalidDirection,
                "mean_gaze: eye gaze vectors cancel out");
  }
  return Eigen::Vector3d(mean / norm);
}

}  // namespace screenrep
