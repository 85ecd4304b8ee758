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

#include <cmath>
#include <random>

#include <Eigen/Geometry>

#include "doctest.h"
#include "screenrep/error.hpp"
#include "screenrep/pose_solver.hpp"
#include "support.hpp"

using namespace screenrep;
using namespace testsupport;
using doctest::Approx;

namespace {

const CameraIntrinsics kCam{1280.0, 640.0, 360.0};

std::vector<Eigen::Vector2d> project_model(const HeadModel& model, const Pose& pose) {
  return project_points(model.points(), pose, kCam);
}

Pose random_pose(std::mt19937_64& rng, const HeadModel& model) {
  std::uniform_real_distribution<double> depth(3.0, 10.0);
  std::uniform_real_distribution<double> lateral(-0.5, 0.5);
  Pose p;
  p.rotation = random_rotation(rng, 60.0 * M_PI / 180.0) * frontal();
  const double z = depth(rng) * model.scale();
  p.translation = {lateral(rng) * z * 0.3, lateral(rng) * z * 0.3, z};
  return p;
}

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

}  // namespace

TEST_SUITE("pose") {

TEST_CASE("projection of points on and off the optical axis") {
  const CameraIntrinsics cam{100.0, 50.0, 50.0};
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 1}, {1, 0, 1}};
  const auto uv = project_points(pts, Pose{}, cam);
  CHECK(uv[0].x() == 50.0);
  CHECK(uv[0].y() == 50.0);
  CHECK(uv[1].x() == 150.0);
  CHECK(uv[1].y() == 50.0);
  const std::vector<Eigen::Vector3d> behind = {{0, 0, -1}};
  CHECK(code_of([&] { project_points(behind, Pose{}, cam); }) == ErrorCode::kBehindCamera);
  const std::vector<Eigen::Vector3d> on_plane = {{1, 1, 0}};
  CHECK(code_of([&] { project_points(on_plane, Pose{}, cam); }) == ErrorCode::kBehindCamera);
}

TEST_CASE("identity rotation is recovered from its own projections") {
  // The model's back points sit at negative z, so identity needs some depth.
  const HeadModel model = HeadModel::default_model();
  Pose truth;
  truth.translation = {0.0, 0.0, 5.0 * model.scale()};
  const auto uv = project_model(model, truth);
  const PnpSolution s = solve_pnp(uv, model, kCam);
  CHECK(geodesic_distance(s.pose.rotation, Eigen::Matrix3d::Identity()) <= 1e-6);
  CHECK(s.pose.reproj_rmse <= 1e-6);
  CHECK(s.converged());
  CHECK(is_rotation(s.pose.rotation));
}

TEST_CASE("frontal face at typical distance") {
  const HeadModel model = HeadModel::default_model();
  Pose truth;
  truth.rotation = frontal();
  truth.translation = {50.0, -30.0, 2500.0};
  const PnpSolution s = solve_pnp(project_model(model, truth), model, kCam);
  CHECK(geodesic_distance(s.pose.rotation, truth.rotation) <= 1e-9);
  CHECK((s.pose.translation - truth.translation).norm() <= 1e-6);
}

TEST_CASE("random poses recover rotation and refinement never hurts") {
  const HeadModel model = HeadModel::default_model();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose truth = random_pose(rng, model);
    auto uv = project_model(model, truth);
    const PnpSolution exact = solve_pnp(uv, model, kCam);
    CHECK(geodesic_distance(exact.pose.rotation, truth.rotation) <= 1e-4);
    CHECK(is_rotation(exact.pose.rotation));

    std::normal_distribution<double> noise(0.0, 1.0);
    for (auto& p : uv) p += Eigen::Vector2d(noise(rng), noise(rng));
    const PnpSolution noisy = solve_pnp(uv, model, kCam);
    CHECK(noisy.pose.reproj_rmse <= noisy.initial_rmse + 1e-12);
    CHECK(is_rotation(noisy.pose.rotation));
  }
}

TEST_CASE("wrong correspondence count is an arity error") {
  const HeadModel model = HeadModel::default_model();
  std::vector<Eigen::Vector2d> five(5, Eigen::Vector2d(1.0, 2.0));
  CHECK(code_of([&] { solve_pnp(five, model, kCam); }) == ErrorCode::kArity);
  std::vector<Eigen::Vector2d> seven(7, Eigen::Vector2d(1.0, 2.0));
  CHECK(code_of([&] { solve_pnp(seven, model, kCam); }) == ErrorCode::kArity);
}

TEST_CASE("degenerate image points") {
  const HeadModel model = HeadModel::default_model();
  std::vector<Eigen::Vector2d> same(6, Eigen::Vector2d(300.0, 200.0));
  CHECK(code_of([&] { solve_pnp(same, model, kCam); }) == ErrorCode::kDegenerateInput);
  std::vector<Eigen::Vector2d> nan(6, Eigen::Vector2d(NAN, 1.0));
  CHECK(code_of([&] { solve_pnp(nan, model, kCam); }) == ErrorCode::kDegenerateInput);
}

TEST_CASE("coplanar head model is rejected") {
  HeadModel::Points flat;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat[i] = {static_cast<double>(i), static_cast<double>(i * i), 0.0};
  }
  CHECK(code_of([&] { HeadModel m(flat); }) == ErrorCode::kDegenerateInput);
}

TEST_CASE("head points come from the fixed landmark indices") {
  Landmarks lm = grid_landmarks();
  lm[30] = {1, 2};
  lm[8] = {3, 4};
  lm[36] = {5, 6};
  lm[45] = {7, 8};
  lm[48] = {9, 10};
  lm[54] = {11, 12};
  const auto pts = head_points_from_landmarks(lm);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(pts[i].x() == 2.0 * i + 1);
    CHECK(pts[i].y() == 2.0 * i + 2);
  }
}

TEST_CASE("forward vector") {
  Pose p;
  CHECK(forward_vector(p) == Eigen::Vector3d(0, 0, 1));
  // A positive (right-handed) turn about the camera x axis tips the face
  // toward the top of the image.
  p.rotation = Eigen::AngleAxisd(10.0 * M_PI / 180.0, Eigen::Vector3d::UnitX())
                   .toRotationMatrix();
  CHECK(forward_vector(p).y() == Approx(-std::sin(10.0 * M_PI / 180.0)).epsilon(1e-12));
  CHECK(forward_vector(p).y() == Approx(-0.1736).epsilon(1e-3));
  CHECK(classify_vertical(forward_vector(p)).vertical == Vertical::kUp);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    p.rotation = random_rotation(rng, M_PI);
    CHECK(std::abs(forward_vector(p).norm() - 1.0) <= 1e-12);
  }
}

TEST_CASE("vertical classification") {
  auto up = classify_vertical({0, -0.5, 0.866});
  CHECK(up.vertical == Vertical::kUp);
  CHECK(up.y_normalized == Approx(-0.5).epsilon(1e-3));
  auto down = classify_vertical({0, 0.5, 0.866}, DirectionSource::kGaze);
  CHECK(down.vertical == Vertical::kDown);
  CHECK(down.source == DirectionSource::kGaze);
  CHECK(down.y_normalized == Approx(0.5).epsilon(1e-3));
  auto flat = classify_vertical({0, 0, 1});
  CHECK(flat.vertical == Vertical::kDown);
  CHECK(flat.y_normalized == 0.0);
  CHECK(code_of([] { classify_vertical({0, 1e-7, 0}); }) == ErrorCode::kInvalidDirection);

  // Flipping y swaps the class, except at exactly zero.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d v(u(rng), u(rng), u(rng));
    const Eigen::Vector3d w(v.x(), -v.y(), v.z());
    CHECK(classify_vertical(v).vertical != classify_vertical(w).vertical);
    CHECK(classify_vertical(v).y_normalized == -classify_vertical(w).y_normalized);
  }
}

TEST_CASE("mean gaze") {
  const Eigen::Vector3d z(0, 0, 1);
  CHECK(*mean_gaze(z, z) == z);
  CHECK(*mean_gaze(Eigen::Vector3d(0, -1, 0), std::nullopt) == Eigen::Vector3d(0, -1, 0));
  CHECK(*mean_gaze(std::nullopt, Eigen::Vector3d(0.6, 0, 0.8)) == Eigen::Vector3d(0.6, 0, 0.8));
  CHECK_FALSE(mean_gaze(std::nullopt, std::nullopt).has_value());
  CHECK(code_of([&] { mean_gaze(z, Eigen::Vector3d(0, 0, -1)); }) ==
        ErrorCode::kInvalidDirection);
  const auto m = mean_gaze(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0));
  CHECK(m->norm() == Approx(1.0).epsilon(1e-15));
  CHECK(m->x() == Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("rotation helpers") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Matrix3d r = random_rotation(rng, M_PI);
    CHECK(is_rotation(r));
    CHECK(geodesic_distance(r, r) <= 1e-7);
    Eigen::Matrix3d noisy = r;
    noisy(0, 1) += 1e-3;
    CHECK_FALSE(is_rotation(noisy));
    CHECK(is_rotation(nearest_rotation(noisy)));
    const Eigen::Matrix3d turn =
        Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    CHECK(geodesic_distance(r, r * turn) == Approx(0.3).epsilon(1e-9));
  }
  CHECK_FALSE(is_rotation(-Eigen::Matrix3d::Identity()));
}

TEST_CASE("intrinsics") {
  const auto c = CameraIntrinsics::for_frame(1280, 720);
  CHECK(c.focal_px == 1280.0);
  CHECK(c.cx == 640.0);
  CHECK(c.cy == 360.0);
  CHECK(code_of([] { CameraIntrinsics{0.0, 1.0, 1.0}.validate(); }) == ErrorCode::kConfig);
}

}  // TEST_SUITE
