// Copyright 2026 The rrtrmm Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"

namespace rrtrmm {
namespace {

SceneSpec spec_of(SceneShape shape, std::size_t n = 4000) {
  SceneSpec s;
  s.shape = shape;
  s.sample_count = n;
  return s;
}

TEST(Scene, ShapeNames) {
  for (auto s : {SceneShape::plane, SceneShape::cylinder, SceneShape::sphere_cap})
    EXPECT_EQ(scene_shape_from_string(to_string(s)), s);
  EXPECT_THROW(scene_shape_from_string("torus"), std::invalid_argument);
}

TEST(Scene, PlaneSamplesStayOnPanel) {
  auto s = spec_of(SceneShape::plane);
  s.params.width = 0.6;
  s.params.length = 0.2;
  for (const auto& p : generate_scene_points(s, 1)) {
    EXPECT_EQ(p.z(), 0.0);
    EXPECT_LE(std::abs(p.x()), 0.3);
    EXPECT_LE(std::abs(p.y()), 0.1);
  }
}

TEST(Scene, CylinderSamplesOnArc) {
  auto s = spec_of(SceneShape::cylinder);
  s.params.radius = 0.25;
  s.params.height = 0.5;
  s.params.arc = M_PI;
  for (const auto& p : generate_scene_points(s, 2)) {
    EXPECT_NEAR(std::hypot(p.x(), p.y()), 0.25, 1e-12);
    EXPECT_GE(p.x(), -1e-12);
    EXPECT_GE(p.z(), 0.0);
    EXPECT_LE(p.z(), 0.5);
  }
}

TEST(Scene, SphereCapIsAreaUniform) {
  auto s = spec_of(SceneShape::sphere_cap, 20000);
  s.params.radius = 2.0;
  s.params.cap_angle = M_PI / 2;
  double mean_z = 0.0;
  const auto pts = generate_scene_points(s, 3);
  for (const auto& p : pts) {
    EXPECT_NEAR(p.norm(), 2.0, 1e-12);
    EXPECT_GE(p.z(), -1e-12);
    mean_z += p.z() / static_cast<double>(pts.size());
  }
  // Hemisphere of radius 2: centroid height r/2, sd of z is r/sqrt(12).
  EXPECT_NEAR(mean_z, 1.0, 4.0 * (2.0 / std::sqrt(12.0)) / std::sqrt(20000.0));
}

TEST(Scene, PoseMovesSamples) {
  auto s = spec_of(SceneShape::plane, 500);
  s.pose = Origin{Vec3(0.5, -0.2, 0.3), Vec3(M_PI / 2, 0, 0)};
  const auto base = generate_scene_points(spec_of(SceneShape::plane, 500), 9);
  const auto moved = generate_scene_points(s, 9);
  ASSERT_EQ(base.size(), moved.size());
  const Eigen::Isometry3d t = s.pose.transform();
  for (std::size_t i = 0; i < base.size(); ++i) EXPECT_LE((moved[i] - t * base[i]).norm(), 1e-15);
  EXPECT_NEAR(moved[0].y(), -0.2, 1e-12);
}

TEST(Scene, NoiseAlongNormal) {
  auto s = spec_of(SceneShape::plane, 20000);
  s.noise_sigma = 0.002;
  double sum = 0.0, sq = 0.0;
  const auto pts = generate_scene_points(s, 4);
  for (const auto& p : pts) {
    sum += p.z();
    sq += p.z() * p.z();
  }
  const double n = static_cast<double>(pts.size());
  EXPECT_NEAR(sum / n, 0.0, 5.0 * 0.002 / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(sq / n), 0.002, 0.002 * 0.05);
}

TEST(Scene, DeterministicPerSeed) {
  const auto s = spec_of(SceneShape::cylinder, 300);
  EXPECT_EQ(generate_scene_points(s, 7), generate_scene_points(s, 7));
  EXPECT_NE(generate_scene_points(s, 7), generate_scene_points(s, 8));
}

TEST(Scene, WorkspaceFilter) {
  auto s = spec_of(SceneShape::plane);
  s.workspace = Aabb{Vec3(0, -1, -1), Vec3(1, 1, 1)};
  const auto all = generate_scene_points(spec_of(SceneShape::plane), 5);
  std::size_t expected = 0;
  for (const auto& p : all) expected += p.x() >= 0.0;
  EXPECT_EQ(generate_scene_points(s, 5).size(), expected);
}

TEST(Scene, CloudCarriesViewpoint) {
  auto s = spec_of(SceneShape::plane, 400);
  s.viewpoint = Vec3(0, 0, 2);
  const auto cloud = generate_scene(s, 1);
  EXPECT_EQ(cloud.viewpoint(), Vec3(0, 0, 2));
  EXPECT_EQ(cloud.size(), 400u);
}

TEST(Scene, Validation) {
  auto s = spec_of(SceneShape::plane, 50);
  EXPECT_THROW(generate_scene_points(s, 0), std::invalid_argument);
  s = spec_of(SceneShape::plane);
  s.noise_sigma = -1.0;
  EXPECT_THROW(generate_scene_points(s, 0), std::invalid_argument);
  s = spec_of(SceneShape::cylinder);
  s.params.arc = 7.0;
  EXPECT_THROW(generate_scene_points(s, 0), std::invalid_argument);
  s = spec_of(SceneShape::sphere_cap);
  s.params.radius = 0.0;
  EXPECT_THROW(generate_scene_points(s, 0), std::invalid_argument);
  s = spec_of(SceneShape::plane);
  s.params.width = 0.0;
  EXPECT_THROW(generate_scene_points(s, 0), std::invalid_argument);
}

TEST(Scene, SurfaceNormalsFaceViewpoint) {
  auto s = spec_of(SceneShape::sphere_cap, 3000);
  s.params.radius = 0.3;
  s.viewpoint = Vec3(0, 0, 2);
  const SurfaceIndex index(generate_scene(s, 6));
  const auto f = tangent_frame(index, Vec3(0, 0, 0.3));
  EXPECT_GT(f.normal.z(), 0.99);
}

}  // namespace
}  // namespace rrtrmm
