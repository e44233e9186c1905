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

// Synthetic observed surfaces: flat panels, barrel sections and helmet-like
// spherical caps, sampled uniformly by area.

#ifndef RRTRMM_SCENE_HPP
#define RRTRMM_SCENE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rrtrmm/geometry.hpp"
#include "rrtrmm/random.hpp"
#include "rrtrmm/surface.hpp"

namespace rrtrmm {

enum class SceneShape { plane, cylinder, sphere_cap };

inline const char* to_string(SceneShape s) {
  switch (s) {
    case SceneShape::plane: return "plane";
    case SceneShape::cylinder: return "cylinder";
    case SceneShape::sphere_cap: return "sphere_cap";
  }
  return "unknown";
}

inline SceneShape scene_shape_from_string(std::string_view s) {
  if (s == "plane") return SceneShape::plane;
  if (s == "cylinder") return SceneShape::cylinder;
  if (s == "sphere_cap") return SceneShape::sphere_cap;
  throw std::invalid_argument("unknown scene shape '" + std::string(s) + "'");
}

/// Shape parameters in the shape's local frame, all metres / radians.
///  plane:      width along x, length along y, centred, normal +z
///  cylinder:   radius, height (z from 0), arc centred on +x, normal outward
///  sphere_cap: radius, cap_angle measured from the +z pole, normal outward
struct ShapeParams {
  double width = 1.0;
  double length = 1.0;
  double radius = 0.2;
  double height = 0.4;
  double arc = 2.0 * M_PI;
  double cap_angle = M_PI / 3.0;
};

struct SceneSpec {
  SceneShape shape = SceneShape::plane;
  ShapeParams params;
  std::size_t sample_count = 10000;
  double noise_sigma = 0.0;
  /// Shape frame to robot base frame.
  Origin pose;
  std::optional<Aabb> workspace;
  Vec3 viewpoint = Vec3::Zero();

  void validate() const {
    if (sample_count < 100) throw std::invalid_argument("scene: sample_count must be at least 100");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("scene: noise_sigma must be non-negative");
    const auto& p = params;
    switch (shape) {
      case SceneShape::plane:
        if (!(p.width > 0.0 && p.length > 0.0)) throw std::invalid_argument("scene: plane needs positive width and length");
        break;
      case SceneShape::cylinder:
        if (!(p.radius > 0.0 && p.height > 0.0 && p.arc > 0.0 && p.arc <= 2.0 * M_PI))
          throw std::invalid_argument("scene: cylinder needs positive radius/height and arc in (0, 2pi]");
        break;
      case SceneShape::sphere_cap:
        if (!(p.radius > 0.0 && p.cap_angle > 0.0 && p.cap_angle <= M_PI))
          throw std::invalid_argument("scene: sphere cap needs positive radius and cap_angle in (0, pi]");
        break;
    }
  }
};

struct SurfaceSample {
  Vec3 point;
  Vec3 normal;
};

/// Area-uniform sample of the analytic surface in the shape frame.
inline SurfaceSample sample_shape(const SceneSpec& spec, Rng& rng) {
  const auto& p = spec.params;
  switch (spec.shape) {
    case SceneShape::plane:
      return {{rng.uniform(-0.5, 0.5) * p.width, rng.uniform(-0.5, 0.5) * p.length, 0.0}, Vec3::UnitZ()};
    case SceneShape::cylinder: {
      const double theta = rng.uniform(-0.5, 0.5) * p.arc;
      const double z = rng.uniform(0.0, p.height);
      const Vec3 n(std::cos(theta), std::sin(theta), 0.0);
      return {Vec3(p.radius * n.x(), p.radius * n.y(), z), n};
    }
    case SceneShape::sphere_cap: {
      // Archimedes: z is uniform on a sphere.
      const double z = rng.uniform(std::cos(p.cap_angle), 1.0);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Vec3 n(rho * std::cos(phi), rho * std::sin(phi), z);
      return {p.radius * n, n};
    }
  }
  throw std::logic_error("unreachable");
}

/// Noisy samples placed in the robot frame; deterministic for a seed.
inline std::vector<Vec3> generate_scene_points(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const Eigen::Isometry3d pose = spec.pose.transform();
  std::vector<Vec3> pts;
  pts.reserve(spec.sample_count);
  for (std::size_t i = 0; i < spec.sample_count; ++i) {
    auto s = sample_shape(spec, rng);
    if (spec.noise_sigma > 0.0) s.point += spec.noise_sigma * rng.normal() * s.normal;
    pts.push_back(pose * s.point);
  }
  if (spec.workspace) pts = filter_to_box(pts, *spec.workspace);
  return pts;
}

inline PointCloud generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  return PointCloud(generate_scene_points(spec, seed), spec.viewpoint);
}

}  // namespace rrtrmm

#endif  // RRTRMM_SCENE_HPP
