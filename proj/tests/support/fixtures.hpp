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

// Fixtures and independent oracles shared by the unit tests and the
// acceptance runner.

#ifndef RRTRMM_TESTS_FIXTURES_HPP
#define RRTRMM_TESTS_FIXTURES_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "rrtrmm/rrtrmm.hpp"

namespace rrtrmm::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(RRTRMM_DATA_DIR) / name;
}

inline std::filesystem::path test_data_path(const std::string& name) {
  return std::filesystem::path(RRTRMM_TEST_DATA_DIR) / name;
}

// ---------------------------------------------------------------------------
// Chains built directly, without the parser.

/// Planar arm in the xy plane: joint axes z, links of length l1 and l2 along
/// x, tool pointing down.
inline KinematicChain planar_2r(double l1 = 1.0, double l2 = 1.0, double q2_lo = -M_PI, double q2_hi = M_PI) {
  std::vector<RevoluteJoint> j(2);
  j[0].axis = Vec3::UnitZ();
  j[1].origin.xyz = Vec3(l1, 0, 0);
  j[1].axis = Vec3::UnitZ();
  j[1].lower = q2_lo;
  j[1].upper = q2_hi;
  return KinematicChain(j, Origin{Vec3(l2, 0, 0), Vec3(M_PI, 0, 0)});
}

inline Vec3 planar_2r_tip(double l1, double l2, double q1, double q2) {
  return {l1 * std::cos(q1) + l2 * std::cos(q1 + q2), l1 * std::sin(q1) + l2 * std::sin(q1 + q2), 0.0};
}

/// Elbow-positive closed form for the planar arm.
inline Eigen::Vector2d planar_2r_ik(double l1, double l2, double x, double y) {
  const double c2 = (x * x + y * y - l1 * l1 - l2 * l2) / (2 * l1 * l2);
  const double q2 = std::acos(std::clamp(c2, -1.0, 1.0));
  const double q1 = std::atan2(y, x) - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  return {q1, q2};
}

/// 7-joint chain with random offsets, rotations and axes.
inline KinematicChain random_chain(Rng& rng, std::size_t n = 7) {
  std::vector<RevoluteJoint> js(n);
  for (auto& j : js) {
    j.origin.xyz = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.4));
    j.origin.rpy = Vec3(rng.uniform(-M_PI, M_PI), rng.uniform(-1.5, 1.5), rng.uniform(-M_PI, M_PI));
    Vec3 a(rng.normal(), rng.normal(), rng.normal());
    j.axis = a.normalized();
    j.lower = -M_PI;
    j.upper = M_PI;
  }
  return KinematicChain(js, Origin{Vec3(0.05, 0.0, 0.1), Vec3(0.1, 0.2, 0.3)});
}

inline JointConfig random_config(const KinematicChain& chain, Rng& rng) {
  JointConfig q(static_cast<Eigen::Index>(chain.dof()));
  for (std::size_t i = 0; i < chain.dof(); ++i)
    q[static_cast<Eigen::Index>(i)] = rng.uniform(chain.joints()[i].lower, chain.joints()[i].upper);
  return q;
}

/// Twist (linear; angular) from central differences of forward kinematics
/// along qdot.
inline Eigen::Matrix<double, 6, 1> fd_twist(const KinematicChain& chain, const JointConfig& q,
                                            const JointConfig& qdot, double h) {
  const Pose a = forward_kinematics(chain, q + h * qdot);
  const Pose b = forward_kinematics(chain, q - h * qdot);
  Eigen::Matrix<double, 6, 1> t;
  t.head<3>() = (a.position - b.position) / (2 * h);
  const Eigen::AngleAxisd d(a.rotation() * b.rotation().transpose());
  t.tail<3>() = d.axis() * d.angle() / (2 * h);
  return t;
}

// ---------------------------------------------------------------------------
// Clouds.

/// Regular grid on z = 0 with n x n points.
inline std::vector<Vec3> grid_points(std::size_t n, double spacing, const Vec3& corner = Vec3::Zero()) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      pts.push_back(corner + Vec3(static_cast<double>(i) * spacing, static_cast<double>(j) * spacing, 0.0));
  return pts;
}

inline SurfaceIndex unit_sphere(std::size_t n = 10000, std::uint64_t seed = 3) {
  SceneSpec s;
  s.shape = SceneShape::sphere_cap;
  s.params.radius = 1.0;
  s.params.cap_angle = M_PI;
  s.sample_count = n;
  s.viewpoint = Vec3(0, 0, 10);
  return build_index(generate_scene(s, seed));
}

// ---------------------------------------------------------------------------
// Planning fixtures.

struct PlanningFixture {
  std::string name;
  SurfaceIndex index;
  KinematicChain chain;
  Vec3 start;
  Vec3 goal;
  PlannerConfig config;
};

inline Vec3 snap(const SurfaceIndex& index, const Vec3& p) { return index.points()[index.nearest(p).index]; }

/// Flat 1 m x 1 m plane reachable everywhere by the unit planar arm.
inline PlanningFixture flat_plane_fixture(std::size_t samples = 2000) {
  SceneSpec s;
  s.params.width = 1.0;
  s.params.length = 1.0;
  s.sample_count = samples;
  s.pose.xyz = Vec3(0.8, 0, 0);
  s.viewpoint = Vec3(0.8, 0, 2);
  SurfaceIndex index = build_index(generate_scene(s, 1));
  PlannerConfig cfg;
  cfg.alpha = 0.0;
  cfg.iterations = 10000;
  cfg.max_step = 0.1;
  cfg.home = Eigen::Vector2d(0.0, 1.5);
  const Vec3 start = snap(index, Vec3(0.5, -0.3, 0));
  const Vec3 goal = snap(index, Vec3(1.1, 0.3, 0));
  return {"flat", index, planar_2r(1.0, 1.0, -M_PI, M_PI), start, goal, cfg};
}

/// Horizontal plane under the wide 7-joint arm. The straight start-goal line
/// passes close to the base axis, where manipulability collapses.
inline PlanningFixture singular_corridor_fixture() {
  const auto chain = parse_urdf_subset(read_text_file(data_path("robots/arm7_wide.urdf"))).chain;
  SceneSpec s;
  s.params.width = 1.2;
  s.params.length = 3.9;
  s.sample_count = 1500;
  s.pose.xyz = Vec3(1.2, 0, 0.6);
  s.viewpoint = Vec3(1.2, 0, 3.0);
  SurfaceIndex index = build_index(generate_scene(s, 7));
  PlannerConfig cfg;
  cfg.iterations = 6000;
  cfg.max_step = 0.3;
  JointConfig home(7);
  home << 0, -0.785, 0, -2.356, 0, 1.571, 0.785;
  cfg.home = home;
  const Vec3 start = snap(index, Vec3(0.9, -1.65, 0.6));
  const Vec3 goal = snap(index, Vec3(0.9, 1.65, 0.6));
  return {"corridor", index, chain, start, goal, cfg};
}

// ---------------------------------------------------------------------------
// Tree oracle: recompute every accumulator by walking parent links from
// scratch. Returns the largest absolute deviation from the stored values.

struct TreeAudit {
  std::size_t roots = 0;
  bool acyclic = true;
  double max_deviation = 0.0;
  bool depth_ok = true;
  bool monotone_dist = true;
};

inline TreeAudit audit_tree(const PlannerTree& tree, double w_floor, JacobianMode mode,
                            const KinematicChain* chain = nullptr) {
  TreeAudit a;
  const auto& nodes = tree.nodes();
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const TreeNode& n = nodes[id];
    if (!n.parent) ++a.roots;
    std::vector<std::size_t> chain_ids{id};
    std::size_t cur = id;
    while (nodes[cur].parent) {
      cur = *nodes[cur].parent;
      chain_ids.push_back(cur);
      if (chain_ids.size() > nodes.size()) {
        a.acyclic = false;
        return a;
      }
    }
    double dist = 0.0, inv = 0.0;
    for (std::size_t k = chain_ids.size(); k-- > 0;) {
      const TreeNode& m = nodes[chain_ids[k]];
      double inv_w = m.inv_w;
      if (chain) inv_w = 1.0 / std::max(manipulability(*chain, m.config, mode), w_floor);
      inv += inv_w;
      if (k + 1 < chain_ids.size()) dist += (m.position - nodes[chain_ids[k + 1]].position).norm();
    }
    a.max_deviation = std::max({a.max_deviation, std::abs(dist - n.cum_dist), std::abs(inv - n.cum_inv_w)});
    if (n.depth != chain_ids.size()) a.depth_ok = false;
    if (n.parent && n.cum_dist < nodes[*n.parent].cum_dist) a.monotone_dist = false;
  }
  return a;
}

}  // namespace rrtrmm::testing

#endif  // RRTRMM_TESTS_FIXTURES_HPP
