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

// Serial revolute chains: forward kinematics, geometric Jacobian, Yoshikawa
// manipulability and damped-least-squares IK for a tool axis held along a
// surface normal (rotation about the tool axis left free).

#ifndef RRTRMM_KINEMATICS_HPP
#define RRTRMM_KINEMATICS_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rrtrmm/geometry.hpp"
#include "rrtrmm/surface.hpp"

namespace rrtrmm {

using JointConfig = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Revolute joint: fixed origin transform from the parent joint frame, then a
/// rotation by q about `axis` (expressed in the joint frame).
struct RevoluteJoint {
  std::string name;
  Origin origin;
  Vec3 axis = Vec3::UnitZ();
  double lower = -M_PI;
  double upper = M_PI;

  /// Kinematic equality; the name is a label and is not compared.
  bool operator==(const RevoluteJoint& o) const {
    return origin == o.origin && axis == o.axis && lower == o.lower && upper == o.upper;
  }
};

inline constexpr double kUnitAxisTolerance = 1e-9;

class KinematicChain {
 public:
  /// `tool` maps the last joint frame to the tool tip; the tool axis is the
  /// tip frame's +z.
  explicit KinematicChain(std::vector<RevoluteJoint> joints, Origin tool = {})
      : joints_(std::move(joints)), tool_(std::move(tool)) {
    if (joints_.empty()) throw std::invalid_argument("kinematic chain: needs at least one joint");
    for (std::size_t i = 0; i < joints_.size(); ++i) {
      const auto& j = joints_[i];
      const std::string where = "kinematic chain: joint " + std::to_string(i) +
                                (j.name.empty() ? "" : " ('" + j.name + "')");
      if (!all_finite(j.origin.xyz) || !all_finite(j.origin.rpy) || !all_finite(j.axis))
        throw std::invalid_argument(where + " has non-finite parameters");
      if (std::abs(j.axis.norm() - 1.0) > kUnitAxisTolerance)
        throw std::invalid_argument(where + " axis is not unit length");
      if (!(j.lower < j.upper)) throw std::invalid_argument(where + " requires lower < upper");
    }
    if (!all_finite(tool_.xyz) || !all_finite(tool_.rpy))
      throw std::invalid_argument("kinematic chain: non-finite tool transform");
    for (const auto& j : joints_) origins_.push_back(j.origin.transform());
    tool_transform_ = tool_.transform();
  }

  std::size_t dof() const { return joints_.size(); }
  const std::vector<RevoluteJoint>& joints() const { return joints_; }
  const Origin& tool() const { return tool_; }
  const Eigen::Isometry3d& joint_origin(std::size_t i) const { return origins_[i]; }
  const Eigen::Isometry3d& tool_transform() const { return tool_transform_; }

  Eigen::VectorXd lower_limits() const {
    Eigen::VectorXd v(dof());
    for (std::size_t i = 0; i < dof(); ++i) v[i] = joints_[i].lower;
    return v;
  }
  Eigen::VectorXd upper_limits() const {
    Eigen::VectorXd v(dof());
    for (std::size_t i = 0; i < dof(); ++i) v[i] = joints_[i].upper;
    return v;
  }

  bool within_limits(const JointConfig& q) const {
    if (static_cast<std::size_t>(q.size()) != dof()) return false;
    for (std::size_t i = 0; i < dof(); ++i)
      if (!(q[i] >= joints_[i].lower && q[i] <= joints_[i].upper)) return false;
    return true;
  }

  JointConfig clamp(JointConfig q) const {
    for (std::size_t i = 0; i < dof(); ++i) q[i] = std::clamp(q[i], joints_[i].lower, joints_[i].upper);
    return q;
  }

  bool operator==(const KinematicChain& o) const { return joints_ == o.joints_ && tool_ == o.tool_; }

 private:
  std::vector<RevoluteJoint> joints_;
  Origin tool_;
  std::vector<Eigen::Isometry3d> origins_;
  Eigen::Isometry3d tool_transform_;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  Mat3 rotation() const { return orientation.toRotationMatrix(); }
  Vec3 tool_axis() const { return orientation * Vec3::UnitZ(); }
};

/// Desired tool tip position and tool axis (unit, pointing into the surface).
struct ToolTarget {
  Vec3 position = Vec3::Zero();
  Vec3 axis = -Vec3::UnitZ();
};

namespace detail {

inline void check_size(const KinematicChain& chain, const JointConfig& q, const char* who) {
  if (static_cast<std::size_t>(q.size()) != chain.dof())
    throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(chain.dof()) +
                                " joint values, got " + std::to_string(q.size()));
}

/// World-frame joint axes, joint origins and the tool frame at q.
struct ChainState {
  std::vector<Vec3> axes;
  std::vector<Vec3> points;
  Eigen::Isometry3d tool = Eigen::Isometry3d::Identity();
};

inline ChainState chain_state(const KinematicChain& chain, const JointConfig& q) {
  ChainState s;
  s.axes.reserve(chain.dof());
  s.points.reserve(chain.dof());
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  for (std::size_t i = 0; i < chain.dof(); ++i) {
    t = t * chain.joint_origin(i);
    const Vec3& axis = chain.joints()[i].axis;
    s.axes.push_back(t.linear() * axis);
    s.points.push_back(t.translation());
    t.rotate(Eigen::AngleAxisd(q[i], axis));
  }
  s.tool = t * chain.tool_transform();
  return s;
}

inline Jacobian jacobian_from_state(const ChainState& s) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.axes.size());
  Jacobian j(6, n);
  const Vec3 tip = s.tool.translation();
  for (Eigen::Index i = 0; i < n; ++i) {
    j.col(i).head<3>() = s.axes[i].cross(tip - s.points[i]);
    j.col(i).tail<3>() = s.axes[i];
  }
  return j;
}

}  // namespace detail

inline Pose forward_kinematics(const KinematicChain& chain, const JointConfig& q) {
  detail::check_size(chain, q, "forward_kinematics");
  const auto s = detail::chain_state(chain, q);
  Pose p;
  p.position = s.tool.translation();
  p.orientation = Eigen::Quaterniond(s.tool.linear()).normalized();
  return p;
}

/// Geometric Jacobian in the base frame; rows are (linear; angular).
inline Jacobian jacobian(const KinematicChain& chain, const JointConfig& q) {
  detail::check_size(chain, q, "jacobian");
  return detail::jacobian_from_state(detail::chain_state(chain, q));
}

enum class JacobianMode {
  automatic,  // full for n >= 6, position block otherwise
  full,
  position,
};

inline JacobianMode resolve_mode(JacobianMode mode, std::size_t dof) {
  if (mode != JacobianMode::automatic) return mode;
  return dof >= 6 ? JacobianMode::full : JacobianMode::position;
}

/// Yoshikawa index from an already-computed Jacobian: the product of the
/// singular values of the selected rows, i.e. sqrt(det(J J^T)) or
/// sqrt(det(J^T J)) whichever is not trivially zero. Rank-deficient
/// Jacobians give exactly 0.
inline double manipulability_from_jacobian(const Jacobian& j, JacobianMode mode) {
  const Eigen::MatrixXd sub = resolve_mode(mode, static_cast<std::size_t>(j.cols())) ==
                                      JacobianMode::position
                                  ? Eigen::MatrixXd(j.topRows<3>())
                                  : Eigen::MatrixXd(j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0.0;
  const double cutoff = sv[0] * static_cast<double>(std::max(sub.rows(), sub.cols())) *
                        std::numeric_limits<double>::epsilon();
  if (sv[sv.size() - 1] <= cutoff) return 0.0;
  double w = 1.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) w *= sv[i];
  return w;
}

inline double manipulability(const KinematicChain& chain, const JointConfig& q,
                             JacobianMode mode = JacobianMode::automatic) {
  return manipulability_from_jacobian(jacobian(chain, q), mode);
}

struct IkOptions {
  int max_iterations = 100;
  double damping = 1e-3;
  double position_tolerance = 1e-4;  // m
  double axis_tolerance = 1e-3;      // rad
  /// Per-iteration cap on the task error fed to the solver.
  double max_position_error_step = 0.1;
  double max_axis_error_step = 0.5;
};

struct IkResult {
  JointConfig q;
  bool converged = false;
  int iterations = 0;
  double position_error = 0.0;
  double axis_error = 0.0;
};

namespace detail {

struct ToolError {
  Vec3 position;
  Vec3 rotation;  // rotation vector taking the current axis onto the desired one
  double axis_angle = 0.0;
};

inline ToolError tool_error(const Eigen::Isometry3d& tool, const ToolTarget& target) {
  ToolError e;
  e.position = target.position - tool.translation();
  const Vec3 a = tool.linear().col(2);
  const Vec3 c = a.cross(target.axis);
  const double s = c.norm();
  e.axis_angle = std::atan2(s, a.dot(target.axis));
  if (s > 1e-12) {
    e.rotation = e.axis_angle / s * c;
  } else if (e.axis_angle > M_PI / 2) {
    e.rotation = M_PI * frame_from_normal(Vec3::Zero(), a).tangent_u;
  } else {
    e.rotation = Vec3::Zero();
  }
  return e;
}

inline Vec3 clip_norm(const Vec3& v, double cap) {
  const double n = v.norm();
  return n > cap ? Vec3(v * (cap / n)) : v;
}

}  // namespace detail

/// Damped least squares on a 5-D task: tool tip position plus the two
/// components of axis misalignment orthogonal to the current tool axis.
/// The result is clamped to joint limits every iteration.
inline IkResult solve_ik(const KinematicChain& chain, const ToolTarget& target,
                         const JointConfig& seed, const IkOptions& opts = {}) {
  detail::check_size(chain, seed, "solve_ik");
  if (!all_finite(target.position) || !all_finite(target.axis) ||
      std::abs(target.axis.norm() - 1.0) > 1e-6)
    throw std::invalid_argument("solve_ik: target axis must be a finite unit vector");

  IkResult r;
  r.q = chain.clamp(seed);
  const Eigen::Index n = static_cast<Eigen::Index>(chain.dof());
  const double lambda2 = opts.damping * opts.damping;
  for (int it = 0;; ++it) {
    const auto state = detail::chain_state(chain, r.q);
    const auto err = detail::tool_error(state.tool, target);
    r.iterations = it;
    r.position_error = err.position.norm();
    r.axis_error = err.axis_angle;
    if (r.position_error <= opts.position_tolerance && r.axis_error <= opts.axis_tolerance) {
      r.converged = true;
      return r;
    }
    if (it >= opts.max_iterations) return r;

    const Jacobian j = detail::jacobian_from_state(state);
    const SurfaceFrame basis = frame_from_normal(Vec3::Zero(), state.tool.linear().col(2));
    Eigen::Matrix<double, 5, Eigen::Dynamic> task(5, n);
    task.topRows<3>() = j.topRows<3>();
    task.row(3) = basis.tangent_u.transpose() * j.bottomRows<3>();
    task.row(4) = basis.tangent_v.transpose() * j.bottomRows<3>();

    const Vec3 ep = detail::clip_norm(err.position, opts.max_position_error_step);
    const Vec3 er = detail::clip_norm(err.rotation, opts.max_axis_error_step);
    Eigen::Matrix<double, 5, 1> e;
    e << ep, basis.tangent_u.dot(er), basis.tangent_v.dot(er);

    const Eigen::Matrix<double, 5, 5> a =
        task * task.transpose() + lambda2 * Eigen::Matrix<double, 5, 5>::Identity();
    const Eigen::VectorXd dq = task.transpose() * a.ldlt().solve(e);
    r.q = chain.clamp(r.q + dq);
  }
}

/// Tool target standing off the surface along its normal, axis pointing in.
inline ToolTarget tool_target_from_surface(const SurfaceFrame& frame, double standoff) {
  if (!(standoff >= 0.0)) throw std::invalid_argument("tool_target_from_surface: negative standoff");
  return {frame.origin + standoff * frame.normal, -frame.normal};
}

}  // namespace rrtrmm

#endif  // RRTRMM_KINEMATICS_HPP
