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

#ifndef RRTRMM_GEOMETRY_HPP
#define RRTRMM_GEOMETRY_HPP

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace rrtrmm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline bool all_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

/// Rotation from fixed-axis XYZ angles: roll about x, then pitch about y,
/// then yaw about z, all about the parent axes. R = Rz(yaw) Ry(pitch) Rx(roll).
inline Mat3 rpy_to_matrix(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

/// Inverse of rpy_to_matrix. Pitch is kept in [-pi/2, pi/2]; at gimbal lock
/// the yaw is set to zero and the remaining rotation goes into roll.
inline Vec3 matrix_to_rpy(const Mat3& r) {
  const double sp = -r(2, 0);
  if (std::abs(sp) >= 1.0 - 1e-12) {
    const double pitch = std::copysign(M_PI / 2.0, sp);
    const double roll = std::atan2(sp * r(0, 1), r(1, 1));
    return {roll, pitch, 0.0};
  }
  return {std::atan2(r(2, 1), r(2, 2)), std::asin(sp), std::atan2(r(1, 0), r(0, 0))};
}

/// Fixed transform given as translation plus roll/pitch/yaw. The parameters
/// are the stored representation; the isometry is always derived from them.
struct Origin {
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();

  Eigen::Isometry3d transform() const {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = rpy_to_matrix(rpy);
    t.translation() = xyz;
    return t;
  }

  static Origin from_transform(const Eigen::Isometry3d& t) {
    return Origin{t.translation(), matrix_to_rpy(t.linear())};
  }

  bool operator==(const Origin& o) const { return xyz == o.xyz && rpy == o.rpy; }
};

}  // namespace rrtrmm

#endif  // RRTRMM_GEOMETRY_HPP
