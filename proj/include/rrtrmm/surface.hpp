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

// Point-cloud surface as a queryable 2-manifold.
//
// The cloud is the only model of the surface. Tangent spaces are estimated by
// PCA over k nearest neighbours; the exponential map is realised as a lift
// into the tangent plane followed by repeated projection onto the local PCA
// plane; the logarithmic map is orthogonal projection onto a tangent plane.

#ifndef RRTRMM_SURFACE_HPP
#define RRTRMM_SURFACE_HPP

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rrtrmm/geometry.hpp"
#include "rrtrmm/kdtree.hpp"

namespace rrtrmm {

class SurfaceError : public std::runtime_error {
 public:
  enum class Kind { off_surface, degenerate_frame };

  SurfaceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Axis-aligned box, bounds inclusive.
struct Aabb {
  Vec3 lo = Vec3::Constant(-std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(std::numeric_limits<double>::infinity());

  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

inline constexpr double kDefaultMergeTolerance = 1e-6;

/// Removes points closer than `tolerance` to an earlier kept point. Keeps
/// first occurrences in input order.
inline std::vector<Vec3> deduplicate(std::span<const Vec3> points,
                                     double tolerance = kDefaultMergeTolerance) {
  if (tolerance <= 0.0) return {points.begin(), points.end()};
  struct CellHash {
    std::size_t operator()(const Eigen::Matrix<std::int64_t, 3, 1>& c) const {
      std::uint64_t h = 1469598103934665603ull;
      for (int i = 0; i < 3; ++i) h = (h ^ static_cast<std::uint64_t>(c[i])) * 1099511628211ull;
      return static_cast<std::size_t>(h);
    }
  };
  using Cell = Eigen::Matrix<std::int64_t, 3, 1>;
  struct CellEq {
    bool operator()(const Cell& a, const Cell& b) const { return a == b; }
  };
  std::unordered_multimap<Cell, std::size_t, CellHash, CellEq> grid;
  std::vector<Vec3> kept;
  kept.reserve(points.size());
  const double t2 = tolerance * tolerance;
  for (const Vec3& p : points) {
    const Cell c = (p / tolerance).array().floor().cast<std::int64_t>();
    bool duplicate = false;
    for (int dx = -1; dx <= 1 && !duplicate; ++dx)
      for (int dy = -1; dy <= 1 && !duplicate; ++dy)
        for (int dz = -1; dz <= 1 && !duplicate; ++dz) {
          auto [first, last] = grid.equal_range(c + Cell(dx, dy, dz));
          for (auto it = first; it != last; ++it) {
            if ((kept[it->second] - p).squaredNorm() < t2) {
              duplicate = true;
              break;
            }
          }
        }
    if (!duplicate) {
      grid.emplace(c, kept.size());
      kept.push_back(p);
    }
  }
  return kept;
}

/// Observed surface samples plus the sensor viewpoint that orients normals.
/// Construction drops near-duplicates and rejects clouds with fewer than three
/// points or with non-finite coordinates.
class PointCloud {
 public:
  PointCloud(std::vector<Vec3> points, const Vec3& viewpoint = Vec3::Zero(),
             double merge_tolerance = kDefaultMergeTolerance)
      : viewpoint_(viewpoint) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!all_finite(points[i]))
        throw std::invalid_argument("point cloud: non-finite coordinate at point " +
                                    std::to_string(i));
    }
    if (!all_finite(viewpoint)) throw std::invalid_argument("point cloud: non-finite viewpoint");
    points_ = deduplicate(points, merge_tolerance);
    if (points_.size() < 3)
      throw std::invalid_argument("point cloud: need at least 3 distinct points, got " +
                                  std::to_string(points_.size()));
  }

  const std::vector<Vec3>& points() const { return points_; }
  const Vec3& viewpoint() const { return viewpoint_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<Vec3> points_;
  Vec3 viewpoint_;
};

/// Drops points outside the box; the workspace pre-filter.
inline std::vector<Vec3> filter_to_box(std::span<const Vec3> points, const Aabb& box) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points)
    if (box.contains(p)) out.push_back(p);
  return out;
}

/// Immutable spatial index over a point cloud. Copies share the underlying
/// data; all queries are const and thread-safe.
class SurfaceIndex {
 public:
  explicit SurfaceIndex(PointCloud cloud) : data_(std::make_shared<Data>(std::move(cloud))) {}

  const PointCloud& cloud() const { return data_->cloud; }
  std::span<const Vec3> points() const { return data_->cloud.points(); }
  std::size_t size() const { return data_->cloud.size(); }
  double median_spacing() const { return data_->median_spacing; }

  std::vector<Neighbor> knn(const Vec3& q, std::size_t k) const { return data_->tree.knn(q, k); }
  std::vector<Neighbor> radius_search(const Vec3& q, double r) const {
    return data_->tree.radius_search(q, r);
  }
  Neighbor nearest(const Vec3& q) const { return data_->tree.nearest(q); }
  double distance_to_cloud(const Vec3& q) const { return nearest(q).distance(); }

 private:
  struct Data {
    explicit Data(PointCloud c) : cloud(std::move(c)), tree(cloud.points()) {
      std::vector<double> nn(cloud.size());
      for (std::size_t i = 0; i < cloud.size(); ++i) nn[i] = tree.knn(cloud.points()[i], 2)[1].distance();
      const std::size_t mid = nn.size() / 2;
      std::nth_element(nn.begin(), nn.begin() + mid, nn.end());
      median_spacing = nn[mid];
      if (nn.size() % 2 == 0) {
        const double below = *std::max_element(nn.begin(), nn.begin() + mid);
        median_spacing = 0.5 * (median_spacing + below);
      }
    }
    PointCloud cloud;
    KdTree tree;
    double median_spacing = 0.0;
  };

  std::shared_ptr<const Data> data_;
};

inline SurfaceIndex build_index(PointCloud cloud) { return SurfaceIndex(std::move(cloud)); }

/// Local tangent space: {tangent_u, tangent_v, normal} is a right-handed
/// orthonormal basis and the normal faces the viewpoint.
struct SurfaceFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 tangent_u = Vec3::UnitX();
  Vec3 tangent_v = Vec3::UnitY();

  /// Same orientation, moved to another base point.
  SurfaceFrame recentered(const Vec3& p) const {
    SurfaceFrame f = *this;
    f.origin = p;
    return f;
  }
};

struct TangentCoord {
  double u = 0.0;
  double v = 0.0;

  Eigen::Vector2d vec() const { return {u, v}; }
  double norm() const { return std::hypot(u, v); }
};

inline constexpr std::size_t kDefaultPcaNeighbors = 20;
/// Points farther than this many median spacings from the cloud are off-surface.
inline constexpr double kOffSurfaceSpacings = 5.0;
/// exp_map results must land this close (in median spacings) to the cloud.
inline constexpr double kOnSurfaceSpacings = 2.0;
inline constexpr double kDegenerateEigenvalue = 1e-12;

/// Completes a unit normal to a right-handed orthonormal frame.
inline SurfaceFrame frame_from_normal(const Vec3& origin, const Vec3& unit_normal) {
  SurfaceFrame f;
  f.origin = origin;
  f.normal = unit_normal;
  int axis = 0;
  unit_normal.cwiseAbs().minCoeff(&axis);
  const Vec3 e = Vec3::Unit(axis);
  f.tangent_u = (e - e.dot(unit_normal) * unit_normal).normalized();
  f.tangent_v = unit_normal.cross(f.tangent_u);
  return f;
}

/// PCA tangent frame at the cloud point nearest to `p`, using the k nearest
/// neighbours of `p`.
inline SurfaceFrame tangent_frame(const SurfaceIndex& index, const Vec3& p,
                                  std::size_t k = kDefaultPcaNeighbors) {
  if (k < 3) throw std::invalid_argument("tangent_frame: k must be at least 3");
  if (!all_finite(p)) throw std::invalid_argument("tangent_frame: non-finite query point");
  const auto nbrs = index.knn(p, k);
  const Neighbor& closest = nbrs.front();
  if (closest.distance() > kOffSurfaceSpacings * index.median_spacing())
    throw SurfaceError(SurfaceError::Kind::off_surface,
                       "tangent_frame: query point is " + std::to_string(closest.distance()) +
                           " m from the cloud");

  const auto pts = index.points();
  Vec3 centroid = Vec3::Zero();
  for (const auto& n : nbrs) centroid += pts[n.index];
  centroid /= static_cast<double>(nbrs.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& n : nbrs) {
    const Vec3 d = pts[n.index] - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(nbrs.size());

  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3& values = eig.eigenvalues();  // ascending
  if (values[0] < kDegenerateEigenvalue && values[1] < kDegenerateEigenvalue)
    throw SurfaceError(SurfaceError::Kind::degenerate_frame,
                       "tangent_frame: neighbourhood is collinear or coincident");

  const Vec3 origin = pts[closest.index];
  Vec3 normal = eig.eigenvectors().col(0).normalized();
  if (normal.dot(index.cloud().viewpoint() - origin) < 0.0) normal = -normal;
  return frame_from_normal(origin, normal);
}

/// Orthogonal projection of `x` onto the frame's tangent plane, in frame
/// coordinates.
inline TangentCoord log_map(const SurfaceFrame& frame, const Vec3& x) {
  if (!all_finite(x)) throw std::invalid_argument("log_map: non-finite point");
  const Vec3 d = x - frame.origin;
  return {d.dot(frame.tangent_u), d.dot(frame.tangent_v)};
}

/// Tangent-plane step from the frame origin towards `target`: beta * target,
/// clipped to length max_step.
inline TangentCoord step_toward(const SurfaceFrame& /*frame*/, const TangentCoord& target,
                                double beta, double max_step) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("step_toward: beta must be in (0, 1]");
  if (!(max_step > 0.0)) throw std::invalid_argument("step_toward: max_step must be positive");
  TangentCoord step{beta * target.u, beta * target.v};
  const double len = step.norm();
  if (len <= max_step) return step;
  const double target_len = target.norm();
  double scale = max_step / target_len;
  TangentCoord clipped{target.u * scale, target.v * scale};
  while (clipped.norm() > max_step) {
    scale = std::nextafter(scale, 0.0);
    clipped = {target.u * scale, target.v * scale};
  }
  return clipped;
}

struct ExpMapOptions {
  std::size_t pca_neighbors = kDefaultPcaNeighbors;
  int projection_iterations = 2;
};

/// Moves a point that landed in a sampling gap back within `band` of a
/// sample: to the closest in-band position on the circle about `origin` in
/// the plane (x, normal), which keeps the step length, unless that moves it
/// further than `band`; then toward the closest sample instead.
inline Vec3 slide_into_band(const SurfaceIndex& index, const Vec3& origin, const Vec3& x, const Vec3& normal,
                            double band, std::size_t k) {
  const Vec3 centre = origin - (origin - x).dot(normal) * normal;
  const Vec3 radial = x - centre;
  const double rho = radial.norm();
  const auto nbrs = index.knn(x, k);
  if (rho > 0.0) {
    const Vec3 e1 = radial / rho;
    const Vec3 e2 = normal.cross(e1);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& nb : nbrs) {
      const Vec3& c = index.points()[nb.index];
      const double h = (c - x).dot(normal);
      const double r2 = band * band * (1.0 - 1e-9) - h * h;
      if (r2 <= 0.0) continue;
      const Vec3 rel = c - h * normal - centre;
      const double d = rel.norm();
      if (d == 0.0) continue;
      const double kappa = (rho * rho + d * d - r2) / (2.0 * rho * d);
      if (kappa > 1.0) continue;
      const double half = kappa <= -1.0 ? M_PI : std::acos(kappa);
      const double phi = std::atan2(rel.dot(e2), rel.dot(e1));
      // x sits at angle 0; the reachable arc is [phi - half, phi + half].
      const double shift = std::abs(phi) <= half ? 0.0 : (phi > 0.0 ? phi - half : phi + half);
      if (std::abs(shift) < std::abs(best)) best = shift;
    }
    if (std::isfinite(best)) {
      const Vec3 y = centre + rho * (std::cos(best) * e1 + std::sin(best) * e2);
      if ((y - x).norm() <= band && index.distance_to_cloud(y) <= band) return y;
    }
  }
  const Vec3& c = index.points()[nbrs.front().index];
  return c + (x - c) * (band / (x - c).norm());
}

/// Lifts tangent coordinates into 3-D and pulls the point back onto the
/// surface by projecting onto the local PCA plane (repeated
/// `projection_iterations` times). Throws SurfaceError when the lifted point
/// leaves the observed surface.
inline Vec3 exp_map(const SurfaceIndex& index, const SurfaceFrame& frame, const TangentCoord& t,
                    const ExpMapOptions& opts = {}) {
  Vec3 x = frame.origin + t.u * frame.tangent_u + t.v * frame.tangent_v;
  if (!all_finite(x)) throw std::invalid_argument("exp_map: non-finite tangent coordinates");
  const double spacing = index.median_spacing();
  if (index.distance_to_cloud(x) > kOffSurfaceSpacings * spacing)
    throw SurfaceError(SurfaceError::Kind::off_surface, "exp_map: lifted point left the surface");
  Vec3 normal = frame.normal;
  for (int i = 0; i < opts.projection_iterations; ++i) {
    const SurfaceFrame local = tangent_frame(index, x, opts.pca_neighbors);
    x -= (x - local.origin).dot(local.normal) * local.normal;
    normal = local.normal;
  }
  const double band = kOnSurfaceSpacings * spacing * (1.0 - 1e-9);
  if (index.distance_to_cloud(x) > band) x = slide_into_band(index, frame.origin, x, normal, band, opts.pca_neighbors);
  return x;
}

/// Geodesic length of a short segment between adjacent waypoints,
/// approximated by the chord.
inline double geodesic_segment(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

}  // namespace rrtrmm

#endif  // RRTRMM_SURFACE_HPP
