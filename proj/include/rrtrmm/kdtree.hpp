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

#ifndef RRTRMM_KDTREE_HPP
#define RRTRMM_KDTREE_HPP

#include <algorithm>
#include <cstddef>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <vector>

#include "rrtrmm/geometry.hpp"

namespace rrtrmm {

struct Neighbor {
  std::uint32_t index;
  double squared_distance;

  double distance() const { return std::sqrt(squared_distance); }
};

namespace detail {
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  if (a.squared_distance != b.squared_distance) return a.squared_distance < b.squared_distance;
  return a.index < b.index;
}
}  // namespace detail

/// Static 3-d tree over a borrowed point array. The points must outlive the
/// tree and must not change after construction. Queries are const and can
/// run concurrently.
///
/// Results are ordered by ascending distance, ties by ascending point index,
/// so every query is deterministic.
class KdTree {
 public:
  KdTree() = default;

  explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 8)
      : points_(points), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (!points.empty()) {
      nodes_.reserve(2 * points.size() / leaf_size_ + 1);
      build(0, static_cast<std::uint32_t>(points.size()));
    }
  }

  std::size_t size() const { return points_.size(); }

  /// The min(k, size()) nearest points.
  std::vector<Neighbor> knn(const Vec3& query, std::size_t k) const {
    std::vector<Neighbor> heap;
    k = std::min(k, points_.size());
    if (k == 0) return heap;
    heap.reserve(k + 1);
    knn_recurse(0, query, k, heap);
    std::sort_heap(heap.begin(), heap.end(), detail::neighbor_less);
    return heap;
  }

  Neighbor nearest(const Vec3& query) const { return knn(query, 1).front(); }

  /// All points with distance <= radius.
  std::vector<Neighbor> radius_search(const Vec3& query, double radius) const {
    std::vector<Neighbor> out;
    if (!points_.empty() && radius >= 0.0) radius_recurse(0, query, radius * radius, out);
    std::sort(out.begin(), out.end(), detail::neighbor_less);
    return out;
  }

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (std::uint32_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    Node node;
    node.begin = begin;
    node.end = end;
    node.lo = lo;
    node.hi = hi;
    if (end - begin > leaf_size_) {
      int axis = 0;
      (hi - lo).maxCoeff(&axis);
      const std::uint32_t mid = begin + (end - begin) / 2;
      std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         return points_[a][axis] < points_[b][axis];
                       });
      node.axis = axis;
      node.split = points_[order_[mid]][axis];
      node.left = build(begin, mid);
      node.right = build(mid, end);
    }
    nodes_[id] = node;
    return id;
  }

  static double box_squared_distance(const Node& n, const Vec3& q) {
    const Vec3 d = (n.lo - q).cwiseMax(q - n.hi).cwiseMax(0.0);
    return d.squaredNorm();
  }

  void knn_recurse(std::uint32_t id, const Vec3& q, std::size_t k,
                   std::vector<Neighbor>& heap) const {
    const Node& n = nodes_[id];
    if (heap.size() == k && box_squared_distance(n, q) > heap.front().squared_distance) return;
    if (n.axis < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const Neighbor cand{order_[i], (points_[order_[i]] - q).squaredNorm()};
        if (heap.size() < k) {
          heap.push_back(cand);
          std::push_heap(heap.begin(), heap.end(), detail::neighbor_less);
        } else if (detail::neighbor_less(cand, heap.front())) {
          std::pop_heap(heap.begin(), heap.end(), detail::neighbor_less);
          heap.back() = cand;
          std::push_heap(heap.begin(), heap.end(), detail::neighbor_less);
        }
      }
      return;
    }
    const bool go_left = q[n.axis] < n.split;
    knn_recurse(go_left ? n.left : n.right, q, k, heap);
    knn_recurse(go_left ? n.right : n.left, q, k, heap);
  }

  void radius_recurse(std::uint32_t id, const Vec3& q, double r2,
                      std::vector<Neighbor>& out) const {
    const Node& n = nodes_[id];
    if (box_squared_distance(n, q) > r2) return;
    if (n.axis < 0) {
      for (std::uint32_t i = n.begin; i < n.end; ++i) {
        const double d2 = (points_[order_[i]] - q).squaredNorm();
        if (d2 <= r2) out.push_back({order_[i], d2});
      }
      return;
    }
    radius_recurse(n.left, q, r2, out);
    radius_recurse(n.right, q, r2, out);
  }

  std::span<const Vec3> points_;
  std::size_t leaf_size_ = 8;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace rrtrmm

#endif  // RRTRMM_KDTREE_HPP
