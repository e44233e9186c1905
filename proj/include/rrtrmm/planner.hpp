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

// RRT* on a point-cloud surface with a blended path-length / manipulability
// cost.
//
// Every node carries exact path accumulators (length, sum of 1/w, number of
// path points), so the path-averaged manipulability term is exact at every
// node. Re-parenting propagates the accumulators through the whole subtree.
// With alpha = 0 the search is classical RRT* on the surface.

#ifndef RRTRMM_PLANNER_HPP
#define RRTRMM_PLANNER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rrtrmm/kinematics.hpp"
#include "rrtrmm/random.hpp"
#include "rrtrmm/surface.hpp"

namespace rrtrmm {

using NodeId = std::size_t;

struct PlannerConfig {
  double alpha = 0.7;
  double beta = 0.1;
  /// <= 0 selects 2.5 median spacings of the cloud.
  double max_step = 0.0;
  int iterations = 5000;
  /// <= 0 derives the constant from the cloud's estimated area.
  double near_gamma = 0.0;
  /// <= 0 selects one median spacing of the cloud.
  double goal_tolerance = 0.0;
  double goal_bias = 0.05;
  std::uint64_t rng_seed = 0;
  std::size_t pca_k = kDefaultPcaNeighbors;
  double standoff = 0.0;
  double w_floor = 1e-6;
  JacobianMode jacobian_mode = JacobianMode::automatic;
  IkOptions ik;
  /// Extra IK attempts from random in-limit seeds after the parent-seeded
  /// attempt fails.
  int ik_retries = 0;
  /// IK seed for the start and goal checks; empty means all zeros, clamped.
  JointConfig home;
  bool record_trace = false;

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("planner config: " + m); };
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must be in [0, 1]");
    if (!(beta > 0.0 && beta <= 1.0)) fail("beta must be in (0, 1]");
    if (!std::isfinite(max_step)) fail("max_step must be finite");
    if (iterations < 1) fail("iterations must be at least 1");
    if (!std::isfinite(near_gamma)) fail("near_gamma must be finite");
    if (!std::isfinite(goal_tolerance)) fail("goal_tolerance must be finite");
    if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) fail("goal_bias must be in [0, 1]");
    if (pca_k < 3) fail("pca_k must be at least 3");
    if (!(standoff >= 0.0)) fail("standoff must be non-negative");
    if (!(w_floor > 0.0)) fail("w_floor must be positive");
    if (ik.max_iterations < 1) fail("ik max iterations must be at least 1");
    if (ik_retries < 0) fail("ik_retries must be non-negative");
  }
};

/// Concrete parameters after cloud-dependent defaults are filled in.
struct PlannerSettings {
  PlannerConfig config;
  double max_step = 0.0;
  double near_gamma = 0.0;
  double goal_tolerance = 0.0;
  JointConfig home;
};

inline constexpr double kDefaultStepSpacings = 2.5;

inline PlannerSettings resolve_settings(const PlannerConfig& cfg, const SurfaceIndex& index,
                                        const KinematicChain& chain) {
  cfg.validate();
  PlannerSettings s;
  s.config = cfg;
  const double spacing = index.median_spacing();
  s.max_step = cfg.max_step > 0.0 ? cfg.max_step : kDefaultStepSpacings * spacing;
  if (cfg.near_gamma > 0.0) {
    s.near_gamma = cfg.near_gamma;
  } else {
    // RRT* lower bound for d = 2: 2 (1 + 1/d)^(1/d) (area / pi)^(1/d). The
    // area comes from the median nearest-neighbour distance s of a uniform
    // sample, for which density * pi * s^2 = ln 2.
    const double area = static_cast<double>(index.size()) * M_PI * spacing * spacing / std::log(2.0);
    const double lower_bound = 2.0 * std::sqrt(1.5) * std::sqrt(area / M_PI);
    // Samples are cloud points, so tree nodes pile up around a fixed set of
    // sites and a radius shrinking with tree size starves rewiring. Keep the
    // radius at the step cap up to K nodes.
    const double k = std::max(2.0, static_cast<double>(cfg.iterations));
    s.near_gamma = std::max(lower_bound, s.max_step * std::sqrt(k / std::log(k)));
  }
  s.goal_tolerance = cfg.goal_tolerance > 0.0 ? cfg.goal_tolerance : spacing;
  if (cfg.home.size() == 0) {
    s.home = chain.clamp(JointConfig::Zero(static_cast<Eigen::Index>(chain.dof())));
  } else {
    if (static_cast<std::size_t>(cfg.home.size()) != chain.dof())
      throw std::invalid_argument("planner config: home configuration has the wrong size");
    s.home = chain.clamp(cfg.home);
  }
  return s;
}

struct TreeNode {
  Vec3 position = Vec3::Zero();
  JointConfig config;
  std::optional<NodeId> parent;
  double cum_dist = 0.0;
  double cum_inv_w = 0.0;
  std::size_t depth = 1;
  double w = 0.0;
  double inv_w = 0.0;
};

struct CostBreakdown {
  double c_dist = 0.0;
  double c_manip = 0.0;
  double c_total = 0.0;
};

/// Path-length and path-averaged inverse manipulability blended by alpha.
inline CostBreakdown blended_cost(double cum_dist, double cum_inv_w, std::size_t depth,
                                  double alpha) {
  CostBreakdown c;
  c.c_dist = cum_dist;
  c.c_manip = cum_inv_w / static_cast<double>(depth);
  c.c_total = (1.0 - alpha) * c.c_dist + alpha * c.c_manip;
  return c;
}

inline CostBreakdown node_cost(const TreeNode& node, double alpha) {
  return blended_cost(node.cum_dist, node.cum_inv_w, node.depth, alpha);
}

inline double clamped_inverse_manipulability(double w, double w_floor) {
  return 1.0 / std::max(w, w_floor);
}

/// Accumulators of a node at `position` if attached below `parent`.
struct PathAccumulators {
  double cum_dist = 0.0;
  double cum_inv_w = 0.0;
  std::size_t depth = 1;
};

inline PathAccumulators through(const TreeNode& parent, const Vec3& position, double inv_w) {
  return {parent.cum_dist + geodesic_segment(parent.position, position), parent.cum_inv_w + inv_w,
          parent.depth + 1};
}

/// Search tree with children lists for subtree propagation.
class PlannerTree {
 public:
  NodeId add_root(const Vec3& position, const JointConfig& config, double w, double w_floor) {
    if (!nodes_.empty()) throw std::logic_error("planner tree: root already set");
    TreeNode n;
    n.position = position;
    n.config = config;
    n.w = w;
    n.inv_w = clamped_inverse_manipulability(w, w_floor);
    n.cum_inv_w = n.inv_w;
    nodes_.push_back(std::move(n));
    children_.emplace_back();
    return 0;
  }

  /// Adds `node` under `parent`; cumulative fields are computed here.
  NodeId add(TreeNode node, NodeId parent) {
    const auto acc = through(nodes_.at(parent), node.position, node.inv_w);
    node.parent = parent;
    node.cum_dist = acc.cum_dist;
    node.cum_inv_w = acc.cum_inv_w;
    node.depth = acc.depth;
    nodes_.push_back(std::move(node));
    children_.emplace_back();
    const NodeId id = nodes_.size() - 1;
    children_[parent].push_back(id);
    return id;
  }

  /// Moves `id` under `new_parent` and refreshes the whole subtree. The
  /// caller guarantees `new_parent` is not inside that subtree.
  void reparent(NodeId id, NodeId new_parent) {
    TreeNode& n = nodes_.at(id);
    if (!n.parent) throw std::logic_error("planner tree: cannot reparent the root");
    auto& siblings = children_[*n.parent];
    siblings.erase(std::find(siblings.begin(), siblings.end(), id));
    n.parent = new_parent;
    children_[new_parent].push_back(id);
    propagate_from(id);
  }

  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<NodeId>& children(NodeId id) const { return children_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Closest node by Euclidean distance, ties to the smaller id.
  NodeId nearest(const Vec3& x) const {
    NodeId best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (NodeId i = 0; i < nodes_.size(); ++i) {
      const double d2 = (nodes_[i].position - x).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = i;
      }
    }
    return best;
  }

  /// Ids (ascending) of nodes within `radius` of x.
  std::vector<NodeId> within(const Vec3& x, double radius) const {
    std::vector<NodeId> out;
    const double r2 = radius * radius;
    for (NodeId i = 0; i < nodes_.size(); ++i)
      if ((nodes_[i].position - x).squaredNorm() <= r2) out.push_back(i);
    return out;
  }

  bool is_ancestor(NodeId ancestor, NodeId id) const {
    std::optional<NodeId> cur = id;
    while (cur) {
      if (*cur == ancestor) return true;
      cur = nodes_[*cur].parent;
    }
    return false;
  }

  /// Root-to-node id sequence.
  std::vector<NodeId> path_to(NodeId id) const {
    std::vector<NodeId> ids;
    for (std::optional<NodeId> cur = id; cur; cur = nodes_.at(*cur).parent) ids.push_back(*cur);
    std::reverse(ids.begin(), ids.end());
    return ids;
  }

 private:
  void propagate_from(NodeId id) {
    std::deque<NodeId> queue{id};
    while (!queue.empty()) {
      const NodeId cur = queue.front();
      queue.pop_front();
      TreeNode& n = nodes_[cur];
      const auto acc = through(nodes_[*n.parent], n.position, n.inv_w);
      n.cum_dist = acc.cum_dist;
      n.cum_inv_w = acc.cum_inv_w;
      n.depth = acc.depth;
      for (NodeId c : children_[cur]) queue.push_back(c);
    }
  }

  std::vector<TreeNode> nodes_;
  std::vector<std::vector<NodeId>> children_;
};

/// Random state: the goal with probability goal_bias, otherwise a uniformly
/// chosen cloud point.
inline Vec3 sample_surface(const SurfaceIndex& index, const Vec3& goal, const PlannerConfig& cfg,
                           Rng& rng) {
  if (rng.uniform() < cfg.goal_bias) return goal;
  return index.points()[rng.index(index.size())];
}

enum class Rejection { off_surface, degenerate_frame, ik_failure, duplicate };

inline const char* to_string(Rejection r) {
  switch (r) {
    case Rejection::off_surface: return "off-surface";
    case Rejection::degenerate_frame: return "degenerate-frame";
    case Rejection::ik_failure: return "ik-failure";
    case Rejection::duplicate: return "duplicate";
  }
  return "unknown";
}

/// Either a provisional node (parent unset) or the reason the sample was
/// discarded. `nearest` is always filled.
struct Extension {
  NodeId nearest = 0;
  std::optional<TreeNode> node;
  Rejection reason = Rejection::duplicate;

  bool ok() const { return node.has_value(); }
};

inline constexpr double kZeroStepLength = 1e-9;

namespace detail {

inline std::optional<TreeNode> make_surface_node(const SurfaceIndex& index,
                                                 const KinematicChain& chain, const Vec3& position,
                                                 const JointConfig& seed,
                                                 const PlannerSettings& s, Rng* rng,
                                                 Rejection& reason) {
  SurfaceFrame frame;
  try {
    frame = tangent_frame(index, position, s.config.pca_k).recentered(position);
  } catch (const SurfaceError& e) {
    reason = e.kind() == SurfaceError::Kind::off_surface ? Rejection::off_surface
                                                          : Rejection::degenerate_frame;
    return std::nullopt;
  }
  const ToolTarget target = tool_target_from_surface(frame, s.config.standoff);
  IkResult ik = solve_ik(chain, target, seed, s.config.ik);
  if (rng) {
    const auto lo = chain.lower_limits();
    const auto hi = chain.upper_limits();
    for (int attempt = 0; attempt < s.config.ik_retries && !ik.converged; ++attempt) {
      JointConfig random_seed(static_cast<Eigen::Index>(chain.dof()));
      for (Eigen::Index i = 0; i < random_seed.size(); ++i) random_seed[i] = rng->uniform(lo[i], hi[i]);
      ik = solve_ik(chain, target, random_seed, s.config.ik);
    }
  }
  if (!ik.converged || !chain.within_limits(ik.q)) {
    reason = Rejection::ik_failure;
    return std::nullopt;
  }
  TreeNode node;
  node.position = position;
  node.config = std::move(ik.q);
  node.w = manipulability(chain, node.config, s.config.jacobian_mode);
  node.inv_w = clamped_inverse_manipulability(node.w, s.config.w_floor);
  return node;
}

}  // namespace detail

/// One steering step: nearest node, tangent frame, log map, beta step with
/// max_step clip, exp map back onto the cloud, then IK validity of the new
/// point seeded from the nearest node's configuration.
inline Extension extend(const PlannerTree& tree, const SurfaceIndex& index,
                        const KinematicChain& chain, const Vec3& x_rand, const PlannerSettings& s,
                        Rng* rng = nullptr) {
  Extension ext;
  ext.nearest = tree.nearest(x_rand);
  const TreeNode& from = tree.node(ext.nearest);

  SurfaceFrame frame;
  Vec3 x_new;
  try {
    frame = tangent_frame(index, from.position, s.config.pca_k).recentered(from.position);
    const TangentCoord target = log_map(frame, x_rand);
    const TangentCoord step = step_toward(frame, target, s.config.beta, s.max_step);
    if (step.norm() <= kZeroStepLength) {
      ext.reason = Rejection::duplicate;
      return ext;
    }
    x_new = exp_map(index, frame, step, {s.config.pca_k, 2});
  } catch (const SurfaceError& e) {
    ext.reason = e.kind() == SurfaceError::Kind::off_surface ? Rejection::off_surface
                                                              : Rejection::degenerate_frame;
    return ext;
  }
  if ((x_new - from.position).norm() <= kZeroStepLength) {
    ext.reason = Rejection::duplicate;
    return ext;
  }
  ext.node = detail::make_surface_node(index, chain, x_new, from.config, s, rng, ext.reason);
  return ext;
}

/// Neighbourhood radius gamma * sqrt(log n / n) (2-manifold exponent),
/// capped at max_step so every edge stays a short surface segment.
inline double near_radius(std::size_t tree_size, const PlannerSettings& s) {
  if (tree_size < 2) return 0.0;
  const double n = static_cast<double>(tree_size);
  return std::min(s.near_gamma * std::sqrt(std::log(n) / n), s.max_step);
}

/// Near set for a new point: nodes within the shrinking radius, always
/// including `nearest`. Ascending ids.
inline std::vector<NodeId> near_set(const PlannerTree& tree, const Vec3& x, NodeId nearest,
                                    const PlannerSettings& s) {
  auto ids = tree.within(x, near_radius(tree.size(), s));
  if (!std::binary_search(ids.begin(), ids.end(), nearest))
    ids.insert(std::lower_bound(ids.begin(), ids.end(), nearest), nearest);
  return ids;
}

/// Parent minimising the provisional node's blended cost; ties go to the
/// smaller path length, then to the smaller id.
inline NodeId choose_parent(const PlannerTree& tree, const TreeNode& provisional,
                            const std::vector<NodeId>& candidates, double alpha) {
  if (candidates.empty()) throw std::invalid_argument("choose_parent: empty near set");
  NodeId best = candidates.front();
  CostBreakdown best_cost{std::numeric_limits<double>::infinity(), 0.0,
                          std::numeric_limits<double>::infinity()};
  for (NodeId id : candidates) {
    const auto acc = through(tree.node(id), provisional.position, provisional.inv_w);
    const auto c = blended_cost(acc.cum_dist, acc.cum_inv_w, acc.depth, alpha);
    const bool better =
        c.c_total < best_cost.c_total ||
        (c.c_total == best_cost.c_total &&
         (c.c_dist < best_cost.c_dist || (c.c_dist == best_cost.c_dist && id < best)));
    if (better) {
      best = id;
      best_cost = c;
    }
  }
  return best;
}

/// Re-parents every near node whose blended cost strictly drops when routed
/// through `new_id`. Ancestors of `new_id` are skipped so the tree stays
/// acyclic. Returns the re-parented ids in processing order.
inline std::vector<NodeId> rewire(PlannerTree& tree, NodeId new_id,
                                  const std::vector<NodeId>& candidates, double alpha) {
  std::vector<NodeId> changed;
  for (NodeId id : candidates) {
    if (id == new_id || tree.is_ancestor(id, new_id)) continue;
    const TreeNode& n = tree.node(id);
    const auto acc = through(tree.node(new_id), n.position, n.inv_w);
    const double via_new = blended_cost(acc.cum_dist, acc.cum_inv_w, acc.depth, alpha).c_total;
    if (via_new < node_cost(n, alpha).c_total) {
      tree.reparent(id, new_id);
      changed.push_back(id);
    }
  }
  return changed;
}

struct Waypoint {
  Vec3 position;
  JointConfig config;
  double w = 0.0;
};

struct PlanStats {
  std::size_t accepted = 0;
  std::size_t off_surface = 0;
  std::size_t degenerate_frame = 0;
  std::size_t ik_failure = 0;
  std::size_t duplicate = 0;
  std::size_t rewires = 0;
  std::size_t goal_nodes = 0;
};

struct PlanResult {
  bool succeeded = false;
  std::string failure_reason;
  std::vector<Waypoint> waypoints;
  CostBreakdown cost;
  std::size_t tree_size = 0;
  std::size_t iterations_used = 0;
  PlanStats stats;
  PlannerSettings settings;

  double path_length() const { return cost.c_dist; }
  double min_w() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& wp : waypoints) m = std::min(m, wp.w);
    return m;
  }
  double mean_w() const {
    double s = 0.0;
    for (const auto& wp : waypoints) s += wp.w;
    return waypoints.empty() ? 0.0 : s / static_cast<double>(waypoints.size());
  }
};

/// One iteration of the search, recorded when tracing is on.
struct TraceEvent {
  std::size_t iteration = 0;
  Vec3 sample = Vec3::Zero();
  std::optional<Rejection> rejection;
  NodeId node = 0;
  NodeId parent = 0;
  std::vector<NodeId> rewired;

  bool operator==(const TraceEvent& o) const {
    return iteration == o.iteration && sample == o.sample && rejection == o.rejection &&
           node == o.node && parent == o.parent && rewired == o.rewired;
  }
};

/// Single-threaded, deterministic search. The surface index and chain are
/// shared read-only; the tree and random state belong to this object.
class Planner {
 public:
  Planner(SurfaceIndex index, KinematicChain chain, PlannerConfig config)
      : index_(std::move(index)),
        chain_(std::move(chain)),
        settings_(resolve_settings(config, index_, chain_)) {}

  const PlannerSettings& settings() const { return settings_; }
  const PlannerTree& tree() const { return tree_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }

  PlanResult plan(const Vec3& start, const Vec3& goal) {
    tree_ = PlannerTree{};
    trace_.clear();
    Rng rng(settings_.config.rng_seed);
    const auto& cfg = settings_.config;
    PlanResult result;
    result.settings = settings_;

    if (!all_finite(start) || !all_finite(goal))
      return fail(result, "start and goal must be finite");
    const double limit = kOffSurfaceSpacings * index_.median_spacing();
    if (index_.distance_to_cloud(start) > limit) return fail(result, "start is off the surface");
    if (index_.distance_to_cloud(goal) > limit) return fail(result, "goal is off the surface");

    Rejection why{};
    auto root = detail::make_surface_node(index_, chain_, start, settings_.home, settings_, nullptr, why);
    if (!root) return fail(result, std::string("start is infeasible (") + to_string(why) + ")");
    if (!detail::make_surface_node(index_, chain_, goal, settings_.home, settings_, nullptr, why))
      return fail(result, std::string("goal is infeasible (") + to_string(why) + ")");

    tree_.add_root(root->position, root->config, root->w, cfg.w_floor);
    std::vector<NodeId> goal_nodes;
    if ((start - goal).norm() <= settings_.goal_tolerance) {
      goal_nodes.push_back(0);
      result.tree_size = 1;
      return finish(result, goal_nodes);
    }

    for (int k = 0; k < cfg.iterations; ++k) {
      const Vec3 x_rand = sample_surface(index_, goal, cfg, rng);
      Extension ext = extend(tree_, index_, chain_, x_rand, settings_, &rng);
      TraceEvent ev;
      ev.iteration = static_cast<std::size_t>(k);
      ev.sample = x_rand;
      if (!ext.ok()) {
        count(result.stats, ext.reason);
        if (cfg.record_trace) {
          ev.rejection = ext.reason;
          trace_.push_back(std::move(ev));
        }
        continue;
      }
      ++result.stats.accepted;
      const auto near = near_set(tree_, ext.node->position, ext.nearest, settings_);
      const NodeId parent = choose_parent(tree_, *ext.node, near, cfg.alpha);
      const NodeId id = tree_.add(std::move(*ext.node), parent);
      auto rewired = rewire(tree_, id, near, cfg.alpha);
      result.stats.rewires += rewired.size();
      if ((tree_.node(id).position - goal).norm() <= settings_.goal_tolerance) goal_nodes.push_back(id);
      if (cfg.record_trace) {
        ev.node = id;
        ev.parent = parent;
        ev.rewired = std::move(rewired);
        trace_.push_back(std::move(ev));
      }
    }
    result.iterations_used = static_cast<std::size_t>(cfg.iterations);
    result.tree_size = tree_.size();
    return finish(result, goal_nodes);
  }

 private:
  static PlanResult& fail(PlanResult& r, std::string reason) {
    r.succeeded = false;
    r.failure_reason = std::move(reason);
    return r;
  }

  static void count(PlanStats& st, Rejection r) {
    switch (r) {
      case Rejection::off_surface: ++st.off_surface; break;
      case Rejection::degenerate_frame: ++st.degenerate_frame; break;
      case Rejection::ik_failure: ++st.ik_failure; break;
      case Rejection::duplicate: ++st.duplicate; break;
    }
  }

  PlanResult& finish(PlanResult& result, const std::vector<NodeId>& goal_nodes) {
    result.stats.goal_nodes = goal_nodes.size();
    if (goal_nodes.empty()) return fail(result, "no node reached the goal region");
    const double alpha = settings_.config.alpha;
    NodeId best = goal_nodes.front();
    for (NodeId id : goal_nodes) {
      const auto c = node_cost(tree_.node(id), alpha);
      const auto b = node_cost(tree_.node(best), alpha);
      if (c.c_total < b.c_total ||
          (c.c_total == b.c_total && (c.c_dist < b.c_dist || (c.c_dist == b.c_dist && id < best))))
        best = id;
    }
    for (NodeId id : tree_.path_to(best)) {
      const TreeNode& n = tree_.node(id);
      result.waypoints.push_back({n.position, n.config, n.w});
    }
    result.cost = node_cost(tree_.node(best), alpha);
    result.succeeded = true;
    return result;
  }

  SurfaceIndex index_;
  KinematicChain chain_;
  PlannerSettings settings_;
  PlannerTree tree_;
  std::vector<TraceEvent> trace_;
};

inline PlanResult plan(const SurfaceIndex& index, const KinematicChain& chain, const Vec3& start,
                       const Vec3& goal, const PlannerConfig& cfg) {
  Planner p(index, chain, cfg);
  return p.plan(start, goal);
}

}  // namespace rrtrmm

#endif  // RRTRMM_PLANNER_HPP
