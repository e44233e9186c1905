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

// JSON and CSV emission for planner results and benchmark reports. Column
// orders and JSON layouts are documented in docs/.

#ifndef RRTRMM_CLI_REPORT_HPP
#define RRTRMM_CLI_REPORT_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrtrmm/benchmark.hpp"
#include "rrtrmm/io.hpp"
#include "rrtrmm/planner.hpp"

namespace rrtrmm::cli {

using Json = nlohmann::ordered_json;

inline const char* to_string(JacobianMode m) {
  switch (m) {
    case JacobianMode::automatic: return "auto";
    case JacobianMode::full: return "full";
    case JacobianMode::position: return "position";
  }
  return "auto";
}

inline Json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

/// NaN and infinities become null.
inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json settings_json(const PlannerSettings& s) {
  const auto& c = s.config;
  return Json{{"alpha", c.alpha},
              {"beta", c.beta},
              {"iterations", c.iterations},
              {"max_step", s.max_step},
              {"near_gamma", s.near_gamma},
              {"goal_tolerance", s.goal_tolerance},
              {"goal_bias", c.goal_bias},
              {"rng_seed", c.rng_seed},
              {"pca_k", c.pca_k},
              {"standoff", c.standoff},
              {"w_floor", c.w_floor},
              {"jacobian_mode", to_string(c.jacobian_mode)},
              {"ik_retries", c.ik_retries},
              {"home", vec_json(s.home)}};
}

inline Json plan_result_json(const PlanResult& r, const Vec3& start, const Vec3& goal) {
  Json j;
  j["succeeded"] = r.succeeded;
  j["failure_reason"] = r.succeeded ? Json(nullptr) : Json(r.failure_reason);
  j["start"] = vec_json(start);
  j["goal"] = vec_json(goal);
  if (r.succeeded) {
    j["cost"] = {{"c_dist", r.cost.c_dist}, {"c_manip", r.cost.c_manip}, {"c_total", r.cost.c_total}};
    j["path_length"] = r.path_length();
    j["mean_w"] = r.mean_w();
    j["min_w"] = r.min_w();
  } else {
    j["cost"] = nullptr;
    j["path_length"] = nullptr;
    j["mean_w"] = nullptr;
    j["min_w"] = nullptr;
  }
  j["tree_size"] = r.tree_size;
  j["iterations_used"] = r.iterations_used;
  const auto& st = r.stats;
  j["stats"] = {{"accepted", st.accepted},       {"off_surface", st.off_surface},
                {"degenerate_frame", st.degenerate_frame}, {"ik_failure", st.ik_failure},
                {"duplicate", st.duplicate},     {"rewires", st.rewires},
                {"goal_nodes", st.goal_nodes}};
  j["settings"] = settings_json(r.settings);
  Json wps = Json::array();
  for (const auto& wp : r.waypoints)
    wps.push_back({{"position", vec_json(wp.position)}, {"config", vec_json(wp.config)}, {"w", wp.w}});
  j["waypoints"] = std::move(wps);
  return j;
}

/// index,x,y,z,w,q1..qn
inline std::string waypoint_csv(const PlanResult& r, std::size_t dof) {
  std::ostringstream out;
  out << "index,x,y,z,w";
  for (std::size_t i = 1; i <= dof; ++i) out << ",q" << i;
  out << '\n';
  for (std::size_t k = 0; k < r.waypoints.size(); ++k) {
    const auto& wp = r.waypoints[k];
    out << k << ',' << csv_number(wp.position.x()) << ',' << csv_number(wp.position.y()) << ','
        << csv_number(wp.position.z()) << ',' << csv_number(wp.w);
    for (Eigen::Index i = 0; i < wp.config.size(); ++i) out << ',' << csv_number(wp.config[i]);
    out << '\n';
  }
  return out.str();
}

inline Json quartiles_json(const Quartiles& q) {
  return Json{{"min", number_or_null(q.min)},
              {"q1", number_or_null(q.q1)},
              {"median", number_or_null(q.median)},
              {"q3", number_or_null(q.q3)},
              {"max", number_or_null(q.max)}};
}

inline Json aggregate_json(const std::vector<AggregateGroup>& groups) {
  Json arr = Json::array();
  for (const auto& g : groups) {
    arr.push_back({{"object", g.object},
                   {"alpha", g.alpha},
                   {"trials", g.trials},
                   {"succeeded", g.succeeded},
                   {"path_length", quartiles_json(g.path_length)},
                   {"mean_w", quartiles_json(g.mean_w)},
                   {"min_w", quartiles_json(g.min_w)},
                   {"c_manip", quartiles_json(g.c_manip)},
                   {"c_total", quartiles_json(g.c_total)}});
  }
  return Json{{"groups", std::move(arr)}};
}

}  // namespace rrtrmm::cli

#endif  // RRTRMM_CLI_REPORT_HPP
