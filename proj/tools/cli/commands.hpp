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

// Command-line front end. Every command is callable in-process through
// run(); main() is a thin wrapper.
//
// Exit codes: 0 success, 1 input error, 2 planning failure.

#ifndef RRTRMM_CLI_COMMANDS_HPP
#define RRTRMM_CLI_COMMANDS_HPP

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/report.hpp"
#include "rrtrmm/rrtrmm.hpp"

namespace rrtrmm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitPlanning = 2;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small parsers for flag values.

inline std::vector<double> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (const auto& cell : split_csv_line(text)) {
    const auto v = detail::parse_double(detail::trim(cell));
    if (!v || !std::isfinite(*v)) throw InputError(std::string(what) + ": bad number '" + cell + "'");
    out.push_back(*v);
  }
  return out;
}

inline Vec3 parse_point(std::string_view text, std::string_view what) {
  const auto v = parse_numbers(text, what);
  if (v.size() != 3) throw InputError(std::string(what) + ": expected x,y,z");
  return {v[0], v[1], v[2]};
}

inline std::vector<std::uint64_t> parse_seeds(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (const auto& cell : split_csv_line(text)) {
    const auto t = detail::trim(cell);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
      throw InputError("seeds: bad seed '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

/// "x0,y0,z0,x1,y1,z1"
inline Aabb parse_box(std::string_view text) {
  const auto v = parse_numbers(text, "workspace");
  if (v.size() != 6) throw InputError("workspace: expected x0,y0,z0,x1,y1,z1");
  Aabb box{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  if (!(box.lo.array() <= box.hi.array()).all()) throw InputError("workspace: min corner exceeds max corner");
  return box;
}

inline CloudFormat cloud_format(const std::string& flag, const std::filesystem::path& path) {
  std::string f = flag;
  if (f.empty()) f = path.extension() == ".pcd" ? "pcd" : "ply";
  if (f == "ply") return CloudFormat::ply_ascii;
  if (f == "pcd") return CloudFormat::pcd_ascii;
  throw InputError("unknown cloud format '" + flag + "' (expected ply or pcd)");
}

inline RobotFormat robot_format(const std::string& flag, const std::filesystem::path& path) {
  std::string f = flag;
  if (f.empty()) f = path.extension() == ".urdf" || path.extension() == ".xml" ? "urdf" : "native";
  if (f == "urdf") return RobotFormat::urdf_subset;
  if (f == "native") return RobotFormat::native;
  throw InputError("unknown robot format '" + flag + "' (expected urdf or native)");
}

inline JacobianMode jacobian_mode(const std::string& s) {
  if (s == "auto") return JacobianMode::automatic;
  if (s == "full") return JacobianMode::full;
  if (s == "position") return JacobianMode::position;
  throw InputError("unknown jacobian mode '" + s + "' (expected auto, full or position)");
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw InputError("failed writing '" + path.string() + "'");
}

/// Nearest cloud point, or an input error when p is more than five median
/// spacings from the cloud.
inline Vec3 snap_to_cloud(const SurfaceIndex& index, const Vec3& p, std::string_view what) {
  const auto n = index.nearest(p);
  const double limit = kOffSurfaceSpacings * index.median_spacing();
  if (n.distance() > limit) {
    std::ostringstream msg;
    msg << what << " is " << n.distance() << " m from the cloud (limit " << limit << " m)";
    throw InputError(msg.str());
  }
  return index.points()[n.index];
}

// ---------------------------------------------------------------------------
// Options shared by commands that run the planner.

struct PlannerFlags {
  double alpha = 0.7;
  double beta = 0.1;
  int iterations = 5000;
  std::uint64_t seed = 0;
  double standoff = 0.0;
  double max_step = 0.0;
  double near_gamma = 0.0;
  double goal_tolerance = 0.0;
  double goal_bias = 0.05;
  std::size_t pca_k = kDefaultPcaNeighbors;
  double w_floor = 1e-6;
  std::string jacobian_mode = "auto";
  int ik_retries = 0;
  std::string home;

  void add_to(CLI::App& app) {
    app.add_option("--alpha", alpha, "cost blend: 0 = shortest path, 1 = manipulability only")->capture_default_str();
    app.add_option("--beta", beta, "tangent step fraction")->capture_default_str();
    app.add_option("--iterations", iterations, "iterations K")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--standoff", standoff, "tool stand-off along the normal (m)")->capture_default_str();
    app.add_option("--max-step", max_step, "step cap (m); 0 = 2.5 median spacings")->capture_default_str();
    app.add_option("--near-gamma", near_gamma, "near-radius constant; 0 = automatic")->capture_default_str();
    app.add_option("--goal-tolerance", goal_tolerance, "goal radius (m); 0 = one median spacing")->capture_default_str();
    app.add_option("--goal-bias", goal_bias, "probability of sampling the goal")->capture_default_str();
    app.add_option("--pca-k", pca_k, "neighbours for tangent-plane fits")->capture_default_str();
    app.add_option("--w-floor", w_floor, "manipulability floor for 1/w")->capture_default_str();
    app.add_option("--jacobian-mode", jacobian_mode, "auto, full or position")->capture_default_str();
    app.add_option("--ik-retries", ik_retries, "random-seed IK retries")->capture_default_str();
    app.add_option("--home", home, "IK seed for start/goal checks, comma separated");
  }

  PlannerConfig config(std::size_t dof) const {
    PlannerConfig c;
    c.alpha = alpha;
    c.beta = beta;
    c.iterations = iterations;
    c.rng_seed = seed;
    c.standoff = standoff;
    c.max_step = max_step;
    c.near_gamma = near_gamma;
    c.goal_tolerance = goal_tolerance;
    c.goal_bias = goal_bias;
    c.pca_k = pca_k;
    c.w_floor = w_floor;
    c.jacobian_mode = cli::jacobian_mode(jacobian_mode);
    c.ik_retries = ik_retries;
    if (!home.empty()) {
      const auto v = parse_numbers(home, "home");
      if (v.size() != dof) throw InputError("home: expected " + std::to_string(dof) + " values");
      c.home = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
    return c;
  }
};

struct CloudFlags {
  std::string path;
  std::string format;
  std::string viewpoint = "0,0,0";
  std::string workspace;
  double merge_tolerance = kDefaultMergeTolerance;

  void add_to(CLI::App& app) {
    app.add_option("--cloud", path, "point cloud file (ASCII PLY or PCD)")->required();
    app.add_option("--format", format, "ply or pcd; default from the file extension");
    app.add_option("--viewpoint", viewpoint, "sensor position x,y,z for normal orientation")->capture_default_str();
    app.add_option("--workspace", workspace, "keep points inside x0,y0,z0,x1,y1,z1");
    app.add_option("--merge-tolerance", merge_tolerance, "duplicate-point distance (m)")->capture_default_str();
  }

  SurfaceIndex load() const {
    CloudReadOptions opts;
    opts.viewpoint = parse_point(viewpoint, "viewpoint");
    if (!workspace.empty()) opts.workspace = parse_box(workspace);
    opts.merge_tolerance = merge_tolerance;
    return build_index(read_cloud(path, cloud_format(format, path), opts));
  }
};

struct RobotFlags {
  std::string path;
  std::string format;

  void add_to(CLI::App& app) {
    app.add_option("--robot", path, "robot description (URDF subset or native)")->required();
    app.add_option("--robot-format", format, "urdf or native; default from the file extension");
  }

  KinematicChain load() const { return load_robot(path, robot_format(format, path)).chain; }
};

// ---------------------------------------------------------------------------
// Scene files for the benchmark: JSON, paths relative to the file.

namespace detail_scene {

inline void check_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw InputError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw InputError(where + ": unknown key '" + key + "'");
}

inline Vec3 point(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw InputError(where + ": expected [x, y, z]");
  Vec3 p;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) throw InputError(where + ": expected numbers");
    p[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  return p;
}

template <typename T>
T get(const Json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(where + ": bad value for '" + key + "'");
  }
}

inline std::optional<Aabb> workspace(const Json& obj, const std::string& where) {
  if (!obj.contains("workspace")) return std::nullopt;
  const Json& w = obj.at("workspace");
  check_keys(w, {"min", "max"}, where + ".workspace");
  return Aabb{point(w.at("min"), where + ".workspace.min"), point(w.at("max"), where + ".workspace.max")};
}

inline SceneSpec synthetic(const Json& s, const std::string& where) {
  check_keys(s, {"shape", "params", "sample_count", "noise_sigma", "pose"}, where);
  SceneSpec spec;
  try {
    spec.shape = scene_shape_from_string(get<std::string>(s, "shape", "plane", where));
  } catch (const std::invalid_argument& e) {
    throw InputError(where + ": " + e.what());
  }
  if (s.contains("params")) {
    const Json& p = s.at("params");
    check_keys(p, {"width", "length", "radius", "height", "arc", "cap_angle"}, where + ".params");
    auto& sp = spec.params;
    sp.width = get(p, "width", sp.width, where);
    sp.length = get(p, "length", sp.length, where);
    sp.radius = get(p, "radius", sp.radius, where);
    sp.height = get(p, "height", sp.height, where);
    sp.arc = get(p, "arc", sp.arc, where);
    sp.cap_angle = get(p, "cap_angle", sp.cap_angle, where);
  }
  spec.sample_count = get<std::size_t>(s, "sample_count", spec.sample_count, where);
  spec.noise_sigma = get(s, "noise_sigma", spec.noise_sigma, where);
  if (s.contains("pose")) {
    const Json& p = s.at("pose");
    check_keys(p, {"xyz", "rpy"}, where + ".pose");
    if (p.contains("xyz")) spec.pose.xyz = point(p.at("xyz"), where + ".pose.xyz");
    if (p.contains("rpy")) spec.pose.rpy = point(p.at("rpy"), where + ".pose.rpy");
  }
  return spec;
}

inline PlannerConfig planner(const Json& p, const std::string& where) {
  check_keys(p, {"beta", "iterations", "max_step", "near_gamma", "goal_tolerance", "goal_bias", "pca_k",
                 "standoff", "w_floor", "jacobian_mode", "ik_retries"},
             where);
  PlannerConfig c;
  c.beta = get(p, "beta", c.beta, where);
  c.iterations = get(p, "iterations", c.iterations, where);
  c.max_step = get(p, "max_step", c.max_step, where);
  c.near_gamma = get(p, "near_gamma", c.near_gamma, where);
  c.goal_tolerance = get(p, "goal_tolerance", c.goal_tolerance, where);
  c.goal_bias = get(p, "goal_bias", c.goal_bias, where);
  c.pca_k = get(p, "pca_k", c.pca_k, where);
  c.standoff = get(p, "standoff", c.standoff, where);
  c.w_floor = get(p, "w_floor", c.w_floor, where);
  c.jacobian_mode = jacobian_mode(get<std::string>(p, "jacobian_mode", "auto", where));
  c.ik_retries = get(p, "ik_retries", c.ik_retries, where);
  return c;
}

}  // namespace detail_scene

/// Parses a scene file. Start and goals are snapped to the cloud.
inline std::vector<BenchmarkScene> load_scenes(const std::filesystem::path& path) {
  using namespace detail_scene;
  Json doc;
  try {
    doc = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  const auto dir = path.parent_path();
  auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : dir / fp;
  };
  check_keys(doc, {"scenes"}, "scene file");
  if (!doc.contains("scenes") || !doc.at("scenes").is_array() || doc.at("scenes").empty())
    throw InputError("scene file: 'scenes' must be a non-empty array");

  std::vector<BenchmarkScene> out;
  for (std::size_t i = 0; i < doc.at("scenes").size(); ++i) {
    const Json& s = doc.at("scenes")[i];
    const std::string where = "scenes[" + std::to_string(i) + "]";
    check_keys(s, {"name", "cloud", "robot", "home", "start", "goals", "planner"}, where);
    for (const char* key : {"name", "cloud", "robot", "start", "goals"})
      if (!s.contains(key)) throw InputError(where + ": missing '" + key + "'");
    const auto name = get<std::string>(s, "name", "", where);
    if (name.empty() || name.find_first_of(",\n\"") != std::string::npos)
      throw InputError(where + ": name must be non-empty without commas, quotes or newlines");

    const Json& c = s.at("cloud");
    check_keys(c, {"file", "format", "synthetic", "seed", "viewpoint", "workspace"}, where + ".cloud");
    const Vec3 viewpoint = c.contains("viewpoint") ? point(c.at("viewpoint"), where + ".cloud.viewpoint") : Vec3::Zero();
    const auto box = workspace(c, where + ".cloud");
    PointCloud cloud = [&] {
      if (c.contains("file") == c.contains("synthetic"))
        throw InputError(where + ".cloud: give exactly one of 'file' or 'synthetic'");
      if (c.contains("file")) {
        const auto file = resolve(get<std::string>(c, "file", "", where + ".cloud"));
        CloudReadOptions opts;
        opts.viewpoint = viewpoint;
        opts.workspace = box;
        return read_cloud(file, cloud_format(get<std::string>(c, "format", "", where + ".cloud"), file), opts);
      }
      SceneSpec spec = synthetic(c.at("synthetic"), where + ".cloud.synthetic");
      spec.viewpoint = viewpoint;
      spec.workspace = box;
      try {
        return generate_scene(spec, get<std::uint64_t>(c, "seed", 0, where + ".cloud"));
      } catch (const std::invalid_argument& e) {
        throw InputError(where + ".cloud: " + e.what());
      }
    }();
    SurfaceIndex index = build_index(std::move(cloud));

    const Json& r = s.at("robot");
    check_keys(r, {"file", "format"}, where + ".robot");
    const auto robot_file = resolve(get<std::string>(r, "file", "", where + ".robot"));
    KinematicChain chain = load_robot(robot_file, robot_format(get<std::string>(r, "format", "", where + ".robot"), robot_file)).chain;

    PlannerConfig cfg = s.contains("planner") ? planner(s.at("planner"), where + ".planner") : PlannerConfig{};
    if (s.contains("home")) {
      const auto home = get<std::vector<double>>(s, "home", {}, where);
      if (home.size() != chain.dof()) throw InputError(where + ": home needs " + std::to_string(chain.dof()) + " values");
      cfg.home = Eigen::Map<const Eigen::VectorXd>(home.data(), static_cast<Eigen::Index>(home.size()));
    }
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(where + ": " + e.what());
    }

    const Vec3 start = snap_to_cloud(index, point(s.at("start"), where + ".start"), where + ".start");
    std::vector<Vec3> goals;
    if (!s.at("goals").is_array() || s.at("goals").empty()) throw InputError(where + ": 'goals' must be a non-empty array");
    for (std::size_t g = 0; g < s.at("goals").size(); ++g) {
      const std::string gw = where + ".goals[" + std::to_string(g) + "]";
      goals.push_back(snap_to_cloud(index, point(s.at("goals")[g], gw), gw));
    }
    out.push_back({name, std::move(index), std::move(chain), start, std::move(goals), cfg});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

struct PlanArgs {
  CloudFlags cloud;
  RobotFlags robot;
  PlannerFlags planner;
  std::string start, goal, out_json, out_csv;
};

inline int cmd_plan(const PlanArgs& a, std::ostream& out) {
  const SurfaceIndex index = a.cloud.load();
  const KinematicChain chain = a.robot.load();
  const PlannerConfig cfg = a.planner.config(chain.dof());
  const Vec3 start = snap_to_cloud(index, parse_point(a.start, "start"), "start");
  const Vec3 goal = snap_to_cloud(index, parse_point(a.goal, "goal"), "goal");

  Planner planner(index, chain, cfg);
  const PlanResult r = planner.plan(start, goal);
  if (!a.out_json.empty()) write_file(a.out_json, plan_result_json(r, start, goal).dump(2) + "\n");
  if (!a.out_csv.empty()) write_file(a.out_csv, waypoint_csv(r, chain.dof()));
  if (!r.succeeded) {
    out << "planning failed: " << r.failure_reason << '\n';
    return kExitPlanning;
  }
  out << "waypoints " << r.waypoints.size() << "  length " << r.path_length() << " m  min w "
      << r.min_w() << "  mean w " << r.mean_w() << "  cost " << r.cost.c_total << '\n';
  return kExitOk;
}

struct BenchmarkArgs {
  std::string scenes;
  std::string alphas = "0,0.7";
  std::size_t trials = 5;
  std::string seeds;
  unsigned threads = 0;
  std::string out_csv, out_json, out_timing;
};

inline int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  const auto scenes = load_scenes(a.scenes);
  const auto alphas = parse_numbers(a.alphas, "alphas");
  if (alphas.empty()) throw InputError("alphas: need at least one value");
  for (double x : alphas)
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("alphas: values must be in [0, 1]");
  std::vector<std::uint64_t> seeds;
  if (a.seeds.empty()) {
    for (std::size_t i = 0; i < a.trials; ++i) seeds.push_back(i);
  } else {
    seeds = parse_seeds(a.seeds);
  }
  if (seeds.empty()) throw InputError("benchmark: need at least one trial");

  const auto records = run_benchmark(scenes, alphas, seeds, a.threads);
  const std::string csv = format_benchmark_csv(records);
  if (a.out_csv.empty()) {
    out << csv;
  } else {
    write_file(a.out_csv, csv);
  }
  if (!a.out_json.empty()) write_file(a.out_json, aggregate_json(aggregate(records)).dump(2) + "\n");
  if (!a.out_timing.empty()) write_file(a.out_timing, format_timing_csv(records));
  return kExitOk;
}

struct ManipMapArgs {
  CloudFlags cloud;
  RobotFlags robot;
  std::string out, home, jacobian_mode = "auto";
  std::size_t subsample = 1;
  std::size_t pca_k = kDefaultPcaNeighbors;
  double standoff = 0.0;
};

/// x,y,z,w,ik_ok for every subsample-th cloud point; IK from the home seed.
inline std::string manipulability_map_csv(const SurfaceIndex& index, const KinematicChain& chain,
                                          const JointConfig& home, std::size_t subsample, std::size_t pca_k,
                                          double standoff, JacobianMode mode) {
  std::ostringstream out;
  out << "x,y,z,w,ik_ok\n";
  const auto& pts = index.points();
  for (std::size_t i = 0; i < pts.size(); i += subsample) {
    const Vec3& p = pts[i];
    std::optional<double> w;
    try {
      const auto frame = tangent_frame(index, p, pca_k);
      const auto ik = solve_ik(chain, tool_target_from_surface(frame, standoff), home);
      if (ik.converged && chain.within_limits(ik.q)) w = manipulability(chain, ik.q, mode);
    } catch (const SurfaceError&) {
    }
    out << csv_number(p.x()) << ',' << csv_number(p.y()) << ',' << csv_number(p.z()) << ','
        << (w ? csv_number(*w) : "") << ',' << (w ? "true" : "false") << '\n';
  }
  return out.str();
}

inline int cmd_manip_map(const ManipMapArgs& a, std::ostream& out) {
  const SurfaceIndex index = a.cloud.load();
  const KinematicChain chain = a.robot.load();
  if (a.subsample < 1) throw InputError("subsample must be at least 1");
  if (a.pca_k < 3) throw InputError("pca-k must be at least 3");
  if (!(a.standoff >= 0.0)) throw InputError("standoff must be non-negative");
  JointConfig home = JointConfig::Zero(static_cast<Eigen::Index>(chain.dof()));
  if (!a.home.empty()) {
    const auto v = parse_numbers(a.home, "home");
    if (v.size() != chain.dof()) throw InputError("home: expected " + std::to_string(chain.dof()) + " values");
    home = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const std::string csv =
      manipulability_map_csv(index, chain, chain.clamp(home), a.subsample, a.pca_k, a.standoff, jacobian_mode(a.jacobian_mode));
  if (a.out.empty()) {
    out << csv;
  } else {
    write_file(a.out, csv);
  }
  return kExitOk;
}

struct SynthArgs {
  std::string shape = "plane";
  std::string params;
  std::size_t samples = 10000;
  double noise = 0.0;
  std::string pose;
  std::string workspace;
  std::uint64_t seed = 0;
  std::string out;
};

/// "width=1,length=2"
inline ShapeParams parse_shape_params(std::string_view text) {
  ShapeParams p;
  if (text.empty()) return p;
  const std::map<std::string, double*> slots{{"width", &p.width},   {"length", &p.length}, {"radius", &p.radius},
                                             {"height", &p.height}, {"arc", &p.arc},       {"cap_angle", &p.cap_angle}};
  for (const auto& cell : split_csv_line(text)) {
    const auto eq = cell.find('=');
    if (eq == std::string::npos) throw InputError("params: expected key=value, got '" + cell + "'");
    const std::string key(detail::trim(std::string_view(cell).substr(0, eq)));
    const auto it = slots.find(key);
    if (it == slots.end()) throw InputError("params: unknown key '" + key + "'");
    const auto v = detail::parse_double(detail::trim(std::string_view(cell).substr(eq + 1)));
    if (!v || !std::isfinite(*v)) throw InputError("params: bad value for '" + key + "'");
    *it->second = *v;
  }
  return p;
}

inline int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SceneSpec spec;
  try {
    spec.shape = scene_shape_from_string(a.shape);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  spec.params = parse_shape_params(a.params);
  spec.sample_count = a.samples;
  spec.noise_sigma = a.noise;
  if (!a.pose.empty()) {
    const auto v = parse_numbers(a.pose, "pose");
    if (v.size() != 6) throw InputError("pose: expected x,y,z,roll,pitch,yaw");
    spec.pose = Origin{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
  }
  if (!a.workspace.empty()) spec.workspace = parse_box(a.workspace);
  std::vector<Vec3> pts;
  try {
    pts = generate_scene_points(spec, a.seed);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  const std::string ply = format_ply_ascii(pts);
  if (a.out.empty()) {
    out << ply;
  } else {
    write_file(a.out, ply);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Dispatcher.

/// Replaces `--config FILE` after the subcommand name by the file's entries,
/// placed before the remaining flags so later flags win. Top-level keys and
/// keys under a section named after the subcommand are used.
inline std::vector<std::string> expand_config(std::vector<std::string> args) {
  if (args.empty()) return args;
  std::optional<std::string> file;
  std::vector<std::string> rest;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!file) return args;
  std::vector<std::string> out{args.front()};
  for (const auto& item : CLI::ConfigTOML().from_file(*file)) {
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == args.front())) continue;
    if (item.name == "++" || item.name == "--") continue;  // section markers
    out.push_back("--" + item.name);
    for (const auto& v : item.inputs) out.push_back(v);
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

/// Runs the CLI on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface path planning with a manipulability-aware RRT*", "rrtrmm"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_file;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "TOML-style key = value file supplying any flag; flags win");
  };

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "plan a path between two surface points");
  add_config(plan);
  plan_args.cloud.add_to(*plan);
  plan_args.robot.add_to(*plan);
  plan_args.planner.add_to(*plan);
  plan->add_option("--start", plan_args.start, "start point x,y,z (snapped to the cloud)")->required();
  plan->add_option("--goal", plan_args.goal, "goal point x,y,z (snapped to the cloud)")->required();
  plan->add_option("--out-json", plan_args.out_json, "plan result JSON");
  plan->add_option("--out-csv", plan_args.out_csv, "waypoint CSV");

  BenchmarkArgs bench_args;
  auto* bench = app.add_subcommand("benchmark", "paired trials over scenes and cost blends");
  add_config(bench);
  bench->add_option("--scenes", bench_args.scenes, "scene file (JSON)")->required();
  bench->add_option("--alphas", bench_args.alphas, "comma-separated alpha values")->capture_default_str();
  bench->add_option("--trials", bench_args.trials, "trials per scene when --seeds is absent (seeds 0..N-1)")->capture_default_str();
  bench->add_option("--seeds", bench_args.seeds, "comma-separated seeds, one trial each");
  bench->add_option("--threads", bench_args.threads, "worker threads; 0 = hardware concurrency")->capture_default_str();
  bench->add_option("--out-csv", bench_args.out_csv, "per-trial records (default: standard output)");
  bench->add_option("--out-json", bench_args.out_json, "aggregate quartiles JSON");
  bench->add_option("--out-timing", bench_args.out_timing, "per-trial runtime CSV");

  ManipMapArgs map_args;
  auto* mmap = app.add_subcommand("manip-map", "manipulability at every cloud point");
  add_config(mmap);
  map_args.cloud.add_to(*mmap);
  map_args.robot.add_to(*mmap);
  mmap->add_option("--out", map_args.out, "output CSV (default: standard output)");
  mmap->add_option("--home", map_args.home, "IK seed, comma separated");
  mmap->add_option("--subsample", map_args.subsample, "use every N-th point")->capture_default_str();
  mmap->add_option("--pca-k", map_args.pca_k, "neighbours for tangent-plane fits")->capture_default_str();
  mmap->add_option("--standoff", map_args.standoff, "tool stand-off (m)")->capture_default_str();
  mmap->add_option("--jacobian-mode", map_args.jacobian_mode, "auto, full or position")->capture_default_str();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "sample a synthetic surface into an ASCII PLY file");
  add_config(synth);
  synth->add_option("--shape", synth_args.shape, "plane, cylinder or sphere_cap")->capture_default_str();
  synth->add_option("--params", synth_args.params, "shape parameters, e.g. width=1,length=2");
  synth->add_option("--samples", synth_args.samples, "number of points")->capture_default_str();
  synth->add_option("--noise", synth_args.noise, "normal noise sigma (m)")->capture_default_str();
  synth->add_option("--pose", synth_args.pose, "x,y,z,roll,pitch,yaw into the robot frame");
  synth->add_option("--workspace", synth_args.workspace, "keep points inside x0,y0,z0,x1,y1,z1");
  synth->add_option("--seed", synth_args.seed, "random seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "output PLY (default: standard output)");

  try {
    const auto expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_args, out);
    if (bench->parsed()) return cmd_benchmark(bench_args, out);
    if (mmap->parsed()) return cmd_manip_map(map_args, out);
    return cmd_synth(synth_args, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const CloudParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const RobotParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitInput;
}

}  // namespace rrtrmm::cli

#endif  // RRTRMM_CLI_COMMANDS_HPP
