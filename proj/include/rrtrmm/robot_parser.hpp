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

// Robot descriptions: a kinematics-only URDF subset and a line-oriented
// native format.
//
// Native format, one joint per line, SI units and radians, '#' comments:
//
//   revolute tx ty tz roll pitch yaw ax ay az lower upper
//   tool tx ty tz roll pitch yaw          (optional, last)

#ifndef RRTRMM_ROBOT_PARSER_HPP
#define RRTRMM_ROBOT_PARSER_HPP

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "rrtrmm/geometry.hpp"
#include "rrtrmm/kinematics.hpp"

namespace rrtrmm {

class RobotParseError : public std::runtime_error {
 public:
  enum class Kind { parse, schema, unsupported_joint, unsupported_topology };

  RobotParseError(Kind kind, std::string location, const std::string& message)
      : std::runtime_error(location.empty() ? message : location + ": " + message),
        kind_(kind),
        location_(std::move(location)) {}

  Kind kind() const { return kind_; }
  /// "line N" or "joint 'name'"; empty only when the whole document is at fault.
  const std::string& location() const { return location_; }

 private:
  Kind kind_;
  std::string location_;
};

enum class RobotFormat { urdf_subset, native };

struct RobotDescription {
  std::string name;
  KinematicChain chain;
  RobotFormat source_format;
};

inline constexpr double kContinuousJointLimit = 4.0 * M_PI;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Axis values already unit within rounding are kept bit-for-bit so that a
/// serialized chain parses back identically.
inline Vec3 unit_axis(const Vec3& a) {
  const double n = a.norm();
  return std::abs(n - 1.0) <= 1e-12 ? a : Vec3(a / n);
}

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses the native line format.
inline RobotDescription parse_native(std::string_view text, std::string name = "robot") {
  using Kind = RobotParseError::Kind;
  std::vector<RevoluteJoint> joints;
  std::optional<Origin> tool;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = detail::split_ws(detail::trim(line));
    if (fields.empty()) continue;

    std::vector<double> values;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) throw RobotParseError(Kind::parse, where, "not a number: '" + std::string(fields[i]) + "'");
      if (!std::isfinite(*v)) throw RobotParseError(Kind::parse, where, "non-finite value");
      values.push_back(*v);
    }
    if (tool) throw RobotParseError(Kind::parse, where, "content after the tool line");
    if (fields[0] == "revolute") {
      if (values.size() != 11)
        throw RobotParseError(Kind::parse, where,
                              "revolute line needs 11 numbers, got " + std::to_string(values.size()));
      RevoluteJoint j;
      j.name = "joint" + std::to_string(joints.size() + 1);
      j.origin = {{values[0], values[1], values[2]}, {values[3], values[4], values[5]}};
      const Vec3 axis(values[6], values[7], values[8]);
      if (axis.norm() == 0.0) throw RobotParseError(Kind::parse, where, "zero rotation axis");
      j.axis = detail::unit_axis(axis);
      j.lower = values[9];
      j.upper = values[10];
      if (!(j.lower < j.upper)) throw RobotParseError(Kind::parse, where, "lower limit must be below upper limit");
      joints.push_back(std::move(j));
    } else if (fields[0] == "tool") {
      if (values.size() != 6)
        throw RobotParseError(Kind::parse, where,
                              "tool line needs 6 numbers, got " + std::to_string(values.size()));
      tool = Origin{{values[0], values[1], values[2]}, {values[3], values[4], values[5]}};
    } else {
      throw RobotParseError(Kind::parse, where, "unknown record '" + std::string(fields[0]) + "'");
    }
  }
  if (joints.empty()) throw RobotParseError(Kind::schema, "", "no revolute joints");
  return {std::move(name), KinematicChain(std::move(joints), tool.value_or(Origin{})),
          RobotFormat::native};
}

/// Canonical native text for a chain: one joint per line, shortest
/// round-trip number formatting, tool line always present.
inline std::string serialize_native(const KinematicChain& chain, std::string_view name = {}) {
  std::ostringstream out;
  if (!name.empty()) out << "# " << name << "\n";
  auto put = [&](const Vec3& v) {
    for (int i = 0; i < 3; ++i) out << ' ' << detail::format_double(v[i]);
  };
  for (const auto& j : chain.joints()) {
    out << "revolute";
    put(j.origin.xyz);
    put(j.origin.rpy);
    put(j.axis);
    out << ' ' << detail::format_double(j.lower) << ' ' << detail::format_double(j.upper) << '\n';
  }
  out << "tool";
  put(chain.tool().xyz);
  put(chain.tool().rpy);
  out << '\n';
  return out.str();
}

namespace detail {

inline std::optional<std::string> attribute(const boost::property_tree::ptree& node,
                                            const std::string& path) {
  if (const auto v = node.get_optional<std::string>(path)) return *v;
  return std::nullopt;
}

inline Vec3 parse_triplet(const std::optional<std::string>& attr, const Vec3& fallback,
                          const std::string& where, const char* what) {
  if (!attr) return fallback;
  const auto fields = split_ws(trim(*attr));
  if (fields.size() != 3)
    throw RobotParseError(RobotParseError::Kind::schema, where,
                          std::string(what) + " needs three numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    const auto d = parse_double(fields[i]);
    if (!d || !std::isfinite(*d))
      throw RobotParseError(RobotParseError::Kind::schema, where,
                            std::string(what) + " has an invalid number '" + std::string(fields[i]) + "'");
    v[i] = *d;
  }
  return v;
}

inline double parse_scalar(const std::optional<std::string>& attr, const std::string& where,
                           const char* what) {
  if (!attr) throw RobotParseError(RobotParseError::Kind::schema, where, std::string("missing ") + what);
  const auto d = parse_double(trim(*attr));
  if (!d || !std::isfinite(*d))
    throw RobotParseError(RobotParseError::Kind::schema, where, std::string("invalid ") + what);
  return *d;
}

}  // namespace detail

/// Extracts the single root-to-tip chain of a URDF document. Fixed joints
/// are folded into the next revolute joint's origin; trailing fixed joints
/// become the tool transform. Meshes, inertials and the rest are ignored.
inline RobotDescription parse_urdf_subset(const std::string& text) {
  namespace pt = boost::property_tree;
  using Kind = RobotParseError::Kind;
  pt::ptree doc;
  try {
    std::istringstream in(text);
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw RobotParseError(Kind::parse, "line " + std::to_string(e.line()), e.message());
  }
  const auto robot = doc.get_child_optional("robot");
  if (!robot) throw RobotParseError(Kind::schema, "", "missing <robot> element");
  const std::string name = robot->get<std::string>("<xmlattr>.name", "robot");

  struct UrdfJoint {
    std::string name, type, parent, child;
    Origin origin;
    std::optional<Vec3> axis;
    std::optional<std::string> lower, upper;
    bool has_limit = false;
  };
  std::vector<UrdfJoint> joints;
  std::set<std::string> links;
  for (const auto& [tag, node] : *robot) {
    if (tag == "link") {
      links.insert(node.get<std::string>("<xmlattr>.name", ""));
      continue;
    }
    if (tag != "joint") continue;
    UrdfJoint j;
    j.name = node.get<std::string>("<xmlattr>.name", "#" + std::to_string(joints.size()));
    const std::string where = "joint '" + j.name + "'";
    j.type = node.get<std::string>("<xmlattr>.type", "");
    j.parent = node.get<std::string>("parent.<xmlattr>.link", "");
    j.child = node.get<std::string>("child.<xmlattr>.link", "");
    if (j.parent.empty() || j.child.empty())
      throw RobotParseError(Kind::schema, where, "missing parent or child link");
    if (j.type == "prismatic" || j.type == "floating" || j.type == "planar")
      throw RobotParseError(Kind::unsupported_joint, where, "joint type '" + j.type + "' is not supported");
    if (j.type != "revolute" && j.type != "continuous" && j.type != "fixed")
      throw RobotParseError(Kind::schema, where, "unknown joint type '" + j.type + "'");
    j.origin.xyz = detail::parse_triplet(detail::attribute(node, "origin.<xmlattr>.xyz"),
                                         Vec3::Zero(), where, "origin xyz");
    j.origin.rpy = detail::parse_triplet(detail::attribute(node, "origin.<xmlattr>.rpy"),
                                         Vec3::Zero(), where, "origin rpy");
    if (const auto axis = detail::attribute(node, "axis.<xmlattr>.xyz"))
      j.axis = detail::parse_triplet(axis, Vec3::Zero(), where, "axis xyz");
    if (node.get_child_optional("limit")) {
      j.has_limit = true;
      j.lower = detail::attribute(node, "limit.<xmlattr>.lower");
      j.upper = detail::attribute(node, "limit.<xmlattr>.upper");
    }
    links.insert(j.parent);
    links.insert(j.child);
    joints.push_back(std::move(j));
  }

  std::map<std::string, std::vector<std::size_t>> children;
  std::map<std::string, std::size_t> parent_joint;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    children[joints[i].parent].push_back(i);
    if (!parent_joint.emplace(joints[i].child, i).second)
      throw RobotParseError(Kind::unsupported_topology, "link '" + joints[i].child + "'",
                            "link has more than one parent joint");
  }
  for (const auto& [link, kids] : children)
    if (kids.size() > 1)
      throw RobotParseError(Kind::unsupported_topology, "link '" + link + "'",
                            "branching kinematic tree (" + std::to_string(kids.size()) + " child joints)");
  std::vector<std::string> roots;
  for (const auto& l : links)
    if (!parent_joint.count(l)) roots.push_back(l);
  if (roots.size() != 1)
    throw RobotParseError(Kind::unsupported_topology, "",
                          "expected exactly one root link, found " + std::to_string(roots.size()));

  std::vector<RevoluteJoint> chain;
  Eigen::Isometry3d pending = Eigen::Isometry3d::Identity();
  bool pending_identity = true;
  std::string link = roots.front();
  std::size_t visited = 0;
  while (children.count(link)) {
    const UrdfJoint& j = joints[children[link].front()];
    if (++visited > joints.size())
      throw RobotParseError(Kind::unsupported_topology, "", "kinematic loop");
    const std::string where = "joint '" + j.name + "'";
    if (j.type == "fixed") {
      pending = pending * j.origin.transform();
      pending_identity = false;
    } else {
      if (!j.axis) throw RobotParseError(Kind::schema, where, "revolute joint without <axis>");
      if (j.axis->norm() == 0.0) throw RobotParseError(Kind::schema, where, "zero rotation axis");
      RevoluteJoint r;
      r.name = j.name;
      r.origin = pending_identity ? j.origin : Origin::from_transform(pending * j.origin.transform());
      r.axis = detail::unit_axis(*j.axis);
      if (j.type == "continuous") {
        r.lower = -kContinuousJointLimit;
        r.upper = kContinuousJointLimit;
      } else {
        if (!j.has_limit) throw RobotParseError(Kind::schema, where, "revolute joint without <limit>");
        r.lower = detail::parse_scalar(j.lower, where, "limit lower");
        r.upper = detail::parse_scalar(j.upper, where, "limit upper");
        if (!(r.lower < r.upper))
          throw RobotParseError(Kind::schema, where, "lower limit must be below upper limit");
      }
      chain.push_back(std::move(r));
      pending = Eigen::Isometry3d::Identity();
      pending_identity = true;
    }
    link = j.child;
  }
  if (chain.empty()) throw RobotParseError(Kind::schema, "", "no revolute or continuous joints");
  return {name,
          KinematicChain(std::move(chain),
                         pending_identity ? Origin{} : Origin::from_transform(pending)),
          RobotFormat::urdf_subset};
}

}  // namespace rrtrmm

#endif  // RRTRMM_ROBOT_PARSER_HPP
