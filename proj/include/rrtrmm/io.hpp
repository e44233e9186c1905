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

// File ingestion: ASCII PLY / PCD point clouds, robot description files and
// a minimal CSV reader/writer for the tool's own outputs.

#ifndef RRTRMM_IO_HPP
#define RRTRMM_IO_HPP

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rrtrmm/geometry.hpp"
#include "rrtrmm/robot_parser.hpp"
#include "rrtrmm/surface.hpp"

namespace rrtrmm {

class CloudParseError : public std::runtime_error {
 public:
  CloudParseError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class CloudFormat { ply_ascii, pcd_ascii };

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  /// Next line without the terminator; false at end of input.
  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) {
      line = text_.substr(pos_);
      pos_ = text_.size();
    } else {
      line = text_.substr(pos_, nl - pos_);
      pos_ = nl + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no_;
    return true;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

inline double parse_number(std::string_view tok, int line) {
  const auto lowered = std::string(tok);
  if (lowered == "nan" || lowered == "NaN" || lowered == "-nan")
    return std::numeric_limits<double>::quiet_NaN();
  const auto v = parse_double(tok);
  if (!v) throw CloudParseError(line, "non-numeric field '" + lowered + "'");
  return *v;
}

inline std::size_t parse_count(std::string_view tok, int line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw CloudParseError(line, "invalid count '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

/// Vertex positions of an ASCII PLY document. Other properties and elements
/// are skipped; binary encodings are rejected.
inline std::vector<Vec3> parse_ply_ascii(std::string_view text) {
  detail::LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || detail::trim(line) != "ply") throw CloudParseError(1, "missing 'ply' magic");

  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> properties;
    bool has_list = false;
  };
  std::vector<Element> elements;
  bool format_seen = false;
  for (;;) {
    if (!reader.next(line)) throw CloudParseError(reader.line_no(), "unterminated header");
    const auto f = detail::split_ws(detail::trim(line));
    if (f.empty()) continue;
    const int ln = reader.line_no();
    if (f[0] == "end_header") break;
    if (f[0] == "comment" || f[0] == "obj_info") continue;
    if (f[0] == "format") {
      if (f.size() < 2 || f[1] != "ascii")
        throw CloudParseError(ln, "only 'format ascii' is supported");
      format_seen = true;
    } else if (f[0] == "element") {
      if (f.size() != 3) throw CloudParseError(ln, "malformed element line");
      elements.push_back({std::string(f[1]), detail::parse_count(f[2], ln), {}, false});
    } else if (f[0] == "property") {
      if (elements.empty()) throw CloudParseError(ln, "property before any element");
      if (f.size() >= 2 && f[1] == "list") {
        if (f.size() != 5) throw CloudParseError(ln, "malformed list property");
        elements.back().has_list = true;
        elements.back().properties.emplace_back(f[4]);
      } else {
        if (f.size() != 3) throw CloudParseError(ln, "malformed property line");
        elements.back().properties.emplace_back(f[2]);
      }
    } else {
      throw CloudParseError(ln, "unknown header keyword '" + std::string(f[0]) + "'");
    }
  }
  if (!format_seen) throw CloudParseError(reader.line_no(), "missing format line");

  std::vector<Vec3> points;
  bool vertex_seen = false;
  for (const auto& el : elements) {
    const bool is_vertex = el.name == "vertex";
    int ix = -1, iy = -1, iz = -1;
    if (is_vertex) {
      vertex_seen = true;
      if (el.has_list) throw CloudParseError(0, "list properties on vertices are not supported");
      for (std::size_t i = 0; i < el.properties.size(); ++i) {
        if (el.properties[i] == "x") ix = static_cast<int>(i);
        if (el.properties[i] == "y") iy = static_cast<int>(i);
        if (el.properties[i] == "z") iz = static_cast<int>(i);
      }
      if (ix < 0 || iy < 0 || iz < 0) throw CloudParseError(0, "vertex element lacks x, y or z");
      points.reserve(el.count);
    }
    for (std::size_t row = 0; row < el.count; ++row) {
      do {
        if (!reader.next(line))
          throw CloudParseError(reader.line_no(), "element '" + el.name + "' declares " +
                                                      std::to_string(el.count) + " rows, found " +
                                                      std::to_string(row));
      } while (detail::trim(line).empty());
      if (!is_vertex) continue;
      const auto f = detail::split_ws(detail::trim(line));
      if (f.size() != el.properties.size())
        throw CloudParseError(reader.line_no(), "expected " + std::to_string(el.properties.size()) +
                                                    " fields, got " + std::to_string(f.size()));
      Vec3 p;
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = detail::parse_number(f[i], reader.line_no());
        if (static_cast<int>(i) == ix) p.x() = v;
        if (static_cast<int>(i) == iy) p.y() = v;
        if (static_cast<int>(i) == iz) p.z() = v;
      }
      points.push_back(p);
    }
  }
  if (!vertex_seen) throw CloudParseError(0, "no vertex element");
  while (reader.next(line))
    if (!detail::trim(line).empty()) throw CloudParseError(reader.line_no(), "trailing data after last element");
  return points;
}

/// Point positions of an ASCII PCD document (v0.7 header).
inline std::vector<Vec3> parse_pcd_ascii(std::string_view text) {
  detail::LineReader reader(text);
  std::string_view line;
  std::vector<std::string> fields;
  std::vector<std::size_t> counts;
  std::optional<std::size_t> declared;
  for (;;) {
    if (!reader.next(line)) throw CloudParseError(reader.line_no(), "unterminated header");
    const auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = detail::split_ws(t);
    const int ln = reader.line_no();
    if (f[0] == "VERSION" || f[0] == "SIZE" || f[0] == "TYPE" || f[0] == "WIDTH" ||
        f[0] == "HEIGHT" || f[0] == "VIEWPOINT") {
      continue;
    } else if (f[0] == "FIELDS") {
      for (std::size_t i = 1; i < f.size(); ++i) fields.emplace_back(f[i]);
    } else if (f[0] == "COUNT") {
      for (std::size_t i = 1; i < f.size(); ++i) counts.push_back(detail::parse_count(f[i], ln));
    } else if (f[0] == "POINTS") {
      if (f.size() != 2) throw CloudParseError(ln, "malformed POINTS line");
      declared = detail::parse_count(f[1], ln);
    } else if (f[0] == "DATA") {
      if (f.size() != 2 || f[1] != "ascii") throw CloudParseError(ln, "only 'DATA ascii' is supported");
      break;
    } else {
      throw CloudParseError(ln, "unknown header keyword '" + std::string(f[0]) + "'");
    }
  }
  if (!declared) throw CloudParseError(reader.line_no(), "missing POINTS");
  if (counts.empty()) counts.assign(fields.size(), 1);
  if (counts.size() != fields.size()) throw CloudParseError(reader.line_no(), "FIELDS and COUNT disagree");
  std::size_t columns = 0;
  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "x") ix = static_cast<int>(columns);
    if (fields[i] == "y") iy = static_cast<int>(columns);
    if (fields[i] == "z") iz = static_cast<int>(columns);
    columns += counts[i];
  }
  if (ix < 0 || iy < 0 || iz < 0) throw CloudParseError(reader.line_no(), "FIELDS lacks x, y or z");

  std::vector<Vec3> points;
  points.reserve(*declared);
  while (reader.next(line)) {
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto f = detail::split_ws(t);
    if (f.size() != columns)
      throw CloudParseError(reader.line_no(), "expected " + std::to_string(columns) + " fields, got " +
                                                  std::to_string(f.size()));
    if (points.size() == *declared)
      throw CloudParseError(reader.line_no(), "more points than the declared " + std::to_string(*declared));
    Vec3 p;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double v = detail::parse_number(f[i], reader.line_no());
      if (static_cast<int>(i) == ix) p.x() = v;
      if (static_cast<int>(i) == iy) p.y() = v;
      if (static_cast<int>(i) == iz) p.z() = v;
    }
    points.push_back(p);
  }
  if (points.size() != *declared)
    throw CloudParseError(reader.line_no(), "declared " + std::to_string(*declared) +
                                                " points but found " + std::to_string(points.size()));
  return points;
}

struct CloudReadOptions {
  Vec3 viewpoint = Vec3::Zero();
  std::optional<Aabb> workspace;
  double merge_tolerance = kDefaultMergeTolerance;
};

/// Parses, drops non-finite points (PCD uses NaN for missing returns),
/// applies the workspace filter and deduplicates.
inline PointCloud cloud_from_text(std::string_view text, CloudFormat format,
                                  const CloudReadOptions& opts = {}) {
  auto raw = format == CloudFormat::ply_ascii ? parse_ply_ascii(text) : parse_pcd_ascii(text);
  std::vector<Vec3> finite;
  finite.reserve(raw.size());
  for (const auto& p : raw)
    if (all_finite(p)) finite.push_back(p);
  if (opts.workspace) finite = filter_to_box(finite, *opts.workspace);
  return PointCloud(std::move(finite), opts.viewpoint, opts.merge_tolerance);
}

inline PointCloud read_cloud(const std::filesystem::path& path, CloudFormat format,
                             const CloudReadOptions& opts = {}) {
  return cloud_from_text(read_text_file(path), format, opts);
}

inline std::string format_ply_ascii(std::span<const Vec3> points) {
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\nelement vertex " << points.size()
      << "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : points)
    out << detail::format_double(p.x()) << ' ' << detail::format_double(p.y()) << ' '
        << detail::format_double(p.z()) << '\n';
  return out.str();
}

inline RobotDescription load_robot(const std::filesystem::path& path, RobotFormat format) {
  const std::string text = read_text_file(path);
  if (format == RobotFormat::urdf_subset) return parse_urdf_subset(text);
  return parse_native(text, path.stem().string());
}

/// Header plus rows of a comma-separated file without quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::out_of_range("csv: no column '" + std::string(name) + "'");
  }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  detail::LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (t.header.empty()) {
      t.header = std::move(cells);
      continue;
    }
    if (cells.size() != t.header.size())
      throw CloudParseError(reader.line_no(), "csv row has " + std::to_string(cells.size()) +
                                                  " cells, header has " + std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw CloudParseError(0, "csv: empty file");
  return t;
}

inline std::string csv_number(double v) { return detail::format_double(v); }

}  // namespace rrtrmm

#endif  // RRTRMM_IO_HPP
