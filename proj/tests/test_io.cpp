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

#include <gtest/gtest.h>

#include <cmath>

#include "support/fixtures.hpp"

namespace rrtrmm {
namespace {

using testing::test_data_path;

CloudParseError cloud_error(std::string_view text, CloudFormat format) {
  try {
    cloud_from_text(text, format);
  } catch (const CloudParseError& e) {
    return e;
  }
  ADD_FAILURE() << "cloud parsed without error";
  return CloudParseError(0, "");
}

TEST(ReadPly, VerticesWithExtraPropertiesAndFaces) {
  const auto pts = parse_ply_ascii(read_text_file(test_data_path("tri.ply")));
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0], Vec3(0, 0, 0));
  EXPECT_EQ(pts[1], Vec3(1, 0, 0));
  EXPECT_EQ(pts[2], Vec3(0, 1, 0.5));
  const auto cloud = read_cloud(test_data_path("tri.ply"), CloudFormat::ply_ascii);
  EXPECT_EQ(cloud.size(), 3u);
}

TEST(ReadPly, CountMismatchIsLocated) {
  const std::string text = read_text_file(test_data_path("short.ply"));
  const auto e = cloud_error(text, CloudFormat::ply_ascii);
  EXPECT_EQ(e.line(), 10);
  EXPECT_NE(std::string(e.what()).find("declares 4 rows, found 3"), std::string::npos) << e.what();
}

TEST(ReadPly, BinaryRejected) {
  const auto e = cloud_error(read_text_file(test_data_path("binary.ply")), CloudFormat::ply_ascii);
  EXPECT_EQ(e.line(), 2);
}

TEST(ReadPly, NonNumericFieldIsLocated) {
  const auto e = cloud_error(read_text_file(test_data_path("bad_field.ply")), CloudFormat::ply_ascii);
  EXPECT_EQ(e.line(), 9);
}

TEST(ReadPly, HeaderErrors) {
  EXPECT_THROW(parse_ply_ascii("plx\n"), CloudParseError);
  EXPECT_THROW(parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"), CloudParseError);
  EXPECT_THROW(parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nend_header\n1 2\n"),
               CloudParseError);
  EXPECT_THROW(parse_ply_ascii("ply\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n1 2 3\n"),
               CloudParseError);
  EXPECT_THROW(parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n1 2 3\n4 5 6\n"),
               CloudParseError);
  EXPECT_THROW(parse_ply_ascii("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\nend_header\n1 2\n"),
               CloudParseError);
}

TEST(ReadPcd, DropsNanPoints) {
  const std::string text = read_text_file(test_data_path("cloud.pcd"));
  EXPECT_EQ(parse_pcd_ascii(text).size(), 5u);
  const auto cloud = cloud_from_text(text, CloudFormat::pcd_ascii);
  ASSERT_EQ(cloud.size(), 4u);
  EXPECT_EQ(cloud.points()[3], Vec3(1, 1, 0.25));
}

TEST(ReadPcd, CountMismatchIsLocated) {
  const auto e = cloud_error(read_text_file(test_data_path("short.pcd")), CloudFormat::pcd_ascii);
  EXPECT_GT(e.line(), 0);
  EXPECT_NE(std::string(e.what()).find("declared 4 points but found 3"), std::string::npos) << e.what();
}

TEST(ReadPcd, BinaryRejected) {
  const auto e = cloud_error(read_text_file(test_data_path("binary.pcd")), CloudFormat::pcd_ascii);
  EXPECT_EQ(e.line(), 9);
}

TEST(ReadPcd, CountColumnsWidenFields) {
  const auto pts = parse_pcd_ascii("FIELDS n x y z\nCOUNT 2 1 1 1\nPOINTS 1\nDATA ascii\n9 9 1 2 3\n");
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0], Vec3(1, 2, 3));
  EXPECT_THROW(parse_pcd_ascii("FIELDS x y\nPOINTS 1\nDATA ascii\n1 2\n"), CloudParseError);
  EXPECT_THROW(parse_pcd_ascii("FIELDS x y z\nDATA ascii\n1 2 3\n"), CloudParseError);
  EXPECT_THROW(parse_pcd_ascii("FIELDS x y z\nPOINTS 1\nDATA ascii\n1 2 3\n4 5 6\n"), CloudParseError);
}

TEST(ReadCloud, MissingFileThrows) {
  EXPECT_THROW(read_cloud(test_data_path("nope.ply"), CloudFormat::ply_ascii), std::runtime_error);
}

TEST(ReadCloud, TooFewPointsRejected) {
  EXPECT_THROW(cloud_from_text("FIELDS x y z\nPOINTS 2\nDATA ascii\n0 0 0\n1 0 0\n", CloudFormat::pcd_ascii),
               std::invalid_argument);
}

TEST(ReadCloud, WorkspaceFilterMatchesCount) {
  Rng rng(31);
  std::vector<Vec3> pts;
  for (int i = 0; i < 5000; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  const std::string text = format_ply_ascii(pts);
  CloudReadOptions opts;
  opts.workspace = Aabb{Vec3(-0.5, -0.2, 0.0), Vec3(0.7, 0.9, 0.4)};
  std::size_t expected = 0;
  for (const auto& p : pts)
    if (p.x() >= -0.5 && p.x() <= 0.7 && p.y() >= -0.2 && p.y() <= 0.9 && p.z() >= 0.0 && p.z() <= 0.4) ++expected;
  const auto cloud = cloud_from_text(text, CloudFormat::ply_ascii, opts);
  EXPECT_EQ(cloud.size(), expected);
  for (const auto& p : cloud.points()) EXPECT_TRUE(opts.workspace->contains(p));
}

TEST(WritePly, RoundTripIsExact) {
  Rng rng(2);
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(rng.normal(), rng.normal() * 1e-7, rng.uniform(-1e6, 1e6));
  const auto back = parse_ply_ascii(format_ply_ascii(pts));
  ASSERT_EQ(back.size(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i], pts[i]);
}

TEST(Csv, ParseAndLookup) {
  const auto t = parse_csv("a,b,c\n1,,3\r\n\n4,5,6\n");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.column("c"), 2u);
  EXPECT_EQ(t.rows[0][1], "");
  EXPECT_EQ(t.rows[1][2], "6");
  EXPECT_THROW(t.column("d"), std::out_of_range);
  EXPECT_THROW(parse_csv("a,b\n1,2,3\n"), CloudParseError);
  EXPECT_THROW(parse_csv(""), CloudParseError);
}

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.0, -1.5, 0.1, 1.0 / 3.0, 6.02214076e23, 5e-324}) {
    const auto parsed = detail::parse_double(csv_number(v));
    ASSERT_TRUE(parsed);
    EXPECT_EQ(*parsed, v);
  }
}

}  // namespace
}  // namespace rrtrmm
