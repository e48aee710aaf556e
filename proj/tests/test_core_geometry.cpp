// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fdepth {
namespace {

CalibratedCamera simple_camera() {
  CalibratedCamera cam;
  cam.fx = cam.fy = 100.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.image_width = 640;
  cam.image_height = 480;
  return cam;
}

TEST(Projection, PrincipalAxisPoint) {
  const auto pts = project_point_cloud(PointCloud{{0, 0, 2, 0}}, simple_camera());
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0], (ProjectedPoint{320, 240, 2.0}));
}

TEST(Projection, OffAxisPointHandComputed) {
  // u = 100 * 1.0 / 2 + 320 = 370, v = 100 * 0.5 / 2 + 240 = 265.
  const auto pts = project_point_cloud(PointCloud{{1.0, 0.5, 2.0, 0}}, simple_camera());
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0], (ProjectedPoint{370, 265, 2.0}));
}

TEST(Projection, BehindCameraDropped) {
  EXPECT_TRUE(project_point_cloud(PointCloud{{0, 0, -1, 0}}, simple_camera()).empty());
  EXPECT_TRUE(project_point_cloud(PointCloud{{0, 0, 0, 0}}, simple_camera()).empty());
}

TEST(Projection, OutOfBoundsDropped) {
  EXPECT_TRUE(project_point_cloud(PointCloud{{10, 0, 1, 0}}, simple_camera()).empty());
}

TEST(Projection, RoundsHalfAwayFromZero) {
  CalibratedCamera cam = simple_camera();
  cam.cx = 0.0;
  // u = 100 * 0.005 / 1 = 0.5 -> 1.
  auto pts = project_point_cloud(PointCloud{{0.005, 0, 1, 0}}, cam);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].u, 1);
  // u = -0.5 -> -1, outside.
  EXPECT_TRUE(project_point_cloud(PointCloud{{-0.005, 0, 1, 0}}, cam).empty());
  // u = -0.4 -> -0 -> column 0.
  pts = project_point_cloud(PointCloud{{-0.004, 0, 1, 0}}, cam);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].u, 0);
}

TEST(Projection, MatchesHomogeneousOracle) {
  std::mt19937_64 rng(7);
  for (int c = 0; c < 20; ++c) {
    const CalibratedCamera cam = testing::random_camera(rng);
    ASSERT_NO_THROW(validate(cam));
    const PointCloud cloud = testing::random_cloud_for(cam, rng, 1000);
    const auto got = project_point_cloud(cloud, cam);
    const auto want = testing::oracle_projection(cloud, cam);
    ASSERT_EQ(got, want) << "camera " << c;
  }
}

TEST(Projection, PrincipalAxisAnyDepth) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> z(0.01, 100.0);
  std::uniform_real_distribution<double> c(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    CalibratedCamera cam = simple_camera();
    cam.cx = c(rng) * 639;
    cam.cy = c(rng) * 479;
    const auto pts = project_point_cloud(PointCloud{{0, 0, z(rng), 0}}, cam);
    ASSERT_EQ(pts.size(), 1u);
    EXPECT_EQ(pts[0].u, static_cast<int>(std::round(cam.cx)));
    EXPECT_EQ(pts[0].v, static_cast<int>(std::round(cam.cy)));
  }
}

TEST(Projection, DoublingFxDoublesHorizontalOffset) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    CalibratedCamera cam = testing::random_camera(rng);
    cam.skew = 0.0;
    const LidarPoint p = testing::random_cloud(rng, 1)[0];
    const ImagePlanePoint a = project_to_image_plane(p, cam);
    cam.fx *= 2.0;
    const ImagePlanePoint b = project_to_image_plane(p, cam);
    if (std::abs(a.depth) < 1e-3) continue;
    const double da = a.u - cam.cx;
    const double db = b.u - cam.cx;
    EXPECT_NEAR(db, 2.0 * da, 1e-9 * std::max(1.0, std::abs(db)));
  }
}

TEST(Projection, DuplicationInvariance) {
  std::mt19937_64 rng(5);
  const CalibratedCamera cam = testing::random_camera(rng);
  const PointCloud cloud = testing::random_cloud(rng, 500);
  PointCloud twice = cloud;
  twice.insert(twice.end(), cloud.begin(), cloud.end());
  auto once = project_point_cloud(cloud, cam);
  auto expect = once;
  expect.insert(expect.end(), once.begin(), once.end());
  EXPECT_EQ(project_point_cloud(twice, cam), expect);
}

TEST(Projection, OutputInvariants) {
  std::mt19937_64 rng(9);
  for (int c = 0; c < 5; ++c) {
    const CalibratedCamera cam = testing::random_camera(rng);
    for (const auto& p : project_point_cloud(testing::random_cloud_for(cam, rng, 2000), cam)) {
      EXPECT_GE(p.u, 0);
      EXPECT_LT(p.u, cam.image_width);
      EXPECT_GE(p.v, 0);
      EXPECT_LT(p.v, cam.image_height);
      EXPECT_GT(p.depth, 0.0);
    }
  }
}

const char* kIdentityCalib =
    "# identity\n"
    "fx 615\nfy 615\ncx 320\ncy 240\nwidth 640\nheight 480\n"
    "rotation 1 0 0 0 1 0 0 0 1\n"
    "translation 0 0 0\n";

TEST(Calibration, IdentityFile) {
  const CalibratedCamera cam = parse_calibration(kIdentityCalib, "c.txt");
  EXPECT_EQ(cam.rotation, Eigen::Matrix3d::Identity());
  EXPECT_EQ(cam.translation, Eigen::Vector3d::Zero());
  EXPECT_EQ(cam.skew, 0.0);
  EXPECT_EQ(cam.image_width, 640);
  Eigen::Matrix3d k;
  k << 615, 0, 320, 0, 615, 240, 0, 0, 1;
  EXPECT_EQ(cam.intrinsic_matrix(), k);
}

TEST(Calibration, ReflectionRejected) {
  const std::string text =
      "fx 615\nfy 615\ncx 320\ncy 240\nwidth 640\nheight 480\n"
      "rotation 1 0 0 0 1 0 0 0 -1\ntranslation 0 0 0\n";
  EXPECT_THROW(parse_calibration(text, "c.txt"), InvalidRotation);
}

TEST(Calibration, NonOrthonormalRejected) {
  const std::string text =
      "fx 615\nfy 615\ncx 320\ncy 240\nwidth 640\nheight 480\n"
      "rotation 1 0.01 0 0 1 0 0 0 1\ntranslation 0 0 0\n";
  EXPECT_THROW(parse_calibration(text, "c.txt"), InvalidRotation);
}

TEST(Calibration, BadIntrinsicsRejected) {
  const std::string base = "fy 615\ncx 320\ncy 240\nwidth 640\nheight 480\n"
                           "rotation 1 0 0 0 1 0 0 0 1\ntranslation 0 0 0\n";
  EXPECT_THROW(parse_calibration("fx 0\n" + base, "c.txt"), InvalidIntrinsics);
  EXPECT_THROW(parse_calibration("fx -3\n" + base, "c.txt"), InvalidIntrinsics);
  const std::string outside = "fx 615\nfy 615\ncx 700\ncy 240\nwidth 640\nheight 480\n"
                              "rotation 1 0 0 0 1 0 0 0 1\ntranslation 0 0 0\n";
  EXPECT_THROW(parse_calibration(outside, "c.txt"), InvalidIntrinsics);
}

TEST(Calibration, MalformedFilesNameLineAndField) {
  try {
    parse_calibration("fx 615\nfy abc\n", "c.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "c.txt");
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("fy"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_calibration("fx 615\nfx 615\n", "c.txt"), ParseError);
  EXPECT_THROW(parse_calibration("focal 615\n", "c.txt"), ParseError);
  EXPECT_THROW(parse_calibration("fx 615\n", "c.txt"), ParseError);
  EXPECT_THROW(parse_calibration("rotation 1 0 0\n", "c.txt"), ParseError);
}

TEST(Calibration, RoundTripIsIdentity) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const CalibratedCamera cam = testing::random_camera(rng);
    EXPECT_EQ(parse_calibration(serialize_calibration(cam)), cam);
  }
}

}  // namespace
}  // namespace fdepth
