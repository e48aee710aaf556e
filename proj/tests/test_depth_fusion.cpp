// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fdepth {
namespace {

TEST(Rasterize, ZBufferKeepsMinimum) {
  const std::vector<ProjectedPoint> pts{{5, 5, 4.0}, {5, 5, 3.5}, {5, 5, 3.9}};
  const DepthImage img = rasterize_to_depth(pts, 10, 10);
  EXPECT_EQ(img.at(5, 5), 3.5);
}

TEST(Rasterize, EmptyGivesZeros) {
  const DepthImage img = rasterize_to_depth({}, 8, 6);
  for (double v : img.values()) EXPECT_EQ(v, 0.0);
}

TEST(Rasterize, SingleWrite) {
  const std::vector<ProjectedPoint> pts{{10, 20, 2.25}};
  const DepthImage img = rasterize_to_depth(pts, 64, 48);
  int nonzero = 0;
  for (double v : img.values()) nonzero += v != 0.0;
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(img.at(10, 20), 2.25);
}

TEST(Rasterize, OrderIndependent) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> u(0, 19);
  std::uniform_real_distribution<double> d(0.1, 9.0);
  std::vector<ProjectedPoint> pts(500);
  for (auto& p : pts) p = {u(rng), u(rng), d(rng)};
  const DepthImage a = rasterize_to_depth(pts, 20, 20);
  std::shuffle(pts.begin(), pts.end(), rng);
  EXPECT_EQ(rasterize_to_depth(pts, 20, 20), a);
}

TEST(Fusion, SpecExamples) {
  const FusionPolicy p;
  EXPECT_EQ(fuse_pixel(2.5, 0.0, p), 2.5);
  EXPECT_EQ(fuse_pixel(0.0, 4.2, p), 4.2);
  EXPECT_EQ(fuse_pixel(3.5, 3.6, p), 3.6);
  EXPECT_EQ(fuse_pixel(0.1, 0.0, p), 0.0);
  EXPECT_EQ(fuse_pixel(0.0, 7.0, p), 0.0);
}

// Written rule, restated as a table lookup over the two half-open bands.
double rule(double cam, double lid) {
  const bool cam_ok = cam >= 0.3 && cam < 3.0;
  const bool lid_ok = lid >= 0.3 && lid <= 6.0;
  return cam_ok ? cam : (lid_ok ? lid : 0.0);
}

TEST(Fusion, ExhaustiveRuleTable) {
  const double cams[] = {0.0, 0.1, 0.3, 2.9, 3.0, 3.5};
  const double lids[] = {0.0, 2.0, 3.5, 6.0, 7.0};
  DepthImage camera(6, 5);
  DepthImage lidar(6, 5);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 5; ++j) {
      camera.at(i, j) = cams[i];
      lidar.at(i, j) = lids[j];
    }
  }
  const DepthImage fused = fuse_depth(camera, lidar, FusionPolicy{});
  int checked = 0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 5; ++j, ++checked) {
      EXPECT_EQ(fused.at(i, j), rule(cams[i], lids[j])) << cams[i] << " / " << lids[j];
    }
  }
  EXPECT_EQ(checked, 30);
  EXPECT_EQ(fused.at(4, 2), 3.5);  // camera at 3.0 defers
  EXPECT_EQ(fused.at(2, 0), 0.3);  // near_min inclusive
  EXPECT_EQ(fused.at(0, 3), 6.0);  // range_max inclusive
}

TEST(Fusion, CloseLidarReturnsDropped) {
  const FusionPolicy p;
  EXPECT_EQ(fuse_pixel(0.0, 0.29, p), 0.0);
  EXPECT_EQ(fuse_pixel(0.0, 0.3, p), 0.3);
  EXPECT_EQ(fuse_pixel(0.1, 0.2, p), 0.0);
}

TEST(Fusion, OutputAlwaysZeroOrInRange) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(0.0, 10.0);
  DepthImage camera(40, 30);
  DepthImage lidar(40, 30);
  for (auto& v : camera.values()) v = d(rng) < 2.0 ? 0.0 : d(rng);
  for (auto& v : lidar.values()) v = d(rng) < 5.0 ? 0.0 : d(rng);
  const FusionPolicy p;
  const DepthImage fused = fuse_depth(camera, lidar, p);
  for (double v : fused.values()) {
    EXPECT_TRUE(v == 0.0 || (v >= p.near_min && v <= p.range_max)) << v;
  }
  const DepthImage only_camera = fuse_depth(camera, DepthImage(40, 30), p);
  for (std::size_t i = 0; i < camera.size(); ++i) {
    const double c = camera.values()[i];
    const bool keep = c >= p.near_min && c < p.camera_max;
    EXPECT_EQ(only_camera.values()[i], keep ? c : 0.0);
  }
}

TEST(Fusion, PixelwisePermutationCommutes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.0, 8.0);
  DepthImage camera(16, 16);
  DepthImage lidar(16, 16);
  for (auto& v : camera.values()) v = d(rng);
  for (auto& v : lidar.values()) v = d(rng);
  std::vector<std::size_t> perm(camera.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  DepthImage pc(16, 16);
  DepthImage pl(16, 16);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    pc.values()[i] = camera.values()[perm[i]];
    pl.values()[i] = lidar.values()[perm[i]];
  }
  const DepthImage fused = fuse_depth(camera, lidar);
  const DepthImage fused_perm = fuse_depth(pc, pl);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_EQ(fused_perm.values()[i], fused.values()[perm[i]]);
  }
}

TEST(Fusion, DimensionMismatch) {
  EXPECT_THROW(fuse_depth(DepthImage(4, 4), DepthImage(4, 5)), DimensionMismatch);
}

TEST(Fusion, InvalidPolicy) {
  EXPECT_THROW(fuse_depth(DepthImage(2, 2), DepthImage(2, 2), FusionPolicy{0.0, 3.0, 6.0}),
               InvalidPolicy);
  EXPECT_THROW(fuse_depth(DepthImage(2, 2), DepthImage(2, 2), FusionPolicy{0.3, 7.0, 6.0}),
               InvalidPolicy);
}

}  // namespace
}  // namespace fdepth
