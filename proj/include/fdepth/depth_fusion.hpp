// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_DEPTH_FUSION_HPP
#define FDEPTH_DEPTH_FUSION_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fdepth/core_geometry.hpp"
#include "fdepth/error.hpp"

namespace fdepth {

/// Row-major depth grid in meters. 0 means "no data".
class DepthImage {
 public:
  DepthImage() = default;
  DepthImage(int width, int height)
      : width_(width),
        height_(height),
        values_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0) {
    if (width < 1 || height < 1) throw InvalidArgument("depth image dimensions must be >= 1");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(int u, int v) const { return values_[index(u, v)]; }
  double& at(int u, int v) { return values_[index(u, v)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  bool contains(int u, int v) const noexcept {
    return u >= 0 && u < width_ && v >= 0 && v < height_;
  }

  bool operator==(const DepthImage&) const = default;

 private:
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

/// Which source supplies each fused pixel. Camera owns [near_min, camera_max),
/// LiDAR owns [near_min, range_max] for whatever the camera does not cover.
struct FusionPolicy {
  double near_min = 0.3;
  double camera_max = 3.0;
  double range_max = 6.0;
};

inline void validate(const FusionPolicy& p) {
  if (!(p.near_min > 0.0 && p.near_min < p.camera_max && p.camera_max <= p.range_max) ||
      !std::isfinite(p.range_max)) {
    throw InvalidPolicy("fusion policy requires 0 < near_min < camera_max <= range_max, got " +
                        detail::format_double(p.near_min) + "," +
                        detail::format_double(p.camera_max) + "," +
                        detail::format_double(p.range_max));
  }
}

/// Z-buffer rasterization: the nearest point wins each pixel.
inline DepthImage rasterize_to_depth(std::span<const ProjectedPoint> points, int width,
                                     int height) {
  DepthImage img(width, height);
  for (const ProjectedPoint& p : points) {
    if (!img.contains(p.u, p.v) || !(p.depth > 0.0)) continue;
    double& px = img.at(p.u, p.v);
    if (px == 0.0 || p.depth < px) px = p.depth;
  }
  return img;
}

/// LiDAR returns closer than near_min are dropped as well, so every output
/// is 0 or in [near_min, range_max].
inline double fuse_pixel(double camera, double lidar, const FusionPolicy& policy) noexcept {
  if (camera >= policy.near_min && camera < policy.camera_max) return camera;
  if (lidar >= policy.near_min && lidar <= policy.range_max) return lidar;
  return 0.0;
}

inline DepthImage fuse_depth(const DepthImage& camera, const DepthImage& lidar,
                             const FusionPolicy& policy = {}) {
  validate(policy);
  if (camera.width() != lidar.width() || camera.height() != lidar.height()) {
    throw DimensionMismatch("camera depth is " + std::to_string(camera.width()) + "x" +
                            std::to_string(camera.height()) + ", lidar depth is " +
                            std::to_string(lidar.width()) + "x" +
                            std::to_string(lidar.height()));
  }
  DepthImage out(camera.width(), camera.height());
  const auto cam = camera.values();
  const auto lid = lidar.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = fuse_pixel(cam[i], lid[i], policy);
  return out;
}

}  // namespace fdepth

#endif  // FDEPTH_DEPTH_FUSION_HPP
