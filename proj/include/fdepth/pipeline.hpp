// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_PIPELINE_HPP
#define FDEPTH_PIPELINE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdepth/cloud_interp.hpp"
#include "fdepth/core_geometry.hpp"
#include "fdepth/depth_fusion.hpp"
#include "fdepth/detail/text.hpp"
#include "fdepth/frame.hpp"
#include "fdepth/roi_estimators.hpp"

namespace fdepth {

/// How detections map to ROIs.
enum class RoiSource {
  kAuto,  // mask when the detection carries one, box otherwise
  kBox,   // always the box; masks ignored
  kMask,  // mask only; detections without a mask yield no estimate
};

struct PipelineOptions {
  Method method = Method::kAverage;
  double reduction = 0.0;
  FusionPolicy policy;
  bool interpolate = true;
  double azimuth_tolerance = kDefaultAzimuthTolerance;
  RoiSource roi_source = RoiSource::kAuto;
};

/// Projects (optionally densified) LiDAR points and z-buffers them.
inline DepthImage lidar_depth_image(std::span<const LidarPoint> cloud,
                                    const CalibratedCamera& cam, bool interpolate = true,
                                    double azimuth_tolerance = kDefaultAzimuthTolerance) {
  std::vector<ProjectedPoint> projected;
  if (interpolate) {
    const PointCloud dense = interpolate_point_cloud(cloud, azimuth_tolerance);
    projected = project_point_cloud(dense, cam);
  } else {
    projected = project_point_cloud(cloud, cam);
  }
  return rasterize_to_depth(projected, cam.image_width, cam.image_height);
}

/// interpolate -> project -> rasterize -> fuse.
inline DepthImage fuse_frame(const FrameBundle& frame, const PipelineOptions& opt = {}) {
  const CalibratedCamera& cam = frame.calibration;
  if (frame.camera_depth.width() != cam.image_width ||
      frame.camera_depth.height() != cam.image_height) {
    throw DimensionMismatch("camera depth is " + std::to_string(frame.camera_depth.width()) +
                            "x" + std::to_string(frame.camera_depth.height()) +
                            ", calibration expects " + std::to_string(cam.image_width) + "x" +
                            std::to_string(cam.image_height));
  }
  const DepthImage lidar = lidar_depth_image(frame.cloud, cam, opt.interpolate,
                                             opt.azimuth_tolerance);
  return fuse_depth(frame.camera_depth, lidar, opt.policy);
}

/// Estimator outcome for one detection; `estimate` is empty when the
/// estimator found no data.
struct ObjectEstimate {
  std::string object_id;
  std::optional<DepthEstimate> estimate;
};

inline std::optional<RoiSpec> select_roi(const Detection& det, RoiSource source) {
  if (source == RoiSource::kMask && !det.roi.mask) return std::nullopt;
  if (source == RoiSource::kBox) {
    return RoiSpec{det.roi.u0, det.roi.v0, det.roi.width, det.roi.height, std::nullopt};
  }
  return det.roi;
}

inline std::vector<ObjectEstimate> estimate_objects(const DepthImage& fused,
                                                    std::span<const Detection> detections,
                                                    Method method, double reduction,
                                                    RoiSource source = RoiSource::kAuto) {
  std::vector<ObjectEstimate> out;
  out.reserve(detections.size());
  for (const Detection& det : detections) {
    ObjectEstimate oe{det.object_id, std::nullopt};
    if (auto roi = select_roi(det, source)) {
      oe.estimate = try_estimate(fused, *roi, method, reduction);
    }
    out.push_back(std::move(oe));
  }
  return out;
}

struct PipelineResult {
  DepthImage fused;
  std::vector<ObjectEstimate> estimates;
};

inline PipelineResult run_pipeline(const FrameBundle& frame, const PipelineOptions& opt = {}) {
  PipelineResult result;
  result.fused = fuse_frame(frame, opt);
  result.estimates =
      estimate_objects(result.fused, frame.detections, opt.method, opt.reduction, opt.roi_source);
  return result;
}

inline std::string format_reduction(double reduction) {
  return detail::format_fixed(reduction, 2);
}

inline std::string format_meters(double v) { return detail::format_fixed(v, 6); }

/// `object_id,method,reduction,estimate_m,valid_count`; failed rows leave the
/// estimate empty and report a count of 0.
inline std::string estimates_csv(std::span<const ObjectEstimate> estimates, Method method,
                                 double reduction) {
  std::string out = "object_id,method,reduction,estimate_m,valid_count\n";
  for (const ObjectEstimate& oe : estimates) {
    out += oe.object_id;
    out += ',';
    out += to_string(method);
    out += ',' + format_reduction(reduction) + ',';
    if (oe.estimate) {
      out += format_meters(oe.estimate->value) + ',' + std::to_string(oe.estimate->valid_count);
    } else {
      out += ",0";
    }
    out += '\n';
  }
  return out;
}

}  // namespace fdepth

#endif  // FDEPTH_PIPELINE_HPP
