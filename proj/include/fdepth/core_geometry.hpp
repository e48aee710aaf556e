// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_CORE_GEOMETRY_HPP
#define FDEPTH_CORE_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdepth/detail/text.hpp"
#include "fdepth/error.hpp"

namespace fdepth {

/**
 * Pinhole camera with the LiDAR-to-camera extrinsics.
 *
 * A LiDAR point p maps to camera coordinates as `rotation * p + translation`
 * and then through K = [fx skew cx; 0 fy cy; 0 0 1]. No lens distortion.
 */
struct CalibratedCamera {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  int image_width = 0;
  int image_height = 0;

  Eigen::Matrix3d intrinsic_matrix() const {
    Eigen::Matrix3d k;
    k << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
    return k;
  }

  bool operator==(const CalibratedCamera& o) const {
    return fx == o.fx && fy == o.fy && cx == o.cx && cy == o.cy && skew == o.skew &&
           rotation == o.rotation && translation == o.translation &&
           image_width == o.image_width && image_height == o.image_height;
  }
};

inline constexpr double kRotationTolerance = 1e-6;

/// Throws InvalidIntrinsics or InvalidRotation if the camera breaks an
/// invariant.
inline void validate(const CalibratedCamera& cam) {
  if (cam.image_width < 1 || cam.image_height < 1) {
    throw InvalidIntrinsics("image dimensions must be >= 1, got " +
                            std::to_string(cam.image_width) + "x" +
                            std::to_string(cam.image_height));
  }
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0) || !std::isfinite(cam.fx) ||
      !std::isfinite(cam.fy)) {
    throw InvalidIntrinsics("focal lengths must be positive");
  }
  if (!std::isfinite(cam.skew)) throw InvalidIntrinsics("skew must be finite");
  if (!(cam.cx >= 0.0 && cam.cx < cam.image_width) ||
      !(cam.cy >= 0.0 && cam.cy < cam.image_height)) {
    throw InvalidIntrinsics("principal point outside the image");
  }
  if (!cam.rotation.allFinite() || !cam.translation.allFinite()) {
    throw InvalidRotation("extrinsics contain non-finite values");
  }
  const double ortho =
      (cam.rotation.transpose() * cam.rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (ortho > kRotationTolerance) {
    throw InvalidRotation("rotation is not orthonormal (max |R^T R - I| = " +
                          detail::format_double(ortho) + ")");
  }
  const double det = cam.rotation.determinant();
  if (std::abs(det - 1.0) > kRotationTolerance) {
    throw InvalidRotation("rotation determinant is " + detail::format_double(det) +
                          ", expected +1");
  }
}

/// One LiDAR return in the sensor frame. `ring` is the laser channel.
struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  int ring = 0;

  bool operator==(const LidarPoint&) const = default;
};

inline constexpr int kMaxRings = 128;

using PointCloud = std::vector<LidarPoint>;

/// Pixel hit with the camera-frame Z (meters) of the originating point.
struct ProjectedPoint {
  int u = 0;
  int v = 0;
  double depth = 0.0;

  bool operator==(const ProjectedPoint&) const = default;
};

/// Continuous image-plane coordinates before quantization.
struct ImagePlanePoint {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// Points with camera Z below this are treated as behind the camera.
inline constexpr double kMinProjectionDepth = 1e-6;

/// R p + t, summed left to right so results do not depend on how a matrix
/// library vectorizes.
inline Eigen::Vector3d to_camera_frame(const LidarPoint& p, const CalibratedCamera& cam) {
  const Eigen::Matrix3d& r = cam.rotation;
  Eigen::Vector3d out;
  for (int i = 0; i < 3; ++i) {
    out[i] = r(i, 0) * p.x + r(i, 1) * p.y + r(i, 2) * p.z + cam.translation[i];
  }
  return out;
}

/// [u v e]^T = K [R t] [X Y Z 1]^T followed by division by e. No bounds or
/// sign checks; `depth` may be <= 0.
inline ImagePlanePoint project_to_image_plane(const LidarPoint& p,
                                              const CalibratedCamera& cam) {
  const Eigen::Vector3d pc = to_camera_frame(p, cam);
  const double uh = cam.fx * pc.x() + cam.skew * pc.y() + cam.cx * pc.z();
  const double vh = cam.fy * pc.y() + cam.cy * pc.z();
  const double e = pc.z();
  return {uh / e, vh / e, e};
}

inline std::optional<ProjectedPoint> project_point(const LidarPoint& p,
                                                   const CalibratedCamera& cam) {
  const ImagePlanePoint ip = project_to_image_plane(p, cam);
  if (!(ip.depth >= kMinProjectionDepth)) return std::nullopt;
  // std::round is half-away-from-zero. NaN fails both comparisons.
  const double u = std::round(ip.u);
  const double v = std::round(ip.v);
  if (!(u >= 0.0 && u < cam.image_width && v >= 0.0 && v < cam.image_height)) {
    return std::nullopt;
  }
  return ProjectedPoint{static_cast<int>(u), static_cast<int>(v), ip.depth};
}

/// Projects every point that lands in front of the camera and inside the
/// image; the rest are dropped. Output keeps input order.
inline std::vector<ProjectedPoint> project_point_cloud(std::span<const LidarPoint> cloud,
                                                       const CalibratedCamera& cam) {
  std::vector<ProjectedPoint> out;
  out.reserve(cloud.size());
  for (const LidarPoint& p : cloud) {
    if (auto pp = project_point(p, cam)) out.push_back(*pp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration file
//
//   # comment
//   fx 615.0
//   fy 615.0
//   cx 320.0
//   cy 240.0
//   skew 0            (optional, default 0)
//   width 640
//   height 480
//   rotation r00 r01 r02 r10 r11 r12 r20 r21 r22   (row-major)
//   translation tx ty tz                            (meters)
//
// One key per line, any order, each key at most once.
// ---------------------------------------------------------------------------

inline CalibratedCamera parse_calibration(std::string_view text,
                                          const std::string& file = "<calibration>") {
  CalibratedCamera cam;
  std::map<std::string, std::size_t> seen;
  for (const auto& e : detail::parse_key_values(text)) {
    if (!seen.emplace(e.key, e.line).second) {
      throw ParseError::at_line(file, e.line, "duplicate field '" + e.key + "'");
    }
    if (e.key == "fx") {
      cam.fx = detail::numbers(e, 1, file)[0];
    } else if (e.key == "fy") {
      cam.fy = detail::numbers(e, 1, file)[0];
    } else if (e.key == "cx") {
      cam.cx = detail::numbers(e, 1, file)[0];
    } else if (e.key == "cy") {
      cam.cy = detail::numbers(e, 1, file)[0];
    } else if (e.key == "skew") {
      cam.skew = detail::numbers(e, 1, file)[0];
    } else if (e.key == "width") {
      const auto w = detail::integer(e, file);
      if (w < 1 || w > 1'000'000) {
        throw ParseError::at_line(file, e.line, "field 'width' out of range");
      }
      cam.image_width = static_cast<int>(w);
    } else if (e.key == "height") {
      const auto h = detail::integer(e, file);
      if (h < 1 || h > 1'000'000) {
        throw ParseError::at_line(file, e.line, "field 'height' out of range");
      }
      cam.image_height = static_cast<int>(h);
    } else if (e.key == "rotation") {
      const auto r = detail::numbers(e, 9, file);
      for (int i = 0; i < 9; ++i) cam.rotation(i / 3, i % 3) = r[i];
    } else if (e.key == "translation") {
      const auto t = detail::numbers(e, 3, file);
      cam.translation = Eigen::Vector3d(t[0], t[1], t[2]);
    } else {
      throw ParseError::at_line(file, e.line, "unknown field '" + e.key + "'");
    }
  }
  for (const char* key : {"fx", "fy", "cx", "cy", "width", "height", "rotation", "translation"}) {
    if (!seen.count(key)) {
      throw ParseError(file, "end of file", std::string("missing field '") + key + "'");
    }
  }
  try {
    validate(cam);
  } catch (const InvalidRotation& e) {
    throw InvalidRotation(file + ": " + e.what());
  } catch (const InvalidIntrinsics& e) {
    throw InvalidIntrinsics(file + ": " + e.what());
  }
  return cam;
}

inline std::string serialize_calibration(const CalibratedCamera& cam) {
  using detail::format_double;
  std::string out;
  out += "fx " + format_double(cam.fx) + "\n";
  out += "fy " + format_double(cam.fy) + "\n";
  out += "cx " + format_double(cam.cx) + "\n";
  out += "cy " + format_double(cam.cy) + "\n";
  out += "skew " + format_double(cam.skew) + "\n";
  out += "width " + std::to_string(cam.image_width) + "\n";
  out += "height " + std::to_string(cam.image_height) + "\n";
  out += "rotation";
  for (int i = 0; i < 9; ++i) out += " " + format_double(cam.rotation(i / 3, i % 3));
  out += "\ntranslation";
  for (int i = 0; i < 3; ++i) out += " " + format_double(cam.translation[i]);
  out += "\n";
  return out;
}

inline CalibratedCamera load_calibration(const std::string& path) {
  return parse_calibration(detail::read_file(path), path);
}

}  // namespace fdepth

#endif  // FDEPTH_CORE_GEOMETRY_HPP
