// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

// Synthetic frames with exactly known geometry: axis-aligned boxes in the
// camera frame, an optional ground plane and backdrop, a ring/azimuth LiDAR
// and a pinhole depth camera. Camera frame is x right, y down, z forward.

#ifndef FDEPTH_SYNTH_ORACLE_HPP
#define FDEPTH_SYNTH_ORACLE_HPP

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fdepth/core_geometry.hpp"
#include "fdepth/depth_fusion.hpp"
#include "fdepth/detail/text.hpp"
#include "fdepth/error.hpp"
#include "fdepth/frame.hpp"

namespace fdepth {

struct SceneBox {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Ones();

  Eigen::Vector3d min_corner() const { return center - 0.5 * size; }
  Eigen::Vector3d max_corner() const { return center + 0.5 * size; }
  /// Camera-frame Z of the face looking at the camera.
  double front_z() const { return center.z() - 0.5 * size.z(); }
};

/// Maps LiDAR coordinates into the camera frame: p_c = rotation * p_l + translation.
struct RigidTransform {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
};

/// LiDAR (x forward, y left, z up) colocated with the camera.
inline RigidTransform colocated_lidar_pose() {
  RigidTransform t;
  t.rotation << 0.0, -1.0, 0.0,  //
      0.0, 0.0, -1.0,            //
      1.0, 0.0, 0.0;
  return t;
}

/// 640x480 camera with a D435-like focal length.
inline CalibratedCamera default_synthetic_camera() {
  CalibratedCamera cam;
  cam.fx = 615.0;
  cam.fy = 615.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.image_width = 640;
  cam.image_height = 480;
  return cam;
}

inline constexpr double kSceneMaxObjectZ = 6.0;

struct SceneSpec {
  std::string scenario = "synthetic";
  std::vector<SceneBox> objects;
  /// Camera-frame y of a horizontal ground plane (y points down).
  std::optional<double> ground_plane_height = 0.6;
  /// Camera-frame z of a fronto-parallel wall behind everything.
  std::optional<double> backdrop_distance;
  RigidTransform lidar_pose = colocated_lidar_pose();
  int lidar_rings = 16;
  double vertical_fov_deg = 15.0;  // half-angle; rings span [-fov, +fov]
  double azimuth_step_deg = 0.2;
  double lidar_max_range = 100.0;
  /// Intrinsics and image size. Extrinsics are taken from lidar_pose.
  CalibratedCamera camera = default_synthetic_camera();
  double camera_depth_min = 0.3;
  double camera_depth_max = 3.0;
  double dropout_rate = 0.0;
  /// Fraction of each detection box's area added as background margin.
  double detection_padding = 0.0;
  /// Objects whose front face is closer than this are never detected
  /// (0 disables).
  double occlusion_distance = 0.0;
};

struct Scene {
  SceneSpec spec;
  CalibratedCamera camera;
  std::vector<std::string> object_ids;
  std::vector<GroundTruthRecord> ground_truth;
};

inline Scene build_scene(const SceneSpec& spec) {
  if (spec.lidar_rings < 1 || spec.lidar_rings > kMaxRings) {
    throw InvalidSpec("lidar_rings must lie in [1, " + std::to_string(kMaxRings) + "]");
  }
  if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0)) {
    throw InvalidSpec("dropout_rate must lie in [0, 1)");
  }
  if (!(spec.detection_padding >= 0.0 && spec.detection_padding <= 0.95)) {
    throw InvalidSpec("detection_padding must lie in [0, 0.95]");
  }
  if (!(spec.azimuth_step_deg > 0.0 && spec.azimuth_step_deg <= 360.0)) {
    throw InvalidSpec("azimuth_step must lie in (0, 360] degrees");
  }
  if (!(spec.vertical_fov_deg >= 0.0 && spec.vertical_fov_deg < 90.0)) {
    throw InvalidSpec("vertical_fov must lie in [0, 90) degrees");
  }
  if (!(spec.lidar_max_range > 0.0) || !(spec.camera_depth_min > 0.0) ||
      !(spec.camera_depth_min < spec.camera_depth_max) || !(spec.occlusion_distance >= 0.0)) {
    throw InvalidSpec("ranges must be positive and camera_depth_range ordered");
  }
  Scene scene;
  scene.spec = spec;
  scene.camera = spec.camera;
  scene.camera.rotation = spec.lidar_pose.rotation;
  scene.camera.translation = spec.lidar_pose.translation;
  try {
    validate(scene.camera);
  } catch (const Error& e) {
    throw InvalidSpec(std::string("scene camera: ") + e.what());
  }

  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const SceneBox& b = spec.objects[i];
    const std::string id = "obj" + std::to_string(i);
    if (!b.center.allFinite() || !b.size.allFinite() || (b.size.array() <= 0.0).any()) {
      throw InvalidSpec(id + ": box must have finite center and positive size");
    }
    if (!(b.front_z() > 0.0)) throw InvalidSpec(id + ": box is behind the camera");
    if (b.front_z() > kSceneMaxObjectZ) {
      throw InvalidSpec(id + ": front face beyond " + detail::format_double(kSceneMaxObjectZ) +
                        " m");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const SceneBox& o = spec.objects[j];
      const bool overlap = (b.min_corner().array() < o.max_corner().array()).all() &&
                           (o.min_corner().array() < b.max_corner().array()).all();
      if (overlap) throw InvalidSpec(id + " overlaps obj" + std::to_string(j));
    }
    scene.object_ids.push_back(id);
    scene.ground_truth.push_back({id, b.front_z(), spec.scenario});
  }
  return scene;
}

/// Nearest intersection along a ray. `surface` is the object index, or one
/// of the negative tags below.
struct RayHit {
  double t = std::numeric_limits<double>::infinity();
  int surface = kNoHit;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();

  static constexpr int kNoHit = -3;
  static constexpr int kBackdrop = -2;
  static constexpr int kGround = -1;

  bool hit() const noexcept { return surface != kNoHit; }
};

namespace detail {

inline constexpr double kRayEpsilon = 1e-9;

/// Slab test. On entry the hit coordinate on the entered face is set exactly.
inline bool intersect_box(const SceneBox& box, const Eigen::Vector3d& origin,
                          const Eigen::Vector3d& dir, double& t_hit, Eigen::Vector3d& point) {
  const Eigen::Vector3d lo = box.min_corner();
  const Eigen::Vector3d hi = box.max_corner();
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int axis = -1;
  for (int k = 0; k < 3; ++k) {
    if (dir[k] == 0.0) {
      if (origin[k] < lo[k] || origin[k] > hi[k]) return false;
      continue;
    }
    double t1 = (lo[k] - origin[k]) / dir[k];
    double t2 = (hi[k] - origin[k]) / dir[k];
    if (t1 > t2) std::swap(t1, t2);
    if (t1 > t_near) {
      t_near = t1;
      axis = k;
    }
    t_far = std::min(t_far, t2);
  }
  if (axis < 0 || t_near > t_far || t_near <= kRayEpsilon) return false;
  t_hit = t_near;
  point = origin + t_near * dir;
  point[axis] = dir[axis] > 0.0 ? lo[axis] : hi[axis];
  return true;
}

inline void intersect_plane(int axis, double level, int tag, const Eigen::Vector3d& origin,
                            const Eigen::Vector3d& dir, RayHit& best) {
  if (dir[axis] == 0.0) return;
  const double t = (level - origin[axis]) / dir[axis];
  if (t <= kRayEpsilon || t >= best.t) return;
  best.t = t;
  best.surface = tag;
  best.point = origin + t * dir;
  best.point[axis] = level;
}

/// Uniform [0, 1) from the top 53 bits, independent of the standard
/// library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Casts one ray (camera frame) against every primitive of the scene.
inline RayHit cast_ray(const Scene& scene, const Eigen::Vector3d& origin,
                       const Eigen::Vector3d& dir) {
  RayHit best;
  for (std::size_t i = 0; i < scene.spec.objects.size(); ++i) {
    double t = 0.0;
    Eigen::Vector3d p;
    if (detail::intersect_box(scene.spec.objects[i], origin, dir, t, p) && t < best.t) {
      best.t = t;
      best.surface = static_cast<int>(i);
      best.point = p;
    }
  }
  if (scene.spec.ground_plane_height) {
    detail::intersect_plane(1, *scene.spec.ground_plane_height, RayHit::kGround, origin, dir,
                            best);
  }
  if (scene.spec.backdrop_distance) {
    detail::intersect_plane(2, *scene.spec.backdrop_distance, RayHit::kBackdrop, origin, dir,
                            best);
  }
  return best;
}

/// Elevation of each ring in radians, lowest first.
inline std::vector<double> ring_elevations(const SceneSpec& spec) {
  std::vector<double> out;
  const double fov = spec.vertical_fov_deg * std::numbers::pi / 180.0;
  for (int r = 0; r < spec.lidar_rings; ++r) {
    out.push_back(spec.lidar_rings == 1
                      ? 0.0
                      : -fov + 2.0 * fov * r / static_cast<double>(spec.lidar_rings - 1));
  }
  return out;
}

inline int azimuth_count(const SceneSpec& spec) {
  return std::max(1, static_cast<int>(std::round(360.0 / spec.azimuth_step_deg)));
}

/// One LiDAR ray in the LiDAR frame, unit length.
inline Eigen::Vector3d lidar_ray(double elevation, double azimuth) {
  return {std::cos(elevation) * std::cos(azimuth), std::cos(elevation) * std::sin(azimuth),
          std::sin(elevation)};
}

struct RenderedFrame {
  PointCloud cloud;
  DepthImage camera_depth;
  std::vector<Detection> detections;
  std::vector<GroundTruthRecord> ground_truth;
  /// Per-pixel index of the first surface hit by the camera ray.
  std::vector<int> surface_ids;

  FrameBundle bundle(const CalibratedCamera& camera) const {
    return {cloud, camera_depth, camera, detections, ground_truth};
  }
};

namespace detail {

/// Grows a box about its center by area fraction `padding` of the result,
/// then clips it to the image.
inline RoiSpec pad_box(int u0, int v0, int w, int h, double padding, int width, int height) {
  const double scale = 1.0 / std::sqrt(1.0 - padding);
  const int pw = std::max(w, static_cast<int>(std::round(w * scale)));
  const int ph = std::max(h, static_cast<int>(std::round(h * scale)));
  const double cu = u0 + w / 2.0;
  const double cv = v0 + h / 2.0;
  int nu0 = static_cast<int>(std::floor(cu - pw / 2.0));
  int nv0 = static_cast<int>(std::floor(cv - ph / 2.0));
  int nu1 = std::min(width, nu0 + pw);
  int nv1 = std::min(height, nv0 + ph);
  nu0 = std::max(0, nu0);
  nv0 = std::max(0, nv0);
  return RoiSpec{nu0, nv0, nu1 - nu0, nv1 - nv0, std::nullopt};
}

}  // namespace detail

/**
 * Renders the LiDAR cloud, the camera depth image, detections with exact
 * silhouette masks, and ground truth. Output depends only on (scene, seed);
 * the seed drives camera-pixel dropout.
 */
inline RenderedFrame render_frame(const Scene& scene, std::uint64_t seed) {
  const SceneSpec& spec = scene.spec;
  const CalibratedCamera& cam = scene.camera;
  const int width = cam.image_width;
  const int height = cam.image_height;
  RenderedFrame frame;

  // LiDAR: azimuth-major firing order, ring index 0 = lowest elevation.
  const auto elevations = ring_elevations(spec);
  const int n_az = azimuth_count(spec);
  const Eigen::Vector3d origin = cam.translation;
  for (int j = 0; j < n_az; ++j) {
    const double az = -std::numbers::pi + 2.0 * std::numbers::pi * j / n_az;
    for (int r = 0; r < spec.lidar_rings; ++r) {
      const Eigen::Vector3d dir = cam.rotation * lidar_ray(elevations[r], az);
      const RayHit hit = cast_ray(scene, origin, dir);
      if (!hit.hit() || hit.t > spec.lidar_max_range) continue;
      const Eigen::Vector3d pl = cam.rotation.transpose() * (hit.point - cam.translation);
      frame.cloud.push_back({pl.x(), pl.y(), pl.z(), r});
    }
  }

  // Camera: one ray through each integer pixel coordinate.
  frame.camera_depth = DepthImage(width, height);
  frame.surface_ids.assign(static_cast<std::size_t>(width) * height, RayHit::kNoHit);
  std::mt19937_64 rng(seed);
  const Eigen::Vector3d cam_origin = Eigen::Vector3d::Zero();
  for (int v = 0; v < height; ++v) {
    const double y = (v - cam.cy) / cam.fy;
    for (int u = 0; u < width; ++u) {
      const double x = (u - cam.cx - cam.skew * y) / cam.fx;
      const RayHit hit = cast_ray(scene, cam_origin, Eigen::Vector3d(x, y, 1.0));
      const bool dropped = detail::unit_uniform(rng) < spec.dropout_rate;
      frame.surface_ids[static_cast<std::size_t>(v) * width + u] = hit.surface;
      if (!hit.hit() || dropped) continue;
      const double z = hit.point.z();
      if (z >= spec.camera_depth_min && z < spec.camera_depth_max) {
        frame.camera_depth.at(u, v) = z;
      }
    }
  }

  // Detections from the visible silhouette of each object.
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    if (spec.objects[i].front_z() < spec.occlusion_distance) continue;
    int u_min = width, v_min = height, u_max = -1, v_max = -1;
    for (int v = 0; v < height; ++v) {
      for (int u = 0; u < width; ++u) {
        if (frame.surface_ids[static_cast<std::size_t>(v) * width + u] != static_cast<int>(i)) {
          continue;
        }
        u_min = std::min(u_min, u);
        u_max = std::max(u_max, u);
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
      }
    }
    if (u_max < 0) continue;
    RoiSpec roi = detail::pad_box(u_min, v_min, u_max - u_min + 1, v_max - v_min + 1,
                                  spec.detection_padding, width, height);
    Mask mask{roi.width, roi.height, {}};
    mask.cells.reserve(static_cast<std::size_t>(roi.width) * roi.height);
    for (int row = 0; row < roi.height; ++row) {
      for (int col = 0; col < roi.width; ++col) {
        const auto idx = static_cast<std::size_t>(roi.v0 + row) * width + (roi.u0 + col);
        mask.cells.push_back(frame.surface_ids[idx] == static_cast<int>(i) ? 1 : 0);
      }
    }
    roi.mask = std::move(mask);
    frame.detections.push_back({scene.object_ids[i], std::move(roi), 1.0});
  }
  frame.ground_truth = scene.ground_truth;
  return frame;
}

// ---------------------------------------------------------------------------
// Scene file: same `key value...` grammar as the calibration file.
//
//   scenario <name>
//   fx fy cx cy skew width height        camera intrinsics (one key per line)
//   lidar_rotation r00 ... r22           row-major, LiDAR -> camera
//   lidar_translation tx ty tz
//   lidar_rings 16
//   vertical_fov 15                      degrees, half-angle
//   azimuth_step 0.2                     degrees
//   lidar_max_range 100
//   ground_plane_height 0.6 | none
//   backdrop_distance 6.5 | none
//   camera_depth_range 0.3 3.0
//   dropout_rate 0
//   detection_padding 0
//   occlusion_distance 0
//   object cx cy cz sx sy sz             repeatable; camera frame, meters
// ---------------------------------------------------------------------------

inline SceneSpec parse_scene_spec(std::string_view text, const std::string& file = "<scene>") {
  SceneSpec spec;
  spec.objects.clear();
  auto optional_number = [&](const detail::KeyValueEntry& e) -> std::optional<double> {
    if (e.values.size() == 1 && e.values[0] == "none") return std::nullopt;
    return detail::numbers(e, 1, file)[0];
  };
  for (const auto& e : detail::parse_key_values(text)) {
    const std::string& k = e.key;
    if (k == "scenario") {
      if (e.values.size() != 1) throw ParseError::at_line(file, e.line, "scenario expects 1 value");
      spec.scenario = e.values[0];
    } else if (k == "fx") {
      spec.camera.fx = detail::numbers(e, 1, file)[0];
    } else if (k == "fy") {
      spec.camera.fy = detail::numbers(e, 1, file)[0];
    } else if (k == "cx") {
      spec.camera.cx = detail::numbers(e, 1, file)[0];
    } else if (k == "cy") {
      spec.camera.cy = detail::numbers(e, 1, file)[0];
    } else if (k == "skew") {
      spec.camera.skew = detail::numbers(e, 1, file)[0];
    } else if (k == "width" || k == "height") {
      const auto n = detail::integer(e, file);
      if (n < 1 || n > 100'000) throw ParseError::at_line(file, e.line, k + " out of range");
      (k == "width" ? spec.camera.image_width : spec.camera.image_height) = static_cast<int>(n);
    } else if (k == "lidar_rotation") {
      const auto r = detail::numbers(e, 9, file);
      for (int i = 0; i < 9; ++i) spec.lidar_pose.rotation(i / 3, i % 3) = r[i];
    } else if (k == "lidar_translation") {
      const auto t = detail::numbers(e, 3, file);
      spec.lidar_pose.translation = Eigen::Vector3d(t[0], t[1], t[2]);
    } else if (k == "lidar_rings") {
      const auto n = detail::integer(e, file);
      if (n < 1 || n > kMaxRings) throw ParseError::at_line(file, e.line, "lidar_rings out of range");
      spec.lidar_rings = static_cast<int>(n);
    } else if (k == "vertical_fov") {
      spec.vertical_fov_deg = detail::numbers(e, 1, file)[0];
    } else if (k == "azimuth_step") {
      spec.azimuth_step_deg = detail::numbers(e, 1, file)[0];
    } else if (k == "lidar_max_range") {
      spec.lidar_max_range = detail::numbers(e, 1, file)[0];
    } else if (k == "ground_plane_height") {
      spec.ground_plane_height = optional_number(e);
    } else if (k == "backdrop_distance") {
      spec.backdrop_distance = optional_number(e);
    } else if (k == "camera_depth_range") {
      const auto r = detail::numbers(e, 2, file);
      spec.camera_depth_min = r[0];
      spec.camera_depth_max = r[1];
    } else if (k == "dropout_rate") {
      spec.dropout_rate = detail::numbers(e, 1, file)[0];
    } else if (k == "detection_padding") {
      spec.detection_padding = detail::numbers(e, 1, file)[0];
    } else if (k == "occlusion_distance") {
      spec.occlusion_distance = detail::numbers(e, 1, file)[0];
    } else if (k == "object") {
      const auto b = detail::numbers(e, 6, file);
      spec.objects.push_back({Eigen::Vector3d(b[0], b[1], b[2]), Eigen::Vector3d(b[3], b[4], b[5])});
    } else {
      throw ParseError::at_line(file, e.line, "unknown field '" + k + "'");
    }
  }
  return spec;
}

inline std::string serialize_scene_spec(const SceneSpec& spec) {
  using detail::format_double;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("none"); };
  std::string out;
  out += "scenario " + spec.scenario + "\n";
  out += "fx " + format_double(spec.camera.fx) + "\n";
  out += "fy " + format_double(spec.camera.fy) + "\n";
  out += "cx " + format_double(spec.camera.cx) + "\n";
  out += "cy " + format_double(spec.camera.cy) + "\n";
  out += "skew " + format_double(spec.camera.skew) + "\n";
  out += "width " + std::to_string(spec.camera.image_width) + "\n";
  out += "height " + std::to_string(spec.camera.image_height) + "\n";
  out += "lidar_rotation";
  for (int i = 0; i < 9; ++i) out += " " + format_double(spec.lidar_pose.rotation(i / 3, i % 3));
  out += "\nlidar_translation";
  for (int i = 0; i < 3; ++i) out += " " + format_double(spec.lidar_pose.translation[i]);
  out += "\nlidar_rings " + std::to_string(spec.lidar_rings) + "\n";
  out += "vertical_fov " + format_double(spec.vertical_fov_deg) + "\n";
  out += "azimuth_step " + format_double(spec.azimuth_step_deg) + "\n";
  out += "lidar_max_range " + format_double(spec.lidar_max_range) + "\n";
  out += "ground_plane_height " + opt(spec.ground_plane_height) + "\n";
  out += "backdrop_distance " + opt(spec.backdrop_distance) + "\n";
  out += "camera_depth_range " + format_double(spec.camera_depth_min) + " " +
         format_double(spec.camera_depth_max) + "\n";
  out += "dropout_rate " + format_double(spec.dropout_rate) + "\n";
  out += "detection_padding " + format_double(spec.detection_padding) + "\n";
  out += "occlusion_distance " + format_double(spec.occlusion_distance) + "\n";
  for (const SceneBox& b : spec.objects) {
    out += "object";
    for (int i = 0; i < 3; ++i) out += " " + format_double(b.center[i]);
    for (int i = 0; i < 3; ++i) out += " " + format_double(b.size[i]);
    out += "\n";
  }
  return out;
}

}  // namespace fdepth

#endif  // FDEPTH_SYNTH_ORACLE_HPP
