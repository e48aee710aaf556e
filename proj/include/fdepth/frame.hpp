// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_FRAME_HPP
#define FDEPTH_FRAME_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fdepth/core_geometry.hpp"
#include "fdepth/depth_fusion.hpp"
#include "fdepth/roi_estimators.hpp"

namespace fdepth {

/// An externally produced detection. `roi` holds the box and, for
/// segmentation output, the decoded mask.
struct Detection {
  std::string object_id;
  RoiSpec roi;
  double confidence = 1.0;

  bool operator==(const Detection&) const = default;
};

/// Hand-measured (or synthetic) camera-frame Z of an object, in meters.
struct GroundTruthRecord {
  std::string object_id;
  double distance = 0.0;
  std::string scenario;

  bool operator==(const GroundTruthRecord&) const = default;
};

/// Everything captured for one frame.
struct FrameBundle {
  PointCloud cloud;
  DepthImage camera_depth;
  CalibratedCamera calibration;
  std::vector<Detection> detections;
  std::vector<GroundTruthRecord> ground_truth;
};

// Mask run-length encoding: alternating run lengths over the row-major
// cells, starting with a run of outside (0) cells, which may be empty.

inline std::vector<std::uint64_t> encode_rle(const Mask& mask) {
  std::vector<std::uint64_t> runs;
  std::uint8_t current = 0;
  std::uint64_t length = 0;
  for (std::uint8_t c : mask.cells) {
    const std::uint8_t bit = c ? 1 : 0;
    if (bit != current) {
      runs.push_back(length);
      current = bit;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

/// Total cell count of the runs, saturating at UINT64_MAX.
inline std::uint64_t rle_length(const std::vector<std::uint64_t>& runs) {
  std::uint64_t total = 0;
  for (std::uint64_t run : runs) {
    if (run > UINT64_MAX - total) return UINT64_MAX;
    total += run;
  }
  return total;
}

/// Expands runs into cells. Check rle_length() against the box first.
inline std::vector<std::uint8_t> decode_rle(const std::vector<std::uint64_t>& runs) {
  std::vector<std::uint8_t> cells;
  cells.reserve(static_cast<std::size_t>(rle_length(runs)));
  std::uint8_t value = 0;
  for (std::uint64_t run : runs) {
    cells.insert(cells.end(), static_cast<std::size_t>(run), value);
    value ^= 1;
  }
  return cells;
}

}  // namespace fdepth

#endif  // FDEPTH_FRAME_HPP
