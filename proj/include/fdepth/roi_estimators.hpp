// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_ROI_ESTIMATORS_HPP
#define FDEPTH_ROI_ESTIMATORS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdepth/depth_fusion.hpp"
#include "fdepth/detail/exact_mean.hpp"
#include "fdepth/error.hpp"

namespace fdepth {

enum class Method { kAverage, kMedian, kNearest, kCenter };

inline constexpr std::array<Method, 4> kAllMethods = {Method::kAverage, Method::kMedian,
                                                      Method::kNearest, Method::kCenter};

inline constexpr std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::kAverage:
      return "average";
    case Method::kMedian:
      return "median";
    case Method::kNearest:
      return "nearest";
    case Method::kCenter:
      return "center";
  }
  return "unknown";
}

inline std::optional<Method> parse_method(std::string_view s) noexcept {
  for (Method m : kAllMethods) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

/// Binary silhouette over a box, row-major, nonzero = inside the object.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;

  bool at(int col, int row) const {
    return cells[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                 static_cast<std::size_t>(col)] != 0;
  }

  bool operator==(const Mask&) const = default;
};

/// Pixel rectangle [u0, u0 + width) x [v0, v0 + height), with an optional
/// mask of the same dimensions.
struct RoiSpec {
  int u0 = 0;
  int v0 = 0;
  int width = 1;
  int height = 1;
  std::optional<Mask> mask;

  bool operator==(const RoiSpec&) const = default;
};

inline void validate_roi(const RoiSpec& roi, int image_width, int image_height) {
  if (roi.width < 1 || roi.height < 1) {
    throw InvalidRoi("roi sides must be >= 1, got " + std::to_string(roi.width) + "x" +
                     std::to_string(roi.height));
  }
  if (roi.u0 < 0 || roi.v0 < 0 || roi.width > image_width - roi.u0 ||
      roi.height > image_height - roi.v0) {
    throw InvalidRoi("roi (" + std::to_string(roi.u0) + "," + std::to_string(roi.v0) + "," +
                     std::to_string(roi.width) + "," + std::to_string(roi.height) +
                     ") is not inside the " + std::to_string(image_width) + "x" +
                     std::to_string(image_height) + " image");
  }
  if (roi.mask && (roi.mask->width != roi.width || roi.mask->height != roi.height ||
                   roi.mask->cells.size() != static_cast<std::size_t>(roi.width) *
                                                 static_cast<std::size_t>(roi.height))) {
    throw InvalidRoi("mask dimensions do not match the roi");
  }
}

inline constexpr double kMaxReduction = 0.95;

/**
 * Shrinks a box about its center so that its area drops by
 * `area_fraction_removed`. Each side is scaled by sqrt(1 - f) and rounded
 * (half away from zero, minimum 1); the new origin is
 * floor(center - side / 2). The result never leaves the original box.
 *
 * ROIs carrying a mask are returned unchanged.
 */
inline RoiSpec reduce_bbox(const RoiSpec& roi, double area_fraction_removed) {
  if (!(area_fraction_removed >= 0.0 && area_fraction_removed <= kMaxReduction)) {
    throw InvalidFraction("reduction must lie in [0, 0.95], got " +
                          detail::format_double(area_fraction_removed));
  }
  if (roi.mask) return roi;
  const double scale = std::sqrt(1.0 - area_fraction_removed);
  const int w = std::max(1, static_cast<int>(std::round(roi.width * scale)));
  const int h = std::max(1, static_cast<int>(std::round(roi.height * scale)));
  const double center_u = roi.u0 + roi.width / 2.0;
  const double center_v = roi.v0 + roi.height / 2.0;
  RoiSpec out;
  out.width = std::min(w, roi.width);
  out.height = std::min(h, roi.height);
  out.u0 = std::clamp(static_cast<int>(std::floor(center_u - out.width / 2.0)), roi.u0,
                      roi.u0 + roi.width - out.width);
  out.v0 = std::clamp(static_cast<int>(std::floor(center_v - out.height / 2.0)), roi.v0,
                      roi.v0 + roi.height - out.height);
  return out;
}

/// Nonzero depths inside the ROI (and inside the mask, if any), row-major.
inline std::vector<double> collect_roi_depths(const DepthImage& depth, const RoiSpec& roi) {
  validate_roi(roi, depth.width(), depth.height());
  std::vector<double> out;
  for (int row = 0; row < roi.height; ++row) {
    for (int col = 0; col < roi.width; ++col) {
      if (roi.mask && !roi.mask->at(col, row)) continue;
      const double d = depth.at(roi.u0 + col, roi.v0 + row);
      if (d != 0.0) out.push_back(d);
    }
  }
  return out;
}

struct DepthEstimate {
  double value = 0.0;
  Method method = Method::kAverage;
  std::size_t valid_count = 0;
  double reduction = 0.0;
};

namespace detail {
inline void require_values(std::span<const double> values, Method m) {
  if (values.empty()) {
    throw NoValidData(std::string(to_string(m)) + ": roi holds no nonzero depth");
  }
}
}  // namespace detail

/// Arithmetic mean over the nonzero values, rounded once from the exact sum.
inline DepthEstimate estimate_average(std::span<const double> values) {
  detail::require_values(values, Method::kAverage);
  return {detail::exact_mean(values), Method::kAverage, values.size(), 0.0};
}

/// Middle element of the sorted values; mean of the two middle ones when the
/// count is even.
inline DepthEstimate estimate_median(std::span<const double> values) {
  detail::require_values(values, Method::kMedian);
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double value = v[mid];
  if (v.size() % 2 == 0) {
    const double lower =
        *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    value = 0.5 * (lower + value);
  }
  return {value, Method::kMedian, values.size(), 0.0};
}

inline DepthEstimate estimate_nearest(std::span<const double> values) {
  detail::require_values(values, Method::kNearest);
  return {*std::min_element(values.begin(), values.end()), Method::kNearest, values.size(),
          0.0};
}

/// Depth at (u0 + floor(width/2), v0 + floor(height/2)). Throws NoData when
/// that pixel is empty.
inline DepthEstimate estimate_center(const DepthImage& depth, const RoiSpec& roi) {
  validate_roi(roi, depth.width(), depth.height());
  const int u = roi.u0 + roi.width / 2;
  const int v = roi.v0 + roi.height / 2;
  const double d = depth.at(u, v);
  if (d == 0.0) {
    throw NoData("center: pixel (" + std::to_string(u) + "," + std::to_string(v) +
                 ") holds no depth");
  }
  return {d, Method::kCenter, 1, 0.0};
}

/// Reduces the box, then runs `method` over it. Throws NoValidData / NoData.
inline DepthEstimate estimate(const DepthImage& depth, const RoiSpec& roi, Method method,
                              double reduction = 0.0) {
  const RoiSpec reduced = reduce_bbox(roi, reduction);
  DepthEstimate est;
  if (method == Method::kCenter) {
    est = estimate_center(depth, reduced);
  } else {
    const auto values = collect_roi_depths(depth, reduced);
    switch (method) {
      case Method::kAverage:
        est = estimate_average(values);
        break;
      case Method::kMedian:
        est = estimate_median(values);
        break;
      default:
        est = estimate_nearest(values);
        break;
    }
  }
  est.reduction = reduction;
  return est;
}

/// As estimate(), but estimator failures become nullopt. Invalid ROIs and
/// fractions still throw.
inline std::optional<DepthEstimate> try_estimate(const DepthImage& depth, const RoiSpec& roi,
                                                 Method method, double reduction = 0.0) {
  try {
    return estimate(depth, roi, method, reduction);
  } catch (const NoValidData&) {
    return std::nullopt;
  } catch (const NoData&) {
    return std::nullopt;
  }
}

}  // namespace fdepth

#endif  // FDEPTH_ROI_ESTIMATORS_HPP
