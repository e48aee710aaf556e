// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_CLOUD_INTERP_HPP
#define FDEPTH_CLOUD_INTERP_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <span>
#include <tuple>
#include <vector>

#include "fdepth/core_geometry.hpp"
#include "fdepth/error.hpp"

namespace fdepth {

/// VLP-16 horizontal step at 600 rpm (0.2 deg), rounded up.
inline constexpr double kDefaultAzimuthTolerance = 3.5e-3;

/// Rings at or above this index are reserved for inserted midpoints.
inline constexpr int kInterpolatedRingBase = kMaxRings / 2;

inline double azimuth(const LidarPoint& p) { return std::atan2(p.y, p.x); }

/// Point indices bucketed by ring, each bucket sorted by azimuth ascending
/// (ties keep input order).
struct RingIndexedCloud {
  std::map<int, std::vector<std::size_t>> rings;
};

inline RingIndexedCloud index_by_ring(std::span<const LidarPoint> cloud) {
  RingIndexedCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) out.rings[cloud[i].ring].push_back(i);
  for (auto& [ring, idx] : out.rings) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return azimuth(cloud[a]) < azimuth(cloud[b]);
    });
  }
  return out;
}

namespace detail {

inline double azimuth_gap(double a, double b) {
  double d = std::abs(a - b);
  if (d > std::numbers::pi) d = 2.0 * std::numbers::pi - d;
  return d;
}

/// Greedy nearest-azimuth matching between two rings. Returns (lower, upper)
/// point index pairs ordered by the lower point's azimuth.
inline std::vector<std::pair<std::size_t, std::size_t>> match_rings(
    std::span<const LidarPoint> cloud, const std::vector<std::size_t>& lower,
    const std::vector<std::size_t>& upper, double tolerance) {
  std::vector<double> upper_az(upper.size());
  for (std::size_t j = 0; j < upper.size(); ++j) upper_az[j] = azimuth(cloud[upper[j]]);

  struct Candidate {
    double gap;
    std::size_t lower_pos;
    std::size_t upper_pos;
  };
  std::vector<Candidate> candidates;

  auto collect = [&](std::size_t i, double alpha, double lo, double hi) {
    auto first = std::lower_bound(upper_az.begin(), upper_az.end(), lo);
    auto last = std::upper_bound(upper_az.begin(), upper_az.end(), hi);
    for (auto it = first; it < last; ++it) {
      const auto j = static_cast<std::size_t>(it - upper_az.begin());
      const double gap = azimuth_gap(alpha, *it);
      if (gap <= tolerance) candidates.push_back({gap, i, j});
    }
  };

  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const double alpha = azimuth(cloud[lower[i]]);
    collect(i, alpha, alpha - tolerance, alpha + tolerance);
    // Wrap around +-pi.
    if (alpha - tolerance < -pi) collect(i, alpha, alpha - tolerance + 2.0 * pi, pi);
    if (alpha + tolerance > pi) collect(i, alpha, -pi, alpha + tolerance - 2.0 * pi);
  }

  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    return std::tuple(a.gap, lower[a.lower_pos], upper[a.upper_pos]) <
           std::tuple(b.gap, lower[b.lower_pos], upper[b.upper_pos]);
  });

  std::vector<char> lower_used(lower.size(), 0);
  std::vector<char> upper_used(upper.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> matched_pos;
  for (const Candidate& c : candidates) {
    if (lower_used[c.lower_pos] || upper_used[c.upper_pos]) continue;
    lower_used[c.lower_pos] = upper_used[c.upper_pos] = 1;
    matched_pos.emplace_back(c.lower_pos, c.upper_pos);
  }
  std::sort(matched_pos.begin(), matched_pos.end());

  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(matched_pos.size());
  for (auto [i, j] : matched_pos) out.emplace_back(lower[i], upper[j]);
  return out;
}

}  // namespace detail

/**
 * Densifies a ring-structured cloud by inserting the Cartesian midpoint of
 * every matched pair of points on consecutive rings.
 *
 * Consecutive means adjacent in the sorted set of rings present. Within a
 * ring pair each point is matched at most once: candidate pairs within
 * `azimuth_tolerance` radians are accepted greedily by smallest azimuth gap,
 * ties going to the lower point index.
 *
 * Output: the input points unchanged and in input order, followed by the
 * midpoints in ring-pair order. A midpoint carries ring
 * kInterpolatedRingBase + lower_ring, so input rings must be below
 * kInterpolatedRingBase. A cloud with fewer than two distinct rings is
 * returned unchanged.
 */
inline PointCloud interpolate_point_cloud(std::span<const LidarPoint> cloud,
                                          double azimuth_tolerance = kDefaultAzimuthTolerance) {
  if (!(azimuth_tolerance > 0.0)) {
    throw InvalidArgument("azimuth tolerance must be positive");
  }
  const RingIndexedCloud indexed = index_by_ring(cloud);
  if (indexed.rings.size() < 2) return PointCloud(cloud.begin(), cloud.end());
  if (indexed.rings.begin()->first < 0 ||
      indexed.rings.rbegin()->first >= kInterpolatedRingBase) {
    throw InvalidArgument("ring indices must lie in [0, " +
                          std::to_string(kInterpolatedRingBase) + ") for interpolation");
  }

  PointCloud out(cloud.begin(), cloud.end());
  out.reserve(2 * cloud.size());

  for (auto it = indexed.rings.begin(); std::next(it) != indexed.rings.end(); ++it) {
    const auto next = std::next(it);
    const int synthetic_ring = kInterpolatedRingBase + it->first;
    for (auto [a, b] :
         detail::match_rings(cloud, it->second, next->second, azimuth_tolerance)) {
      const LidarPoint& pa = cloud[a];
      const LidarPoint& pb = cloud[b];
      out.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y), 0.5 * (pa.z + pb.z),
                     synthetic_ring});
    }
  }
  return out;
}

}  // namespace fdepth

#endif  // FDEPTH_CLOUD_INTERP_HPP
