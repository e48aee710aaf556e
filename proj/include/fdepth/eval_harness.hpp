// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#ifndef FDEPTH_EVAL_HARNESS_HPP
#define FDEPTH_EVAL_HARNESS_HPP

#include <cmath>
#include <compare>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "fdepth/detail/exact_mean.hpp"
#include "fdepth/error.hpp"
#include "fdepth/frame.hpp"
#include "fdepth/pipeline.hpp"
#include "fdepth/roi_estimators.hpp"

namespace fdepth {

inline double per_object_error(const DepthEstimate& estimate, const GroundTruthRecord& gt) {
  return std::abs(estimate.value - gt.distance);
}

/// mean, sample standard deviation (n - 1; 0 for a single value) and median.
struct ErrorStats {
  double mean = 0.0;
  double std = 0.0;
  double median = 0.0;
  std::size_t n = 0;
};

inline ErrorStats aggregate_stats(std::span<const double> errors) {
  if (errors.empty()) throw EmptyInput("aggregate_stats: no errors to aggregate");
  ErrorStats s;
  s.n = errors.size();
  s.mean = detail::exact_mean(errors);
  if (s.n > 1) {
    double ss = 0.0;
    for (double e : errors) ss += (e - s.mean) * (e - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  s.median = estimate_median(errors).value;
  return s;
}

struct ObjectError {
  std::string object_id;
  double estimate = 0.0;
  double ground_truth = 0.0;
  double abs_error = 0.0;
};

/**
 * Per-object errors plus the aggregate over objects that were both detected
 * and estimated. `undetected` lists ground-truth objects with no detection,
 * `invalid` detections whose estimator returned no data, and `unmatched`
 * detections with no ground-truth record. None of these enter the stats.
 */
struct ErrorReport {
  std::vector<ObjectError> per_object;
  std::optional<ErrorStats> stats;
  std::vector<std::string> undetected;
  std::vector<std::string> invalid;
  std::vector<std::string> unmatched;
};

inline ErrorReport evaluate(std::span<const ObjectEstimate> estimates,
                            std::span<const GroundTruthRecord> ground_truth) {
  std::unordered_map<std::string, const GroundTruthRecord*> gt_by_id;
  for (const auto& g : ground_truth) gt_by_id.emplace(g.object_id, &g);

  ErrorReport report;
  std::unordered_set<std::string> seen;
  std::vector<double> errors;
  for (const ObjectEstimate& oe : estimates) {
    seen.insert(oe.object_id);
    const auto it = gt_by_id.find(oe.object_id);
    if (it == gt_by_id.end()) {
      report.unmatched.push_back(oe.object_id);
      continue;
    }
    if (!oe.estimate) {
      report.invalid.push_back(oe.object_id);
      continue;
    }
    const double err = per_object_error(*oe.estimate, *it->second);
    report.per_object.push_back({oe.object_id, oe.estimate->value, it->second->distance, err});
    errors.push_back(err);
  }
  for (const auto& g : ground_truth) {
    if (!seen.count(g.object_id)) report.undetected.push_back(g.object_id);
  }
  if (!errors.empty()) report.stats = aggregate_stats(errors);
  return report;
}

// ---------------------------------------------------------------------------
// Method x reduction sweep
// ---------------------------------------------------------------------------

/// One sweep cell. Mask cells use the average over mask pixels with no
/// reduction.
struct SweepKey {
  bool mask = false;
  Method method = Method::kAverage;
  double reduction = 0.0;

  auto operator<=>(const SweepKey&) const = default;

  std::string method_name() const {
    return mask ? "mask_average" : std::string(to_string(method));
  }
};

struct SweepCell {
  ErrorReport report;

  /// True when no object produced an estimate.
  bool is_nan() const noexcept { return !report.stats.has_value(); }
};

struct SweepResult {
  std::map<SweepKey, SweepCell> cells;
  SweepKey best;

  const SweepCell& at(Method m, double reduction) const {
    return cells.at(SweepKey{false, m, reduction});
  }
  const SweepCell* mask_cell() const {
    const auto it = cells.find(SweepKey{true, Method::kAverage, 0.0});
    return it == cells.end() ? nullptr : &it->second;
  }
};

struct SweepOptions {
  FusionPolicy policy;
  bool interpolate = true;
  double azimuth_tolerance = kDefaultAzimuthTolerance;
};

/// Evaluates every (method, reduction) pair on one fused frame. A mask
/// column is added when any detection carries a mask. The argmin cell is
/// the lowest mean error among non-NaN cells, ties resolved by key order.
inline SweepResult sweep(const FrameBundle& frame, const std::set<Method>& methods,
                         const std::set<double>& reductions, const SweepOptions& opt = {}) {
  for (double r : reductions) {
    if (!(r >= 0.0 && r <= kMaxReduction)) {
      throw InvalidFraction("sweep reduction " + detail::format_double(r) +
                            " outside [0, 0.95]");
    }
  }
  if (methods.empty() || reductions.empty()) {
    throw EmptyInput("sweep needs at least one method and one reduction");
  }
  if (frame.detections.empty()) throw EmptyInput("sweep needs at least one detection");

  PipelineOptions popt;
  popt.policy = opt.policy;
  popt.interpolate = opt.interpolate;
  popt.azimuth_tolerance = opt.azimuth_tolerance;
  const DepthImage fused = fuse_frame(frame, popt);

  SweepResult result;
  for (Method m : methods) {
    for (double r : reductions) {
      const auto est = estimate_objects(fused, frame.detections, m, r, RoiSource::kBox);
      result.cells[SweepKey{false, m, r}] = SweepCell{evaluate(est, frame.ground_truth)};
    }
  }
  bool any_mask = false;
  for (const auto& d : frame.detections) any_mask = any_mask || d.roi.mask.has_value();
  if (any_mask) {
    const auto est =
        estimate_objects(fused, frame.detections, Method::kAverage, 0.0, RoiSource::kMask);
    result.cells[SweepKey{true, Method::kAverage, 0.0}] =
        SweepCell{evaluate(est, frame.ground_truth)};
  }

  std::optional<SweepKey> best;
  double best_mean = std::numeric_limits<double>::infinity();
  for (const auto& [key, cell] : result.cells) {
    if (cell.is_nan()) continue;
    if (!best || cell.report.stats->mean < best_mean) {
      best = key;
      best_mean = cell.report.stats->mean;
    }
  }
  if (!best) throw NoValidData("sweep: every cell failed to estimate any object");
  result.best = *best;
  return result;
}

inline std::string stats_csv_header() { return "method,reduction,mean_m,std_m,median_m,n\n"; }

/// One summary row; a missing stats block prints `nan` and n=0.
inline std::string stats_csv_row(const std::string& method, double reduction,
                                 const std::optional<ErrorStats>& stats) {
  std::string out = method + ',' + format_reduction(reduction) + ',';
  if (stats) {
    out += format_meters(stats->mean) + ',' + format_meters(stats->std) + ',' +
           format_meters(stats->median) + ',' + std::to_string(stats->n);
  } else {
    out += "nan,nan,nan,0";
  }
  return out + '\n';
}

inline std::string sweep_csv(const SweepResult& result) {
  std::string out = stats_csv_header();
  for (const auto& [key, cell] : result.cells) {
    out += stats_csv_row(key.method_name(), key.reduction, cell.report.stats);
  }
  return out;
}

inline std::string per_object_csv_header() {
  return "object_id,method,reduction,estimate_m,gt_m,abs_error_m\n";
}

/// Rows for one report; invalid objects get empty estimate and error fields.
inline std::string per_object_csv_rows(const ErrorReport& report, const std::string& method,
                                       double reduction,
                                       std::span<const GroundTruthRecord> ground_truth) {
  std::unordered_map<std::string, double> gt;
  for (const auto& g : ground_truth) gt.emplace(g.object_id, g.distance);
  std::string out;
  const std::string prefix_tail = ',' + method + ',' + format_reduction(reduction) + ',';
  for (const ObjectError& e : report.per_object) {
    out += e.object_id + prefix_tail + format_meters(e.estimate) + ',' +
           format_meters(e.ground_truth) + ',' + format_meters(e.abs_error) + '\n';
  }
  for (const std::string& id : report.invalid) {
    out += id + prefix_tail + ',' + format_meters(gt.at(id)) + ",\n";
  }
  return out;
}

inline std::string sweep_per_object_csv(const SweepResult& result,
                                        std::span<const GroundTruthRecord> ground_truth) {
  std::string out = per_object_csv_header();
  for (const auto& [key, cell] : result.cells) {
    out += per_object_csv_rows(cell.report, key.method_name(), key.reduction, ground_truth);
  }
  return out;
}

inline std::string report_csv(const ErrorReport& report, const std::string& method,
                              double reduction) {
  return stats_csv_header() + stats_csv_row(method, reduction, report.stats);
}

}  // namespace fdepth

#endif  // FDEPTH_EVAL_HARNESS_HPP
