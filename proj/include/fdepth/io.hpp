// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

// File formats:
//
//   point cloud, CSV     header `x,y,z,ring`, one point per line
//   point cloud, binary  "FDPC", u8 version (1), u32 LE count,
//                        count x (f32 LE x, y, z, u8 ring)
//   depth image          binary PGM P5, maxval 65535, big-endian millimeters,
//                        0 = no data
//   detections           JSON lines: {"id", "bbox": [u0, v0, w, h],
//                        "mask_rle"?: [runs...], "confidence"?: [0, 1]}
//   ground truth         CSV header `object_id,distance_m,scenario`
//
// Every reader reports failures as ParseError (or a subclass) naming the
// file and a 1-based line or a byte offset.

#ifndef FDEPTH_IO_HPP
#define FDEPTH_IO_HPP

#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fdepth/core_geometry.hpp"
#include "fdepth/depth_fusion.hpp"
#include "fdepth/detail/text.hpp"
#include "fdepth/error.hpp"
#include "fdepth/frame.hpp"

namespace fdepth {

static_assert(std::endian::native == std::endian::little, "binary I/O assumes little-endian");

/// Writes to a sibling temp file, then renames over `path`.
inline void atomic_write_file(const std::string& path, std::string_view data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp =
      target.parent_path() / (target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path + ": cannot open temp file for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(path + ": rename failed");
  }
}

// --- point clouds ----------------------------------------------------------

inline constexpr char kCloudMagic[4] = {'F', 'D', 'P', 'C'};
inline constexpr std::uint8_t kCloudVersion = 1;
inline constexpr std::size_t kCloudHeaderSize = 9;
inline constexpr std::size_t kCloudRecordSize = 13;

inline PointCloud parse_point_cloud_csv(std::string_view text, const std::string& file) {
  PointCloud cloud;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "x,y,z,ring") {
        throw ParseError::at_line(file, line_no, "expected header 'x,y,z,ring'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4) {
      throw ParseError::at_line(file, line_no,
                                "expected 4 fields, got " + std::to_string(fields.size()));
    }
    LidarPoint p;
    double* coords[3] = {&p.x, &p.y, &p.z};
    static constexpr const char* kNames[3] = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v) {
        throw ParseError::at_line(file, line_no, std::string("field '") + kNames[i] +
                                                     "' is not a finite number");
      }
      *coords[i] = *v;
    }
    const auto ring = detail::parse_int(fields[3]);
    if (!ring || *ring < 0 || *ring >= kMaxRings) {
      throw ParseError::at_line(file, line_no, "field 'ring' must be an integer in [0, 128)");
    }
    p.ring = static_cast<int>(*ring);
    cloud.push_back(p);
  }
  if (!header_seen) throw ParseError::at_line(file, 1, "missing header 'x,y,z,ring'");
  return cloud;
}

inline std::string point_cloud_csv(std::span<const LidarPoint> cloud) {
  std::string out = "x,y,z,ring\n";
  for (const LidarPoint& p : cloud) {
    out += detail::format_double(p.x) + ',' + detail::format_double(p.y) + ',' +
           detail::format_double(p.z) + ',' + std::to_string(p.ring) + '\n';
  }
  return out;
}

inline PointCloud parse_point_cloud_binary(std::string_view data, const std::string& file) {
  if (data.size() < 4) throw ParseError::at_offset(file, data.size(), "truncated header");
  if (std::memcmp(data.data(), kCloudMagic, 4) != 0) throw BadMagic(file);
  if (data.size() < kCloudHeaderSize) {
    throw ParseError::at_offset(file, data.size(), "truncated header");
  }
  if (static_cast<std::uint8_t>(data[4]) != kCloudVersion) {
    throw ParseError::at_offset(file, 4,
                                "unsupported version " +
                                    std::to_string(static_cast<std::uint8_t>(data[4])));
  }
  std::uint32_t count = 0;
  std::memcpy(&count, data.data() + 5, 4);
  const std::uint64_t expected =
      kCloudHeaderSize + static_cast<std::uint64_t>(count) * kCloudRecordSize;
  if (data.size() < expected) {
    const std::uint64_t complete = (data.size() - kCloudHeaderSize) / kCloudRecordSize;
    throw ParseError::at_offset(file, kCloudHeaderSize + complete * kCloudRecordSize,
                                "truncated: header declares " + std::to_string(count) +
                                    " points, file holds " + std::to_string(complete));
  }
  if (data.size() > expected) {
    throw ParseError::at_offset(file, expected, "trailing bytes after last point");
  }
  PointCloud cloud;
  cloud.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t off = kCloudHeaderSize + i * kCloudRecordSize;
    float xyz[3];
    std::memcpy(xyz, data.data() + off, sizeof(xyz));
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(xyz[k])) {
        throw ParseError::at_offset(file, off + 4 * k, "non-finite coordinate");
      }
    }
    const auto ring = static_cast<std::uint8_t>(data[off + 12]);
    if (ring >= kMaxRings) throw ParseError::at_offset(file, off + 12, "ring >= 128");
    cloud.push_back({xyz[0], xyz[1], xyz[2], ring});
  }
  return cloud;
}

/// Coordinates are stored as f32; rings must lie in [0, 128).
inline std::string point_cloud_binary(std::span<const LidarPoint> cloud) {
  if (cloud.size() > UINT32_MAX) throw InvalidArgument("cloud too large for binary format");
  std::string out(kCloudHeaderSize + cloud.size() * kCloudRecordSize, '\0');
  std::memcpy(out.data(), kCloudMagic, 4);
  out[4] = static_cast<char>(kCloudVersion);
  const auto count = static_cast<std::uint32_t>(cloud.size());
  std::memcpy(out.data() + 5, &count, 4);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const LidarPoint& p = cloud[i];
    if (p.ring < 0 || p.ring >= kMaxRings) throw InvalidArgument("ring outside [0, 128)");
    const float xyz[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                          static_cast<float>(p.z)};
    char* dst = out.data() + kCloudHeaderSize + i * kCloudRecordSize;
    std::memcpy(dst, xyz, sizeof(xyz));
    dst[12] = static_cast<char>(static_cast<std::uint8_t>(p.ring));
  }
  return out;
}

enum class CloudFormat { kCsv, kBinary };

/// `.csv` selects CSV; anything else is read as binary.
inline CloudFormat cloud_format_for(const std::string& path) {
  return std::filesystem::path(path).extension() == ".csv" ? CloudFormat::kCsv
                                                           : CloudFormat::kBinary;
}

inline PointCloud read_point_cloud(const std::string& path) {
  const std::string data = detail::read_file(path);
  return cloud_format_for(path) == CloudFormat::kCsv ? parse_point_cloud_csv(data, path)
                                                     : parse_point_cloud_binary(data, path);
}

inline void write_point_cloud(const std::string& path, std::span<const LidarPoint> cloud) {
  atomic_write_file(path, cloud_format_for(path) == CloudFormat::kCsv ? point_cloud_csv(cloud)
                                                                      : point_cloud_binary(cloud));
}

// --- depth images ----------------------------------------------------------

inline std::uint16_t meters_to_millimeters(double meters) {
  if (!(meters > 0.0)) return 0;
  const double mm = std::round(meters * 1000.0);
  return mm >= 65535.0 ? 65535 : static_cast<std::uint16_t>(mm);
}

inline DepthImage parse_depth_pgm(std::string_view data, const std::string& file) {
  std::size_t pos = 0;
  auto skip_space_and_comments = [&] {
    while (pos < data.size()) {
      const char c = data[pos];
      if (c == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_number = [&](const char* what) -> long {
    skip_space_and_comments();
    const std::size_t start = pos;
    long value = 0;
    while (pos < data.size() && data[pos] >= '0' && data[pos] <= '9' && pos - start < 9) {
      value = value * 10 + (data[pos] - '0');
      ++pos;
    }
    if (pos == start || (pos < data.size() && data[pos] >= '0' && data[pos] <= '9')) {
      throw ParseError::at_offset(file, start, std::string("bad ") + what + " in PGM header");
    }
    return value;
  };

  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    throw ParseError::at_offset(file, 0, "not a binary PGM (expected P5)");
  }
  pos = 2;
  const long width = read_number("width");
  const long height = read_number("height");
  const std::size_t maxval_pos = pos;
  const long maxval = read_number("maxval");
  if (width < 1 || height < 1 || width > 100'000 || height > 100'000) {
    throw ParseError::at_offset(file, 2, "image dimensions out of range");
  }
  if (maxval < 1 || maxval > 65535) {
    throw ParseError::at_offset(file, maxval_pos, "maxval must lie in [1, 65535]");
  }
  if (maxval != 65535) throw UnsupportedMaxval(file, maxval);
  if (pos >= data.size() ||
      !(data[pos] == ' ' || data[pos] == '\n' || data[pos] == '\t' || data[pos] == '\r')) {
    throw ParseError::at_offset(file, pos, "expected whitespace after maxval");
  }
  ++pos;
  const std::size_t expected = static_cast<std::size_t>(width) * height * 2;
  if (data.size() - pos < expected) {
    throw ParseError::at_offset(file, data.size(), "truncated pixel data");
  }
  if (data.size() - pos > expected) {
    throw ParseError::at_offset(file, pos + expected, "trailing bytes after pixel data");
  }
  DepthImage img(static_cast<int>(width), static_cast<int>(height));
  auto values = img.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto hi = static_cast<std::uint8_t>(data[pos + 2 * i]);
    const auto lo = static_cast<std::uint8_t>(data[pos + 2 * i + 1]);
    values[i] = static_cast<double>((hi << 8) | lo) / 1000.0;
  }
  return img;
}

inline std::string depth_pgm(const DepthImage& img) {
  std::string out =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n65535\n";
  const std::size_t header = out.size();
  out.resize(header + img.size() * 2);
  const auto values = img.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint16_t mm = meters_to_millimeters(values[i]);
    out[header + 2 * i] = static_cast<char>(mm >> 8);
    out[header + 2 * i + 1] = static_cast<char>(mm & 0xff);
  }
  return out;
}

inline DepthImage read_depth_image(const std::string& path) {
  return parse_depth_pgm(detail::read_file(path), path);
}

inline void write_depth_image(const std::string& path, const DepthImage& img) {
  atomic_write_file(path, depth_pgm(img));
}

// --- detections ------------------------------------------------------------

struct DetectionSet {
  std::vector<Detection> detections;
  std::vector<std::string> warnings;
};

namespace detail {

/// Crops a box (and its mask) to the image. Returns false if nothing is left.
inline bool clamp_to_image(RoiSpec& roi, int width, int height) {
  const long u0 = std::max<long>(0, roi.u0);
  const long v0 = std::max<long>(0, roi.v0);
  const long u1 = std::min<long>(width, static_cast<long>(roi.u0) + roi.width);
  const long v1 = std::min<long>(height, static_cast<long>(roi.v0) + roi.height);
  if (u1 <= u0 || v1 <= v0) return false;
  RoiSpec out{static_cast<int>(u0), static_cast<int>(v0), static_cast<int>(u1 - u0),
              static_cast<int>(v1 - v0), std::nullopt};
  if (roi.mask) {
    Mask m{out.width, out.height, {}};
    m.cells.reserve(static_cast<std::size_t>(out.width) * out.height);
    for (int row = 0; row < out.height; ++row) {
      for (int col = 0; col < out.width; ++col) {
        m.cells.push_back(roi.mask->at(out.u0 - roi.u0 + col, out.v0 - roi.v0 + row) ? 1 : 0);
      }
    }
    out.mask = std::move(m);
  }
  roi = std::move(out);
  return true;
}

}  // namespace detail

inline DetectionSet parse_detections(std::string_view text, int image_width, int image_height,
                                     const std::string& file) {
  using nlohmann::json;
  DetectionSet set;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    const json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw ParseError::at_line(file, line_no, "invalid JSON");
    if (!j.is_object()) throw ParseError::at_line(file, line_no, "expected a JSON object");

    auto fail = [&](const std::string& cause) { return ParseError::at_line(file, line_no, cause); };
    const auto id_it = j.find("id");
    if (id_it == j.end() || !id_it->is_string()) throw fail("field 'id' must be a string");
    Detection det;
    det.object_id = id_it->get<std::string>();
    if (det.object_id.empty() || det.object_id.find_first_of(",\n\r") != std::string::npos) {
      throw fail("field 'id' must be non-empty and contain no ',' or newline");
    }
    if (!ids.insert(det.object_id).second) throw fail("duplicate id '" + det.object_id + "'");

    const auto bbox_it = j.find("bbox");
    if (bbox_it == j.end() || !bbox_it->is_array() || bbox_it->size() != 4) {
      throw fail("field 'bbox' must be [u0, v0, w, h]");
    }
    long long box[4];
    for (int k = 0; k < 4; ++k) {
      const json& b = (*bbox_it)[k];
      if (!b.is_number_integer()) throw fail("field 'bbox' must hold integers");
      box[k] = b.get<long long>();
      if (box[k] < -1'000'000 || box[k] > 1'000'000) throw fail("field 'bbox' out of range");
    }
    if (box[2] < 1 || box[3] < 1) throw fail("bbox width and height must be >= 1");
    det.roi = RoiSpec{static_cast<int>(box[0]), static_cast<int>(box[1]),
                      static_cast<int>(box[2]), static_cast<int>(box[3]), std::nullopt};

    if (const auto c = j.find("confidence"); c != j.end()) {
      if (!c->is_number()) throw fail("field 'confidence' must be a number");
      det.confidence = c->get<double>();
      if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
        throw fail("field 'confidence' must lie in [0, 1]");
      }
    }

    if (const auto r = j.find("mask_rle"); r != j.end()) {
      if (!r->is_array()) throw fail("field 'mask_rle' must be an array of run lengths");
      std::vector<std::uint64_t> runs;
      runs.reserve(r->size());
      for (const json& run : *r) {
        if (!run.is_number_unsigned() && !(run.is_number_integer() && run.get<long long>() >= 0)) {
          throw fail("field 'mask_rle' must hold non-negative integers");
        }
        runs.push_back(run.get<std::uint64_t>());
      }
      const std::uint64_t cells = rle_length(runs);
      const auto expected = static_cast<std::uint64_t>(box[2]) * static_cast<std::uint64_t>(box[3]);
      if (cells != expected) {
        throw RleLengthMismatch(file, line_no, static_cast<std::size_t>(cells),
                                static_cast<std::size_t>(expected));
      }
      det.roi.mask = Mask{det.roi.width, det.roi.height, decode_rle(runs)};
    }

    const RoiSpec before = det.roi;
    if (!detail::clamp_to_image(det.roi, image_width, image_height)) {
      throw fail("bbox of '" + det.object_id + "' lies entirely outside the image");
    }
    if (det.roi.u0 != before.u0 || det.roi.v0 != before.v0 || det.roi.width != before.width ||
        det.roi.height != before.height) {
      set.warnings.push_back(file + ":line " + std::to_string(line_no) + ": bbox of '" +
                             det.object_id + "' clamped to the image");
    }
    set.detections.push_back(std::move(det));
  }
  return set;
}

inline std::string detections_jsonl(std::span<const Detection> detections) {
  std::string out;
  for (const Detection& d : detections) {
    nlohmann::json j;
    j["id"] = d.object_id;
    j["bbox"] = {d.roi.u0, d.roi.v0, d.roi.width, d.roi.height};
    j["confidence"] = d.confidence;
    if (d.roi.mask) j["mask_rle"] = encode_rle(*d.roi.mask);
    out += j.dump() + '\n';
  }
  return out;
}

inline DetectionSet read_detections(const std::string& path, int image_width, int image_height) {
  return parse_detections(detail::read_file(path), image_width, image_height, path);
}

inline void write_detections(const std::string& path, std::span<const Detection> detections) {
  atomic_write_file(path, detections_jsonl(detections));
}

// --- ground truth ----------------------------------------------------------

inline std::vector<GroundTruthRecord> parse_ground_truth(std::string_view text,
                                                         const std::string& file,
                                                         double range_max = 6.0) {
  std::vector<GroundTruthRecord> out;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "object_id,distance_m,scenario") {
        throw ParseError::at_line(file, line_no, "expected header 'object_id,distance_m,scenario'");
      }
      header_seen = true;
      continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 3) {
      throw ParseError::at_line(file, line_no, "expected 3 fields, got " + std::to_string(f.size()));
    }
    GroundTruthRecord g;
    g.object_id = std::string(detail::trim(f[0]));
    if (g.object_id.empty()) throw ParseError::at_line(file, line_no, "empty object_id");
    const auto d = detail::parse_double(f[1]);
    if (!d || !(*d > 0.0) || *d > range_max) {
      throw ParseError::at_line(file, line_no,
                                "field 'distance_m' must lie in (0, " +
                                    detail::format_double(range_max) + "]");
    }
    g.distance = *d;
    g.scenario = std::string(detail::trim(f[2]));
    if (!ids.insert(g.object_id).second) {
      throw ParseError::at_line(file, line_no, "duplicate object_id '" + g.object_id + "'");
    }
    out.push_back(std::move(g));
  }
  if (!header_seen) throw ParseError::at_line(file, 1, "missing header");
  return out;
}

inline std::string ground_truth_csv(std::span<const GroundTruthRecord> records) {
  std::string out = "object_id,distance_m,scenario\n";
  for (const auto& g : records) {
    out += g.object_id + ',' + detail::format_double(g.distance) + ',' + g.scenario + '\n';
  }
  return out;
}

inline std::vector<GroundTruthRecord> read_ground_truth(const std::string& path,
                                                        double range_max = 6.0) {
  return parse_ground_truth(detail::read_file(path), path, range_max);
}

inline void write_ground_truth(const std::string& path, std::span<const GroundTruthRecord> records) {
  atomic_write_file(path, ground_truth_csv(records));
}

inline void write_calibration(const std::string& path, const CalibratedCamera& cam) {
  atomic_write_file(path, serialize_calibration(cam));
}

}  // namespace fdepth

#endif  // FDEPTH_IO_HPP
