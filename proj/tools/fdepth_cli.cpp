// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

// fdepth: object depth from fused LiDAR + RGB-D frames.
//
//   fdepth synth    --scene s.txt --seed 1 --out dir/
//   fdepth project  --calib c.txt --cloud p.bin --out lidar.pgm
//   fdepth fuse     --calib c.txt --cloud p.bin --depth cam.pgm --out fused.pgm
//   fdepth estimate --calib c.txt --cloud p.bin --depth cam.pgm --detections d.jsonl
//                   --method average --reduction 0.4 --out est.csv
//   fdepth eval     ... --gt gt.csv --out report.csv [--per-object po.csv]
//   fdepth sweep    ... --gt gt.csv --out matrix.csv [--per-object po.csv]

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "fdepth/fdepth.hpp"

namespace {

using namespace fdepth;

struct GlobalArgs {
  std::string calib;
  std::string policy = "0.3,3.0,6.0";
  std::string method = "average";
  double reduction = 0.4;
  std::uint64_t seed = 0;
  std::string out;
};

struct FrameArgs {
  std::string cloud;
  std::string depth;
  std::string detections;
  std::string gt;
  std::string roi = "auto";
  bool no_interp = false;
  double azimuth_tolerance = kDefaultAzimuthTolerance;
};

FusionPolicy parse_policy(const std::string& text) {
  const auto parts = detail::split(text, ',');
  if (parts.size() != 3) throw InvalidPolicy("--policy expects near,camera_max,range_max");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    const auto d = detail::parse_double(parts[i]);
    if (!d) throw InvalidPolicy("--policy: '" + std::string(parts[i]) + "' is not a number");
    v[i] = *d;
  }
  FusionPolicy p{v[0], v[1], v[2]};
  validate(p);
  return p;
}

Method parse_method_arg(const std::string& s) {
  const auto m = parse_method(s);
  if (!m) throw InvalidArgument("unknown method '" + s + "'");
  return *m;
}

RoiSource parse_roi_source(const std::string& s) {
  if (s == "auto") return RoiSource::kAuto;
  if (s == "bbox") return RoiSource::kBox;
  if (s == "mask") return RoiSource::kMask;
  throw InvalidArgument("--roi must be auto, bbox or mask");
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw InvalidArgument(std::string(flag) + " is required");
}

FrameBundle load_frame(const GlobalArgs& g, const FrameArgs& f, bool need_depth,
                       bool need_detections, bool need_gt, double range_max) {
  require(g.calib, "--calib");
  require(f.cloud, "--cloud");
  FrameBundle frame;
  frame.calibration = load_calibration(g.calib);
  frame.cloud = read_point_cloud(f.cloud);
  if (need_depth) {
    require(f.depth, "--depth");
    frame.camera_depth = read_depth_image(f.depth);
  }
  if (need_detections) {
    require(f.detections, "--detections");
    auto set = read_detections(f.detections, frame.calibration.image_width,
                               frame.calibration.image_height);
    for (const auto& w : set.warnings) std::cerr << "warning: " << w << "\n";
    frame.detections = std::move(set.detections);
  }
  if (need_gt) {
    require(f.gt, "--gt");
    frame.ground_truth = read_ground_truth(f.gt, range_max);
  }
  return frame;
}

PipelineOptions pipeline_options(const GlobalArgs& g, const FrameArgs& f) {
  PipelineOptions opt;
  opt.method = parse_method_arg(g.method);
  opt.reduction = g.reduction;
  opt.policy = parse_policy(g.policy);
  opt.interpolate = !f.no_interp;
  opt.azimuth_tolerance = f.azimuth_tolerance;
  opt.roi_source = parse_roi_source(f.roi);
  return opt;
}

void emit(const std::string& path, const std::string& data) {
  if (path.empty() || path == "-") {
    std::fwrite(data.data(), 1, data.size(), stdout);
  } else {
    atomic_write_file(path, data);
  }
}

void print_exclusions(const ErrorReport& report) {
  auto join = [](const std::vector<std::string>& ids) {
    std::string s;
    for (const auto& id : ids) s += (s.empty() ? "" : ",") + id;
    return s.empty() ? std::string("-") : s;
  };
  std::cerr << "undetected: " << join(report.undetected) << "\n";
  std::cerr << "invalid: " << join(report.invalid) << "\n";
}

std::set<Method> parse_methods(const std::string& list) {
  std::set<Method> out;
  for (auto part : detail::split(list, ',')) out.insert(parse_method_arg(std::string(part)));
  return out;
}

std::set<double> parse_reductions(const std::string& list) {
  std::set<double> out;
  for (auto part : detail::split(list, ',')) {
    const auto d = detail::parse_double(part);
    if (!d) throw InvalidFraction("--reductions: '" + std::string(part) + "' is not a number");
    out.insert(*d);
  }
  return out;
}

void write_synth(const std::string& scene_path, std::uint64_t seed, const std::string& out_dir,
                 const std::string& cloud_format) {
  require(scene_path, "--scene");
  require(out_dir, "--out");
  const SceneSpec spec = parse_scene_spec(detail::read_file(scene_path), scene_path);
  const Scene scene = build_scene(spec);
  const RenderedFrame frame = render_frame(scene, seed);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_calibration((dir / "calib.txt").string(), scene.camera);
  write_point_cloud((dir / ("cloud." + cloud_format)).string(), frame.cloud);
  write_depth_image((dir / "camera_depth.pgm").string(), frame.camera_depth);
  write_detections((dir / "detections.jsonl").string(), frame.detections);
  write_ground_truth((dir / "gt.csv").string(), frame.ground_truth);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object depth estimation from fused LiDAR and RGB-D depth"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs g;
  app.add_option("--calib", g.calib, "Calibration file");
  app.add_option("--policy", g.policy, "Fusion policy near,camera_max,range_max (meters)")
      ->capture_default_str();
  app.add_option("--method", g.method, "average | median | nearest | center")
      ->capture_default_str();
  app.add_option("--reduction", g.reduction, "Bounding-box area fraction removed, [0, 0.95]")
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for synthetic rendering")->capture_default_str();
  app.add_option("--out", g.out, "Output file (directory for synth); '-' for stdout");

  FrameArgs f;
  auto add_frame_opts = [&](CLI::App* sub, bool depth, bool dets, bool gt) {
    sub->add_option("--cloud", f.cloud, "Point cloud (.csv or binary)");
    sub->add_flag("--no-interp", f.no_interp, "Skip scanline interpolation");
    sub->add_option("--azimuth-tol", f.azimuth_tolerance, "Interpolation azimuth tolerance (rad)")
        ->capture_default_str();
    if (depth) sub->add_option("--depth", f.depth, "Camera depth image (16-bit PGM, mm)");
    if (dets) {
      sub->add_option("--detections", f.detections, "Detections (JSON lines)");
      sub->add_option("--roi", f.roi, "auto | bbox | mask")->capture_default_str();
    }
    if (gt) sub->add_option("--gt", f.gt, "Ground truth CSV");
  };

  auto* project = app.add_subcommand("project", "Project the LiDAR cloud into a depth image");
  add_frame_opts(project, false, false, false);
  auto* fuse = app.add_subcommand("fuse", "Fuse LiDAR and camera depth");
  add_frame_opts(fuse, true, false, false);
  auto* est = app.add_subcommand("estimate", "Estimate the depth of every detection");
  add_frame_opts(est, true, true, false);
  auto* eval = app.add_subcommand("eval", "Compare estimates against ground truth");
  add_frame_opts(eval, true, true, true);
  std::string per_object;
  eval->add_option("--per-object", per_object, "Per-object error CSV");
  auto* sw = app.add_subcommand("sweep", "Method x reduction error matrix");
  add_frame_opts(sw, true, true, true);
  std::string methods = "average,median,nearest,center";
  std::string reductions = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  sw->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  sw->add_option("--reductions", reductions, "Comma-separated fractions")->capture_default_str();
  sw->add_option("--per-object", per_object, "Per-object error CSV for every cell");
  auto* synth = app.add_subcommand("synth", "Render a synthetic frame");
  std::string scene_path;
  std::string cloud_format = "bin";
  synth->add_option("--scene", scene_path, "Scene file");
  synth->add_option("--cloud-format", cloud_format, "bin | csv")
      ->check(CLI::IsMember({"bin", "csv"}))
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      write_synth(scene_path, g.seed, g.out, cloud_format);
    } else if (project->parsed()) {
      require(g.out, "--out");
      const FrameBundle frame = load_frame(g, f, false, false, false, 0.0);
      const DepthImage lidar = lidar_depth_image(frame.cloud, frame.calibration, !f.no_interp,
                                                 f.azimuth_tolerance);
      write_depth_image(g.out, lidar);
    } else if (fuse->parsed()) {
      require(g.out, "--out");
      const FrameBundle frame = load_frame(g, f, true, false, false, 0.0);
      PipelineOptions opt;
      opt.policy = parse_policy(g.policy);
      opt.interpolate = !f.no_interp;
      opt.azimuth_tolerance = f.azimuth_tolerance;
      write_depth_image(g.out, fuse_frame(frame, opt));
    } else if (est->parsed()) {
      const FrameBundle frame = load_frame(g, f, true, true, false, 0.0);
      const PipelineOptions opt = pipeline_options(g, f);
      const PipelineResult result = run_pipeline(frame, opt);
      emit(g.out, estimates_csv(result.estimates, opt.method, opt.reduction));
    } else if (eval->parsed()) {
      const PipelineOptions opt = pipeline_options(g, f);
      const FrameBundle frame = load_frame(g, f, true, true, true, opt.policy.range_max);
      const PipelineResult result = run_pipeline(frame, opt);
      const ErrorReport report = evaluate(result.estimates, frame.ground_truth);
      const std::string method(to_string(opt.method));
      emit(g.out, report_csv(report, method, opt.reduction));
      if (!per_object.empty()) {
        atomic_write_file(per_object,
                          per_object_csv_header() + per_object_csv_rows(report, method,
                                                                        opt.reduction,
                                                                        frame.ground_truth));
      }
      print_exclusions(report);
    } else if (sw->parsed()) {
      SweepOptions opt;
      opt.policy = parse_policy(g.policy);
      opt.interpolate = !f.no_interp;
      opt.azimuth_tolerance = f.azimuth_tolerance;
      const FrameBundle frame = load_frame(g, f, true, true, true, opt.policy.range_max);
      const SweepResult result =
          sweep(frame, parse_methods(methods), parse_reductions(reductions), opt);
      emit(g.out, sweep_csv(result));
      if (!per_object.empty()) {
        atomic_write_file(per_object, sweep_per_object_csv(result, frame.ground_truth));
      }
      const SweepCell& best = result.cells.at(result.best);
      std::cerr << "best: " << result.best.method_name() << " @ "
                << format_reduction(result.best.reduction) << " mean "
                << format_meters(best.report.stats->mean) << " m\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
