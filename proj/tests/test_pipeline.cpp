// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "test_support.hpp"

namespace fdepth {
namespace {

namespace fs = std::filesystem;

TEST(Pipeline, ZeroDetectionsGiveHeaderOnly) {
  FrameBundle frame = testing::render_bundle(testing::ten_box_scene(0.0), 0);
  frame.detections.clear();
  const PipelineResult r = run_pipeline(frame);
  EXPECT_EQ(estimates_csv(r.estimates, Method::kAverage, 0.4),
            "object_id,method,reduction,estimate_m,valid_count\n");
}

TEST(Pipeline, NoiselessFrameAverageAt40) {
  const FrameBundle frame = testing::render_bundle(testing::ten_box_scene(0.0), 0);
  PipelineOptions opt;
  opt.reduction = 0.4;
  opt.roi_source = RoiSource::kBox;
  const PipelineResult r = run_pipeline(frame, opt);
  ASSERT_EQ(r.estimates.size(), frame.ground_truth.size());
  for (std::size_t i = 0; i < r.estimates.size(); ++i) {
    ASSERT_TRUE(r.estimates[i].estimate.has_value());
    EXPECT_NEAR(r.estimates[i].estimate->value, frame.ground_truth[i].distance, 0.05);
  }
}

TEST(Pipeline, Deterministic) {
  const FrameBundle frame = testing::render_bundle(testing::ten_box_scene(0.2), 4);
  PipelineOptions opt;
  opt.method = Method::kMedian;
  opt.reduction = 0.4;
  const std::string a = estimates_csv(run_pipeline(frame, opt).estimates, opt.method, 0.4);
  const std::string b = estimates_csv(run_pipeline(frame, opt).estimates, opt.method, 0.4);
  EXPECT_EQ(a, b);
}

TEST(Pipeline, FailedRowsAreSoft) {
  FrameBundle frame = testing::render_bundle(testing::ten_box_scene(0.0), 0);
  frame.detections.push_back({"empty", RoiSpec{0, 0, 2, 2, std::nullopt}, 1.0});
  PipelineOptions opt;
  frame.cloud.clear();
  const PipelineResult r = run_pipeline(frame, opt);
  const std::string csv = estimates_csv(r.estimates, opt.method, opt.reduction);
  EXPECT_NE(csv.find("\nempty,average,0.00,,0\n"), std::string::npos) << csv;
}

TEST(Pipeline, DimensionChecks) {
  FrameBundle frame = testing::render_bundle(testing::ten_box_scene(0.0), 0);
  frame.camera_depth = DepthImage(10, 10);
  EXPECT_THROW(run_pipeline(frame), DimensionMismatch);
}

TEST(Pipeline, RoiSources) {
  const FrameBundle frame = testing::render_bundle(testing::ten_box_scene(0.2), 0);
  PipelineOptions opt;
  opt.roi_source = RoiSource::kMask;
  const auto masked = run_pipeline(frame, opt).estimates;
  opt.roi_source = RoiSource::kBox;
  const auto boxed = run_pipeline(frame, opt).estimates;
  ASSERT_EQ(masked.size(), boxed.size());
  bool differs = false;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    differs = differs || masked[i].estimate->value != boxed[i].estimate->value;
  }
  EXPECT_TRUE(differs);
  FrameBundle no_masks = frame;
  for (auto& d : no_masks.detections) d.roi.mask.reset();
  opt.roi_source = RoiSource::kMask;
  for (const auto& e : run_pipeline(no_masks, opt).estimates) EXPECT_FALSE(e.estimate);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fdepth_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    atomic_write_file((dir_ / "scene.txt").string(),
                      serialize_scene_spec(testing::ten_box_scene(0.2)));
    ASSERT_EQ(run("synth --scene " + p("scene.txt") + " --seed 1 --out " + p("f")), 0);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string p(const std::string& name) const { return (dir_ / name).string(); }

  int run(const std::string& args) const {
    const std::string cmd =
        std::string(FDEPTH_CLI_PATH) + " " + args + " 2>" + p("stderr.txt") + " >" + p("stdout.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string frame_args() const {
    return " --calib " + p("f/calib.txt") + " --cloud " + p("f/cloud.bin") + " --depth " +
           p("f/camera_depth.pgm") + " --detections " + p("f/detections.jsonl");
  }

  fs::path dir_;
};

TEST_F(CliTest, EstimateWritesCsv) {
  ASSERT_EQ(run("estimate" + frame_args() + " --method median --reduction 0.4 --out " +
                p("est.csv")),
            0);
  const std::string csv = detail::read_file(p("est.csv"));
  EXPECT_EQ(csv.rfind("object_id,method,reduction,estimate_m,valid_count\nobj0,median,0.40,", 0),
            0u)
      << csv;
}

TEST_F(CliTest, EvalAndSweep) {
  ASSERT_EQ(run("eval" + frame_args() + " --gt " + p("f/gt.csv") + " --out " + p("r.csv")), 0);
  EXPECT_EQ(detail::read_file(p("r.csv")).rfind("method,reduction,mean_m,std_m,median_m,n\n", 0),
            0u);
  ASSERT_EQ(run("sweep" + frame_args() + " --gt " + p("f/gt.csv") + " --out " + p("s.csv") +
                " --methods average,center --reductions 0,0.4"),
            0);
  const std::string s = detail::read_file(p("s.csv"));
  EXPECT_NE(s.find("mask_average,0.00,"), std::string::npos);
  EXPECT_NE(detail::read_file(p("stderr.txt")).find("best:"), std::string::npos);
}

TEST_F(CliTest, HardErrorsExitNonZero) {
  EXPECT_EQ(run("estimate" + frame_args() + " --method mean"), 1);
  EXPECT_EQ(run("estimate" + frame_args() + " --reduction 0.99"), 1);
  EXPECT_EQ(run("estimate --calib " + p("missing.txt") + " --cloud " + p("f/cloud.bin")), 1);
  atomic_write_file(p("bad.bin"), "XXXXjunk");
  EXPECT_EQ(run("project --calib " + p("f/calib.txt") + " --cloud " + p("bad.bin") +
                " --out " + p("x.pgm")),
            1);
  EXPECT_NE(detail::read_file(p("stderr.txt")).find("bad.bin"), std::string::npos);
  EXPECT_NE(run("frobnicate"), 0);
}

}  // namespace
}  // namespace fdepth
