// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The fdepth Authors

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace fdepth {
namespace {

TEST(PerObjectError, Examples) {
  const GroundTruthRecord gt{"a", 2.50, "s"};
  EXPECT_NEAR(per_object_error({2.53, Method::kAverage, 1, 0}, gt), 0.03, 1e-12);
  EXPECT_EQ(per_object_error({2.50, Method::kAverage, 1, 0}, gt), 0.0);
  EXPECT_NEAR(per_object_error({2.50, Method::kAverage, 1, 0}, {"a", 2.53, "s"}), 0.03, 1e-12);
}

TEST(Stats, HandComputed) {
  const std::vector<double> e{0.01, 0.02, 0.03};
  const ErrorStats s = aggregate_stats(e);
  EXPECT_NEAR(s.mean, 0.02, 1e-15);
  EXPECT_NEAR(s.std, 0.01, 1e-15);
  EXPECT_NEAR(s.median, 0.02, 1e-15);
  EXPECT_EQ(s.n, 3u);
}

TEST(Stats, SingletonHasZeroStd) {
  const ErrorStats s = aggregate_stats(std::vector<double>{0.05});
  EXPECT_EQ(s.mean, 0.05);
  EXPECT_EQ(s.std, 0.0);
  EXPECT_EQ(s.median, 0.05);
}

TEST(Stats, EmptyThrows) { EXPECT_THROW(aggregate_stats({}), EmptyInput); }

TEST(Stats, MatchesHighPrecisionOracle) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> len(1, 200);
  std::uniform_real_distribution<double> err(0.0, 0.5);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> v(len(rng));
    for (auto& x : v) x = err(rng);
    const ErrorStats s = aggregate_stats(v);
    const auto [mean, sd] = testing::mpfr_mean_std(v);
    ASSERT_NEAR(s.mean, mean, 1e-12);
    ASSERT_NEAR(s.std, sd, 1e-12);
    ASSERT_EQ(s.median, testing::oracle_median(v));
    ASSERT_EQ(s.n, v.size());
  }
}

std::vector<ObjectEstimate> estimates_of(
    std::initializer_list<std::pair<const char*, std::optional<double>>> rows) {
  std::vector<ObjectEstimate> out;
  for (const auto& [id, v] : rows) {
    ObjectEstimate oe{id, std::nullopt};
    if (v) oe.estimate = DepthEstimate{*v, Method::kAverage, 1, 0.0};
    out.push_back(oe);
  }
  return out;
}

TEST(Evaluate, ExcludesUndetectedAndInvalid) {
  const std::vector<GroundTruthRecord> gt{
      {"a", 1.0, "s"}, {"b", 2.0, "s"}, {"c", 3.0, "s"}, {"d", 4.0, "s"}};
  const auto est = estimates_of({{"a", 1.1}, {"b", std::nullopt}, {"d", 3.7}, {"x", 9.0}});
  const ErrorReport r = evaluate(est, gt);
  ASSERT_EQ(r.per_object.size(), 2u);
  EXPECT_EQ(r.invalid, std::vector<std::string>{"b"});
  EXPECT_EQ(r.undetected, std::vector<std::string>{"c"});
  EXPECT_EQ(r.unmatched, std::vector<std::string>{"x"});
  ASSERT_TRUE(r.stats.has_value());
  EXPECT_EQ(r.stats->n, 2u);
  EXPECT_NEAR(r.stats->mean, 0.2, 1e-12);
  for (const auto& e : r.per_object) EXPECT_GE(e.abs_error, 0.0);
}

TEST(Evaluate, NothingValidLeavesStatsEmpty) {
  const std::vector<GroundTruthRecord> gt{{"a", 1.0, "s"}};
  const ErrorReport r = evaluate(estimates_of({{"a", std::nullopt}}), gt);
  EXPECT_FALSE(r.stats.has_value());
  EXPECT_EQ(r.invalid, std::vector<std::string>{"a"});
  EXPECT_EQ(report_csv(r, "average", 0.4),
            "method,reduction,mean_m,std_m,median_m,n\naverage,0.40,nan,nan,nan,0\n");
}

class SweepTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    frame_ = new FrameBundle(testing::render_bundle(testing::ten_box_scene(0.2), 1));
  }
  static void TearDownTestSuite() { delete frame_; }
  static FrameBundle* frame_;
};
FrameBundle* SweepTest::frame_ = nullptr;

TEST_F(SweepTest, ZeroReductionRowEqualsDirectEstimation) {
  const SweepResult s = sweep(*frame_, {kAllMethods.begin(), kAllMethods.end()}, {0.0});
  PipelineOptions opt;
  opt.roi_source = RoiSource::kBox;
  for (Method m : kAllMethods) {
    opt.method = m;
    const ErrorReport direct = evaluate(run_pipeline(*frame_, opt).estimates,
                                        frame_->ground_truth);
    const SweepCell& cell = s.at(m, 0.0);
    ASSERT_EQ(cell.report.per_object.size(), direct.per_object.size());
    for (std::size_t i = 0; i < direct.per_object.size(); ++i) {
      EXPECT_EQ(cell.report.per_object[i].estimate, direct.per_object[i].estimate);
    }
    EXPECT_EQ(cell.report.invalid, direct.invalid);
  }
}

TEST_F(SweepTest, PermutationInvariantAndDeterministic) {
  // Sets order their keys; feed different insertion orders anyway.
  std::set<Method> m1{Method::kCenter, Method::kAverage, Method::kMedian};
  std::set<Method> m2{Method::kMedian, Method::kCenter, Method::kAverage};
  std::set<double> r1{0.6, 0.0, 0.4};
  std::set<double> r2{0.4, 0.6, 0.0};
  const SweepResult a = sweep(*frame_, m1, r1);
  const SweepResult b = sweep(*frame_, m2, r2);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  EXPECT_EQ(sweep_per_object_csv(a, frame_->ground_truth),
            sweep_per_object_csv(b, frame_->ground_truth));
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(sweep_csv(a), sweep_csv(sweep(*frame_, m1, r1)));
}

TEST_F(SweepTest, ReductionHelpsAndMaskAgrees) {
  const SweepResult s = sweep(*frame_, {Method::kAverage}, {0.0, 0.4});
  const double at0 = s.at(Method::kAverage, 0.0).report.stats->mean;
  const double at40 = s.at(Method::kAverage, 0.4).report.stats->mean;
  EXPECT_LE(at40, at0);
  const SweepCell* mask = s.mask_cell();
  ASSERT_NE(mask, nullptr);
  const auto& box = s.at(Method::kAverage, 0.4).report.per_object;
  ASSERT_EQ(mask->report.per_object.size(), box.size());
  for (std::size_t i = 0; i < box.size(); ++i) {
    EXPECT_LE(std::abs(mask->report.per_object[i].estimate - box[i].estimate), 0.01)
        << box[i].object_id;
  }
}

TEST_F(SweepTest, CsvShape) {
  const SweepResult s = sweep(*frame_, {Method::kAverage, Method::kNearest}, {0.0, 0.4});
  const std::string csv = sweep_csv(s);
  EXPECT_EQ(csv.rfind("method,reduction,mean_m,std_m,median_m,n\n", 0), 0u);
  EXPECT_NE(csv.find("\naverage,0.40,"), std::string::npos);
  EXPECT_NE(csv.find("\nmask_average,0.00,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST_F(SweepTest, RejectsBadArguments) {
  EXPECT_THROW(sweep(*frame_, {Method::kAverage}, {0.99}), InvalidFraction);
  EXPECT_THROW(sweep(*frame_, {}, {0.0}), EmptyInput);
  FrameBundle empty = *frame_;
  empty.detections.clear();
  EXPECT_THROW(sweep(empty, {Method::kAverage}, {0.0}), EmptyInput);
}

TEST(Sweep, AllNanIsAnError) {
  FrameBundle f = testing::render_bundle(testing::ten_box_scene(0.0), 1);
  f.camera_depth = DepthImage(f.camera_depth.width(), f.camera_depth.height());
  f.cloud.clear();
  EXPECT_THROW(sweep(f, {Method::kAverage}, {0.0}), NoValidData);
}

}  // namespace
}  // namespace fdepth
