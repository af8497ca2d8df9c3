#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tsd/evaluation.hpp"

using namespace tsd;

namespace {

// Ground-truth record whose box height is the exact inverse of `depth`.
DetectionRecord gt_at_depth(int frame, int gt_id, double depth, double left = 100.0) {
  const auto k = CameraIntrinsics::kitti();
  DetectionRecord r;
  r.frame_index = frame;
  r.gt_track_id = gt_id;
  r.class_label = ClassLabel::Car;
  const double h = bbox_height_at_range(depth, ClassLabel::Car, k);
  r.bbox = {left, 150.0, left + 1.2 * h, 150.0 + h};
  r.gt_depth_m = depth;
  r.gt_location_camera = Vec3{-3.0, 1.6, depth};
  return r;
}

TimeSpaceDiagram diagram_with(std::map<int, std::vector<double>> links) {
  TimeSpaceDiagram d;
  d.link_length_m = 1000;
  for (const auto& [id, ls] : links)
    for (std::size_t k = 0; k < ls.size(); ++k) {
      TrajectoryPoint p;
      p.track_id = id;
      p.frame_index = static_cast<int>(k);
      p.time_s = 0.1 * static_cast<double>(k);
      p.camera_range_m = ls[k];
      p.link_distance_m = ls[k];
      d.vehicle_trajectories[id].push_back(p);
    }
  return d;
}

}  // namespace

TEST(Rmse, Examples) {
  const std::vector<double> a{1.5, -2.0, 7.25};
  EXPECT_EQ(rmse(a, a), 0.0);
  EXPECT_DOUBLE_EQ(rmse(std::vector{2.0, 2.0}, std::vector{0.0, 0.0}), 2.0);
  EXPECT_NEAR(rmse(std::vector{1.0, 2.0, 3.0}, std::vector{2.0, 2.0, 2.0}), std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_NEAR(rmse(std::vector{1.0, 2.0, 3.0}, std::vector{2.0, 2.0, 2.0}), 0.8165, 1e-4);
  EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), ValidationError);
  EXPECT_THROW(rmse(std::vector{1.0}, std::vector{1.0, 2.0}), ValidationError);
}

TEST(Rmse, NonNegativeAndPermutationInvariant) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 17;
    std::vector<double> p(n), t(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = g(rng), t[i] = g(rng);
    const double r = rmse(p, t);
    EXPECT_GT(r, 0.0);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> p2(n), t2(n);
    for (std::size_t i = 0; i < n; ++i) p2[i] = p[idx[i]], t2[i] = t[idx[i]];
    EXPECT_NEAR(rmse(p2, t2), r, 1e-12 * r);
    // Direct definition in long double.
    long double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (long double)(p[i] - t[i]) * (p[i] - t[i]);
    EXPECT_NEAR(r, std::sqrt(static_cast<double>(s / n)), 1e-12 * r);
  }
}

TEST(RangeReport, ExactInversionIsZero) {
  std::vector<DetectionRecord> gt;
  for (int f = 0; f < 10; ++f) {
    gt.push_back(gt_at_depth(f, 0, 8.0 + 2.5 * f));
    gt.push_back(gt_at_depth(f, 3, 40.0 - f, 600));
  }
  const auto r = range_error_report(gt, CameraIntrinsics::kitti());
  ASSERT_EQ(r.per_track_rmse_m.size(), 2u);
  for (const auto& [id, v] : r.per_track_rmse_m) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_EQ(r.instance_count, 20);
  EXPECT_EQ(r.scenario, ErrorScenario::GtBoxes);
}

TEST(RangeReport, InflatedBoxesHalveRange) {
  const std::vector<double> depths{10, 15, 22, 37, 50};
  std::vector<DetectionRecord> gt;
  for (std::size_t f = 0; f < depths.size(); ++f) {
    auto r = gt_at_depth(static_cast<int>(f), 1, depths[f]);
    r.bbox.bottom = r.bbox.top + 2.0 * r.bbox.height();
    gt.push_back(r);
  }
  double s = 0;
  for (double d : depths) s += (d / 2 - d) * (d / 2 - d);
  const auto r = range_error_report(gt, CameraIntrinsics::kitti());
  EXPECT_NEAR(r.per_track_rmse_m.at(1), std::sqrt(s / depths.size()), 1e-9);
}

TEST(RangeReport, PredictedBoxesHandArithmetic) {
  const auto k = CameraIntrinsics::kitti();
  std::vector<DetectionRecord> gt{gt_at_depth(0, 2, 10.0), gt_at_depth(1, 2, 20.0)};
  std::vector<DetectionRecord> dets;
  const double est[2] = {11.0, 19.0};
  for (int f = 0; f < 2; ++f) {
    DetectionRecord d;
    d.frame_index = f;
    d.class_label = ClassLabel::Car;
    const double h = bbox_height_at_range(est[f], ClassLabel::Car, k);
    d.bbox = {gt[f].bbox.left, gt[f].bbox.bottom - h, gt[f].bbox.right, gt[f].bbox.bottom};
    dets.push_back(d);
  }
  const auto r = range_error_report(dets, gt, k);
  ASSERT_EQ(r.per_track_rmse_m.size(), 1u);
  EXPECT_NEAR(r.per_track_rmse_m.at(2), 1.0, 1e-9);
  EXPECT_EQ(r.scenario, ErrorScenario::PredictedBoxes);

  // Far-away detections are not true positives.
  for (auto& d : dets) d.bbox.left += 900, d.bbox.right += 900;
  const auto none = range_error_report(dets, gt, k);
  EXPECT_EQ(none.instance_count, 0);
  EXPECT_TRUE(none.per_track_rmse_m.empty());
}

TEST(TrajectoryReport, IdentityAndShift) {
  const auto ref = diagram_with({{1, {100, 90, 80, 70}}, {2, {300, 280, 260}}});
  const auto same = trajectory_error_report(ref, ref, TrackMatching{{1, 1}, {2, 2}});
  for (const auto& [id, v] : same.per_track_rmse_m) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(same.instance_count, 7);

  const auto shifted = diagram_with({{10, {103, 93, 83, 73}}, {20, {303, 283, 263}}});
  const auto r = trajectory_error_report(shifted, ref);  // greedy matching
  ASSERT_EQ(r.per_track_rmse_m.size(), 2u);
  EXPECT_NEAR(r.per_track_rmse_m.at(10), 3.0, 1e-12);
  EXPECT_NEAR(r.per_track_rmse_m.at(20), 3.0, 1e-12);
  EXPECT_EQ(r.missed_reference_tracks, 0);
  EXPECT_NEAR(r.mean_rmse_m, 3.0, 1e-12);
  EXPECT_NEAR(r.std_rmse_m, 0.0, 1e-12);
}

TEST(TrajectoryReport, MissesAndSkippedPairs) {
  const auto ref = diagram_with({{1, {100, 90, 80}}, {2, {300, 280, 260}}});
  auto pred = diagram_with({{5, {101, 91, 81}}});
  auto r = trajectory_error_report(pred, ref);
  EXPECT_EQ(r.missed_reference_tracks, 1);
  EXPECT_NEAR(r.per_track_rmse_m.at(5), 1.0, 1e-12);

  // No common timestamps for an explicitly given pair.
  for (auto& p : pred.vehicle_trajectories[5]) p.time_s += 5.0;
  r = trajectory_error_report(pred, ref, TrackMatching{{5, 1}});
  EXPECT_EQ(r.skipped_pairs, 1);
  EXPECT_TRUE(r.per_track_rmse_m.empty());
}

TEST(ErrorReport, SummaryUsesPopulationStd) {
  ErrorReport r;
  r.per_track_rmse_m = {{1, 1.0}, {2, 3.0}};
  summarize(r);
  EXPECT_DOUBLE_EQ(r.mean_rmse_m, 2.0);
  EXPECT_DOUBLE_EQ(r.std_rmse_m, 1.0);
  std::ostringstream txt, csv;
  write_error_report_text(txt, r);
  write_error_report_csv(csv, r);
  EXPECT_NE(txt.str().find("mean_rmse_m"), std::string::npos);
  EXPECT_EQ(csv.str().rfind("scenario,track_id,rmse_m\n", 0), 0u);
}
