#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "tsd/tracker.hpp"

using namespace tsd;

namespace {

DetectionRecord det(int frame, BBox box, int gt = -1, double conf = 1.0) {
  DetectionRecord d;
  d.frame_index = frame;
  d.class_label = ClassLabel::Car;
  d.bbox = box;
  d.confidence = conf;
  d.gt_track_id = gt;
  return d;
}

BBox shifted(BBox b, double dx) { return {b.left + dx, b.top, b.right + dx, b.bottom}; }

}  // namespace

TEST(Tracker, FirstFrameCreatesTentativeTracks) {
  Tracker tr;
  const std::vector<DetectionRecord> d{det(0, {10, 10, 50, 40}), det(0, {300, 10, 350, 40})};
  const auto snap = tr.step(0, d);
  ASSERT_EQ(snap.size(), 2u);
  EXPECT_EQ(snap[0].track_id, 1);
  EXPECT_EQ(snap[1].track_id, 2);
  for (const auto& t : snap) EXPECT_EQ(t.status, TrackStatus::Tentative);
}

TEST(Tracker, ConfirmedAfterNInitHits) {
  Tracker tr;
  const BBox b{100, 100, 160, 150};
  tr.step(0, std::vector{det(0, b)});
  const auto snap = tr.step(1, std::vector{det(1, shifted(b, 1))});
  ASSERT_EQ(snap.size(), 1u);
  EXPECT_EQ(snap[0].track_id, 1);
  EXPECT_EQ(snap[0].status, TrackStatus::Confirmed);
  EXPECT_EQ(snap[0].hits, 2);
}

TEST(Tracker, NInitOneConfirmsImmediately) {
  TrackerConfig c;
  c.n_init = 1;
  Tracker tr(c);
  const auto snap = tr.step(0, std::vector{det(0, {0, 0, 10, 10})});
  EXPECT_EQ(snap[0].status, TrackStatus::Confirmed);
}

TEST(Tracker, ConfirmedTrackDeletedAfterMaxAgePlusOneMisses) {
  TrackerConfig c;
  c.max_age = 5;
  Tracker tr(c);
  const BBox b{100, 100, 160, 150};
  tr.step(0, std::vector{det(0, b)});
  tr.step(1, std::vector{det(1, b)});
  for (int f = 2; f <= 1 + c.max_age; ++f) {
    const auto snap = tr.step(f, {});
    ASSERT_EQ(snap.size(), 1u);
    EXPECT_EQ(snap[0].status, TrackStatus::Confirmed) << "frame " << f;
  }
  const auto snap = tr.step(2 + c.max_age, {});
  ASSERT_EQ(snap.size(), 1u);
  EXPECT_EQ(snap[0].status, TrackStatus::Deleted);
  EXPECT_TRUE(tr.step(3 + c.max_age, {}).empty());
  ASSERT_EQ(tr.confirmed_tracks().size(), 1u);
  EXPECT_EQ(tr.confirmed_tracks()[0].history.size(), 2u);
}

TEST(Tracker, FrameGapCountsAsMisses) {
  TrackerConfig c;
  c.max_age = 3;
  Tracker tr(c);
  const BBox b{100, 100, 160, 150};
  tr.step(0, std::vector{det(0, b)});
  tr.step(1, std::vector{det(1, b)});
  const auto snap = tr.step(6, {});
  ASSERT_EQ(snap.size(), 1u);
  EXPECT_EQ(snap[0].status, TrackStatus::Deleted);
}

TEST(Tracker, TentativeDroppedOnFirstMiss) {
  Tracker tr;
  tr.step(0, std::vector{det(0, {0, 0, 40, 40})});
  const auto snap = tr.step(1, {});
  ASSERT_EQ(snap.size(), 1u);
  EXPECT_EQ(snap[0].status, TrackStatus::Deleted);
  EXPECT_TRUE(tr.live_tracks().empty());
  EXPECT_TRUE(tr.confirmed_tracks().empty());
}

TEST(Tracker, LowIouDetectionStaysUnmatched) {
  // Boxes 0..10 and 6.666..16.666 (same height) overlap with IoU 0.2.
  Tracker tr;
  const BBox a{0, 0, 10, 10};
  const BBox b{20.0 / 3.0, 0, 20.0 / 3.0 + 10, 10};
  const double inter = (10 - 20.0 / 3.0) * 10;
  ASSERT_NEAR(inter / (200 - inter), 0.2, 1e-12);
  tr.step(0, std::vector{det(0, a)});
  const KalmanFilter kf;
  const auto res = associate(tr.live_tracks(), std::vector{det(1, b)}, tr.config(), kf);
  EXPECT_TRUE(res.matches.empty());
  EXPECT_EQ(res.unmatched_tracks, (std::vector<int>{0}));
  EXPECT_EQ(res.unmatched_detections, (std::vector<int>{0}));
}

TEST(Tracker, ExactOverlapMatches) {
  Tracker tr;
  tr.step(0, std::vector{det(0, {5, 5, 45, 35})});
  const auto res = associate(tr.live_tracks(), std::vector{det(1, {5, 5, 45, 35})}, tr.config(),
                             KalmanFilter{});
  ASSERT_EQ(res.matches.size(), 1u);
  EXPECT_EQ(res.matches[0], std::make_pair(0, 0));
}

TEST(Tracker, SeparatedObjectsNeverSwap) {
  Tracker tr;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::map<int, std::set<int>> gt_per_track;
  for (int f = 0; f < 50; ++f) {
    std::vector<DetectionRecord> d;
    // Moving towards each other but on different rows.
    d.push_back(det(f, shifted({100, 100, 160, 150}, 4.0 * f + noise(rng)), 0));
    d.push_back(det(f, shifted({600, 300, 660, 350}, -4.0 * f + noise(rng)), 1));
    if (f % 2) std::swap(d[0], d[1]);  // detection order must not matter
    for (const auto& t : tr.step(f, d))
      for (const auto& o : t.history) gt_per_track[t.track_id].insert(o.gt_track_id);
  }
  const auto confirmed = tr.confirmed_tracks();
  ASSERT_EQ(confirmed.size(), 2u);
  for (const auto& [id, gts] : gt_per_track) EXPECT_EQ(gts.size(), 1u) << "track " << id;
  EXPECT_EQ(confirmed[0].history.size(), 50u);
}

TEST(Tracker, OutOfOrderFrameThrows) {
  Tracker tr;
  tr.step(3, {});
  EXPECT_THROW(tr.step(3, {}), PipelineError);
  EXPECT_THROW(tr.step(1, {}), PipelineError);
}

TEST(Tracker, DeterministicAndIdsNeverReused) {
  auto run = [] {
    Tracker tr;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(0, 1000), size(20, 80), u(0, 1);
    std::vector<std::vector<Track>> out;
    for (int f = 0; f < 60; ++f) {
      std::vector<DetectionRecord> d;
      const int n = static_cast<int>(u(rng) * 6);
      for (int i = 0; i < n; ++i) {
        const double l = pos(rng), t = pos(rng) * 0.3;
        d.push_back(det(f, {l, t, l + size(rng), t + size(rng)}, -1, 0.5 + 0.5 * u(rng)));
      }
      out.push_back(tr.step(f, d));
    }
    return std::make_pair(out, tr.confirmed_tracks());
  };
  const auto [a, ca] = run();
  const auto [b, cb] = run();
  ASSERT_EQ(a.size(), b.size());
  std::set<int> seen_deleted;
  int max_id = 0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    ASSERT_EQ(a[f].size(), b[f].size());
    std::set<int> ids;
    for (std::size_t i = 0; i < a[f].size(); ++i) {
      EXPECT_EQ(a[f][i].track_id, b[f][i].track_id);
      EXPECT_TRUE(a[f][i].state.mean == b[f][i].state.mean);
      EXPECT_TRUE(ids.insert(a[f][i].track_id).second);
      EXPECT_FALSE(seen_deleted.count(a[f][i].track_id));
      max_id = std::max(max_id, a[f][i].track_id);
    }
    for (const auto& t : a[f])
      if (t.status == TrackStatus::Deleted) seen_deleted.insert(t.track_id);
  }
  EXPECT_GT(max_id, 10);
  ASSERT_EQ(ca.size(), cb.size());
  for (const auto& t : ca)
    for (std::size_t i = 1; i < t.history.size(); ++i)
      EXPECT_LT(t.history[i - 1].frame_index, t.history[i].frame_index);
}

TEST(Tracker, MajorityGroundTruthId) {
  Track t;
  for (int g : {4, 2, 2, 4, 7}) {
    TrackObservation o;
    o.gt_track_id = g;
    t.history.push_back(o);
  }
  EXPECT_EQ(t.majority_gt_track_id(), 2);
  EXPECT_EQ(Track{}.majority_gt_track_id(), -1);
}

TEST(TrackerConfig, ValidateRejectsBadValues) {
  TrackerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_init = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.max_iou_dist = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.max_age = -1;
  EXPECT_THROW(c.validate(), ConfigError);
}
