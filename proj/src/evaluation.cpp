#include "tsd/evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <tuple>

#include "tsd/assignment.hpp"
#include "tsd/simd/kernels.hpp"

namespace tsd {

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size())
    throw ValidationError(fmt::format("rmse: length mismatch ({} vs {})", pred.size(), truth.size()));
  if (pred.empty()) throw ValidationError("rmse: empty input");
  return std::sqrt(simd::sum_squared_diff(pred, truth) / static_cast<double>(pred.size()));
}

std::string_view to_string(ErrorScenario scenario) {
  switch (scenario) {
    case ErrorScenario::GtBoxes: return "gt_boxes";
    case ErrorScenario::PredictedBoxes: return "predicted_boxes";
    case ErrorScenario::Trajectory: return "trajectory";
  }
  return "gt_boxes";
}

void summarize(ErrorReport& r) {
  r.mean_rmse_m = r.std_rmse_m = 0.0;
  if (r.per_track_rmse_m.empty()) return;
  const double n = static_cast<double>(r.per_track_rmse_m.size());
  for (const auto& [id, v] : r.per_track_rmse_m) r.mean_rmse_m += v;
  r.mean_rmse_m /= n;
  double var = 0.0;
  for (const auto& [id, v] : r.per_track_rmse_m) var += (v - r.mean_rmse_m) * (v - r.mean_rmse_m);
  r.std_rmse_m = std::sqrt(var / n);
}

namespace {

bool usable_truth(const DetectionRecord& r, const CameraIntrinsics& k) {
  return !r.dont_care && r.gt_depth_m && r.gt_track_id >= 0 && k.class_height_m.contains(r.class_label);
}

struct Residuals {
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_track;  // estimate, truth

  ErrorReport finish(ErrorScenario scenario) {
    ErrorReport r;
    r.scenario = scenario;
    for (auto& [id, v] : by_track) {
      r.per_track_rmse_m[id] = rmse(v.first, v.second);
      r.instance_count += static_cast<long long>(v.first.size());
    }
    summarize(r);
    return r;
  }
};

}  // namespace

ErrorReport range_error_report(std::span<const DetectionRecord> ground_truth,
                               const CameraIntrinsics& intrinsics) {
  Residuals res;
  for (const DetectionRecord& r : ground_truth) {
    if (!usable_truth(r, intrinsics)) continue;
    auto& [est, truth] = res.by_track[r.gt_track_id];
    est.push_back(range_from_bbox(r, intrinsics).distance_m);
    truth.push_back(*r.gt_depth_m);
  }
  return res.finish(ErrorScenario::GtBoxes);
}

ErrorReport range_error_report(std::span<const DetectionRecord> detections,
                               std::span<const DetectionRecord> ground_truth,
                               const CameraIntrinsics& intrinsics, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw ValidationError("IoU threshold must lie in (0, 1]");
  std::map<int, std::pair<std::vector<const DetectionRecord*>, std::vector<const DetectionRecord*>>> frames;
  for (const DetectionRecord& d : detections)
    if (!d.dont_care && intrinsics.class_height_m.contains(d.class_label))
      frames[d.frame_index].first.push_back(&d);
  for (const DetectionRecord& g : ground_truth)
    if (usable_truth(g, intrinsics)) frames[g.frame_index].second.push_back(&g);

  Residuals res;
  for (const auto& [frame, sides] : frames) {
    const auto& [dets, gts] = sides;
    if (dets.empty() || gts.empty()) continue;
    std::vector<BBox> gt_boxes, det_boxes;
    for (const DetectionRecord* g : gts) gt_boxes.push_back(g->bbox);
    for (const DetectionRecord* d : dets) det_boxes.push_back(d->bbox);
    std::vector<double> iou(gt_boxes.size() * det_boxes.size());
    simd::iou_matrix(gt_boxes, simd::BoxColumns(det_boxes), iou);
    const int n = static_cast<int>(gts.size()), m = static_cast<int>(dets.size());
    CostMatrix cost(n, m, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double v = iou[static_cast<std::size_t>(i) * m + j];
        if (v >= iou_threshold && gts[i]->class_label == dets[j]->class_label) cost.at(i, j) = -v;
      }
    const std::vector<int> match = solve_assignment(cost, TieBreak::Lexicographic);
    for (int i = 0; i < n; ++i) {
      const int j = match[i];
      if (j < 0 || !(cost.at(i, j) < 0.0)) continue;
      auto& [est, truth] = res.by_track[gts[i]->gt_track_id];
      est.push_back(range_from_bbox(*dets[j], intrinsics).distance_m);
      truth.push_back(*gts[i]->gt_depth_m);
    }
  }
  return res.finish(ErrorScenario::PredictedBoxes);
}

TrackMatching matching_from_ground_truth_ids(std::span<const Track> predicted_tracks) {
  TrackMatching m;
  for (const Track& t : predicted_tracks) {
    const int g = t.majority_gt_track_id();
    if (g >= 0) m[t.track_id] = reference_track_id(g);
  }
  return m;
}

namespace {

// Index pairs (i, j) with |t_i - t_j| <= tolerance, both series ascending in time.
std::vector<std::pair<std::size_t, std::size_t>> common_times(const std::vector<TrajectoryPoint>& a,
                                                              const std::vector<TrajectoryPoint>& b) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double d = a[i].time_s - b[j].time_s;
    if (std::fabs(d) <= kTimestampTolerance) {
      out.emplace_back(i++, j++);
    } else if (d < 0) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

}  // namespace

TrackMatching greedy_trajectory_matching(const TimeSpaceDiagram& predicted,
                                         const TimeSpaceDiagram& reference) {
  std::vector<std::tuple<double, int, int>> candidates;
  for (const auto& [pid, p] : predicted.vehicle_trajectories)
    for (const auto& [rid, r] : reference.vehicle_trajectories) {
      const auto common = common_times(p, r);
      if (common.empty()) continue;
      double sum = 0.0;
      for (const auto& [i, j] : common) sum += std::fabs(p[i].link_distance_m - r[j].link_distance_m);
      candidates.emplace_back(sum / static_cast<double>(common.size()), pid, rid);
    }
  std::sort(candidates.begin(), candidates.end());
  TrackMatching m;
  std::set<int> used_ref;
  for (const auto& [cost, pid, rid] : candidates) {
    if (m.contains(pid) || used_ref.contains(rid)) continue;
    m[pid] = rid;
    used_ref.insert(rid);
  }
  return m;
}

ErrorReport trajectory_error_report(const TimeSpaceDiagram& predicted,
                                    const TimeSpaceDiagram& reference,
                                    const std::optional<TrackMatching>& matching) {
  const TrackMatching m = matching ? *matching : greedy_trajectory_matching(predicted, reference);
  ErrorReport r;
  r.scenario = ErrorScenario::Trajectory;
  std::set<int> covered;
  for (const auto& [pid, rid] : m) {
    auto p = predicted.vehicle_trajectories.find(pid);
    auto q = reference.vehicle_trajectories.find(rid);
    if (p == predicted.vehicle_trajectories.end() || q == reference.vehicle_trajectories.end()) {
      ++r.skipped_pairs;
      continue;
    }
    const auto common = common_times(p->second, q->second);
    if (common.empty()) {
      ++r.skipped_pairs;
      continue;
    }
    std::vector<double> a, b;
    for (const auto& [i, j] : common) {
      a.push_back(p->second[i].link_distance_m);
      b.push_back(q->second[j].link_distance_m);
    }
    r.per_track_rmse_m[pid] = rmse(a, b);
    r.instance_count += static_cast<long long>(a.size());
    covered.insert(rid);
  }
  for (const auto& [rid, pts] : reference.vehicle_trajectories)
    if (!covered.contains(rid)) ++r.missed_reference_tracks;
  summarize(r);
  return r;
}

void write_error_report_text(std::ostream& out, const ErrorReport& r) {
  out << "scenario = " << to_string(r.scenario) << "\n";
  out << "track_count = " << r.per_track_rmse_m.size() << "\n";
  out << "instance_count = " << r.instance_count << "\n";
  out << fmt::format("mean_rmse_m = {:.6f}\nstd_rmse_m = {:.6f}\n", r.mean_rmse_m, r.std_rmse_m);
  if (r.scenario == ErrorScenario::Trajectory)
    out << "missed_reference_tracks = " << r.missed_reference_tracks << "\n"
        << "skipped_pairs = " << r.skipped_pairs << "\n";
  out << "\n[per_track]\ntrack_id rmse_m\n";
  for (const auto& [id, v] : r.per_track_rmse_m) out << fmt::format("{} {:.6f}\n", id, v);
}

void write_error_report_csv(std::ostream& out, const ErrorReport& r) {
  out << "scenario,track_id,rmse_m\n";
  for (const auto& [id, v] : r.per_track_rmse_m)
    out << fmt::format("{},{},{:.6f}\n", to_string(r.scenario), id, v);
}

}  // namespace tsd
