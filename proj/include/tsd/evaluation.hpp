#pragma once

// Range and trajectory error statistics.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tsd/kitti.hpp"
#include "tsd/photogrammetry.hpp"
#include "tsd/trajectory.hpp"

namespace tsd {

/// sqrt(mean((pred - truth)^2)). Throws ValidationError on empty or mismatched input.
double rmse(std::span<const double> pred, std::span<const double> truth);

enum class ErrorScenario { GtBoxes, PredictedBoxes, Trajectory };

std::string_view to_string(ErrorScenario scenario);

struct ErrorReport {
  ErrorScenario scenario = ErrorScenario::GtBoxes;
  /// Range scenarios key by ground-truth track id, the trajectory scenario by
  /// predicted track id.
  std::map<int, double> per_track_rmse_m;
  double mean_rmse_m = 0.0;
  double std_rmse_m = 0.0;  // population standard deviation over tracks
  long long instance_count = 0;  // points or detections that entered an RMSE
  // Trajectory scenario only.
  int missed_reference_tracks = 0;
  int skipped_pairs = 0;
};

/// Mean and population standard deviation of the per-track values.
void summarize(ErrorReport& report);

/// Camera range from the ground-truth boxes themselves against camera-frame
/// depth. Records without a depth or without a configured class height are
/// skipped.
ErrorReport range_error_report(std::span<const DetectionRecord> ground_truth,
                               const CameraIntrinsics& intrinsics);

/// Same statistic for detector boxes: per frame, detections are matched to
/// ground-truth boxes of the same class (maximal summed IoU, IoU >= threshold)
/// and each true positive contributes (range - depth of its GT box).
ErrorReport range_error_report(std::span<const DetectionRecord> detections,
                               std::span<const DetectionRecord> ground_truth,
                               const CameraIntrinsics& intrinsics, double iou_threshold = 0.5);

/// Predicted track id -> reference track id. Built from the majority
/// ground-truth id when detections came from labels.
using TrackMatching = std::map<int, int>;

TrackMatching matching_from_ground_truth_ids(std::span<const Track> predicted_tracks);

/// Greedy one-to-one pairing by mean |link distance difference| over common
/// timestamps, smallest first.
TrackMatching greedy_trajectory_matching(const TimeSpaceDiagram& predicted,
                                         const TimeSpaceDiagram& reference);

/// Timestamps within this many seconds are treated as equal.
inline constexpr double kTimestampTolerance = 1e-6;

ErrorReport trajectory_error_report(const TimeSpaceDiagram& predicted,
                                    const TimeSpaceDiagram& reference,
                                    const std::optional<TrackMatching>& matching = std::nullopt);

/// `key = value` summary followed by a `[per_track]` table.
void write_error_report_text(std::ostream& out, const ErrorReport& report);
/// Columns: scenario,track_id,rmse_m.
void write_error_report_csv(std::ostream& out, const ErrorReport& report);

}  // namespace tsd
