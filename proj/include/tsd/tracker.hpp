#pragma once

// Tracking-by-detection in the StrongSORT lineage: constant-velocity Kalman
// prediction, confidence-scaled measurement noise, two-stage gated
// minimum-cost association, and a tentative/confirmed/deleted lifecycle.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tsd/common.hpp"
#include "tsd/kalman.hpp"

namespace tsd {

enum class NnMetric { Cosine, Euclidean };

std::string_view to_string(NnMetric metric);

struct TrackerConfig {
  NnMetric nn_metric = NnMetric::Cosine;
  double max_dist = 0.2;        // appearance gate
  double max_iou_dist = 0.7;    // IoU / motion gate on (1 - IoU)
  int max_age = 30;             // missed frames before deletion
  int n_init = 2;               // hits before confirmation
  double appearance_ema_alpha = 0.9;
  bool use_appearance = false;
  double mahalanobis_gate = 9.4877;  // chi-square 0.95 quantile, 4 dof
  double motion_iou_weight = 0.5;    // weight of (1 - IoU) in the motion cost
  KalmanConfig kalman;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

enum class TrackStatus { Tentative, Confirmed, Deleted };

std::string_view to_string(TrackStatus status);

struct TrackObservation {
  int frame_index = 0;
  BBox bbox;
  double confidence = 1.0;
  ClassLabel class_label = ClassLabel::Other;
  int gt_track_id = -1;
  std::optional<Vec3> gt_location_camera;
};

struct Track {
  int track_id = 0;
  KalmanState state;
  TrackStatus status = TrackStatus::Tentative;
  int hits = 0;
  int frames_since_update = 0;
  bool ever_confirmed = false;
  std::vector<TrackObservation> history;
  std::vector<float> appearance;  // unit norm when present

  BBox predicted_bbox() const { return to_bbox(state.mean.head<4>()); }
  /// Most frequent ground-truth id among observations (-1 when none).
  int majority_gt_track_id() const;
};

struct AssociationResult {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

/// Two-stage association of already-predicted tracks with one frame of detections.
/// Stage 1 matches confirmed tracks by appearance (when enabled and both sides
/// carry embeddings) or by the combined motion cost
///   w * (1 - IoU) + (1 - w) * d_mahalanobis^2 / gate.
/// Stage 2 matches everything left by (1 - IoU). Gated pairs are non-edges.
AssociationResult associate(std::span<const Track> tracks,
                            std::span<const DetectionRecord> detections,
                            const TrackerConfig& config, const KalmanFilter& filter);

class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {});

  /// Advances to `frame_index` (strictly increasing across calls) and returns
  /// snapshots of the live tracks plus any deleted on this frame.
  std::vector<Track> step(int frame_index, std::span<const DetectionRecord> detections);

  /// Every track that reached confirmed status, live or deleted, ordered by id.
  std::vector<Track> confirmed_tracks() const;

  const TrackerConfig& config() const noexcept { return config_; }
  std::span<const Track> live_tracks() const noexcept { return tracks_; }

 private:
  TrackerConfig config_;
  KalmanFilter filter_;
  std::vector<Track> tracks_;
  std::vector<Track> archived_;
  int next_id_ = 1;
  std::optional<int> last_frame_;
};

}  // namespace tsd
