#include "tsd/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tsd/assignment.hpp"
#include "tsd/simd/kernels.hpp"

namespace tsd {

std::string_view to_string(NnMetric metric) {
  return metric == NnMetric::Cosine ? "cosine" : "euclidean";
}

std::string_view to_string(TrackStatus status) {
  switch (status) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Confirmed: return "confirmed";
    case TrackStatus::Deleted: return "deleted";
  }
  return "deleted";
}

void TrackerConfig::validate() const {
  if (!(max_dist > 0.0 && max_dist <= 1.0)) throw ConfigError("tracker.max_dist must lie in (0, 1]");
  if (!(max_iou_dist > 0.0 && max_iou_dist <= 1.0))
    throw ConfigError("tracker.max_iou_dist must lie in (0, 1]");
  if (max_age < 1) throw ConfigError("tracker.max_age must be >= 1");
  if (n_init < 1) throw ConfigError("tracker.n_init must be >= 1");
  if (!(appearance_ema_alpha >= 0.0 && appearance_ema_alpha <= 1.0))
    throw ConfigError("tracker.appearance_ema_alpha must lie in [0, 1]");
  if (!(mahalanobis_gate > 0.0) || !std::isfinite(mahalanobis_gate))
    throw ConfigError("tracker.mahalanobis_gate must be positive");
  if (!(motion_iou_weight >= 0.0 && motion_iou_weight <= 1.0))
    throw ConfigError("tracker.motion_iou_weight must lie in [0, 1]");
  if (!(kalman.std_weight_position > 0.0) || !(kalman.std_weight_velocity > 0.0))
    throw ConfigError("tracker kalman std weights must be positive");
  if (!(kalman.process_noise_scale >= 0.0)) throw ConfigError("tracker.process_noise_scale must be >= 0");
  if (!(kalman.measurement_std_floor > 0.0)) throw ConfigError("tracker.measurement_std_floor must be > 0");
}

int Track::majority_gt_track_id() const {
  std::map<int, int> counts;
  for (const TrackObservation& o : history)
    if (o.gt_track_id >= 0) ++counts[o.gt_track_id];
  int best = -1, best_count = 0;
  for (const auto& [id, n] : counts)
    if (n > best_count) best = id, best_count = n;  // ties go to the lower id
  return best;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double appearance_cost(std::span<const float> track, std::span<const float> det, NnMetric metric) {
  double dot = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < track.size(); ++i) {
    dot += static_cast<double>(track[i]) * det[i];
    const double d = static_cast<double>(track[i]) - det[i];
    sq += d * d;
  }
  return metric == NnMetric::Cosine ? 1.0 - dot : sq;
}

std::vector<double> iou_table(std::span<const Track> tracks, std::span<const int> rows,
                              std::span<const DetectionRecord> dets, std::span<const int> cols) {
  std::vector<BBox> row_boxes, col_boxes;
  row_boxes.reserve(rows.size());
  col_boxes.reserve(cols.size());
  for (int r : rows) row_boxes.push_back(tracks[r].predicted_bbox());
  for (int c : cols) col_boxes.push_back(dets[c].bbox);
  std::vector<double> out(rows.size() * cols.size());
  simd::iou_matrix(row_boxes, simd::BoxColumns(col_boxes), out);
  return out;
}

}  // namespace

AssociationResult associate(std::span<const Track> tracks,
                            std::span<const DetectionRecord> detections,
                            const TrackerConfig& config, const KalmanFilter& filter) {
  AssociationResult result;
  std::vector<int> confirmed, others, det_left(detections.size());
  for (int i = 0; i < static_cast<int>(tracks.size()); ++i)
    (tracks[i].status == TrackStatus::Confirmed ? confirmed : others).push_back(i);
  for (int j = 0; j < static_cast<int>(detections.size()); ++j) det_left[j] = j;

  std::vector<MeasurementVector> z(detections.size());
  for (std::size_t j = 0; j < detections.size(); ++j) z[j] = to_measurement(detections[j].bbox);

  // Stage 1: confirmed tracks.
  if (!confirmed.empty() && !det_left.empty()) {
    const std::vector<double> iou = iou_table(tracks, confirmed, detections, det_left);
    CostMatrix cost(static_cast<int>(confirmed.size()), static_cast<int>(det_left.size()), kInf);
    const double w = config.motion_iou_weight;
    double threshold = 0.0;
    for (int r = 0; r < cost.rows; ++r) {
      const Track& t = tracks[confirmed[r]];
      for (int c = 0; c < cost.cols; ++c) {
        const DetectionRecord& d = detections[det_left[c]];
        const double maha = filter.gating_distance(t.state, z[det_left[c]]);
        if (!(maha <= config.mahalanobis_gate)) continue;
        const bool by_appearance = config.use_appearance && !t.appearance.empty() &&
                                   t.appearance.size() == d.embedding.size();
        if (by_appearance) {
          const double a = appearance_cost(t.appearance, d.embedding, config.nn_metric);
          if (a <= config.max_dist) cost.at(r, c) = a, threshold = std::max(threshold, config.max_dist);
        } else {
          const double m = w * (1.0 - iou[static_cast<std::size_t>(r) * cost.cols + c]) +
                           (1.0 - w) * (maha / config.mahalanobis_gate);
          if (m <= config.max_iou_dist)
            cost.at(r, c) = m, threshold = std::max(threshold, config.max_iou_dist);
        }
      }
    }
    const GatedMatches g = gated_assignment(cost, threshold, TieBreak::Lexicographic);
    std::vector<int> next_dets;
    for (const auto& [r, c] : g.matches) result.matches.emplace_back(confirmed[r], det_left[c]);
    for (int r : g.unmatched_rows) others.push_back(confirmed[r]);
    for (int c : g.unmatched_cols) next_dets.push_back(det_left[c]);
    det_left = std::move(next_dets);
  } else {
    others.insert(others.end(), confirmed.begin(), confirmed.end());
  }

  // Stage 2: IoU over everything left, rows ordered by track position (= id order).
  std::sort(others.begin(), others.end());
  if (!others.empty() && !det_left.empty()) {
    const std::vector<double> iou = iou_table(tracks, others, detections, det_left);
    CostMatrix cost(static_cast<int>(others.size()), static_cast<int>(det_left.size()));
    for (std::size_t k = 0; k < iou.size(); ++k) cost.values[k] = 1.0 - iou[k];
    const GatedMatches g = gated_assignment(cost, config.max_iou_dist, TieBreak::Lexicographic);
    for (const auto& [r, c] : g.matches) result.matches.emplace_back(others[r], det_left[c]);
    for (int r : g.unmatched_rows) result.unmatched_tracks.push_back(others[r]);
    for (int c : g.unmatched_cols) result.unmatched_detections.push_back(det_left[c]);
  } else {
    result.unmatched_tracks = others;
    result.unmatched_detections = det_left;
  }

  std::sort(result.matches.begin(), result.matches.end());
  std::sort(result.unmatched_tracks.begin(), result.unmatched_tracks.end());
  std::sort(result.unmatched_detections.begin(), result.unmatched_detections.end());
  return result;
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)), filter_(config_.kalman) {
  config_.validate();
}

namespace {

TrackObservation observe(int frame, const DetectionRecord& d) {
  return {frame, d.bbox, d.confidence, d.class_label, d.gt_track_id, d.gt_location_camera};
}

void blend_appearance(std::vector<float>& e, const std::vector<float>& f, double alpha) {
  if (f.empty()) return;
  if (e.size() != f.size()) {
    e = f;
    return;
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double v = alpha * e[i] + (1.0 - alpha) * f[i];
    e[i] = static_cast<float>(v);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (float& v : e) v = static_cast<float>(v / norm);
}

}  // namespace

std::vector<Track> Tracker::step(int frame_index, std::span<const DetectionRecord> detections) {
  if (last_frame_ && frame_index <= *last_frame_)
    throw PipelineError("tracker: frame " + std::to_string(frame_index) +
                        " is not after frame " + std::to_string(*last_frame_));
  const int elapsed = last_frame_ ? frame_index - *last_frame_ : 1;
  last_frame_ = frame_index;

  for (Track& t : tracks_) {
    for (int k = 0; k < elapsed; ++k) t.state = filter_.predict(t.state);
    t.frames_since_update += elapsed;
  }

  const AssociationResult a = associate(tracks_, detections, config_, filter_);

  for (const auto& [ti, di] : a.matches) {
    Track& t = tracks_[ti];
    const DetectionRecord& d = detections[di];
    t.state = filter_.update(t.state, to_measurement(d.bbox), d.confidence);
    ++t.hits;
    t.frames_since_update = 0;
    t.history.push_back(observe(frame_index, d));
    blend_appearance(t.appearance, d.embedding, config_.appearance_ema_alpha);
    if (t.status == TrackStatus::Tentative && t.hits >= config_.n_init) {
      t.status = TrackStatus::Confirmed;
      t.ever_confirmed = true;
    }
  }
  for (int ti : a.unmatched_tracks) {
    Track& t = tracks_[ti];
    if (t.status == TrackStatus::Tentative || t.frames_since_update > config_.max_age)
      t.status = TrackStatus::Deleted;
  }
  for (int di : a.unmatched_detections) {
    const DetectionRecord& d = detections[di];
    Track t;
    t.track_id = next_id_++;
    t.state = filter_.initiate(to_measurement(d.bbox));
    t.hits = 1;
    t.history.push_back(observe(frame_index, d));
    t.appearance = d.embedding;
    if (t.hits >= config_.n_init) {
      t.status = TrackStatus::Confirmed;
      t.ever_confirmed = true;
    }
    tracks_.push_back(std::move(t));
  }

  // The snapshot still shows tracks deleted on this frame; they leave the live set afterwards.
  std::vector<Track> snapshot = tracks_;
  std::vector<Track> kept;
  kept.reserve(tracks_.size());
  for (Track& t : tracks_) {
    if (t.status != TrackStatus::Deleted)
      kept.push_back(std::move(t));
    else if (t.ever_confirmed)
      archived_.push_back(std::move(t));
  }
  tracks_ = std::move(kept);
  return snapshot;
}

std::vector<Track> Tracker::confirmed_tracks() const {
  std::vector<Track> out;
  for (const Track& t : archived_) out.push_back(t);
  for (const Track& t : tracks_)
    if (t.ever_confirmed) out.push_back(t);
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.track_id < b.track_id; });
  return out;
}

}  // namespace tsd
