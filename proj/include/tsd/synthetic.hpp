#pragma once

// Synthetic probe-and-traffic scenes with exactly projected ground-truth boxes.
// The probe drives due east along the equator from the link start; other
// vehicles move along the same road and are seen by a forward camera.

#include <filesystem>
#include <vector>

#include "tsd/kitti.hpp"

namespace tsd {

struct SyntheticVehicle {
  int gt_track_id = 0;
  ClassLabel class_label = ClassLabel::Car;
  double start_link_distance_m = 0.0;  // position along the link at t = 0
  double speed_mps = 0.0;              // signed, along increasing link distance
  double lateral_m = 0.0;              // camera-frame x (negative = left)
  double width_m = 1.8;
  double length_m = 4.2;
  /// Emitted only while the forward range lies in [min, max].
  double min_visible_range_m = 8.0;
  double max_visible_range_m = 30.0;
};

struct SyntheticSceneConfig {
  int frame_count = 100;
  double frame_rate_hz = 10.0;
  double link_start_longitude_deg = 0.0;  // the link runs along the equator
  double probe_speed_mps = 10.0;
  double camera_height_m = 1.65;
  double image_width_px = 1242.0;
  CameraIntrinsics intrinsics = CameraIntrinsics::kitti();
  std::vector<SyntheticVehicle> vehicles;

  /// One oncoming car (15 m/s, opposite lane) plus a lead car in the probe's lane.
  static SyntheticSceneConfig standard();
};

struct SyntheticScene {
  SyntheticSceneConfig config;
  std::vector<DetectionRecord> labels;  // sorted by (frame, track)
  std::vector<OxtsSample> oxts;         // one per frame
};

SyntheticScene generate_scene(const SyntheticSceneConfig& config);

/// Probe distance from the link start at frame k (exact along the equator).
double synthetic_probe_distance(const SyntheticSceneConfig& config, int frame_index);

/// Writes labels.txt, oxts.txt and config.ini into `dir` (created if needed).
void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

}  // namespace tsd
