#pragma once

// Run configuration: INI-style `key = value` sections. Every key is addressed
// as `section.key`, which is also the name of its command-line override.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tsd/geodesic.hpp"
#include "tsd/kitti.hpp"
#include "tsd/photogrammetry.hpp"
#include "tsd/tracker.hpp"
#include "tsd/trajectory.hpp"

namespace tsd {

struct PipelineConfig {
  // [input]
  std::filesystem::path labels;      // KITTI label file (ground truth)
  std::filesystem::path detections;  // external detections; empty = use labels
  std::filesystem::path oxts;
  std::filesystem::path timestamps;  // optional
  std::filesystem::path embeddings;  // optional
  std::string sequence_id;
  double image_width_px = 1242.0;
  std::vector<ClassLabel> classes{ClassLabel::Car};
  bool include_dont_care = false;

  // [camera]
  std::string camera_preset = "kitti";  // "kitti" or "custom"
  CameraIntrinsics intrinsics = CameraIntrinsics::kitti();

  // [perturb] applies only when boxes come from labels
  double jitter_px = 0.0;
  double drop_rate = 0.0;

  TrackerConfig tracker;        // [tracker]
  LaneFilterConfig lane;        // [lane]
  RangeConfig range;            // [range]

  // [link]
  GeoPoint link_start;
  double link_length_m = 1000.0;
  double link_margin_m = 20.0;
  DistanceMode distance_mode = DistanceMode::Direct;

  double frame_rate_hz = 10.0;  // [clock]
  int smoothing_window = 1;     // [smoothing]
  std::filesystem::path output_dir = "out";  // [output]
  std::uint64_t seed = 0;       // [run]

  /// Throws ConfigError on out-of-range values. Does not touch the filesystem.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// All accepted `section.key` names, in echo order.
const std::vector<std::string>& config_keys();

using ConfigValues = std::map<std::string, std::string>;

/// Flattens an INI document into `section.key` -> value. Unknown sections and
/// keys are rejected, except the `[meta]` section which is ignored.
ConfigValues parse_config_values(std::istream& in);

/// Builds a config from defaults plus `values`. Relative paths are resolved
/// against `base_dir` when it is non-empty.
PipelineConfig config_from_values(const ConfigValues& values,
                                  const std::filesystem::path& base_dir = {});

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
/// Reads a config file, then applies `overrides` on top.
PipelineConfig load_config(const std::filesystem::path& path, const ConfigValues& overrides = {});

/// Every key, with reals printed to round-trip exactly.
ConfigValues config_to_values(const PipelineConfig& config);
void write_config(std::ostream& out, const PipelineConfig& config);

}  // namespace tsd
