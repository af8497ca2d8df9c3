#pragma once

// Opposite-lane selection, link-distance composition and time-space diagram
// assembly, plus the diagram CSV format.

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsd/geodesic.hpp"
#include "tsd/kitti.hpp"
#include "tsd/photogrammetry.hpp"
#include "tsd/tracker.hpp"

namespace tsd {

enum class PointQuality { Ok, BelowMinHeight, AboveMaxRange, OutOfLink };

std::string_view to_string(PointQuality quality);
PointQuality parse_point_quality(std::string_view token);  // throws ParseError
PointQuality point_quality(RangeQuality quality);

struct TrajectoryPoint {
  int track_id = 0;
  int frame_index = 0;
  double time_s = 0.0;
  double link_distance_m = 0.0;
  double probe_distance_m = 0.0;
  double camera_range_m = 0.0;
  PointQuality quality = PointQuality::Ok;
};

struct ProbePoint {
  int frame_index = 0;
  double time_s = 0.0;
  double distance_m = 0.0;
};

struct DiagramMetadata {
  std::string sequence_id;
  double frame_rate_hz = 10.0;
  DistanceMode distance_mode = DistanceMode::Direct;
};

struct TimeSpaceDiagram {
  double link_length_m = 0.0;
  std::vector<ProbePoint> probe_trajectory;
  std::map<int, std::vector<TrajectoryPoint>> vehicle_trajectories;
  DiagramMetadata metadata;
};

/// Which side of the road traffic drives on. Oncoming traffic is on the
/// opposite side: left of the probe for right-hand traffic.
enum class TrafficSide { Right, Left };

std::string_view to_string(TrafficSide side);

struct LaneFilterConfig {
  bool enabled = true;
  TrafficSide traffic_side = TrafficSide::Right;
  double lane_offset_threshold_m = -1.5;  // camera-frame x; mirrored for left-hand traffic
  double image_fraction = 0.5;
  double min_frame_share = 0.7;

  friend bool operator==(const LaneFilterConfig&, const LaneFilterConfig&) = default;
};

/// Keeps tracks that look like oncoming traffic. Uses the median camera-frame
/// lateral position when ground-truth 3D locations are present on the track,
/// otherwise image position plus a closing-range test.
std::vector<Track> opposite_lane_filter(std::span<const Track> tracks, double image_width_px,
                                        const CameraIntrinsics& intrinsics,
                                        const LaneFilterConfig& config,
                                        const RangeConfig& range_config = {});

/// d_link = d_probe + d_range.
inline double compose_distance(double probe_distance_m, double camera_range_m) {
  return probe_distance_m + camera_range_m;
}

enum class RangeSource { Photogrammetry, GroundTruthDepth };

struct DiagramConfig {
  DistanceMode distance_mode = DistanceMode::Direct;
  RangeConfig range;
  double link_margin_m = 20.0;
  RangeSource range_source = RangeSource::Photogrammetry;
  std::string sequence_id;
};

/// Probe trajectory from every OXTS sample, plus one trajectory per track.
/// Throws PipelineError when a track frame has no OXTS sample.
TimeSpaceDiagram build_diagram(std::span<const Track> tracks, std::span<const OxtsSample> oxts,
                               const FrameClock& clock, const GeoPoint& link_start,
                               double link_length_m, const CameraIntrinsics& intrinsics,
                               const DiagramConfig& config = {}, const Geodesic& geodesic = Geodesic());

/// Centered median of link_distance_m with edge truncation. Camera range is
/// re-derived so link = probe + range still holds. Throws ValidationError for
/// even or non-positive windows.
std::vector<TrajectoryPoint> smooth_track(std::span<const TrajectoryPoint> points, int window);

/// Ground-truth tracks (one per gt_track_id, DontCare rows skipped) as
/// confirmed Track objects. Track ids are gt_track_id + 1 so that 0 stays
/// reserved for the probe in diagram files.
std::vector<Track> tracks_from_ground_truth(std::span<const DetectionRecord> records);
inline int reference_track_id(int gt_track_id) { return gt_track_id + 1; }

/// Header `track_id,time_s,link_distance_m,probe_distance_m,camera_range_m,quality`,
/// probe rows first (track_id 0), then tracks by id. Throws PipelineError if a
/// point breaks link = probe + range.
void write_diagram_csv(std::ostream& out, const TimeSpaceDiagram& diagram);
TimeSpaceDiagram read_diagram_csv(std::istream& in);

}  // namespace tsd
