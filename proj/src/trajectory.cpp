#include "tsd/trajectory.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>

namespace tsd {

std::string_view to_string(PointQuality quality) {
  switch (quality) {
    case PointQuality::Ok: return "ok";
    case PointQuality::BelowMinHeight: return "below_min_height";
    case PointQuality::AboveMaxRange: return "above_max_range";
    case PointQuality::OutOfLink: return "out_of_link";
  }
  return "ok";
}

PointQuality parse_point_quality(std::string_view token) {
  for (PointQuality q : {PointQuality::Ok, PointQuality::BelowMinHeight,
                         PointQuality::AboveMaxRange, PointQuality::OutOfLink})
    if (token == to_string(q)) return q;
  throw ParseError("unknown quality flag '" + std::string(token) + "'");
}

PointQuality point_quality(RangeQuality quality) {
  switch (quality) {
    case RangeQuality::Ok: return PointQuality::Ok;
    case RangeQuality::BelowMinHeight: return PointQuality::BelowMinHeight;
    case RangeQuality::AboveMaxRange: return PointQuality::AboveMaxRange;
  }
  return PointQuality::Ok;
}

std::string_view to_string(TrafficSide side) { return side == TrafficSide::Right ? "right" : "left"; }

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Strictly decreasing, or strictly decreasing down to a minimum and strictly
// increasing after it (the car passes the camera).
bool closing_profile(const std::vector<double>& r) {
  if (r.size() < 2) return true;
  std::size_t i = 1;
  while (i < r.size() && r[i] < r[i - 1]) ++i;
  if (i == 1) return false;
  while (i < r.size() && r[i] > r[i - 1]) ++i;
  return i == r.size();
}

bool keep_track(const Track& t, double image_width_px, const CameraIntrinsics& intrinsics,
                const LaneFilterConfig& config, const RangeConfig& range_config) {
  if (t.history.empty()) return false;
  const bool right_hand = config.traffic_side == TrafficSide::Right;

  std::vector<double> lateral;
  for (const TrackObservation& o : t.history)
    if (o.gt_location_camera) lateral.push_back(o.gt_location_camera->x);
  if (!lateral.empty()) {
    const double x = median(std::move(lateral));
    return right_hand ? x <= config.lane_offset_threshold_m : x >= -config.lane_offset_threshold_m;
  }

  std::size_t on_side = 0;
  std::vector<double> ranges;
  ranges.reserve(t.history.size());
  for (const TrackObservation& o : t.history) {
    const double u = o.bbox.center_x() / image_width_px;
    if (right_hand ? u <= config.image_fraction : u >= 1.0 - config.image_fraction) ++on_side;
    ranges.push_back(range_from_height(o.bbox.height(), o.class_label, intrinsics, range_config).distance_m);
  }
  const double share = static_cast<double>(on_side) / static_cast<double>(t.history.size());
  return share >= config.min_frame_share && closing_profile(ranges);
}

}  // namespace

std::vector<Track> opposite_lane_filter(std::span<const Track> tracks, double image_width_px,
                                        const CameraIntrinsics& intrinsics,
                                        const LaneFilterConfig& config,
                                        const RangeConfig& range_config) {
  if (!config.enabled) return {tracks.begin(), tracks.end()};
  if (!(image_width_px > 0.0)) throw ValidationError("image width must be positive");
  std::vector<Track> out;
  for (const Track& t : tracks)
    if (keep_track(t, image_width_px, intrinsics, config, range_config)) out.push_back(t);
  return out;
}

TimeSpaceDiagram build_diagram(std::span<const Track> tracks, std::span<const OxtsSample> oxts,
                               const FrameClock& clock, const GeoPoint& link_start,
                               double link_length_m, const CameraIntrinsics& intrinsics,
                               const DiagramConfig& config, const Geodesic& geodesic) {
  if (!(link_length_m > 0.0) || !std::isfinite(link_length_m))
    throw ValidationError("link length must be positive");

  TimeSpaceDiagram d;
  d.link_length_m = link_length_m;
  d.metadata.sequence_id = config.sequence_id;
  d.metadata.frame_rate_hz = clock.frame_rate_hz();
  d.metadata.distance_mode = config.distance_mode;

  std::vector<OxtsSample> samples(oxts.begin(), oxts.end());
  std::stable_sort(samples.begin(), samples.end(),
                   [](const OxtsSample& a, const OxtsSample& b) { return a.frame_index < b.frame_index; });
  std::vector<GeoPoint> fixes;
  fixes.reserve(samples.size());
  for (const OxtsSample& s : samples) fixes.push_back(s.position);
  const std::vector<double> probe = probe_distances(geodesic, link_start, fixes, config.distance_mode);

  std::unordered_map<int, std::size_t> by_frame;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!by_frame.emplace(samples[i].frame_index, i).second)
      throw PipelineError(fmt::format("duplicate OXTS sample for frame {}", samples[i].frame_index));
    d.probe_trajectory.push_back({samples[i].frame_index, clock.time_at(samples[i].frame_index), probe[i]});
  }

  for (const Track& t : tracks) {
    std::vector<double> ranges(t.history.size());
    std::vector<PointQuality> flags(t.history.size(), PointQuality::Ok);
    if (config.range_source == RangeSource::Photogrammetry) {
      std::vector<DetectionRecord> dets(t.history.size());
      for (std::size_t k = 0; k < t.history.size(); ++k) {
        dets[k].bbox = t.history[k].bbox;
        dets[k].class_label = t.history[k].class_label;
      }
      const std::vector<RangeEstimate> est = ranges_from_bboxes(dets, intrinsics, config.range);
      for (std::size_t k = 0; k < est.size(); ++k) {
        ranges[k] = est[k].distance_m;
        flags[k] = point_quality(est[k].quality_flag);
      }
    } else {
      for (std::size_t k = 0; k < t.history.size(); ++k) {
        if (!t.history[k].gt_location_camera)
          throw PipelineError(fmt::format("track {} frame {} has no ground-truth depth", t.track_id,
                                          t.history[k].frame_index));
        ranges[k] = t.history[k].gt_location_camera->z;
      }
    }

    std::vector<TrajectoryPoint> points;
    points.reserve(t.history.size());
    for (std::size_t k = 0; k < t.history.size(); ++k) {
      const int frame = t.history[k].frame_index;
      auto it = by_frame.find(frame);
      if (it == by_frame.end())
        throw PipelineError(fmt::format("no OXTS sample for frame {} (track {})", frame, t.track_id));
      TrajectoryPoint p;
      p.track_id = t.track_id;
      p.frame_index = frame;
      p.time_s = clock.time_at(frame);
      p.probe_distance_m = probe[it->second];
      p.camera_range_m = ranges[k];
      p.link_distance_m = compose_distance(p.probe_distance_m, p.camera_range_m);
      p.quality = flags[k];
      if (p.quality == PointQuality::Ok &&
          !(p.link_distance_m >= 0.0 && p.link_distance_m <= link_length_m + config.link_margin_m))
        p.quality = PointQuality::OutOfLink;
      points.push_back(p);
    }
    if (!points.empty()) d.vehicle_trajectories[t.track_id] = std::move(points);
  }
  return d;
}

std::vector<TrajectoryPoint> smooth_track(std::span<const TrajectoryPoint> points, int window) {
  if (window < 1 || window % 2 == 0) throw ValidationError("smoothing window must be a positive odd integer");
  std::vector<TrajectoryPoint> out(points.begin(), points.end());
  if (window == 1) return out;
  const int half = window / 2;
  const int n = static_cast<int>(points.size());
  std::vector<double> buf;
  for (int i = 0; i < n; ++i) {
    buf.clear();
    for (int j = std::max(0, i - half); j <= std::min(n - 1, i + half); ++j)
      buf.push_back(points[j].link_distance_m);
    const double m = median(buf);
    TrajectoryPoint& p = out[i];
    p.camera_range_m = m - p.probe_distance_m;
    p.link_distance_m = compose_distance(p.probe_distance_m, p.camera_range_m);
  }
  return out;
}

std::vector<Track> tracks_from_ground_truth(std::span<const DetectionRecord> records) {
  std::map<int, Track> by_id;
  for (const DetectionRecord& r : records) {
    if (r.dont_care || r.gt_track_id < 0) continue;
    Track& t = by_id[r.gt_track_id];
    if (!t.history.empty() && t.history.back().frame_index >= r.frame_index) continue;
    t.track_id = reference_track_id(r.gt_track_id);
    t.status = TrackStatus::Confirmed;
    t.ever_confirmed = true;
    ++t.hits;
    t.history.push_back({r.frame_index, r.bbox, r.confidence, r.class_label, r.gt_track_id,
                         r.gt_location_camera});
  }
  std::vector<Track> out;
  for (auto& [id, t] : by_id) out.push_back(std::move(t));
  return out;
}

void write_diagram_csv(std::ostream& out, const TimeSpaceDiagram& d) {
  out << "track_id,time_s,link_distance_m,probe_distance_m,camera_range_m,quality\n";
  for (const ProbePoint& p : d.probe_trajectory)
    out << fmt::format("0,{:.6f},{:.6f},{:.6f},{:.6f},ok\n", p.time_s, p.distance_m, p.distance_m, 0.0);
  for (const auto& [id, points] : d.vehicle_trajectories) {
    for (const TrajectoryPoint& p : points) {
      if (p.link_distance_m != compose_distance(p.probe_distance_m, p.camera_range_m))
        throw PipelineError(fmt::format("track {} at t={} violates link = probe + range", id, p.time_s));
      out << fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", id, p.time_s, p.link_distance_m,
                         p.probe_distance_m, p.camera_range_m, to_string(p.quality));
    }
  }
}

TimeSpaceDiagram read_diagram_csv(std::istream& in) {
  TimeSpaceDiagram d;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  double max_link = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "track_id,time_s,link_distance_m,probe_distance_m,camera_range_m,quality")
        throw ParseError("unexpected diagram header", line_no);
      header = true;
      continue;
    }
    const auto f = split_fields(line, true);
    if (f.size() != 6) throw ParseError(fmt::format("expected 6 fields, got {}", f.size()), line_no);
    const auto id = parse_integer(f[0]);
    double v[4];
    for (int k = 0; k < 4; ++k) {
      const auto x = parse_real(f[k + 1]);
      if (!x) throw ParseError(fmt::format("bad number '{}'", f[k + 1]), line_no);
      v[k] = *x;
    }
    if (!id || *id < 0) throw ParseError(fmt::format("bad track id '{}'", f[0]), line_no);
    if (*id == 0) {
      d.probe_trajectory.push_back({static_cast<int>(d.probe_trajectory.size()), v[0], v[2]});
    } else {
      TrajectoryPoint p;
      p.track_id = static_cast<int>(*id);
      p.frame_index = -1;
      p.time_s = v[0];
      p.link_distance_m = v[1];
      p.probe_distance_m = v[2];
      p.camera_range_m = v[3];
      try {
        p.quality = parse_point_quality(f[5]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
      }
      max_link = std::max(max_link, p.link_distance_m);
      d.vehicle_trajectories[p.track_id].push_back(p);
    }
    max_link = std::max(max_link, v[2]);
  }
  if (!header) throw ParseError("empty diagram file", line_no);
  d.link_length_m = max_link;
  return d;
}

}  // namespace tsd
