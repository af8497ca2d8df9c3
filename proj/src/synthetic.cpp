#include "tsd/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "tsd/geodesic.hpp"
#include "tsd/photogrammetry.hpp"

namespace tsd {

SyntheticSceneConfig SyntheticSceneConfig::standard() {
  SyntheticSceneConfig c;
  SyntheticVehicle oncoming;
  oncoming.gt_track_id = 0;
  oncoming.start_link_distance_m = 155.0;
  oncoming.speed_mps = -15.0;
  oncoming.lateral_m = -3.5;
  SyntheticVehicle lead;
  lead.gt_track_id = 1;
  lead.start_link_distance_m = 20.0;
  lead.speed_mps = 10.0;
  lead.lateral_m = 0.0;
  c.vehicles = {oncoming, lead};
  return c;
}

double synthetic_probe_distance(const SyntheticSceneConfig& c, int frame_index) {
  return c.probe_speed_mps * (frame_index / c.frame_rate_hz);
}

SyntheticScene generate_scene(const SyntheticSceneConfig& c) {
  if (c.frame_count < 1 || !(c.frame_rate_hz > 0.0)) throw ValidationError("bad synthetic timing");
  c.intrinsics.validate();
  SyntheticScene scene;
  scene.config = c;

  const double a = Ellipsoid::wgs84().semi_major_axis_m;
  const double deg_per_m = 180.0 / (std::numbers::pi * a);
  // Pinhole focal length consistent with the range law: h = F * I / S * H / D.
  const double f_eff = c.intrinsics.focal_length_px * c.intrinsics.image_height_px /
                       c.intrinsics.sensor_height_px;
  const double cx = 0.5 * c.image_width_px, cy = 0.5 * c.intrinsics.image_height_px;

  for (int k = 0; k < c.frame_count; ++k) {
    const double t = k / c.frame_rate_hz;
    const double s = synthetic_probe_distance(c, k);

    OxtsSample o;
    o.frame_index = k;
    o.position = GeoPoint::make(0.0, c.link_start_longitude_deg + s * deg_per_m);
    o.raw_fields.assign(kOxtsFieldCount, 0.0);
    o.raw_fields[0] = o.position.latitude_deg;
    o.raw_fields[1] = o.position.longitude_deg;
    o.raw_fields[7] = c.probe_speed_mps;  // ve
    o.raw_fields[8] = c.probe_speed_mps;  // vf
    o.raw_fields[23] = 0.02;              // pos_accuracy
    o.raw_fields[24] = 0.02;              // vel_accuracy
    o.raw_fields[25] = 4, o.raw_fields[26] = 10, o.raw_fields[27] = 5, o.raw_fields[28] = 5,
    o.raw_fields[29] = 6;
    o.velocity_north_mps = 0.0;
    o.velocity_east_mps = c.probe_speed_mps;
    scene.oxts.push_back(std::move(o));

    for (const SyntheticVehicle& v : c.vehicles) {
      const double range = v.start_link_distance_m + v.speed_mps * t - s;
      if (!(range >= v.min_visible_range_m && range <= v.max_visible_range_m)) continue;
      const double h_px = bbox_height_at_range(range, v.class_label, c.intrinsics);
      const double u = cx + f_eff * v.lateral_m / range;
      const double half_w = 0.5 * f_eff * v.width_m / range;
      const double bottom = cy + f_eff * c.camera_height_m / range;
      DetectionRecord r;
      r.frame_index = k;
      r.gt_track_id = v.gt_track_id;
      r.class_label = v.class_label;
      r.bbox = {u - half_w, bottom - h_px, u + half_w, bottom};
      r.truncated = 0.0;
      r.occluded = 0;
      r.gt_location_camera = Vec3{v.lateral_m, c.camera_height_m, range};
      r.gt_depth_m = range;
      scene.labels.push_back(std::move(r));
    }
  }
  std::stable_sort(scene.labels.begin(), scene.labels.end(),
                   [](const DetectionRecord& x, const DetectionRecord& y) {
                     return x.frame_index != y.frame_index ? x.frame_index < y.frame_index
                                                           : x.gt_track_id < y.gt_track_id;
                   });
  return scene;
}

namespace {

std::string kitti_type(ClassLabel c) {
  switch (c) {
    case ClassLabel::Car: return "Car";
    case ClassLabel::Van: return "Van";
    case ClassLabel::Truck: return "Truck";
    case ClassLabel::Tram: return "Tram";
    case ClassLabel::Misc: return "Misc";
    case ClassLabel::Cyclist: return "Cyclist";
    case ClassLabel::Pedestrian: return "Pedestrian";
    case ClassLabel::PersonSitting: return "Person_sitting";
    case ClassLabel::Other: return "Misc";
  }
  return "Misc";
}

}  // namespace

void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const SyntheticSceneConfig& c = scene.config;
  {
    std::ofstream out(dir / "labels.txt");
    for (const DetectionRecord& r : scene.labels) {
      const SyntheticVehicle* v = nullptr;
      for (const SyntheticVehicle& cand : c.vehicles)
        if (cand.gt_track_id == r.gt_track_id) v = &cand;
      const double heading = v && v->speed_mps < 0 ? -std::numbers::pi / 2 : std::numbers::pi / 2;
      // Shortest round-trip formatting keeps the boxes exact on reload.
      out << fmt::format("{} {} {} 0 0 0 {} {} {} {} {} {} {} {} {} {} {}\n", r.frame_index,
                         r.gt_track_id, kitti_type(r.class_label), r.bbox.left, r.bbox.top,
                         r.bbox.right, r.bbox.bottom, class_height(r.class_label, c.intrinsics),
                         v ? v->width_m : 1.8, v ? v->length_m : 4.2, r.gt_location_camera->x,
                         r.gt_location_camera->y, r.gt_location_camera->z, heading);
    }
  }
  {
    std::ofstream out(dir / "oxts.txt");
    for (const OxtsSample& o : scene.oxts) {
      std::string line;
      for (std::size_t i = 0; i < o.raw_fields.size(); ++i)
        line += fmt::format("{}{}", i ? " " : "", o.raw_fields[i]);
      out << line << "\n";
    }
  }
  {
    std::ofstream out(dir / "config.ini");
    out << "[input]\nlabels = labels.txt\noxts = oxts.txt\nsequence_id = synthetic\n"
        << fmt::format("image_width_px = {}\nclasses = car\n\n", c.image_width_px)
        << "[camera]\npreset = kitti\n\n"
        << "[perturb]\njitter_px = 0\ndrop_rate = 0\n\n"
        << fmt::format("[link]\nstart_latitude_deg = 0\nstart_longitude_deg = {}\nlength_m = 300\n"
                       "distance_mode = direct\n\n",
                       c.link_start_longitude_deg)
        << fmt::format("[clock]\nframe_rate_hz = {}\n\n", c.frame_rate_hz)
        << "[output]\ndirectory = out\n\n[run]\nseed = 7\n";
  }
}

}  // namespace tsd
