#include "tsd/photogrammetry.hpp"

#include <cmath>
#include <string>

#include "tsd/simd/kernels.hpp"

namespace tsd {

std::string_view to_string(RangeQuality quality) {
  switch (quality) {
    case RangeQuality::Ok: return "ok";
    case RangeQuality::BelowMinHeight: return "below_min_height";
    case RangeQuality::AboveMaxRange: return "above_max_range";
  }
  return "ok";
}

double image_plane_height(double bbox_height_px, const CameraIntrinsics& intrinsics) {
  if (!(bbox_height_px > 0.0)) throw ValidationError("bbox height must be positive");
  return intrinsics.sensor_height_px * bbox_height_px / intrinsics.image_height_px;
}

double class_height(ClassLabel label, const CameraIntrinsics& intrinsics) {
  auto it = intrinsics.class_height_m.find(label);
  if (it == intrinsics.class_height_m.end())
    throw ValidationError("no real-world height configured for class '" +
                          std::string(to_string(label)) + "'");
  return it->second;
}

namespace {

// F * I / S, shared by the scalar and batched paths so both round the same way.
double range_numerator(const CameraIntrinsics& k) {
  return (k.focal_length_px * k.image_height_px) / k.sensor_height_px;
}

RangeQuality classify(double height_px, double distance_m, const RangeConfig& config) {
  if (height_px < config.min_bbox_height_px) return RangeQuality::BelowMinHeight;
  if (distance_m > config.max_range_m) return RangeQuality::AboveMaxRange;
  return RangeQuality::Ok;
}

}  // namespace

RangeEstimate range_from_height(double bbox_height_px, ClassLabel label,
                                const CameraIntrinsics& intrinsics, const RangeConfig& config) {
  const double real_height = class_height(label, intrinsics);
  RangeEstimate est;
  est.class_label = label;
  est.bbox_height_px = bbox_height_px;
  est.image_plane_height_px = image_plane_height(bbox_height_px, intrinsics);
  est.distance_m = (range_numerator(intrinsics) * real_height) / bbox_height_px;
  est.quality_flag = classify(bbox_height_px, est.distance_m, config);
  return est;
}

RangeEstimate range_from_bbox(const DetectionRecord& det, const CameraIntrinsics& intrinsics,
                              const RangeConfig& config) {
  return range_from_height(det.bbox.height(), det.class_label, intrinsics, config);
}

double bbox_height_at_range(double distance_m, ClassLabel label, const CameraIntrinsics& intrinsics) {
  if (!(distance_m > 0.0)) throw ValidationError("distance must be positive");
  return (range_numerator(intrinsics) * class_height(label, intrinsics)) / distance_m;
}

std::vector<RangeEstimate> ranges_from_bboxes(std::span<const DetectionRecord> dets,
                                              const CameraIntrinsics& intrinsics,
                                              const RangeConfig& config) {
  std::vector<double> heights(dets.size()), real(dets.size()), dist(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    heights[i] = dets[i].bbox.height();
    if (!(heights[i] > 0.0)) throw ValidationError("bbox height must be positive");
    real[i] = class_height(dets[i].class_label, intrinsics);
  }
  simd::ratio_scale(range_numerator(intrinsics), real, heights, dist);
  std::vector<RangeEstimate> out(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) {
    RangeEstimate& e = out[i];
    e.class_label = dets[i].class_label;
    e.bbox_height_px = heights[i];
    e.image_plane_height_px = image_plane_height(heights[i], intrinsics);
    e.distance_m = dist[i];
    e.quality_flag = classify(heights[i], dist[i], config);
  }
  return out;
}

}  // namespace tsd
