#pragma once

// Similarity-triangle range estimation from bounding-box pixel height.
//
//   image-plane height  h_img = S * h_px / I
//   range               D     = F * H_real / h_img = F * H_real * I / (h_px * S)
//
// F focal length, I image height, S sensor height (all pixels), H_real the
// class's real-world height in meters.

#include <span>
#include <vector>

#include "tsd/common.hpp"
#include "tsd/kitti.hpp"

namespace tsd {

enum class RangeQuality { Ok, BelowMinHeight, AboveMaxRange };

std::string_view to_string(RangeQuality quality);

struct RangeConfig {
  double min_bbox_height_px = 8.0;
  double max_range_m = 120.0;

  friend bool operator==(const RangeConfig&, const RangeConfig&) = default;
};

struct RangeEstimate {
  double distance_m = 0.0;
  double bbox_height_px = 0.0;
  double image_plane_height_px = 0.0;
  ClassLabel class_label = ClassLabel::Other;
  RangeQuality quality_flag = RangeQuality::Ok;
};

double image_plane_height(double bbox_height_px, const CameraIntrinsics& intrinsics);

/// Throws ValidationError when the class has no configured height.
double class_height(ClassLabel label, const CameraIntrinsics& intrinsics);

/// The distance is always computed for positive box heights; the quality flag
/// says whether it should be trusted.
RangeEstimate range_from_bbox(const DetectionRecord& det, const CameraIntrinsics& intrinsics,
                              const RangeConfig& config = {});
RangeEstimate range_from_height(double bbox_height_px, ClassLabel label,
                                const CameraIntrinsics& intrinsics, const RangeConfig& config = {});

/// Exact inverse of the range law.
double bbox_height_at_range(double distance_m, ClassLabel label, const CameraIntrinsics& intrinsics);

/// Batched range_from_bbox over many detections (vectorized kernel).
std::vector<RangeEstimate> ranges_from_bboxes(std::span<const DetectionRecord> dets,
                                              const CameraIntrinsics& intrinsics,
                                              const RangeConfig& config = {});

}  // namespace tsd
