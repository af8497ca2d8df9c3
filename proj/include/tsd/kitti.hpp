#pragma once

// Readers and writers for the KITTI tracking label layout, OXTS GPS/IMU
// records, plain timestamp files and the external-detection interchange
// format, plus the per-sequence camera description.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tsd/common.hpp"
#include "tsd/geodesic.hpp"

namespace tsd {

/// KITTI tracking label file: 17 or 18 fields per line
/// (frame track type truncated occluded alpha l t r b h w l x y z ry [score]).
/// Output is sorted by (frame_index, gt_track_id), stable for ties. DontCare
/// rows are kept with `dont_care` set; unknown class names become `other`.
std::vector<DetectionRecord> parse_label_file(std::istream& in);

/// `frame class left top right bottom confidence`, whitespace or comma separated,
/// '#' comment lines ignored. Output is stably sorted by frame.
std::vector<DetectionRecord> parse_detections_file(std::istream& in);

/// Inverse of parse_detections_file (9 significant digits after the point).
void write_detections_file(std::ostream& out, std::span<const DetectionRecord> records);

/// Groups records by frame, preserving their relative order.
std::map<int, std::vector<DetectionRecord>> group_by_frame(std::span<const DetectionRecord> records);

struct OxtsSample {
  int frame_index = 0;
  GeoPoint position;
  double altitude_m = 0.0;
  std::optional<double> velocity_north_mps;
  std::optional<double> velocity_east_mps;
  std::vector<double> raw_fields;  // exactly kOxtsFieldCount entries
};

inline constexpr std::size_t kOxtsFieldCount = 30;

/// One stream per frame (KITTI raw layout), frame index = position in the list.
std::vector<OxtsSample> parse_oxts_dir(std::span<std::istream* const> frames);

/// One line per frame (KITTI tracking benchmark layout).
std::vector<OxtsSample> parse_oxts_lines(std::istream& in);

/// Loads OXTS data from a directory of per-frame .txt files (sorted by name)
/// or from a single multi-line file.
std::vector<OxtsSample> load_oxts(const std::filesystem::path& path);

/// Frame index -> seconds since sequence start.
class FrameClock {
 public:
  explicit FrameClock(double frame_rate_hz = 10.0);
  FrameClock(std::vector<double> explicit_timestamps, double frame_rate_hz = 10.0);

  double frame_rate_hz() const noexcept { return frame_rate_hz_; }
  bool has_explicit_timestamps() const noexcept { return !timestamps_.empty(); }
  std::size_t timestamp_count() const noexcept { return timestamps_.size(); }

  /// Explicit timestamps are rebased so frame 0 is t = 0.
  double time_at(int frame_index) const;

 private:
  double frame_rate_hz_;
  std::vector<double> timestamps_;
};

/// One real (seconds) per line, strictly increasing.
std::vector<double> parse_timestamps(std::istream& in);

struct CameraIntrinsics {
  double focal_length_px = 0.0;
  double image_height_px = 0.0;
  double sensor_height_px = 0.0;
  std::map<ClassLabel, double> class_height_m;

  /// Throws ValidationError when a pixel quantity or class height is not positive.
  void validate() const;
  /// Camera constants of the KITTI left color camera with the KITTI mean car height.
  static CameraIntrinsics kitti();

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Synthetic detector noise: independent uniform edge jitter in
/// [-jitter_px, +jitter_px] and Bernoulli(drop_rate) deletion, deterministic
/// in `seed`. Ground-truth fields are carried through untouched.
std::vector<DetectionRecord> perturb_ground_truth(std::span<const DetectionRecord> records,
                                                  double jitter_px, double drop_rate,
                                                  std::uint64_t seed);

/// Embeddings file: `frame detection_index dim v1 ... vdim` per line. Vectors are
/// normalized and attached to the detection at that index within its frame.
void attach_embeddings(std::istream& in, std::vector<DetectionRecord>& records);

}  // namespace tsd
