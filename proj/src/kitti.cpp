#include "tsd/kitti.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace tsd {

namespace {

bool is_blank_or_comment(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

double real_field(std::string_view token, std::size_t line_no, const char* name) {
  auto v = parse_real(token);
  if (!v) throw ParseError(fmt::format("field '{}' is not a number: '{}'", name, token), line_no);
  return *v;
}

long long int_field(std::string_view token, std::size_t line_no, const char* name) {
  auto v = parse_integer(token);
  if (!v) throw ParseError(fmt::format("field '{}' is not an integer: '{}'", name, token), line_no);
  return *v;
}

void validate_at(const DetectionRecord& r, std::size_t line_no) {
  try {
    validate(r);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("line {}: {}", line_no, e.what()));
  }
}

}  // namespace

std::vector<DetectionRecord> parse_label_file(std::istream& in) {
  std::vector<DetectionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 17 && f.size() != 18)
      throw ParseError(fmt::format("expected 17 or 18 fields, found {}", f.size()), line_no);

    DetectionRecord r;
    const long long frame = int_field(f[0], line_no, "frame");
    if (frame < 0) throw ParseError("negative frame index", line_no);
    r.frame_index = static_cast<int>(frame);
    r.gt_track_id = static_cast<int>(int_field(f[1], line_no, "track_id"));
    r.dont_care = f[2] == "DontCare";
    r.class_label = parse_class_label(f[2]);
    const double truncated = real_field(f[3], line_no, "truncated");
    const long long occluded = int_field(f[4], line_no, "occluded");
    real_field(f[5], line_no, "alpha");
    r.bbox = {real_field(f[6], line_no, "left"), real_field(f[7], line_no, "top"),
              real_field(f[8], line_no, "right"), real_field(f[9], line_no, "bottom")};
    for (int i = 10; i < 13; ++i) real_field(f[i], line_no, "dimensions");
    const Vec3 loc{real_field(f[13], line_no, "x"), real_field(f[14], line_no, "y"),
                   real_field(f[15], line_no, "z")};
    real_field(f[16], line_no, "rotation_y");
    if (f.size() == 18) {
      r.confidence = real_field(f[17], line_no, "score");
    }

    if (truncated >= 0.0 && truncated <= 1.0) r.truncated = truncated;
    if (occluded >= 0) r.occluded = static_cast<int>(occluded);
    // DontCare rows carry -1 / -1000 placeholders instead of 3D data.
    if (!r.dont_care && loc.z > 0.0) {
      r.gt_location_camera = loc;
      r.gt_depth_m = loc.z;
    }
    validate_at(r, line_no);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const DetectionRecord& a, const DetectionRecord& b) {
    if (a.frame_index != b.frame_index) return a.frame_index < b.frame_index;
    return a.gt_track_id < b.gt_track_id;
  });
  return out;
}

std::vector<DetectionRecord> parse_detections_file(std::istream& in) {
  std::vector<DetectionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto f = split_fields(line, /*allow_commas=*/true);
    if (f.size() != 7) throw ParseError(fmt::format("expected 7 fields, found {}", f.size()), line_no);
    DetectionRecord r;
    const long long frame = int_field(f[0], line_no, "frame");
    if (frame < 0) throw ParseError("negative frame index", line_no);
    r.frame_index = static_cast<int>(frame);
    r.class_label = parse_class_label(f[1]);
    r.bbox = {real_field(f[2], line_no, "left"), real_field(f[3], line_no, "top"),
              real_field(f[4], line_no, "right"), real_field(f[5], line_no, "bottom")};
    r.confidence = real_field(f[6], line_no, "confidence");
    validate_at(r, line_no);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const DetectionRecord& a, const DetectionRecord& b) {
    return a.frame_index < b.frame_index;
  });
  return out;
}

void write_detections_file(std::ostream& out, std::span<const DetectionRecord> records) {
  out << "# frame class left top right bottom confidence\n";
  for (const auto& r : records) {
    if (r.dont_care) continue;
    out << fmt::format("{} {} {:.9f} {:.9f} {:.9f} {:.9f} {:.9f}\n", r.frame_index,
                       to_string(r.class_label), r.bbox.left, r.bbox.top, r.bbox.right,
                       r.bbox.bottom, r.confidence);
  }
}

std::map<int, std::vector<DetectionRecord>> group_by_frame(std::span<const DetectionRecord> records) {
  std::map<int, std::vector<DetectionRecord>> out;
  for (const auto& r : records) out[r.frame_index].push_back(r);
  return out;
}

namespace {

OxtsSample parse_oxts_line(std::string_view line, int frame_index, std::size_t line_no) {
  const auto f = split_fields(line);
  if (f.size() < kOxtsFieldCount)
    throw ParseError(fmt::format("OXTS record for frame {} has {} fields, expected {}", frame_index,
                                 f.size(), kOxtsFieldCount),
                     line_no);
  OxtsSample s;
  s.frame_index = frame_index;
  s.raw_fields.reserve(kOxtsFieldCount);
  for (std::size_t i = 0; i < kOxtsFieldCount; ++i)
    s.raw_fields.push_back(real_field(f[i], line_no, "oxts"));
  const double lat = s.raw_fields[0];
  const double lon = s.raw_fields[1];
  if (std::fabs(lat) > 90.0)
    throw ValidationError(fmt::format("OXTS frame {}: latitude {} outside [-90, 90]", frame_index, lat));
  if (std::fabs(lon) > 180.0)
    throw ValidationError(fmt::format("OXTS frame {}: longitude {} outside [-180, 180]", frame_index, lon));
  s.position = GeoPoint::make(lat, lon);
  s.altitude_m = s.raw_fields[2];
  s.velocity_north_mps = s.raw_fields[6];
  s.velocity_east_mps = s.raw_fields[7];
  return s;
}

}  // namespace

std::vector<OxtsSample> parse_oxts_dir(std::span<std::istream* const> frames) {
  std::vector<OxtsSample> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::string line;
    bool found = false;
    std::size_t line_no = 0;
    while (std::getline(*frames[i], line)) {
      ++line_no;
      if (is_blank_or_comment(line)) continue;
      out.push_back(parse_oxts_line(line, static_cast<int>(i), line_no));
      found = true;
      break;
    }
    if (!found) throw ParseError(fmt::format("OXTS file for frame {} is empty", i));
  }
  return out;
}

std::vector<OxtsSample> parse_oxts_lines(std::istream& in) {
  std::vector<OxtsSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    out.push_back(parse_oxts_line(line, static_cast<int>(out.size()), line_no));
  }
  return out;
}

std::vector<OxtsSample> load_oxts(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::exists(path)) throw ParseError("OXTS path does not exist: " + path.string());
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<std::ifstream> streams;
    streams.reserve(files.size());
    std::vector<std::istream*> ptrs;
    for (const auto& f : files) {
      streams.emplace_back(f);
      if (!streams.back()) throw ParseError("cannot open OXTS file: " + f.string());
    }
    for (auto& s : streams) ptrs.push_back(&s);
    return parse_oxts_dir(ptrs);
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open OXTS file: " + path.string());
  return parse_oxts_lines(in);
}

FrameClock::FrameClock(double frame_rate_hz) : frame_rate_hz_(frame_rate_hz) {
  if (!(frame_rate_hz > 0.0) || !std::isfinite(frame_rate_hz))
    throw ValidationError("frame rate must be positive");
}

FrameClock::FrameClock(std::vector<double> explicit_timestamps, double frame_rate_hz)
    : FrameClock(frame_rate_hz) {
  for (std::size_t i = 1; i < explicit_timestamps.size(); ++i)
    if (!(explicit_timestamps[i] > explicit_timestamps[i - 1]))
      throw ValidationError(fmt::format("timestamps not strictly increasing at entry {}", i + 1));
  timestamps_ = std::move(explicit_timestamps);
}

double FrameClock::time_at(int frame_index) const {
  if (frame_index < 0) throw ValidationError("negative frame index");
  if (timestamps_.empty()) return frame_index / frame_rate_hz_;
  if (static_cast<std::size_t>(frame_index) >= timestamps_.size())
    throw PipelineError(fmt::format("no timestamp for frame {}", frame_index));
  return timestamps_[static_cast<std::size_t>(frame_index)] - timestamps_.front();
}

std::vector<double> parse_timestamps(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 1) throw ParseError("expected a single timestamp per line", line_no);
    const double t = real_field(f[0], line_no, "timestamp");
    if (!out.empty() && !(t > out.back()))
      throw ValidationError(fmt::format("line {}: timestamps must be strictly increasing", line_no));
    out.push_back(t);
  }
  return out;
}

void CameraIntrinsics::validate() const {
  if (!(focal_length_px > 0.0)) throw ValidationError("focal length must be positive");
  if (!(image_height_px > 0.0)) throw ValidationError("image height must be positive");
  if (!(sensor_height_px > 0.0)) throw ValidationError("sensor height must be positive");
  for (const auto& [label, h] : class_height_m)
    if (!(h > 0.0))
      throw ValidationError("class height for '" + std::string(to_string(label)) + "' must be positive");
}

CameraIntrinsics CameraIntrinsics::kitti() {
  CameraIntrinsics k;
  k.focal_length_px = 721.0;
  k.image_height_px = 376.0;
  k.sensor_height_px = 362.0;
  k.class_height_m[ClassLabel::Car] = 1.50;
  return k;
}

void attach_embeddings(std::istream& in, std::vector<DetectionRecord>& records) {
  std::map<int, std::vector<std::size_t>> by_frame;
  for (std::size_t i = 0; i < records.size(); ++i) by_frame[records[i].frame_index].push_back(i);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank_or_comment(line)) continue;
    const auto f = split_fields(line);
    if (f.size() < 3) throw ParseError("embedding line needs frame, index and dim", line_no);
    const long long frame = int_field(f[0], line_no, "frame");
    const long long index = int_field(f[1], line_no, "detection_index");
    const long long dim = int_field(f[2], line_no, "dim");
    if (dim <= 0 || f.size() != static_cast<std::size_t>(3 + dim))
      throw ParseError(fmt::format("embedding declares dim {} but has {} values", dim, f.size() - 3),
                       line_no);
    std::vector<float> v;
    v.reserve(static_cast<std::size_t>(dim));
    double norm2 = 0.0;
    for (long long k = 0; k < dim; ++k) {
      const double x = real_field(f[static_cast<std::size_t>(3 + k)], line_no, "embedding");
      norm2 += x * x;
      v.push_back(static_cast<float>(x));
    }
    if (!(norm2 > 0.0)) throw ValidationError(fmt::format("line {}: zero embedding vector", line_no));
    const float inv = static_cast<float>(1.0 / std::sqrt(norm2));
    for (float& x : v) x *= inv;

    auto it = by_frame.find(static_cast<int>(frame));
    if (it == by_frame.end() || index < 0 || static_cast<std::size_t>(index) >= it->second.size())
      throw ValidationError(
          fmt::format("line {}: no detection {} in frame {}", line_no, index, frame));
    records[it->second[static_cast<std::size_t>(index)]].embedding = std::move(v);
  }
}

}  // namespace tsd
