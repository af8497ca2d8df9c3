#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tsd {

// Error categories map one to one onto CLI exit codes.
enum class ErrorKind { Config, Parse, Validation, Pipeline };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Malformed input text. `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose values violate a domain invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class PipelineError : public Error {
 public:
  explicit PipelineError(const std::string& what) : Error(ErrorKind::Pipeline, what) {}
};

enum class ClassLabel : std::uint8_t {
  Car,
  Van,
  Truck,
  Tram,
  Misc,
  Cyclist,
  Pedestrian,
  PersonSitting,
  Other,
};

inline constexpr std::array<ClassLabel, 9> kAllClasses = {
    ClassLabel::Car,     ClassLabel::Van,        ClassLabel::Truck,
    ClassLabel::Tram,    ClassLabel::Misc,       ClassLabel::Cyclist,
    ClassLabel::Pedestrian, ClassLabel::PersonSitting, ClassLabel::Other};

/// Case-insensitive; unknown strings map to ClassLabel::Other.
ClassLabel parse_class_label(std::string_view token);
std::string_view to_string(ClassLabel label);
/// Strict variant for configuration keys: throws ConfigError on unknown names.
ClassLabel class_label_from_name(std::string_view name);

/// Axis-aligned box in pixel coordinates, (left, top) inclusive corner.
struct BBox {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double width() const noexcept { return right - left; }
  double height() const noexcept { return bottom - top; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return 0.5 * (left + right); }
  double center_y() const noexcept { return 0.5 * (top + bottom); }
  bool valid() const noexcept { return left < right && top < bottom; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct DetectionRecord {
  int frame_index = 0;
  ClassLabel class_label = ClassLabel::Other;
  BBox bbox;
  double confidence = 1.0;
  std::optional<double> truncated;
  std::optional<int> occluded;
  int gt_track_id = -1;
  std::optional<Vec3> gt_location_camera;
  std::optional<double> gt_depth_m;
  /// KITTI "DontCare" regions: kept by the parser, skipped downstream.
  bool dont_care = false;
  /// Unit-norm appearance embedding, when an embeddings file is supplied.
  std::vector<float> embedding;
};

/// Throws ValidationError when a record breaks the box/confidence/depth invariants.
void validate(const DetectionRecord& record);

/// Strict locale-independent real parser ('.' decimal, scientific notation).
std::optional<double> parse_real(std::string_view token);
std::optional<long long> parse_integer(std::string_view token);

/// Splits on runs of whitespace (and commas when `allow_commas`).
std::vector<std::string_view> split_fields(std::string_view line, bool allow_commas = false);

}  // namespace tsd
