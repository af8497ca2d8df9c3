#include "tsd/common.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace tsd {

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(ErrorKind::Parse, line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<ClassLabel> lookup(std::string_view token) {
  const std::string t = lowercase(token);
  if (t == "car") return ClassLabel::Car;
  if (t == "van") return ClassLabel::Van;
  if (t == "truck") return ClassLabel::Truck;
  if (t == "tram") return ClassLabel::Tram;
  if (t == "misc") return ClassLabel::Misc;
  if (t == "cyclist") return ClassLabel::Cyclist;
  if (t == "pedestrian") return ClassLabel::Pedestrian;
  if (t == "person_sitting" || t == "person-sitting") return ClassLabel::PersonSitting;
  if (t == "other") return ClassLabel::Other;
  return std::nullopt;
}

}  // namespace

ClassLabel parse_class_label(std::string_view token) {
  return lookup(token).value_or(ClassLabel::Other);
}

ClassLabel class_label_from_name(std::string_view name) {
  if (auto label = lookup(name)) return *label;
  throw ConfigError("unknown class name '" + std::string(name) + "'");
}

std::string_view to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::Car: return "car";
    case ClassLabel::Van: return "van";
    case ClassLabel::Truck: return "truck";
    case ClassLabel::Tram: return "tram";
    case ClassLabel::Misc: return "misc";
    case ClassLabel::Cyclist: return "cyclist";
    case ClassLabel::Pedestrian: return "pedestrian";
    case ClassLabel::PersonSitting: return "person_sitting";
    case ClassLabel::Other: return "other";
  }
  return "other";
}

void validate(const DetectionRecord& r) {
  if (r.frame_index < 0) throw ValidationError("negative frame index");
  if (!(r.bbox.left < r.bbox.right)) throw ValidationError("bbox left must be < right");
  if (!(r.bbox.top < r.bbox.bottom)) throw ValidationError("bbox top must be < bottom");
  if (!(r.confidence >= 0.0 && r.confidence <= 1.0))
    throw ValidationError("confidence outside [0,1]");
  if (r.gt_depth_m && !(*r.gt_depth_m > 0.0)) throw ValidationError("gt depth must be positive");
}

std::optional<double> parse_real(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value, std::chars_format::general);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<long long> parse_integer(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  long long value = 0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, bool allow_commas) {
  std::vector<std::string_view> fields;
  auto is_sep = [&](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || (allow_commas && c == ',');
  };
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    if (j > i) fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

}  // namespace tsd
