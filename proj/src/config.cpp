#include "tsd/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>

namespace tsd {

namespace fs = std::filesystem;

namespace {

std::string height_key(ClassLabel c) { return "camera.height_" + std::string(to_string(c)); }

const std::vector<std::string>& build_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = {
        "input.labels", "input.detections", "input.oxts", "input.timestamps", "input.embeddings",
        "input.sequence_id", "input.image_width_px", "input.classes", "input.include_dont_care",
        "camera.preset", "camera.focal_length_px", "camera.image_height_px",
        "camera.sensor_height_px"};
    for (ClassLabel c : kAllClasses) k.push_back(height_key(c));
    for (const char* s :
         {"perturb.jitter_px", "perturb.drop_rate", "tracker.nn_metric", "tracker.max_dist",
          "tracker.max_iou_dist", "tracker.max_age", "tracker.n_init",
          "tracker.appearance_ema_alpha", "tracker.use_appearance", "tracker.mahalanobis_gate",
          "tracker.motion_iou_weight", "tracker.std_weight_position", "tracker.std_weight_velocity",
          "tracker.process_noise_scale", "tracker.measurement_std_floor", "lane.enabled",
          "lane.traffic_side", "lane.lane_offset_threshold_m", "lane.image_fraction",
          "lane.min_frame_share", "range.min_bbox_height_px", "range.max_range_m",
          "link.start_latitude_deg", "link.start_longitude_deg", "link.length_m", "link.margin_m",
          "link.distance_mode", "clock.frame_rate_hz", "smoothing.window", "output.directory",
          "run.seed"})
      k.emplace_back(s);
    return k;
  }();
  return keys;
}

double to_real(const std::string& key, const std::string& v) {
  const auto x = parse_real(v);
  if (!x) throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, v));
  return *x;
}

long long to_int(const std::string& key, const std::string& v) {
  const auto x = parse_integer(v);
  if (!x) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return *x;
}

int to_int32(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(fmt::format("{}: {} is out of range", key, v));
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, std::string v) {
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::string fmt_real(double x) { return fmt::format("{}", x); }

std::vector<ClassLabel> to_classes(const std::string& key, const std::string& v) {
  std::vector<ClassLabel> out;
  for (std::string_view tok : split_fields(v, true)) {
    const ClassLabel c = class_label_from_name(tok);
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  }
  if (out.empty()) throw ConfigError(key + ": at least one class is required");
  return out;
}

fs::path resolve(const std::string& v, const fs::path& base) {
  if (v.empty()) return {};
  fs::path p(v);
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

const std::vector<std::string>& config_keys() { return build_keys(); }

void PipelineConfig::validate() const {
  if (labels.empty() && detections.empty())
    throw ConfigError("input.labels or input.detections must be set");
  if (oxts.empty()) throw ConfigError("input.oxts must be set");
  if (!(image_width_px > 0.0)) throw ConfigError("input.image_width_px must be positive");
  if (classes.empty()) throw ConfigError("input.classes must not be empty");
  if (camera_preset != "kitti" && camera_preset != "custom")
    throw ConfigError("camera.preset must be 'kitti' or 'custom'");
  try {
    intrinsics.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("camera: ") + e.what());
  }
  for (ClassLabel c : classes)
    if (!intrinsics.class_height_m.contains(c))
      throw ConfigError(fmt::format("class '{}' has no camera.height_{}", to_string(c), to_string(c)));
  if (!(jitter_px >= 0.0)) throw ConfigError("perturb.jitter_px must be >= 0");
  if (!(drop_rate >= 0.0 && drop_rate < 1.0)) throw ConfigError("perturb.drop_rate must lie in [0, 1)");
  tracker.validate();
  if (!(lane.image_fraction > 0.0 && lane.image_fraction <= 1.0))
    throw ConfigError("lane.image_fraction must lie in (0, 1]");
  if (!(lane.min_frame_share >= 0.0 && lane.min_frame_share <= 1.0))
    throw ConfigError("lane.min_frame_share must lie in [0, 1]");
  if (!(range.min_bbox_height_px >= 0.0)) throw ConfigError("range.min_bbox_height_px must be >= 0");
  if (!(range.max_range_m > 0.0)) throw ConfigError("range.max_range_m must be positive");
  if (!(link_length_m > 0.0)) throw ConfigError("link.length_m must be positive");
  if (!(link_margin_m >= 0.0)) throw ConfigError("link.margin_m must be >= 0");
  if (!(frame_rate_hz > 0.0)) throw ConfigError("clock.frame_rate_hz must be positive");
  if (smoothing_window < 1 || smoothing_window % 2 == 0)
    throw ConfigError("smoothing.window must be a positive odd integer");
  if (output_dir.empty()) throw ConfigError("output.directory must be set");
}

ConfigValues parse_config_values(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  const auto& keys = config_keys();
  ConfigValues out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(fmt::format("key '{}' is outside any section", section));
    if (section == "meta") continue;
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (std::find(keys.begin(), keys.end(), full) == keys.end())
        throw ConfigError(fmt::format("unknown config key '{}'", full));
      out[full] = value.get_value<std::string>();
    }
  }
  return out;
}

PipelineConfig config_from_values(const ConfigValues& values, const fs::path& base_dir) {
  PipelineConfig c;
  if (auto it = values.find("camera.preset"); it != values.end()) {
    c.camera_preset = it->second;
    if (c.camera_preset == "custom")
      c.intrinsics = CameraIntrinsics{};
    else if (c.camera_preset != "kitti")
      throw ConfigError("camera.preset must be 'kitti' or 'custom'");
  }

  using Setter = std::function<void(const std::string&, const std::string&)>;
  std::map<std::string, Setter> set = {
      {"input.labels", [&](auto&, auto& v) { c.labels = resolve(v, base_dir); }},
      {"input.detections", [&](auto&, auto& v) { c.detections = resolve(v, base_dir); }},
      {"input.oxts", [&](auto&, auto& v) { c.oxts = resolve(v, base_dir); }},
      {"input.timestamps", [&](auto&, auto& v) { c.timestamps = resolve(v, base_dir); }},
      {"input.embeddings", [&](auto&, auto& v) { c.embeddings = resolve(v, base_dir); }},
      {"input.sequence_id", [&](auto&, auto& v) { c.sequence_id = v; }},
      {"input.image_width_px", [&](auto& k, auto& v) { c.image_width_px = to_real(k, v); }},
      {"input.classes", [&](auto& k, auto& v) { c.classes = to_classes(k, v); }},
      {"input.include_dont_care", [&](auto& k, auto& v) { c.include_dont_care = to_bool(k, v); }},
      {"camera.preset", [](auto&, auto&) {}},
      {"camera.focal_length_px", [&](auto& k, auto& v) { c.intrinsics.focal_length_px = to_real(k, v); }},
      {"camera.image_height_px", [&](auto& k, auto& v) { c.intrinsics.image_height_px = to_real(k, v); }},
      {"camera.sensor_height_px", [&](auto& k, auto& v) { c.intrinsics.sensor_height_px = to_real(k, v); }},
      {"perturb.jitter_px", [&](auto& k, auto& v) { c.jitter_px = to_real(k, v); }},
      {"perturb.drop_rate", [&](auto& k, auto& v) { c.drop_rate = to_real(k, v); }},
      {"tracker.nn_metric",
       [&](auto& k, auto& v) {
         if (v == "cosine") c.tracker.nn_metric = NnMetric::Cosine;
         else if (v == "euclidean") c.tracker.nn_metric = NnMetric::Euclidean;
         else throw ConfigError(k + ": expected cosine or euclidean");
       }},
      {"tracker.max_dist", [&](auto& k, auto& v) { c.tracker.max_dist = to_real(k, v); }},
      {"tracker.max_iou_dist", [&](auto& k, auto& v) { c.tracker.max_iou_dist = to_real(k, v); }},
      {"tracker.max_age", [&](auto& k, auto& v) { c.tracker.max_age = to_int32(k, v); }},
      {"tracker.n_init", [&](auto& k, auto& v) { c.tracker.n_init = to_int32(k, v); }},
      {"tracker.appearance_ema_alpha", [&](auto& k, auto& v) { c.tracker.appearance_ema_alpha = to_real(k, v); }},
      {"tracker.use_appearance", [&](auto& k, auto& v) { c.tracker.use_appearance = to_bool(k, v); }},
      {"tracker.mahalanobis_gate", [&](auto& k, auto& v) { c.tracker.mahalanobis_gate = to_real(k, v); }},
      {"tracker.motion_iou_weight", [&](auto& k, auto& v) { c.tracker.motion_iou_weight = to_real(k, v); }},
      {"tracker.std_weight_position", [&](auto& k, auto& v) { c.tracker.kalman.std_weight_position = to_real(k, v); }},
      {"tracker.std_weight_velocity", [&](auto& k, auto& v) { c.tracker.kalman.std_weight_velocity = to_real(k, v); }},
      {"tracker.process_noise_scale", [&](auto& k, auto& v) { c.tracker.kalman.process_noise_scale = to_real(k, v); }},
      {"tracker.measurement_std_floor", [&](auto& k, auto& v) { c.tracker.kalman.measurement_std_floor = to_real(k, v); }},
      {"lane.enabled", [&](auto& k, auto& v) { c.lane.enabled = to_bool(k, v); }},
      {"lane.traffic_side",
       [&](auto& k, auto& v) {
         if (v == "right") c.lane.traffic_side = TrafficSide::Right;
         else if (v == "left") c.lane.traffic_side = TrafficSide::Left;
         else throw ConfigError(k + ": expected right or left");
       }},
      {"lane.lane_offset_threshold_m", [&](auto& k, auto& v) { c.lane.lane_offset_threshold_m = to_real(k, v); }},
      {"lane.image_fraction", [&](auto& k, auto& v) { c.lane.image_fraction = to_real(k, v); }},
      {"lane.min_frame_share", [&](auto& k, auto& v) { c.lane.min_frame_share = to_real(k, v); }},
      {"range.min_bbox_height_px", [&](auto& k, auto& v) { c.range.min_bbox_height_px = to_real(k, v); }},
      {"range.max_range_m", [&](auto& k, auto& v) { c.range.max_range_m = to_real(k, v); }},
      {"link.start_latitude_deg", [&](auto& k, auto& v) { c.link_start.latitude_deg = to_real(k, v); }},
      {"link.start_longitude_deg", [&](auto& k, auto& v) { c.link_start.longitude_deg = to_real(k, v); }},
      {"link.length_m", [&](auto& k, auto& v) { c.link_length_m = to_real(k, v); }},
      {"link.margin_m", [&](auto& k, auto& v) { c.link_margin_m = to_real(k, v); }},
      {"link.distance_mode",
       [&](auto& k, auto& v) {
         if (v == "direct") c.distance_mode = DistanceMode::Direct;
         else if (v == "cumulative") c.distance_mode = DistanceMode::Cumulative;
         else throw ConfigError(k + ": expected direct or cumulative");
       }},
      {"clock.frame_rate_hz", [&](auto& k, auto& v) { c.frame_rate_hz = to_real(k, v); }},
      {"smoothing.window", [&](auto& k, auto& v) { c.smoothing_window = to_int32(k, v); }},
      {"output.directory", [&](auto&, auto& v) { c.output_dir = v; }},
      {"run.seed",
       [&](auto& k, auto& v) {
         std::uint64_t s = 0;
         const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (v.empty() || ec != std::errc() || end != v.data() + v.size())
           throw ConfigError(k + ": expected an integer in [0, 2^64)");
         c.seed = s;
       }},
  };
  for (ClassLabel cl : kAllClasses)
    set[height_key(cl)] = [&c, cl](auto& k, auto& v) { c.intrinsics.class_height_m[cl] = to_real(k, v); };

  for (const auto& [key, value] : values) {
    auto it = set.find(key);
    if (it == set.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
    it->second(key, value);
  }
  try {
    c.link_start = GeoPoint::make(c.link_start.latitude_deg, c.link_start.longitude_deg);
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("link start: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig parse_config(std::istream& in, const fs::path& base_dir) {
  return config_from_values(parse_config_values(in), base_dir);
}

PipelineConfig load_config(const fs::path& path, const ConfigValues& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  ConfigValues values = parse_config_values(in);
  for (const auto& [k, v] : overrides) values[k] = v;
  return config_from_values(values, fs::absolute(path).parent_path());
}

ConfigValues config_to_values(const PipelineConfig& c) {
  ConfigValues v;
  v["input.labels"] = c.labels.string();
  v["input.detections"] = c.detections.string();
  v["input.oxts"] = c.oxts.string();
  v["input.timestamps"] = c.timestamps.string();
  v["input.embeddings"] = c.embeddings.string();
  v["input.sequence_id"] = c.sequence_id;
  v["input.image_width_px"] = fmt_real(c.image_width_px);
  std::string classes;
  for (ClassLabel cl : c.classes) classes += (classes.empty() ? "" : ",") + std::string(to_string(cl));
  v["input.classes"] = classes;
  v["input.include_dont_care"] = c.include_dont_care ? "true" : "false";
  v["camera.preset"] = c.camera_preset;
  v["camera.focal_length_px"] = fmt_real(c.intrinsics.focal_length_px);
  v["camera.image_height_px"] = fmt_real(c.intrinsics.image_height_px);
  v["camera.sensor_height_px"] = fmt_real(c.intrinsics.sensor_height_px);
  for (const auto& [cl, h] : c.intrinsics.class_height_m) v[height_key(cl)] = fmt_real(h);
  v["perturb.jitter_px"] = fmt_real(c.jitter_px);
  v["perturb.drop_rate"] = fmt_real(c.drop_rate);
  v["tracker.nn_metric"] = std::string(to_string(c.tracker.nn_metric));
  v["tracker.max_dist"] = fmt_real(c.tracker.max_dist);
  v["tracker.max_iou_dist"] = fmt_real(c.tracker.max_iou_dist);
  v["tracker.max_age"] = std::to_string(c.tracker.max_age);
  v["tracker.n_init"] = std::to_string(c.tracker.n_init);
  v["tracker.appearance_ema_alpha"] = fmt_real(c.tracker.appearance_ema_alpha);
  v["tracker.use_appearance"] = c.tracker.use_appearance ? "true" : "false";
  v["tracker.mahalanobis_gate"] = fmt_real(c.tracker.mahalanobis_gate);
  v["tracker.motion_iou_weight"] = fmt_real(c.tracker.motion_iou_weight);
  v["tracker.std_weight_position"] = fmt_real(c.tracker.kalman.std_weight_position);
  v["tracker.std_weight_velocity"] = fmt_real(c.tracker.kalman.std_weight_velocity);
  v["tracker.process_noise_scale"] = fmt_real(c.tracker.kalman.process_noise_scale);
  v["tracker.measurement_std_floor"] = fmt_real(c.tracker.kalman.measurement_std_floor);
  v["lane.enabled"] = c.lane.enabled ? "true" : "false";
  v["lane.traffic_side"] = std::string(to_string(c.lane.traffic_side));
  v["lane.lane_offset_threshold_m"] = fmt_real(c.lane.lane_offset_threshold_m);
  v["lane.image_fraction"] = fmt_real(c.lane.image_fraction);
  v["lane.min_frame_share"] = fmt_real(c.lane.min_frame_share);
  v["range.min_bbox_height_px"] = fmt_real(c.range.min_bbox_height_px);
  v["range.max_range_m"] = fmt_real(c.range.max_range_m);
  v["link.start_latitude_deg"] = fmt_real(c.link_start.latitude_deg);
  v["link.start_longitude_deg"] = fmt_real(c.link_start.longitude_deg);
  v["link.length_m"] = fmt_real(c.link_length_m);
  v["link.margin_m"] = fmt_real(c.link_margin_m);
  v["link.distance_mode"] = c.distance_mode == DistanceMode::Direct ? "direct" : "cumulative";
  v["clock.frame_rate_hz"] = fmt_real(c.frame_rate_hz);
  v["smoothing.window"] = std::to_string(c.smoothing_window);
  v["output.directory"] = c.output_dir.string();
  v["run.seed"] = std::to_string(c.seed);
  return v;
}

void write_config(std::ostream& out, const PipelineConfig& config) {
  const ConfigValues values = config_to_values(config);
  std::string section;
  for (const std::string& key : config_keys()) {
    auto it = values.find(key);
    if (it == values.end()) continue;
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << "[" << s << "]\n";
      section = s;
    }
    out << key.substr(dot + 1) << " = " << it->second << "\n";
  }
}

}  // namespace tsd
