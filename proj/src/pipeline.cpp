#include "tsd/pipeline.hpp"

#include <fmt/format.h>

#include <Eigen/Core>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "tsd/simd/kernels.hpp"
#include "tsd/svg.hpp"

namespace tsd {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void rethrow_in_stage(const Error& e, std::string_view stage, bool inputs_checked) {
  const std::string msg = fmt::format("{}: {}", stage, e.what());
  switch (e.kind()) {
    case ErrorKind::Config: throw ConfigError(msg);
    case ErrorKind::Parse: throw ParseError(msg);
    case ErrorKind::Validation:
      if (inputs_checked) throw PipelineError(msg);
      throw ValidationError(msg);
    case ErrorKind::Pipeline: throw PipelineError(msg);
  }
  throw PipelineError(msg);
}

// Errors after ingest mean the pipeline itself failed, so validation errors
// from those stages are reported as pipeline errors.
template <class F>
auto stage(std::string_view name, bool inputs_checked, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    rethrow_in_stage(e, name, inputs_checked);
  }
}

std::ifstream open_input(const fs::path& p, std::string_view what) {
  if (!fs::exists(p)) throw ParseError(fmt::format("{} not found: {}", what, p.string()));
  std::ifstream in(p);
  if (!in) throw ParseError(fmt::format("cannot open {}: {}", what, p.string()));
  return in;
}

bool wanted(const DetectionRecord& r, const PipelineConfig& c) {
  if (r.dont_care && !c.include_dont_care) return false;
  return std::find(c.classes.begin(), c.classes.end(), r.class_label) != c.classes.end();
}

std::vector<DetectionRecord> filter_classes(std::vector<DetectionRecord> in, const PipelineConfig& c) {
  std::erase_if(in, [&](const DetectionRecord& r) { return !wanted(r, c); });
  return in;
}

std::vector<DetectionRecord> load_labels(const fs::path& p) {
  std::ifstream in = open_input(p, "label file");
  return parse_label_file(in);
}

FrameClock make_clock(const PipelineConfig& c) {
  if (c.timestamps.empty()) return FrameClock(c.frame_rate_hz);
  std::ifstream in = open_input(c.timestamps, "timestamps file");
  return FrameClock(parse_timestamps(in), c.frame_rate_hz);
}

DiagramConfig diagram_config(const PipelineConfig& c, RangeSource source) {
  DiagramConfig d;
  d.distance_mode = c.distance_mode;
  d.range = c.range;
  d.link_margin_m = c.link_margin_m;
  d.range_source = source;
  d.sequence_id = c.sequence_id;
  return d;
}

void smooth_all(TimeSpaceDiagram& d, int window) {
  if (window == 1) return;
  for (auto& [id, pts] : d.vehicle_trajectories) pts = smooth_track(pts, window);
}

SvgStyle svg_style(const PipelineConfig& c) {
  SvgStyle s;
  s.title = c.sequence_id.empty() ? "time-space diagram" : "time-space diagram: " + c.sequence_id;
  return s;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw PipelineError("cannot write " + p.string());
  out << text;
  if (!out) throw PipelineError("failed writing " + p.string());
}

template <class F>
std::string to_text(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

}  // namespace

RunResult run_pipeline(const PipelineConfig& config) {
  stage("config", false, [&] { config.validate(); });
  RunResult r;
  FrameClock clock(config.frame_rate_hz);

  stage("ingest", false, [&] {
    if (!config.labels.empty()) r.ground_truth = filter_classes(load_labels(config.labels), config);
    if (!config.detections.empty()) {
      std::ifstream in = open_input(config.detections, "detections file");
      r.detections = filter_classes(parse_detections_file(in), config);
    } else {
      r.detections = r.ground_truth;
      r.detections_from_labels = true;
    }
    if (!config.embeddings.empty()) {
      std::ifstream in = open_input(config.embeddings, "embeddings file");
      attach_embeddings(in, r.detections);
    }
    r.oxts = load_oxts(config.oxts);
    if (r.oxts.empty()) throw ParseError("no OXTS samples in " + config.oxts.string());
    clock = make_clock(config);
  });

  if (r.detections_from_labels && (config.jitter_px > 0.0 || config.drop_rate > 0.0))
    r.detections = stage("perturb", true, [&] {
      return perturb_ground_truth(r.detections, config.jitter_px, config.drop_rate, config.seed);
    });

  stage("track", true, [&] {
    Tracker tracker(config.tracker);
    const auto by_frame = group_by_frame(r.detections);
    std::set<int> frames;
    for (const OxtsSample& o : r.oxts) frames.insert(o.frame_index);
    for (const auto& [f, dets] : by_frame) frames.insert(f);
    static const std::vector<DetectionRecord> kNone;
    for (int f : frames) {
      auto it = by_frame.find(f);
      tracker.step(f, it == by_frame.end() ? kNone : it->second);
    }
    r.confirmed_tracks = tracker.confirmed_tracks();
  });

  r.lane_tracks = stage("lane filter", true, [&] {
    return opposite_lane_filter(r.confirmed_tracks, config.image_width_px, config.intrinsics,
                                config.lane, config.range);
  });

  r.diagram = stage("diagram", true, [&] {
    TimeSpaceDiagram d = build_diagram(r.lane_tracks, r.oxts, clock, config.link_start,
                                       config.link_length_m, config.intrinsics,
                                       diagram_config(config, RangeSource::Photogrammetry));
    smooth_all(d, config.smoothing_window);
    return d;
  });

  stage("render", true, [&] {
    r.csv = to_text([&](std::ostream& os) { write_diagram_csv(os, r.diagram); });
    r.svg = render_svg(r.diagram, svg_style(config));
  });
  return r;
}

std::string run_meta_text(const PipelineConfig& config) {
  std::string s = "[meta]\n";
  s += fmt::format("tsd_version = {}\n", TSD_VERSION);
  s += fmt::format("eigen_version = {}.{}.{}\n", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                   EIGEN_MINOR_VERSION);
  s += fmt::format("fmt_version = {}\n", FMT_VERSION);
  s += fmt::format("simd = {}\n", simd::to_string(simd::active_isa()));
  s += fmt::format("seed = {}\n\n", config.seed);
  s += to_text([&](std::ostream& os) { write_config(os, config); });
  return s;
}

void write_run_outputs(const PipelineConfig& config, const RunResult& result) {
  stage("output", true, [&] {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw PipelineError(fmt::format("cannot create {}: {}", config.output_dir.string(), ec.message()));
    write_file(config.output_dir / "diagram.csv", result.csv);
    write_file(config.output_dir / "diagram.svg", result.svg);
    write_file(config.output_dir / "run_meta.txt", run_meta_text(config));
  });
}

EvalResult evaluate_run(const PipelineConfig& config, const RunResult& run,
                        const fs::path& reference_labels) {
  EvalResult e;
  std::vector<DetectionRecord> truth = run.ground_truth;
  if (!reference_labels.empty())
    truth = stage("reference", false, [&] { return filter_classes(load_labels(reference_labels), config); });
  else if (config.labels.empty())
    throw ConfigError("evaluation needs ground-truth labels (input.labels or --reference)");

  stage("evaluate", true, [&] {
    e.range_gt_boxes = range_error_report(truth, config.intrinsics);
    if (!run.detections_from_labels || config.jitter_px > 0.0 || config.drop_rate > 0.0)
      e.range_predicted_boxes = range_error_report(run.detections, truth, config.intrinsics);

    const std::vector<Track> gt_tracks = opposite_lane_filter(
        tracks_from_ground_truth(truth), config.image_width_px, config.intrinsics, config.lane, config.range);
    e.reference = build_diagram(gt_tracks, run.oxts, make_clock(config), config.link_start,
                                config.link_length_m, config.intrinsics,
                                diagram_config(config, RangeSource::GroundTruthDepth));

    std::optional<TrackMatching> matching;
    if (run.detections_from_labels) matching = matching_from_ground_truth_ids(run.lane_tracks);
    e.trajectory = trajectory_error_report(run.diagram, e.reference, matching);

    std::vector<LabeledBox> gt_boxes, pred_boxes;
    for (const DetectionRecord& d : truth)
      if (!d.dont_care && d.gt_track_id >= 0) gt_boxes.push_back({d.frame_index, d.gt_track_id, d.bbox});
    for (const Track& t : run.confirmed_tracks)
      for (const TrackObservation& o : t.history) pred_boxes.push_back({o.frame_index, t.track_id, o.bbox});
    e.hota = hota(gt_boxes, pred_boxes);
  });
  return e;
}

void write_eval_outputs(const PipelineConfig& config, const RunResult& run, const EvalResult& e) {
  stage("output", true, [&] {
    fs::create_directories(config.output_dir);
    const fs::path& o = config.output_dir;
    write_file(o / "range_gt.txt", to_text([&](std::ostream& os) { write_error_report_text(os, e.range_gt_boxes); }));
    write_file(o / "range_gt.csv", to_text([&](std::ostream& os) { write_error_report_csv(os, e.range_gt_boxes); }));
    if (e.range_predicted_boxes) {
      write_file(o / "range_pred.txt",
                 to_text([&](std::ostream& os) { write_error_report_text(os, *e.range_predicted_boxes); }));
      write_file(o / "range_pred.csv",
                 to_text([&](std::ostream& os) { write_error_report_csv(os, *e.range_predicted_boxes); }));
    }
    write_file(o / "trajectory.txt", to_text([&](std::ostream& os) { write_error_report_text(os, e.trajectory); }));
    write_file(o / "trajectory.csv", to_text([&](std::ostream& os) { write_error_report_csv(os, e.trajectory); }));
    write_file(o / "hota.txt", to_text([&](std::ostream& os) { write_hota_text(os, e.hota); }));
    write_file(o / "hota.csv", to_text([&](std::ostream& os) { write_hota_csv(os, e.hota); }));
    write_file(o / "reference.csv", to_text([&](std::ostream& os) { write_diagram_csv(os, e.reference); }));
    SvgStyle style = svg_style(config);
    write_file(o / "overlay.svg", render_svg(run.diagram, style, &e.reference));
  });
}

int exit_code_for(const Error& error) {
  switch (error.kind()) {
    case ErrorKind::Config: return 2;
    case ErrorKind::Parse:
    case ErrorKind::Validation: return 3;
    case ErrorKind::Pipeline: return 4;
  }
  return 4;
}

int guarded(const std::function<void()>& body, std::ostream& err) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
}

int cmd_run(const PipelineConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(
      [&] {
        const RunResult r = run_pipeline(config);
        write_run_outputs(config, r);
        log << fmt::format("{}: {} confirmed tracks, {} after lane filter, {} probe samples -> {}\n",
                           config.sequence_id.empty() ? "run" : config.sequence_id,
                           r.confirmed_tracks.size(), r.lane_tracks.size(), r.oxts.size(),
                           config.output_dir.string());
      },
      err);
}

int cmd_eval(const PipelineConfig& config, const fs::path& reference_labels, std::ostream& log,
             std::ostream& err) {
  return guarded(
      [&] {
        const RunResult r = run_pipeline(config);
        write_run_outputs(config, r);
        const EvalResult e = evaluate_run(config, r, reference_labels);
        write_eval_outputs(config, r, e);
        log << fmt::format("range(gt boxes) mean RMSE {:.3f} m over {} tracks\n",
                           e.range_gt_boxes.mean_rmse_m, e.range_gt_boxes.per_track_rmse_m.size());
        if (e.range_predicted_boxes)
          log << fmt::format("range(predicted boxes) mean RMSE {:.3f} m over {} tracks\n",
                             e.range_predicted_boxes->mean_rmse_m,
                             e.range_predicted_boxes->per_track_rmse_m.size());
        log << fmt::format("trajectory mean RMSE {:.3f} m over {} tracks ({} reference tracks missed)\n",
                           e.trajectory.mean_rmse_m, e.trajectory.per_track_rmse_m.size(),
                           e.trajectory.missed_reference_tracks);
        log << fmt::format("HOTA {:.4f} (DetA {:.4f}, AssA {:.4f}, LocA {:.4f})\n", e.hota.hota,
                           e.hota.det_a, e.hota.ass_a, e.hota.loc_a);
      },
      err);
}

}  // namespace tsd
