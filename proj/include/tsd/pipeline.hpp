#pragma once

// End-to-end wiring: ingest, optional perturbation, tracking, lane filter,
// range and probe distances, diagram, smoothing, rendering.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsd/config.hpp"
#include "tsd/evaluation.hpp"
#include "tsd/hota.hpp"
#include "tsd/trajectory.hpp"

namespace tsd {

struct RunResult {
  std::vector<DetectionRecord> ground_truth;  // class-filtered labels (empty without labels)
  std::vector<DetectionRecord> detections;    // what the tracker saw
  bool detections_from_labels = false;
  std::vector<OxtsSample> oxts;
  std::vector<Track> confirmed_tracks;        // before the lane filter
  std::vector<Track> lane_tracks;             // after the lane filter
  TimeSpaceDiagram diagram;
  std::string csv;
  std::string svg;
};

/// Runs every stage in memory. Errors keep their kind and gain a stage prefix.
RunResult run_pipeline(const PipelineConfig& config);

/// Writes diagram.csv, diagram.svg and run_meta.txt into config.output_dir.
void write_run_outputs(const PipelineConfig& config, const RunResult& result);

struct EvalResult {
  ErrorReport range_gt_boxes;
  std::optional<ErrorReport> range_predicted_boxes;  // only when boxes are not the labels themselves
  ErrorReport trajectory;
  HotaReport hota;
  TimeSpaceDiagram reference;
};

/// Evaluates a run against ground-truth labels (`reference_labels`, or the
/// configured labels file when empty).
EvalResult evaluate_run(const PipelineConfig& config, const RunResult& run,
                        const std::filesystem::path& reference_labels = {});

/// Writes range_gt, range_pred, trajectory and hota reports (.txt and .csv),
/// reference.csv and overlay.svg into config.output_dir.
void write_eval_outputs(const PipelineConfig& config, const RunResult& run, const EvalResult& eval);

/// `[meta]` block followed by the config echo.
std::string run_meta_text(const PipelineConfig& config);

/// 0 success, 2 config, 3 parse (and validation of input values), 4 pipeline.
int exit_code_for(const Error& error);

/// Calls `body`, maps tsd::Error and std::exception to exit codes and prints
/// the message to `err`.
int guarded(const std::function<void()>& body, std::ostream& err);

int cmd_run(const PipelineConfig& config, std::ostream& log, std::ostream& err);
int cmd_eval(const PipelineConfig& config, const std::filesystem::path& reference_labels,
             std::ostream& log, std::ostream& err);

}  // namespace tsd
