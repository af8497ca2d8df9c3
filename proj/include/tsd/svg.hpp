#pragma once

#include <optional>
#include <string>

#include "tsd/trajectory.hpp"

namespace tsd {

struct SvgStyle {
  int width_px = 960;
  int height_px = 600;
  std::string title;
  std::string predicted_color = "#1f4fd8";  // blue
  std::string reference_color = "#d62728";  // red
  std::string probe_color = "#555555";
  /// Points not flagged ok are left out of the polylines.
  bool ok_points_only = false;
};

/// Time (s) on x, link distance (m) on y. One polyline per track plus one for
/// the probe; with a reference, its tracks and probe are drawn underneath in
/// the reference color. Output depends only on the inputs.
std::string render_svg(const TimeSpaceDiagram& diagram, const SvgStyle& style = {},
                       const TimeSpaceDiagram* reference = nullptr);

}  // namespace tsd
