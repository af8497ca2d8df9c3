#include "tsd/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace tsd {

namespace {

struct Bounds {
  double t0 = std::numeric_limits<double>::infinity(), t1 = -std::numeric_limits<double>::infinity();
  double d0 = std::numeric_limits<double>::infinity(), d1 = -std::numeric_limits<double>::infinity();

  void add(double t, double d) {
    t0 = std::min(t0, t), t1 = std::max(t1, t);
    d0 = std::min(d0, d), d1 = std::max(d1, d);
  }
  void add(const TimeSpaceDiagram& g, bool ok_only) {
    for (const ProbePoint& p : g.probe_trajectory) add(p.time_s, p.distance_m);
    for (const auto& [id, pts] : g.vehicle_trajectories)
      for (const TrajectoryPoint& p : pts)
        if (!ok_only || p.quality == PointQuality::Ok) add(p.time_s, p.link_distance_m);
  }
};

// 1, 2 or 5 times a power of ten, giving roughly `target` intervals.
double nice_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const TimeSpaceDiagram& diagram, const SvgStyle& style,
                       const TimeSpaceDiagram* reference) {
  const double left = 80, right = 30, top = 50, bottom = 60;
  const double w = style.width_px, h = style.height_px;
  const double pw = w - left - right, ph = h - top - bottom;

  Bounds b;
  b.add(diagram, style.ok_points_only);
  if (reference) b.add(*reference, style.ok_points_only);
  if (!std::isfinite(b.t0)) b = Bounds{0.0, 1.0, 0.0, 1.0};
  b.d0 = std::min(b.d0, 0.0);
  b.d1 = std::max(b.d1, diagram.link_length_m);
  if (b.t1 <= b.t0) b.t1 = b.t0 + 1.0;
  if (b.d1 <= b.d0) b.d1 = b.d0 + 1.0;

  const auto x = [&](double t) { return left + (t - b.t0) / (b.t1 - b.t0) * pw; };
  const auto y = [&](double d) { return top + ph - (d - b.d0) / (b.d1 - b.d0) * ph; };

  std::string s;
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      style.width_px, style.height_px, style.width_px, style.height_px);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", style.width_px,
                   style.height_px);
  if (!style.title.empty())
    s += fmt::format("<text x=\"{:.2f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     w / 2, escape(style.title));

  // Axes, ticks and grid.
  s += "<g stroke=\"#000000\" stroke-width=\"1\">\n";
  s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", left, top + ph,
                   left + pw, top + ph);
  s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", left, top, left,
                   top + ph);
  s += "</g>\n<g stroke=\"#dddddd\" stroke-width=\"0.5\">\n";
  std::string labels;
  const double ts = nice_step(b.t1 - b.t0, 8), ds = nice_step(b.d1 - b.d0, 8);
  for (double t = std::ceil(b.t0 / ts) * ts; t <= b.t1 + 1e-9 * ts; t += ts) {
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", x(t), top,
                     top + ph);
    labels += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", x(t),
                          top + ph + 16, t + 0.0);
  }
  for (double d = std::ceil(b.d0 / ds) * ds; d <= b.d1 + 1e-9 * ds; d += ds) {
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", left, y(d),
                     left + pw);
    labels += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{:g}</text>\n", left - 6,
                          y(d) + 4, d + 0.0);
  }
  s += "</g>\n" + labels;
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">time (s)</text>\n",
                   left + pw / 2, h - 15);
  s += fmt::format(
      "<text x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.2f})\">"
      "link distance (m)</text>\n",
      top + ph / 2);

  const auto polyline = [&](const std::string& cls, const std::string& id, const std::string& color,
                            double width, const std::string& dash, auto&& points) {
    std::string pts;
    for (const auto& [t, d] : points) pts += fmt::format("{}{:.2f},{:.2f}", pts.empty() ? "" : " ", x(t), y(d));
    s += fmt::format("<polyline class=\"{}\" data-id=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{} points=\"{}\"/>\n",
                     cls, id, color, width, dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"", pts);
  };
  const auto draw = [&](const TimeSpaceDiagram& g, const std::string& prefix, const std::string& color) {
    std::vector<std::pair<double, double>> probe;
    for (const ProbePoint& p : g.probe_trajectory) probe.emplace_back(p.time_s, p.distance_m);
    polyline(prefix + "-probe", "0", style.probe_color, 1.5, prefix == "reference" ? "2,3" : "6,4", probe);
    for (const auto& [id, pts] : g.vehicle_trajectories) {
      std::vector<std::pair<double, double>> v;
      for (const TrajectoryPoint& p : pts)
        if (!style.ok_points_only || p.quality == PointQuality::Ok) v.emplace_back(p.time_s, p.link_distance_m);
      polyline(prefix + "-track", std::to_string(id), color, 1.8, "", v);
    }
  };
  if (reference) draw(*reference, "reference", style.reference_color);
  draw(diagram, "predicted", style.predicted_color);

  // Legend.
  double ly = top + 14;
  const auto legend = [&](const std::string& color, const std::string& text) {
    s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                     left + pw - 150, ly, left + pw - 125, color);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", left + pw - 118, ly + 4, text);
    ly += 16;
  };
  legend(style.predicted_color, "predicted");
  if (reference) legend(style.reference_color, "reference");
  legend(style.probe_color, "probe");
  s += "</svg>\n";
  return s;
}

}  // namespace tsd
