// tsd: time-space diagrams from dashcam detections and probe GPS.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "tsd/geodesic.hpp"
#include "tsd/kitti.hpp"
#include "tsd/pipeline.hpp"
#include "tsd/simd/kernels.hpp"
#include "tsd/svg.hpp"
#include "tsd/synthetic.hpp"

namespace {

using namespace tsd;

struct Overrides {
  std::map<std::string, std::string> raw;

  void attach(CLI::App* app) {
    auto* group = app->add_option_group("config overrides", "Any config key as --section.key VALUE");
    for (const std::string& key : config_keys()) group->add_option("--" + key, raw[key]);
  }
  ConfigValues values(const CLI::App* app) const {
    ConfigValues out;
    for (const auto& [key, value] : raw)
      if (app->count("--" + key) > 0) out[key] = value;
    return out;
  }
};

int run_batch(const std::vector<std::string>& configs, const ConfigValues& overrides, int jobs,
              bool evaluate, const std::string& reference) {
  std::vector<std::string> logs(configs.size()), errs(configs.size());
  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      std::ostringstream log, err;
      PipelineConfig cfg;
      codes[i] = guarded([&] { cfg = load_config(configs[i], overrides); }, err);
      if (codes[i] == 0)
        codes[i] = evaluate ? cmd_eval(cfg, reference, log, err) : cmd_run(cfg, log, err);
      logs[i] = log.str();
      errs[i] = err.str();
      if (configs.size() > 1 && !errs[i].empty()) errs[i] = configs[i] + ": " + errs[i];
    }
  };
  const int n = std::clamp(jobs, 1, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::cout << logs[i];
    std::cerr << errs[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-space diagrams of oncoming traffic from dashcam detections and probe GPS"};
  app.require_subcommand(1);
  std::string simd_choice = "auto";
  app.add_option("--simd", simd_choice, "Kernel variant: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  // run / eval
  std::vector<std::string> run_configs;
  int jobs = 1;
  Overrides run_overrides;
  auto* run = app.add_subcommand("run", "Build a time-space diagram (CSV, SVG, run_meta.txt)");
  run->add_option("-c,--config", run_configs, "Config file(s); several run as a batch")->required();
  run->add_option("-j,--jobs", jobs, "Worker threads for batch runs")->check(CLI::PositiveNumber);
  run_overrides.attach(run);

  std::vector<std::string> eval_configs;
  std::string reference;
  int eval_jobs = 1;
  Overrides eval_overrides;
  auto* eval = app.add_subcommand("eval", "Run, then write range, trajectory and HOTA reports");
  eval->add_option("-c,--config", eval_configs, "Config file(s)")->required();
  eval->add_option("--reference", reference, "Ground-truth label file (default: input.labels)");
  eval->add_option("-j,--jobs", eval_jobs, "Worker threads for batch runs")->check(CLI::PositiveNumber);
  eval_overrides.attach(eval);

  // geodesic
  double lat1 = 0, lon1 = 0, lat2 = 0, lon2 = 0;
  double semi_major = Ellipsoid::wgs84().semi_major_axis_m;
  double flattening = Ellipsoid::wgs84().flattening;
  auto* geo = app.add_subcommand("geodesic", "Inverse geodesic between two points (degrees)");
  geo->add_option("lat1", lat1)->required();
  geo->add_option("lon1", lon1)->required();
  geo->add_option("lat2", lat2)->required();
  geo->add_option("lon2", lon2)->required();
  geo->add_option("--semi-major", semi_major, "Ellipsoid semi-major axis (m)");
  geo->add_option("--flattening", flattening, "Ellipsoid flattening");

  // perturb
  std::string perturb_in, perturb_out, perturb_classes = "car";
  double jitter = 0.0, drop = 0.0;
  std::uint64_t seed = 0;
  auto* perturb = app.add_subcommand("perturb", "Turn KITTI labels into noisy detections");
  perturb->add_option("-i,--labels", perturb_in, "KITTI label file")->required();
  perturb->add_option("-o,--output", perturb_out, "Detections file to write")->required();
  perturb->add_option("--jitter-px", jitter, "Uniform edge jitter bound (px)");
  perturb->add_option("--drop-rate", drop, "Probability of dropping a box");
  perturb->add_option("--seed", seed, "Random seed");
  perturb->add_option("--classes", perturb_classes, "Comma-separated classes to keep");

  // render
  std::string render_csv, render_ref, render_out, title;
  double link_length = 0.0;
  bool ok_only = false;
  auto* render = app.add_subcommand("render", "Re-render an SVG from diagram CSV files");
  render->add_option("csv", render_csv, "diagram.csv")->required();
  render->add_option("-o,--output", render_out, "SVG file (default: stdout)");
  render->add_option("--reference", render_ref, "Reference diagram CSV to overlay");
  render->add_option("--link-length", link_length, "Link length (m) for the y axis");
  render->add_option("--title", title);
  render->add_flag("--ok-only", ok_only, "Leave out flagged points");

  // synth
  std::string synth_out;
  int frames = 100;
  auto* synth = app.add_subcommand("synth", "Write the synthetic probe/oncoming-car scene");
  synth->add_option("-o,--output", synth_out, "Directory")->required();
  synth->add_option("--frames", frames)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  const int simd_code = guarded(
      [&] {
        if (simd_choice == "scalar") simd::set_active_isa(simd::Isa::Scalar);
        if (simd_choice == "avx2") simd::set_active_isa(simd::Isa::Avx2);
      },
      std::cerr);
  if (simd_code != 0) return simd_code;

  if (run->parsed()) return run_batch(run_configs, run_overrides.values(run), jobs, false, "");
  if (eval->parsed())
    return run_batch(eval_configs, eval_overrides.values(eval), eval_jobs, true, reference);

  return guarded(
      [&] {
        if (geo->parsed()) {
          const Geodesic g(Ellipsoid{semi_major, flattening});
          const GeodesicSolution s = g.inverse(lat1, lon1, lat2, lon2);
          std::cout << fmt::format("distance_m = {:.6f}\nazimuth1_deg = {:.9f}\nazimuth2_deg = {:.9f}\narc_deg = {:.9f}\n",
                                   s.distance_m, s.azimuth1_deg, s.azimuth2_deg, s.arc_deg);
        } else if (perturb->parsed()) {
          std::ifstream in(perturb_in);
          if (!in) throw ParseError("cannot open " + perturb_in);
          std::vector<DetectionRecord> labels = parse_label_file(in);
          std::vector<ClassLabel> keep;
          for (std::string_view tok : split_fields(perturb_classes, true)) keep.push_back(class_label_from_name(tok));
          std::erase_if(labels, [&](const DetectionRecord& r) {
            return r.dont_care || std::find(keep.begin(), keep.end(), r.class_label) == keep.end();
          });
          const auto noisy = perturb_ground_truth(labels, jitter, drop, seed);
          std::ofstream out(perturb_out);
          if (!out) throw PipelineError("cannot write " + perturb_out);
          write_detections_file(out, noisy);
          std::cout << fmt::format("{} of {} boxes written to {}\n", noisy.size(), labels.size(), perturb_out);
        } else if (render->parsed()) {
          std::istringstream in(read_file(render_csv));
          TimeSpaceDiagram d = read_diagram_csv(in);
          if (link_length > 0.0) d.link_length_m = link_length;
          std::optional<TimeSpaceDiagram> ref;
          if (!render_ref.empty()) {
            std::istringstream rin(read_file(render_ref));
            ref = read_diagram_csv(rin);
          }
          SvgStyle style;
          style.title = title;
          style.ok_points_only = ok_only;
          const std::string svg = render_svg(d, style, ref ? &*ref : nullptr);
          if (render_out.empty()) {
            std::cout << svg;
          } else {
            std::ofstream out(render_out, std::ios::binary);
            if (!out) throw PipelineError("cannot write " + render_out);
            out << svg;
          }
        } else if (synth->parsed()) {
          SyntheticSceneConfig c = SyntheticSceneConfig::standard();
          c.frame_count = frames;
          write_scene(generate_scene(c), synth_out);
          std::cout << "wrote " << synth_out << "\n";
        }
      },
      std::cerr);
}
