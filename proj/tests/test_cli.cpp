// End-to-end checks: the pipeline in process and the `tsd` binary as a subprocess.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "tsd/pipeline.hpp"
#include "tsd/svg.hpp"
#include "tsd/synthetic.hpp"

using namespace tsd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tsd_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exit status of `tsd <args>`, stderr captured into `err`.
int run_tsd(const std::string& args, std::string* err = nullptr, const fs::path& cwd = {}) {
  const fs::path err_file = fs::temp_directory_path() / ("tsd_err_" + std::to_string(::getpid()));
  std::string cmd = std::string("\"") + TSD_BINARY + "\" " + args + " >/dev/null 2>\"" + err_file.string() + "\"";
  if (!cwd.empty()) cmd = "cd \"" + cwd.string() + "\" && " + cmd;
  const int status = std::system(cmd.c_str());
  if (err) *err = slurp(err_file);
  fs::remove(err_file);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

PipelineConfig synthetic_config(const fs::path& dir) {
  write_scene(generate_scene(SyntheticSceneConfig::standard()), dir);
  PipelineConfig c = load_config(dir / "config.ini");
  c.output_dir = dir / "out";
  return c;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Pipeline, SyntheticSceneProbeRowsAndExactTrajectory) {
  const fs::path dir = scratch("pipe");
  const PipelineConfig c = synthetic_config(dir);
  const RunResult r = run_pipeline(c);
  EXPECT_EQ(count(r.csv, "\n0,"), 100u);  // probe rows = frame count
  ASSERT_EQ(r.diagram.vehicle_trajectories.size(), 1u);
  const EvalResult e = evaluate_run(c, r);
  EXPECT_LT(e.trajectory.mean_rmse_m, 1e-9);
  EXPECT_LT(e.range_gt_boxes.mean_rmse_m, 1e-9);
  EXPECT_NEAR(e.hota.hota, 1.0, 1e-12);
  fs::remove_all(dir);
}

TEST(Pipeline, SplitTrackScoresRootHalf) {
  // One GT car whose box jumps across the image after frame 4: the tracker
  // cannot follow it, so the run holds two perfect five-frame tracks.
  const fs::path dir = scratch("split");
  {
    std::ofstream labels(dir / "labels.txt");
    for (int f = 0; f < 10; ++f) {
      const double l = f < 5 ? 100.0 + f : 900.0 + f;
      labels << f << " 0 Car 0 0 0 " << l << " 180 " << l + 60 << " 230 1.5 1.8 4.2 -3 1.6 20 0\n";
    }
    std::ofstream oxts(dir / "oxts.txt");
    for (int f = 0; f < 10; ++f) {
      oxts << "0 " << f * 1e-5;
      for (int i = 2; i < 30; ++i) oxts << " 0";
      oxts << "\n";
    }
  }
  PipelineConfig c;
  c.labels = dir / "labels.txt";
  c.oxts = dir / "oxts.txt";
  c.output_dir = dir / "out";
  const RunResult r = run_pipeline(c);
  ASSERT_EQ(r.confirmed_tracks.size(), 2u);
  const EvalResult e = evaluate_run(c, r);
  EXPECT_DOUBLE_EQ(e.hota.det_a, 1.0);
  EXPECT_NEAR(e.hota.hota, std::sqrt(0.5), 1e-12);
  fs::remove_all(dir);
}

TEST(Pipeline, MissingOxtsNamesPath) {
  const fs::path dir = scratch("missing");
  PipelineConfig c = synthetic_config(dir);
  c.oxts = dir / "no_such_oxts";
  try {
    run_pipeline(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no_such_oxts"), std::string::npos) << e.what();
    EXPECT_EQ(exit_code_for(e), 3);
  }
  fs::remove_all(dir);
}

TEST(Pipeline, ErrorKindsMapToExitCodes) {
  EXPECT_EQ(exit_code_for(ConfigError("x")), 2);
  EXPECT_EQ(exit_code_for(ParseError("x", 3)), 3);
  EXPECT_EQ(exit_code_for(ValidationError("x")), 3);
  EXPECT_EQ(exit_code_for(PipelineError("x")), 4);
  std::ostringstream err;
  EXPECT_EQ(guarded([] { throw PipelineError("track: boom"); }, err), 4);
  EXPECT_NE(err.str().find("track: boom"), std::string::npos);
  EXPECT_EQ(guarded([] {}, err), 0);
}

TEST(Pipeline, RunMetaEchoReparses) {
  const fs::path dir = scratch("meta");
  PipelineConfig c = synthetic_config(dir);
  c.tracker.max_age = 12;
  c.jitter_px = 1.25;
  std::istringstream in(run_meta_text(c));
  EXPECT_TRUE(parse_config(in) == c);
  fs::remove_all(dir);
}

TEST(Render, EmptyAndOverlayPolylineCounts) {
  TimeSpaceDiagram d;
  d.link_length_m = 100;
  d.probe_trajectory = {{0, 0.0, 0.0}, {1, 0.1, 1.0}};
  const std::string probe_only = render_svg(d);
  EXPECT_EQ(count(probe_only, "<polyline"), 1u);
  EXPECT_NE(probe_only.find("time (s)"), std::string::npos);
  EXPECT_NE(probe_only.find("link distance (m)"), std::string::npos);

  for (int id : {1, 2, 3}) d.vehicle_trajectories[id] = {TrajectoryPoint{id, 0, 0.0, 50.0, 0.0, 50.0},
                                                         TrajectoryPoint{id, 1, 0.1, 45.0, 1.0, 44.0}};
  TimeSpaceDiagram ref = d;
  ref.vehicle_trajectories.erase(3);
  const std::string overlay = render_svg(d, {}, &ref);
  EXPECT_EQ(count(overlay, "<polyline"), 3u + 2u + 2u);
  EXPECT_EQ(overlay, render_svg(d, {}, &ref));
}

TEST(Cli, RunIsByteDeterministic) {
  const fs::path dir = scratch("det");
  write_scene(generate_scene(SyntheticSceneConfig::standard()), dir);
  const std::string cfg = (dir / "config.ini").string();
  for (const char* out : {"a", "b"})
    ASSERT_EQ(run_tsd("run -c \"" + cfg + "\" --perturb.jitter_px 2 --output.directory \"" +
                      (dir / out).string() + "\""), 0);
  EXPECT_EQ(slurp(dir / "a" / "diagram.csv"), slurp(dir / "b" / "diagram.csv"));
  EXPECT_EQ(slurp(dir / "a" / "diagram.svg"), slurp(dir / "b" / "diagram.svg"));
  EXPECT_FALSE(slurp(dir / "a" / "diagram.csv").empty());

  // The scalar kernels give the same bytes as the dispatched ones.
  ASSERT_EQ(run_tsd("--simd scalar run -c \"" + cfg + "\" --perturb.jitter_px 2 --output.directory \"" +
                    (dir / "s").string() + "\""), 0);
  EXPECT_EQ(slurp(dir / "a" / "diagram.csv"), slurp(dir / "s" / "diagram.csv"));

  // The config echo in run_meta.txt reproduces the run.
  ASSERT_EQ(run_tsd("run -c \"" + (dir / "a" / "run_meta.txt").string() + "\" --output.directory \"" +
                    (dir / "c").string() + "\""), 0);
  EXPECT_EQ(slurp(dir / "a" / "diagram.csv"), slurp(dir / "c" / "diagram.csv"));
  fs::remove_all(dir);
}

TEST(Cli, EvalWritesReports) {
  const fs::path dir = scratch("eval");
  write_scene(generate_scene(SyntheticSceneConfig::standard()), dir);
  ASSERT_EQ(run_tsd("eval -c \"" + (dir / "config.ini").string() + "\" --output.directory \"" +
                    (dir / "o").string() + "\""), 0);
  for (const char* f : {"trajectory.txt", "trajectory.csv", "hota.txt", "hota.csv", "range_gt.txt",
                        "reference.csv", "overlay.svg"})
    EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  write_scene(generate_scene(SyntheticSceneConfig::standard()), dir);
  const std::string cfg = (dir / "config.ini").string();
  std::string err;
  EXPECT_EQ(run_tsd("run -c \"" + cfg + "\" --tracker.max_age nope", &err), 2);
  EXPECT_NE(err.find("tracker.max_age"), std::string::npos) << err;
  EXPECT_EQ(run_tsd("run -c \"" + (dir / "absent.ini").string() + "\"", &err), 2);

  EXPECT_EQ(run_tsd("run -c \"" + cfg + "\" --input.oxts \"" + (dir / "gone").string() + "\"", &err), 3);
  EXPECT_NE(err.find((dir / "gone").string()), std::string::npos) << err;

  {
    std::ofstream bad(dir / "bad_labels.txt");
    bad << "0 1 Car 0 0\n";
  }
  EXPECT_EQ(run_tsd("run -c \"" + cfg + "\" --input.labels \"" + (dir / "bad_labels.txt").string() + "\"", &err), 3);
  EXPECT_NE(err.find("line 1"), std::string::npos) << err;

  // Truncated OXTS: tracks reference frames with no GPS fix.
  {
    std::ifstream in(dir / "oxts.txt");
    std::ofstream out(dir / "short_oxts.txt");
    std::string line;
    for (int i = 0; i < 30 && std::getline(in, line); ++i) out << line << "\n";
  }
  EXPECT_EQ(run_tsd("run -c \"" + cfg + "\" --input.oxts \"" + (dir / "short_oxts.txt").string() +
                    "\" --output.directory \"" + (dir / "o").string() + "\"", &err), 4);
  EXPECT_NE(err.find("frame"), std::string::npos) << err;
  fs::remove_all(dir);
}

TEST(Cli, GeodesicAndRenderSubcommands) {
  const fs::path dir = scratch("sub");
  const std::string out = (dir / "g.txt").string();
  ASSERT_EQ(std::system(("\"" + std::string(TSD_BINARY) + "\" geodesic 0 0 0 1 > \"" + out + "\"").c_str()), 0);
  EXPECT_NE(slurp(out).find("111319.49"), std::string::npos) << slurp(out);

  write_scene(generate_scene(SyntheticSceneConfig::standard()), dir);
  ASSERT_EQ(run_tsd("eval -c \"" + (dir / "config.ini").string() + "\" --output.directory \"" +
                    (dir / "o").string() + "\""), 0);
  ASSERT_EQ(run_tsd("render \"" + (dir / "o" / "diagram.csv").string() + "\" --reference \"" +
                    (dir / "o" / "reference.csv").string() + "\" -o \"" + (dir / "r.svg").string() + "\""), 0);
  const std::string svg = slurp(dir / "r.svg");
  EXPECT_EQ(count(svg, "<polyline"), 1u + 1u + 1u + 1u);
  EXPECT_NE(svg.find("reference-track"), std::string::npos);
  EXPECT_EQ(run_tsd("geodesic 95 0 0 0"), 3);
  fs::remove_all(dir);
}
