// Copyright 2026 The mot3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mot3d command-line entry point: calibrate, track, evaluate, simulate, ablate, plot.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mot3d/calibration.hpp"
#include "mot3d/dataset.hpp"
#include "mot3d/errors.hpp"
#include "mot3d/metrics.hpp"
#include "mot3d/pipeline.hpp"
#include "mot3d/run_config.hpp"
#include "mot3d/synthetic.hpp"
#include "mot3d/tracker.hpp"

namespace fs = std::filesystem;
using namespace mot3d;

namespace {

// Flags shared by the subcommands that run the tracker.
struct TrackerFlags {
  std::string config;
  std::string noise_model;
  bool default_covariance = false;
  std::optional<std::string> matcher;
  std::optional<std::string> affinity;
  std::optional<double> iou_threshold;
  std::optional<double> maha_threshold;
  bool no_angular_velocity = false;
  bool no_warmup_output = false;
  unsigned jobs = 0;
};

void add_input_flags(CLI::App* cmd, TrackerFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration JSON")->check(CLI::ExistingFile);
  cmd->add_option("--noise-model", f.noise_model, "Noise model JSON from 'calibrate'")
      ->check(CLI::ExistingFile);
  cmd->add_flag("--default-covariance", f.default_covariance,
                "Use identity Q, R and initial covariance instead of a noise model");
  cmd->add_option("--jobs", f.jobs, "Worker threads (0 = available parallelism)");
}

void add_override_flags(CLI::App* cmd, TrackerFlags& f) {
  cmd->add_option("--matcher", f.matcher, "greedy | hungarian");
  cmd->add_option("--affinity", f.affinity, "mahalanobis | iou");
  cmd->add_option("--iou-threshold", f.iou_threshold, "Minimum 3D IOU for a match");
  cmd->add_option("--maha-threshold", f.maha_threshold, "Mahalanobis gate for every class");
  cmd->add_flag("--no-angular-velocity", f.no_angular_velocity,
                "Drop the yaw-rate term from the motion model");
  cmd->add_flag("--no-warmup-output", f.no_warmup_output,
                "Report only confirmed tracks, also during the first frames");
}

RunConfig resolve_config(const TrackerFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : RunConfig::load(f.config);
  if (f.matcher) cfg.tracker.matcher = parse_matcher(*f.matcher);
  if (f.affinity) cfg.tracker.affinity = parse_affinity(*f.affinity);
  if (f.iou_threshold) cfg.tracker.iou_threshold = *f.iou_threshold;
  if (f.maha_threshold) {
    cfg.tracker.maha_threshold = *f.maha_threshold;
    cfg.tracker.class_maha_thresholds.clear();
  }
  if (f.no_angular_velocity) cfg.tracker.angular_velocity = false;
  if (f.no_warmup_output) cfg.tracker.warmup_output = false;
  if (f.default_covariance) cfg.default_covariance = true;
  if (!f.noise_model.empty()) cfg.noise_model_path = f.noise_model;
  cfg.validate();
  return cfg;
}

std::optional<NoiseModel> load_noise_model(const RunConfig& cfg) {
  if (!cfg.noise_model_path) return std::nullopt;
  NoiseModel m = NoiseModel::from_json(read_json(*cfg.noise_model_path));
  m.validate();
  return m;
}

NoiseModel noise_for_tracking(const RunConfig& cfg) {
  if (cfg.default_covariance) return NoiseModel::default_covariance();
  auto m = load_noise_model(cfg);
  if (!m) throw ConfigError("no noise model: pass --noise-model or --default-covariance");
  return *m;
}

void write_text(const std::string& text, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// --- calibrate ---------------------------------------------------------------

struct CalibrateArgs {
  std::string ground_truth;
  std::string detections;
  std::string out;
  bool pooled = false;
};

void cmd_calibrate(const CalibrateArgs& a) {
  CalibrationOptions opts;
  opts.pooled = a.pooled;
  const NoiseModel model =
      calibrate(load_ground_truth(a.ground_truth), load_detections(a.detections), opts);
  write_json(model.to_json(), a.out);
  std::cout << "calibrated " << model.classes().size() << " classes"
            << (a.pooled ? " (pooled)" : "") << " -> " << a.out << "\n";
}

// --- track -------------------------------------------------------------------

struct TrackArgs {
  std::string detections;
  std::string out;
  TrackerFlags flags;
};

void cmd_track(const TrackArgs& a) {
  const RunConfig cfg = resolve_config(a.flags);
  const NoiseModel noise = noise_for_tracking(cfg);
  const DetectionSet dets = load_detections(a.detections);

  const auto t0 = std::chrono::steady_clock::now();
  const TrackingRun run = track_all(dets, noise, cfg.tracker, a.flags.jobs);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::ordered_json meta;
  meta["config"] = cfg.to_json();
  write_tracks(run.tracks, a.out, meta);

  TrackerStats total;
  for (const auto& [scene, r] : run.scenes) {
    total.born += r.stats.born;
    total.confirmed += r.stats.confirmed;
    total.died += r.stats.died;
  }
  std::cout << "scenes: " << run.scenes.size() << "\n"
            << "tracks born: " << total.born << "\n"
            << "tracks confirmed: " << total.confirmed << "\n"
            << "tracks died: " << total.died << "\n";
  std::printf("wall time: %.3f s\n", wall);
}

// --- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
  std::string tracks;
  std::string ground_truth;
  std::string out;
  std::string method = "tracker";
  std::string config;
  std::optional<int> n_samples;
};

void cmd_evaluate(const EvaluateArgs& a) {
  EvalOptions opts;
  if (!a.config.empty()) opts.n_samples = RunConfig::load(a.config).amota_samples;
  if (a.n_samples) opts.n_samples = *a.n_samples;
  if (opts.n_samples < 2) throw ConfigError("--n-samples must be at least 2");
  const EvalReport report = amota(load_tracks(a.tracks), load_ground_truth(a.ground_truth), opts);
  if (!a.out.empty()) write_json(report.to_json(), a.out);
  std::cout << table_csv_header() << "\n" << table_csv_row(a.method, report) << "\n";
}

// --- simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string preset = "standard-noisy";
  std::string scenario;
  std::uint64_t seed = 0;
  int scenes = 4;
  int objects = 5;
  std::int64_t frames = 50;
  double yaw_rate = 0.1;
  double speed = 1.0;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a) {
  std::vector<synthetic::ScenarioSpec> specs;
  if (!a.scenario.empty()) {
    const auto doc = read_json(a.scenario);
    if (doc.is_array()) {
      for (const auto& s : doc) specs.push_back(synthetic::ScenarioSpec::from_json(s));
    } else {
      specs.push_back(synthetic::ScenarioSpec::from_json(doc));
    }
  } else if (a.preset == "standard-noisy") {
    specs = synthetic::standard_noisy_suite(a.seed, a.scenes);
  } else if (a.preset == "noiseless") {
    specs.push_back(synthetic::noiseless_scene(a.objects, a.frames, a.seed));
  } else if (a.preset == "turning") {
    specs.push_back(synthetic::turning_scene(a.yaw_rate, a.speed, a.frames));
  } else {
    throw ConfigError("unknown preset '" + a.preset + "' (expected standard-noisy, noiseless or turning)");
  }
  const synthetic::SyntheticData data = synthetic::generate(specs);

  const fs::path dir(a.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  nlohmann::ordered_json meta;
  meta["generator"] = synthetic::kGeneratorVersion;
  nlohmann::ordered_json scenarios = nlohmann::ordered_json::array();
  for (const auto& s : specs) scenarios.push_back(s.to_json());
  write_detections(data.detections, dir / "detections.json", meta);
  write_ground_truth(data.ground_truth, dir / "ground_truth.json", meta);
  write_json(scenarios, dir / "scenarios.json");
  std::cout << "wrote " << specs.size() << " scenes to " << dir.string() << "\n";
}

// --- ablate ------------------------------------------------------------------

struct AblateArgs {
  std::string detections;
  std::string ground_truth;
  std::string out;
  std::vector<std::string> matchers;
  std::vector<std::string> affinities;
  std::vector<double> iou_thresholds;
  std::vector<std::string> covariances;
  std::vector<std::string> angular;
  std::optional<int> n_samples;
  TrackerFlags flags;
};

void cmd_ablate(const AblateArgs& a) {
  // Grid restrictions come from the repeatable flags, not the tracker overrides.
  TrackerFlags base_flags = a.flags;
  base_flags.default_covariance = false;
  base_flags.no_angular_velocity = false;
  const RunConfig cfg = resolve_config(base_flags);

  AblationGrid grid;
  if (!a.matchers.empty()) {
    grid.matchers.clear();
    for (const auto& m : a.matchers) grid.matchers.push_back(parse_matcher(m));
  }
  if (!a.affinities.empty()) {
    grid.affinities.clear();
    for (const auto& s : a.affinities) grid.affinities.push_back(parse_affinity(s));
  }
  if (!a.iou_thresholds.empty()) grid.iou_thresholds = a.iou_thresholds;
  if (!a.covariances.empty() || a.flags.default_covariance) {
    grid.default_covariance.clear();
    for (const auto& c : a.covariances) {
      if (c == "calibrated") grid.default_covariance.push_back(false);
      else if (c == "default") grid.default_covariance.push_back(true);
      else throw ConfigError("unknown covariance '" + c + "' (expected calibrated or default)");
    }
    if (a.flags.default_covariance) grid.default_covariance.push_back(true);
  }
  if (!a.angular.empty() || a.flags.no_angular_velocity) {
    grid.angular_velocity.clear();
    for (const auto& s : a.angular) {
      if (s == "with") grid.angular_velocity.push_back(true);
      else if (s == "without") grid.angular_velocity.push_back(false);
      else throw ConfigError("unknown angular velocity setting '" + s + "' (expected with or without)");
    }
    if (a.flags.no_angular_velocity) grid.angular_velocity.push_back(false);
  }

  EvalOptions eval;
  eval.n_samples = a.n_samples ? *a.n_samples : cfg.amota_samples;
  if (eval.n_samples < 2) throw ConfigError("--n-samples must be at least 2");

  const std::optional<NoiseModel> calibrated = load_noise_model(cfg);
  const std::string csv = ablation_csv(run_ablation(load_detections(a.detections),
                                                    load_ground_truth(a.ground_truth), calibrated,
                                                    grid, cfg.tracker, eval, a.flags.jobs));
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    write_text(csv, a.out);
  }
}

// --- plot --------------------------------------------------------------------

struct PlotArgs {
  std::string tracks;
  std::string ground_truth;
  std::string detections;
  std::string scene;
  std::string out;
};

void cmd_plot(const PlotArgs& a) {
  std::optional<TrackSet> tracks;
  std::optional<GroundTruthSet> gt;
  std::optional<DetectionSet> dets;
  if (!a.tracks.empty()) tracks = load_tracks(a.tracks);
  if (!a.ground_truth.empty()) gt = load_ground_truth(a.ground_truth);
  if (!a.detections.empty()) dets = load_detections(a.detections);
  if (!tracks && !gt && !dets) {
    throw ConfigError("plot needs at least one of --tracks, --ground-truth, --detections");
  }
  write_text(render_bev_svg(tracks ? &*tracks : nullptr, gt ? &*gt : nullptr,
                            dets ? &*dets : nullptr, a.scene),
             a.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mot3d: 3D multi-object tracking with a Kalman filter and Mahalanobis association"};
  app.require_subcommand(1, 1);

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "Estimate Q, R and the initial covariance");
  c_cal->add_option("--ground-truth", cal.ground_truth, "Ground-truth JSON (training split)")
      ->required()
      ->check(CLI::ExistingFile);
  c_cal->add_option("--detections", cal.detections, "Detections JSON for the same frames")
      ->required()
      ->check(CLI::ExistingFile);
  c_cal->add_option("--out", cal.out, "Noise model JSON to write")->required();
  c_cal->add_flag("--pooled", cal.pooled, "One noise model shared by every class");

  TrackArgs trk;
  auto* c_trk = app.add_subcommand("track", "Track every scene of a detection file");
  c_trk->add_option("--detections", trk.detections, "Detections JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_trk->add_option("--out", trk.out, "Track JSON to write")->required();
  add_input_flags(c_trk, trk.flags);
  add_override_flags(c_trk, trk.flags);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "AMOTA and per-class MOTAR curves");
  c_ev->add_option("--tracks", ev.tracks, "Track JSON")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--ground-truth", ev.ground_truth, "Ground-truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_ev->add_option("--out", ev.out, "Report JSON to write");
  c_ev->add_option("--method", ev.method, "Row label for the CSV summary");
  c_ev->add_option("--config", ev.config, "Run configuration JSON (amota_samples)")
      ->check(CLI::ExistingFile);
  c_ev->add_option("--n-samples", ev.n_samples, "Recall grid size (default 40)");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Write a synthetic detection / ground-truth pair");
  c_sim->add_option("--preset", sim.preset, "standard-noisy | noiseless | turning");
  c_sim->add_option("--scenario", sim.scenario, "Scenario JSON (object or array); overrides --preset")
      ->check(CLI::ExistingFile);
  c_sim->add_option("--seed", sim.seed, "Random seed");
  c_sim->add_option("--scenes", sim.scenes, "Scenes in the standard-noisy suite");
  c_sim->add_option("--objects", sim.objects, "Objects in the noiseless preset");
  c_sim->add_option("--frames", sim.frames, "Frames in the noiseless and turning presets");
  c_sim->add_option("--yaw-rate", sim.yaw_rate, "Yaw rate [rad/frame] for the turning preset");
  c_sim->add_option("--speed", sim.speed, "Speed [m/frame] for the turning preset");
  c_sim->add_option("--out", sim.out, "Output directory")->required();

  AblateArgs abl;
  auto* c_abl = app.add_subcommand("ablate", "AMOTA over a grid of tracker variants, as CSV");
  c_abl->add_option("--detections", abl.detections, "Detections JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_abl->add_option("--ground-truth", abl.ground_truth, "Ground-truth JSON")
      ->required()
      ->check(CLI::ExistingFile);
  c_abl->add_option("--out", abl.out, "CSV to write (default stdout)");
  c_abl->add_option("--matcher", abl.matchers, "Restrict to these matchers (repeatable)");
  c_abl->add_option("--affinity", abl.affinities, "Restrict to these affinities (repeatable)");
  c_abl->add_option("--iou-threshold", abl.iou_thresholds,
                    "IOU thresholds to sweep (repeatable, default 0.01)");
  c_abl->add_option("--covariance", abl.covariances, "calibrated | default (repeatable)");
  c_abl->add_option("--angular-velocity", abl.angular, "with | without (repeatable)");
  c_abl->add_option("--maha-threshold", abl.flags.maha_threshold, "Mahalanobis gate for every class");
  c_abl->add_flag("--no-angular-velocity", abl.flags.no_angular_velocity,
                  "Only the variant without yaw rate");
  c_abl->add_flag("--no-warmup-output", abl.flags.no_warmup_output,
                  "Report only confirmed tracks, also during the first frames");
  c_abl->add_option("--n-samples", abl.n_samples, "Recall grid size (default 40)");
  add_input_flags(c_abl, abl.flags);

  PlotArgs plt;
  auto* c_plt = app.add_subcommand("plot", "Bird's-eye-view SVG of one scene");
  c_plt->add_option("--tracks", plt.tracks, "Track JSON")->check(CLI::ExistingFile);
  c_plt->add_option("--ground-truth", plt.ground_truth, "Ground-truth JSON")
      ->check(CLI::ExistingFile);
  c_plt->add_option("--detections", plt.detections, "Detections JSON")->check(CLI::ExistingFile);
  c_plt->add_option("--scene", plt.scene, "Scene id")->required();
  c_plt->add_option("--out", plt.out, "SVG to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (c_cal->parsed()) cmd_calibrate(cal);
    else if (c_trk->parsed()) cmd_track(trk);
    else if (c_ev->parsed()) cmd_evaluate(ev);
    else if (c_sim->parsed()) cmd_simulate(sim);
    else if (c_abl->parsed()) cmd_ablate(abl);
    else if (c_plt->parsed()) cmd_plot(plt);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
