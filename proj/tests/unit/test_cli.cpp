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


// Drives the mot3d binary end to end through the shell.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mot3d/dataset.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

fs::path work_dir() {
  // Per process: ctest may run these cases in parallel.
  static const fs::path d = fs::temp_directory_path() / ("mot3d_test_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string("\"") + MOT3D_CLI_PATH + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string p(const std::string& name) { return "\"" + (work_dir() / name).string() + "\""; }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ASSERT_EQ(run("simulate --preset noiseless --objects 3 --frames 20 --out " + p("noiseless")).code, 0);
    ASSERT_EQ(run("simulate --preset standard-noisy --scenes 1 --seed 3 --out " + p("noisy")).code, 0);
    ASSERT_EQ(run("calibrate --ground-truth " + p("noisy/ground_truth.json") + " --detections " +
                  p("noisy/detections.json") + " --out " + p("noise.json"))
                  .code,
              0);
  }
};

TEST_F(Cli, HelpListsFlagsForEverySubcommand) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
      {"calibrate", {"--ground-truth", "--detections", "--out", "--pooled"}},
      {"track", {"--detections", "--noise-model", "--default-covariance", "--matcher", "--affinity",
                 "--no-angular-velocity", "--jobs"}},
      {"evaluate", {"--tracks", "--ground-truth", "--n-samples"}},
      {"simulate", {"--preset", "--scenario", "--seed", "--out"}},
      {"ablate", {"--detections", "--ground-truth", "--iou-threshold", "--covariance"}},
      {"plot", {"--scene", "--tracks", "--out"}},
  };
  for (const auto& [sub, flags] : cases) {
    const Result r = run(sub + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    for (const auto& f : flags) EXPECT_NE(r.out.find(f), std::string::npos) << sub << " " << f;
  }
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, MissingRequiredFlagOrBadValueExitsOne) {
  EXPECT_EQ(run("track --out " + p("x.json")).code, 1);
  EXPECT_EQ(run("track --detections " + p("noiseless/detections.json") + " --out " + p("x.json") +
                " --default-covariance --matcher auction")
                .code,
            1);
  EXPECT_EQ(run("frobnicate").code, 1);
}

TEST_F(Cli, TrackWithoutNoiseModelFails) {
  const Result r = run("track --detections " + p("noiseless/detections.json") + " --out " + p("x.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("noise"), std::string::npos) << r.err;
}

TEST_F(Cli, EmptyDetectionFileGivesEmptyTracks) {
  std::ofstream(work_dir() / "empty.json") << "{}";
  const Result r = run("track --detections " + p("empty.json") + " --default-covariance --out " +
                       p("empty_tracks.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(mot3d::load_tracks(work_dir() / "empty_tracks.json").empty());
}

TEST_F(Cli, NoiselessTrackEvaluatesPerfectly) {
  const Result t = run("track --detections " + p("noiseless/detections.json") +
                       " --default-covariance --out " + p("nl_tracks.json"));
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NE(t.out.find("tracks born: 3"), std::string::npos) << t.out;
  EXPECT_NE(t.out.find("wall time:"), std::string::npos);
  const Result e = run("evaluate --tracks " + p("nl_tracks.json") + " --ground-truth " +
                       p("noiseless/ground_truth.json") + " --method nl --out " + p("report.json"));
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("nl,100.00,"), std::string::npos) << e.out;
  const auto report = mot3d::read_json(work_dir() / "report.json");
  EXPECT_EQ(report["overall"]["amota"], 1.0);
}

TEST_F(Cli, TrackOutputIsIdempotent) {
  const std::string base = "track --detections " + p("noisy/detections.json") + " --noise-model " +
                           p("noise.json") + " --jobs 3 --out ";
  ASSERT_EQ(run(base + p("t1.json")).code, 0);
  ASSERT_EQ(run(base + p("t2.json")).code, 0);
  EXPECT_EQ(slurp(work_dir() / "t1.json"), slurp(work_dir() / "t2.json"));
  ASSERT_EQ(run("simulate --preset standard-noisy --scenes 1 --seed 3 --out " + p("noisy2")).code, 0);
  EXPECT_EQ(slurp(work_dir() / "noisy/detections.json"), slurp(work_dir() / "noisy2/detections.json"));
}

TEST_F(Cli, AblateSingleCellAndFullGrid) {
  const std::string in = "ablate --detections " + p("noisy/detections.json") + " --ground-truth " +
                         p("noisy/ground_truth.json") + " --noise-model " + p("noise.json");
  const Result one = run(in + " --matcher greedy --affinity iou --iou-threshold 0.25 --covariance"
                              " calibrated --angular-velocity with");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(std::count(one.out.begin(), one.out.end(), '\n'), 2);
  EXPECT_NE(one.out.find("iou@0.25/greedy/calibrated/with-angular-velocity,"), std::string::npos);

  const Result full = run(in + " --jobs 4");
  ASSERT_EQ(full.code, 0) << full.err;
  EXPECT_EQ(std::count(full.out.begin(), full.out.end(), '\n'), 17);

  const Result no_model = run("ablate --detections " + p("noisy/detections.json") + " --ground-truth " +
                              p("noisy/ground_truth.json"));
  EXPECT_EQ(no_model.code, 1);
}

TEST_F(Cli, PlotWritesSvgAndRejectsUnknownScene) {
  const Result ok = run("plot --ground-truth " + p("noiseless/ground_truth.json") +
                        " --scene noiseless-0 --out " + p("plot.svg"));
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(slurp(work_dir() / "plot.svg").find("<svg"), std::string::npos);
  const Result bad = run("plot --ground-truth " + p("noiseless/ground_truth.json") +
                         " --scene nope --out " + p("plot2.svg"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("nope"), std::string::npos);
}

TEST_F(Cli, MalformedInputReportsLocation) {
  std::ofstream(work_dir() / "bad.json") << R"({"s": {"0": [{"center": [0, 0], "yaw": 0}]}})";
  const Result r = run("track --detections " + p("bad.json") + " --default-covariance --out " +
                       p("x.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("scene 's' frame '0'"), std::string::npos) << r.err;
}

}  // namespace
