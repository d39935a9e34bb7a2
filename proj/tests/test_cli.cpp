// Copyright 2026 The pose3d Authors. All Rights Reserved.
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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string output;  // stdout and stderr
};

CliRun pose3d(const std::string& args) {
  const std::string cmd = std::string(POSE3D_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) ++n;
  return n;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pose3d_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small, fast network for end-to-end runs.
  static constexpr const char* kSmallNet = "--input-size 48 --channel-plan 2 2 2 2 2 --windows-per-clip 2";

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesClipsDeterministically) {
  ASSERT_EQ(pose3d("synth --clips 8 --frames 40 --seed 7 --out " + path("a")).code, 0);
  ASSERT_EQ(pose3d("synth --clips 8 --frames 40 --seed 7 --out " + path("b")).code, 0);
  std::size_t clip_dirs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) clip_dirs += e.is_directory();
  EXPECT_EQ(clip_dirs, 8u);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / rel)) << rel;
  }
  EXPECT_EQ(files, 1u + 8 * (40 + 3));
}

TEST_F(CliTest, ShortClipsWarnThenTrainFindsNoWindows) {
  const CliRun s = pose3d("synth --clips 2 --frames 3 --out " + path("d"));
  EXPECT_EQ(s.code, 0);
  EXPECT_TRUE(contains(s.output, "warning")) << s.output;
  const CliRun t = pose3d("train --data " + path("d") + " --out " + path("w.bin") + " --log " + path("l.csv"));
  EXPECT_EQ(t.code, 2);
  EXPECT_TRUE(contains(t.output, "0 windows")) << t.output;
}

TEST_F(CliTest, TrainOneEpochWritesOneLogRow) {
  ASSERT_EQ(pose3d("synth --clips 3 --frames 30 --val 1 --out " + path("d")).code, 0);
  const CliRun t = pose3d("train --data " + path("d") + " --out " + path("w.bin") + " --log " + path("l.csv") +
                       " --max-epochs 1 --seed 5 " + kSmallNet);
  ASSERT_EQ(t.code, 0) << t.output;
  EXPECT_TRUE(contains(t.output, "seed: 5")) << t.output;
  EXPECT_TRUE(contains(t.output, "best validation MPJPE")) << t.output;
  EXPECT_EQ(lines(path("l.csv")), 2u);
  EXPECT_TRUE(fs::exists(path("w.bin")));
}

TEST_F(CliTest, MissingDatasetIsDataError) {
  const std::string missing = path("nowhere");
  const CliRun t = pose3d("train --data " + missing);
  EXPECT_EQ(t.code, 2);
  EXPECT_TRUE(contains(t.output, "dataset not found: " + missing)) << t.output;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(pose3d("train --data x --no-such-flag").code, 1);
  EXPECT_EQ(pose3d("").code, 1);
  EXPECT_EQ(pose3d("synth").code, 1);
  std::ofstream(path("bad.json")) << "{\n  \"training\": {\n    \"seed\": ,\n  }\n}\n";
  const CliRun bad = pose3d("train --config " + path("bad.json") + " --data x");
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(contains(bad.output, "parse error at line 3")) << bad.output;
  std::ofstream(path("unknown.json")) << R"({"training": {"lr": 0.1}})";
  const CliRun unknown = pose3d("train --config " + path("unknown.json") + " --data x");
  EXPECT_EQ(unknown.code, 1);
  EXPECT_TRUE(contains(unknown.output, "training.lr")) << unknown.output;
}

TEST_F(CliTest, HelpListsEveryFlag) {
  const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
      {"synth", {"--out", "--clips", "--frames", "--seed", "--fps", "--val", "--test"}},
      {"train",
       {"--config", "--data", "--out", "--log", "--max-epochs", "--seed", "--lr", "--momentum", "--batch-size",
        "--patience", "--precision", "--windows-per-clip", "--input-size", "--channel-plan",
        "--validation-fraction", "--freeze-prelu", "--no-timing"}},
      {"eval", {"--weights", "--data", "--split", "--report", "--baseline", "--config", "--target-hz", "--pretty"}},
      {"predict", {"--weights", "--clip", "--out", "--config", "--target-hz"}}};
  for (const auto& [cmd, flags] : expected) {
    const CliRun h = pose3d(cmd + " --help");
    EXPECT_EQ(h.code, 0);
    for (const auto& f : flags) EXPECT_TRUE(contains(h.output, f)) << cmd << " " << f;
  }
}

TEST_F(CliTest, DivergenceExitCode) {
  ASSERT_EQ(pose3d("synth --clips 2 --frames 30 --out " + path("d")).code, 0);
  const CliRun t = pose3d("train --data " + path("d") + " --out " + path("w.bin") + " --log " + path("l.csv") +
                       " --lr 1e300 --max-epochs 20 --precision f64 " + kSmallNet);
  EXPECT_EQ(t.code, 3) << t.output;
  EXPECT_TRUE(contains(t.output, "epoch")) << t.output;
}

TEST_F(CliTest, SameSeedRunsAreBitIdentical) {
  ASSERT_EQ(pose3d("synth --clips 3 --frames 30 --val 1 --out " + path("d")).code, 0);
  for (const char* run : {"1", "2"}) {
    const CliRun t = pose3d("train --data " + path("d") + " --out " + path(std::string("w") + run + ".bin") +
                         " --log " + path(std::string("l") + run + ".csv") +
                         " --max-epochs 3 --seed 11 --lr 1e-4 --no-timing " + kSmallNet);
    ASSERT_EQ(t.code, 0) << t.output;
    ASSERT_EQ(pose3d("eval --weights " + path(std::string("w") + run + ".bin") + " --data " + path("d") +
                     " --split train --report " + path(std::string("r") + run + ".csv"))
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("w1.bin")), slurp(path("w2.bin")));
  EXPECT_EQ(slurp(path("l1.csv")), slurp(path("l2.csv")));
  EXPECT_EQ(slurp(path("r1.csv")), slurp(path("r2.csv")));
  EXPECT_EQ(lines(path("l1.csv")), 4u);
}

TEST_F(CliTest, EvalReportsAndRejectsOtherArchitectures) {
  ASSERT_EQ(pose3d("synth --clips 3 --frames 30 --test 1 --out " + path("d")).code, 0);
  ASSERT_EQ(pose3d("train --data " + path("d") + " --out " + path("w.bin") + " --log " + path("l.csv") +
                   " --max-epochs 1 " + kSmallNet)
                .code,
            0);
  const std::string baseline = std::string(POSE3D_SOURCE_DIR) + "/data/h36m_kde.csv";
  const CliRun e = pose3d("eval --weights " + path("w.bin") + " --data " + path("d") + " --report " + path("r.csv") +
                       " --baseline " + baseline);
  ASSERT_EQ(e.code, 0) << e.output;
  EXPECT_TRUE(contains(e.output, "overall MPJPE")) << e.output;
  EXPECT_EQ(lines(path("r.csv")), 3u);  // header, one action, average
  std::ifstream report(path("r.csv"));
  std::string header;
  std::getline(report, header);
  EXPECT_EQ(header, "action,mpjpe_mm,baseline_mm,improvement_pct");

  std::ofstream(path("other.json")) << R"({"architecture": {"channel_plan": [3, 2, 2, 2, 2], "input_size": 48}})";
  const CliRun wrong = pose3d("eval --weights " + path("w.bin") + " --data " + path("d") + " --config " +
                           path("other.json") + " --report " + path("r2.csv"));
  EXPECT_EQ(wrong.code, 2);
  EXPECT_TRUE(contains(wrong.output, "shape mismatch for layer conv1.kernel")) << wrong.output;
}

TEST_F(CliTest, PredictWritesEveryFrameAndIsRepeatable) {
  // 13 fps keeps every source frame after decimation.
  ASSERT_EQ(pose3d("synth --clips 2 --frames 9 --fps 13 --out " + path("d")).code, 0);
  ASSERT_EQ(pose3d("train --data " + path("d") + " --out " + path("w.bin") + " --log " + path("l.csv") +
                   " --max-epochs 1 " + kSmallNet)
                .code,
            0);
  const std::string clip = path("d") + "/clip_0000";
  const CliRun p1 = pose3d("predict --weights " + path("w.bin") + " --clip " + clip + " --out " + path("p1.csv"));
  ASSERT_EQ(p1.code, 0) << p1.output;
  EXPECT_TRUE(contains(p1.output, "MPJPE against clip annotations")) << p1.output;
  EXPECT_EQ(lines(path("p1.csv")), 1u + 9 * 17);
  ASSERT_EQ(pose3d("predict --weights " + path("w.bin") + " --clip " + clip + " --out " + path("p2.csv")).code, 0);
  EXPECT_EQ(slurp(path("p1.csv")), slurp(path("p2.csv")));
}

TEST_F(CliTest, PredictTooShortClipNamesFrameCount) {
  ASSERT_EQ(pose3d("synth --clips 1 --frames 4 --fps 13 --out " + path("short")).code, 0);
  ASSERT_EQ(pose3d("synth --clips 2 --frames 9 --fps 13 --out " + path("d")).code, 0);
  ASSERT_EQ(pose3d("train --data " + path("d") + " --out " + path("w.bin") + " --log " + path("l.csv") +
                   " --max-epochs 1 " + kSmallNet)
                .code,
            0);
  const CliRun p = pose3d("predict --weights " + path("w.bin") + " --clip " + path("short") + "/clip_0000 --out " +
                       path("p.csv"));
  EXPECT_EQ(p.code, 2);
  EXPECT_TRUE(contains(p.output, "clip too short: 4 frames")) << p.output;
}

}  // namespace
