// Copyright 2026 The sedkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Drives the built `sedkit` binary end to end through a shell.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sedkit/prediction_log.h"
#include "support/oracles.h"

namespace {

namespace fs = std::filesystem;

struct Run {
  int code = -1;
  std::string out;
};

Run Sedkit(const std::string& args) {
  const std::string cmd = std::string(SEDKIT_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string F4Path() { return std::string(SEDKIT_DATA_DIR) + "/f4.csv"; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sedkit_cli_" + std::string(::testing::UnitTest::GetInstance()
                                            ->current_test_info()
                                            ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ScorePrintsRankedTable) {
  const auto r = Sedkit("score " + F4Path());
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "concept_name\ts_imp\ts_sim\ts_ov\trank");
  EXPECT_NE(r.out.find("Two cars\t0.666666666667\t0.355555555556\t"), std::string::npos);
  EXPECT_EQ(Sedkit("score " + F4Path()).out, r.out);
  const auto j = Sedkit("score --format structured " + F4Path());
  EXPECT_EQ(j.code, 0);
  EXPECT_EQ(j.out.rfind("{\"concepts\":[", 0), 0u);
}

TEST_F(CliTest, ValidationErrorsExitOne) {
  EXPECT_EQ(Sedkit("score /nonexistent.csv").code, 1);
  EXPECT_EQ(Sedkit("").code, 1);
  EXPECT_EQ(Sedkit("frobnicate").code, 1);
  EXPECT_EQ(Sedkit("simulate " + F4Path() + " --samples 10").code, 1);  // no seed
  EXPECT_EQ(Sedkit("sweep " + F4Path()).code, 1);                     // no seed
  EXPECT_EQ(Sedkit("simulate " + F4Path() + " --seed 1 --p-err 2").code, 1);
  EXPECT_EQ(Sedkit("select " + F4Path() + " --seed 1 --threshold 0").code, 1);
  EXPECT_EQ(Sedkit("sweep " + F4Path() + " --seed 1 --k-range 2:9").code, 1);
  EXPECT_EQ(Sedkit("score --format xml " + F4Path()).code, 1);
}

TEST_F(CliTest, RuntimeFailureExitsTwo) {
  EXPECT_EQ(Sedkit("score " + F4Path() + " -o " + Path("no/such/dir/out.tsv")).code, 2);
}

TEST_F(CliTest, SimulateThenEval) {
  const auto log = Path("sim.jsonl");
  ASSERT_EQ(Sedkit("simulate " + F4Path() +
                   " --seed 4 --samples 3000 --p-err 0.5 --k 2 -o " + log)
                .code,
            0);
  const auto parsed = sedkit::ReadPredictionLogFile(log);
  EXPECT_EQ(parsed.records.size(), 3000u);
  EXPECT_EQ(parsed.header.selected_concepts,
            (std::vector<std::string>{"Two cars", "Color black"}));

  const auto se = Sedkit("eval " + F4Path() + " " + log + " --scheme SE");
  ASSERT_EQ(se.code, 0);
  EXPECT_EQ(se.out.rfind("scheme=SE\ttotal_samples=3000\t", 0), 0u);
  EXPECT_EQ(std::count(se.out.begin(), se.out.end(), '\n'), 1);
  const auto both = Sedkit("eval " + F4Path() + " " + log + " --scheme se+r1 --format json");
  ASSERT_EQ(both.code, 0);
  EXPECT_EQ(both.out.rfind("{\"scheme\":\"SE+R1\"", 0), 0u);
  EXPECT_EQ(Sedkit("eval " + F4Path() + " " + log + " --scheme XX").code, 1);

  // Same seed, same bytes.
  const auto again = Path("again.jsonl");
  ASSERT_EQ(Sedkit("simulate " + F4Path() +
                   " --seed 4 --samples 3000 --p-err 0.5 --k 2 -o " + again)
                .code,
            0);
  std::ifstream a(log), b(again);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST_F(CliTest, SelectStopsAtTwoCars) {
  const auto r = Sedkit("select " + F4Path() +
                        " --threshold 0.66 --seed 3 --samples 20000 --p-err 0.5");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# selected: [Two cars]\n"), std::string::npos);
  EXPECT_NE(r.out.find("# threshold_reached: true\n"), std::string::npos);
}

TEST_F(CliTest, SelectFromConfigFile) {
  fs::copy_file(F4Path(), Path("m.csv"));
  {
    std::ofstream out(Path("run.json"));
    out << R"({"matrix": "m.csv", "threshold": 1.0, "seed": 2,
              "simulator": {"samples": 2000, "p_err": 0.4}})";
  }
  const auto r = Sedkit("select --config " + Path("run.json") + " --format structured");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("\"threshold_reached\":true"), std::string::npos);
  EXPECT_NE(r.out.find("\"seed\":2"), std::string::npos);
}

TEST_F(CliTest, SweepIsDeterministic) {
  const std::string args = "sweep " + F4Path() +
                           " --seed 9 --samples 500 --schemes SE,R1 --k-range 1:4";
  const auto a = Sedkit(args), b = Sedkit(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  std::size_t rows = 0;
  std::istringstream in(a.out);
  for (std::string line; std::getline(in, line);) rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 1u + 8u);
  EXPECT_NE(Sedkit("sweep " + F4Path() +
                   " --seed 10 --samples 500 --schemes SE,R1 --k-range 1:4")
                .out,
            a.out);
}

TEST_F(CliTest, TrainAttackEval) {
  const auto se = Path("se.json"), reg = Path("reg.json"), log = Path("atk.jsonl");
  ASSERT_EQ(Sedkit("train " + F4Path() + " --seed 1 --k 2 --samples 400 --epochs 20" +
                   " --hidden 16 -o " + se + " --curve " + Path("curve.tsv"))
                .code,
            0);
  ASSERT_EQ(Sedkit("train " + F4Path() + " --seed 2 --task-seed 1 --k 0" +
                   " --samples 400 --data-stream 1 --epochs 20 --hidden 16 -o " + reg)
                .out.substr(0, 5),
            "epoch");
  ASSERT_EQ(Sedkit("attack " + F4Path() + " --model " + se + " --model-b " + reg +
                   " --seed 5 --eps 0.1 --samples 200 -o " + log)
                .code,
            0);
  const auto parsed = sedkit::ReadPredictionLogFile(log);
  ASSERT_EQ(parsed.records.size(), 200u);
  EXPECT_TRUE(parsed.records[0].predicted_class_b.has_value());
  EXPECT_EQ(parsed.records[0].predicted_explanation->bits.size(), 2u);
  EXPECT_EQ(Sedkit("eval " + F4Path() + " " + log + " --scheme SE+R1").code, 0);
  // A model from one task cannot be paired with another task's model.
  const auto other = Path("other.json");
  ASSERT_EQ(Sedkit("train " + F4Path() + " --seed 3 --k 0 --samples 50 --epochs 1" +
                   " --class-dims 3 -o " + other + " --curve " + Path("c2.tsv"))
                .code,
            0);
  EXPECT_EQ(Sedkit("attack " + F4Path() + " --model " + se + " --model-b " + other +
                   " --seed 5")
                .code,
            1);
  EXPECT_EQ(Sedkit("attack " + F4Path() + " --model " + se).code, 1);  // no seed
}

}  // namespace
