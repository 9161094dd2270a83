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

#include "sedkit/report.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include "sedkit/errors.h"
#include "support/oracles.h"

namespace sedkit {
namespace {

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

SweepResult FiveByTwo(std::uint64_t seed) {
  Rng rng(31);
  const auto m = testing::RandomMatrix(rng, 6, 5);
  SimulatorSpec spec;
  spec.samples = 300;
  SimulatorBackend backend(spec, seed);
  const Scheme schemes[] = {Scheme::kSE, Scheme::kR1};
  return RunSchemeSweep(m, backend, schemes, 1, 5);
}

const ReportContext kContext{"sweep", R"({"seed": 4, "b": [1, 2]})", 4};

TEST(ReportTest, TabularHasOneRowPerKAndScheme) {
  const auto text = EmitReport(FiveByTwo(4), ReportFormat::kTabular, kContext);
  const auto lines = Lines(text);
  ASSERT_EQ(lines.size(), 4u + 1u + 10u);
  EXPECT_EQ(lines[0].rfind("# sedkit ", 0), 0u);
  EXPECT_EQ(lines[1], "# command: sweep");
  EXPECT_EQ(lines[2], "# seed: 4");
  EXPECT_EQ(lines[3], R"(# config: {"seed":4,"b":[1,2]})");
  EXPECT_EQ(lines[4],
            "k\tscheme\tcondition\tp_ed\terr_total\terr_detected\t"
            "false_alarms\ttotal_samples");
  EXPECT_EQ(lines[5].substr(0, 5), "1\tSE\t");
  EXPECT_EQ(lines[6].substr(0, 5), "1\tR1\t");
}

TEST(ReportTest, ByteIdenticalForIdenticalRuns) {
  const auto a = FiveByTwo(4), b = FiveByTwo(4);
  for (const auto format : {ReportFormat::kTabular, ReportFormat::kStructured}) {
    EXPECT_EQ(EmitReport(a, format, kContext), EmitReport(b, format, kContext));
  }
  EXPECT_NE(EmitReport(FiveByTwo(5), ReportFormat::kTabular, kContext),
            EmitReport(a, ReportFormat::kTabular, kContext));
}

TEST(ReportTest, StructuredIsValidJson) {
  const auto sweep = FiveByTwo(4);
  const auto j = nlohmann::json::parse(
      EmitReport(sweep, ReportFormat::kStructured, kContext));
  EXPECT_EQ(j.at("command"), "sweep");
  EXPECT_EQ(j.at("seed"), 4);
  EXPECT_EQ(j.at("config").at("b").size(), 2u);
  ASSERT_EQ(j.at("rows").size(), 10u);
  const auto& row = j.at("rows")[3];
  EXPECT_EQ(row.at("k"), sweep.rows[3].k);
  EXPECT_EQ(row.at("err_detected"), sweep.rows[3].err_detected);
  EXPECT_NEAR(row.at("p_ed").get<double>(), *sweep.rows[3].p_ed, 1e-11);
}

TEST(ReportTest, UndefinedPedIsExplicit) {
  SweepResult r;
  r.rows.push_back({1, Scheme::kSE, "simulated", 10, 0, 0, 0, std::nullopt});
  const auto tsv = EmitReport(r, ReportFormat::kTabular, {"sweep", "", 0});
  EXPECT_NE(tsv.find("\tundefined\t"), std::string::npos);
  const auto j = nlohmann::json::parse(
      EmitReport(r, ReportFormat::kStructured, {"sweep", "", 0}));
  EXPECT_TRUE(j.at("rows")[0].at("p_ed").is_null());
  EXPECT_TRUE(j.at("config").empty());
}

TEST(ReportTest, EmptyResultIsAnError) {
  EXPECT_THROW(EmitReport({}, ReportFormat::kTabular, kContext),
               ValidationError);
  EXPECT_THROW(EmitReport({}, ReportFormat::kStructured, kContext),
               ValidationError);
}

TEST(ReportTest, BadConfigEchoIsAnError) {
  EXPECT_THROW(EmitReport(FiveByTwo(1), ReportFormat::kTabular,
                          {"sweep", "{nope", 0}),
               ValidationError);
}

TEST(ReportTest, SelectionReportListsConcepts) {
  const auto m = testing::F4();
  SimulatorSpec spec;
  spec.samples = 5000;
  spec.p_err = 0.5;
  SimulatorBackend backend(spec, 1);
  const auto result = RunSelection(m, backend, {0.8, Scheme::kSE});
  const auto lines = Lines(EmitSelectionReport(
      m, result, ReportFormat::kTabular, {"select", "{}", 1}));
  EXPECT_EQ(lines[4], "# selected: [Two cars] [Color black]");
  EXPECT_EQ(lines[5], "# threshold_reached: true");
  const auto j = nlohmann::json::parse(EmitSelectionReport(
      m, result, ReportFormat::kStructured, {"select", "{}", 1}));
  EXPECT_EQ(j.at("selected"),
            (std::vector<std::string>{"Two cars", "Color black"}));
  EXPECT_TRUE(j.at("threshold_reached").get<bool>());
}

TEST(ReportTest, FormatNames) {
  EXPECT_EQ(ParseReportFormat("tsv"), ReportFormat::kTabular);
  EXPECT_EQ(ParseReportFormat("json"), ReportFormat::kStructured);
  EXPECT_THROW(ParseReportFormat("xml"), ValidationError);
}

TEST(ReportTest, WriteDocumentNamesPathOnFailure) {
  const auto dir = std::filesystem::temp_directory_path() / "sedkit_report_test";
  std::filesystem::create_directories(dir);
  WriteDocument(dir / "out.tsv", "hello\n");
  std::ifstream in(dir / "out.tsv");
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content, "hello\n");
  try {
    WriteDocument(dir / "missing" / "out.tsv", "x");
    FAIL() << "expected an error";
  } catch (const RuntimeFailure& e) {
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace sedkit
