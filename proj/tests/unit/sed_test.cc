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

#include "sedkit/sed.h"

#include <gtest/gtest.h>

#include "sedkit/errors.h"
#include "sedkit/scoring.h"
#include "sedkit/simulator.h"
#include "support/oracles.h"

namespace sedkit {
namespace {

using ::sedkit::testing::F4;
using ::sedkit::testing::RandomMatrix;

PredictionRecord Record(ClassId truth, ClassId predicted,
                        std::optional<ExplanationVector> explanation,
                        std::optional<ClassId> second = std::nullopt) {
  return {"r", truth, predicted, std::move(explanation), second};
}

TEST(SedFlagTest, MissingRequiredConceptFlags) {
  const auto m = F4();
  const auto all = m.AllConcepts();
  const ClassId c1 = m.ClassByName("Prohibited for all vehicles");
  ExplanationVector e = ExplanationOf(m, c1, all);
  e.bits[m.ConceptByName("Color red").index] = 0;
  EXPECT_TRUE(SedFlag(m, all, c1, e));
}

TEST(SedFlagTest, ExactExplanationDoesNotFlag) {
  const auto m = F4();
  const auto all = m.AllConcepts();
  for (std::size_t j = 0; j < m.num_classes(); ++j) {
    EXPECT_FALSE(SedFlag(m, all, ClassId{j}, ExplanationOf(m, ClassId{j}, all)));
  }
}

TEST(SedFlagTest, ExtraConceptFlags) {
  const auto m = F4();
  const auto all = m.AllConcepts();
  const ClassId c2 = m.ClassByName("No passing");
  ExplanationVector e = ExplanationOf(m, c2, all);
  ASSERT_EQ(e.bits[m.ConceptByName("Parallel tilted lines").index], 0);
  e.bits[m.ConceptByName("Parallel tilted lines").index] = 1;
  EXPECT_TRUE(SedFlag(m, all, c2, e));
}

TEST(SedFlagTest, LengthMismatchThrows) {
  const auto m = F4();
  EXPECT_THROW(SedFlag(m, m.AllConcepts(), ClassId{0}, ExplanationVector{{1}}),
               ValidationError);
}

TEST(EvaluateSchemeTest, NoErrorsLeavesPedUndefined) {
  const auto m = F4();
  const auto all = m.AllConcepts();
  std::vector<PredictionRecord> records;
  for (std::size_t j = 0; j < m.num_classes(); ++j) {
    records.push_back(Record(ClassId{j}, ClassId{j},
                             ExplanationOf(m, ClassId{j}, all), ClassId{j}));
  }
  for (const Scheme s : {Scheme::kR1, Scheme::kSE, Scheme::kSEPlusR1}) {
    const auto report = EvaluateScheme(s, m, all, records);
    EXPECT_EQ(report.err_total, 0u);
    EXPECT_FALSE(report.p_ed.has_value());
    EXPECT_EQ(report.total_samples, 4u);
  }
}

TEST(EvaluateSchemeTest, DetectableTwoCarsError) {
  const auto m = F4();
  const ConceptSelection two_cars = {m.ConceptByName("Two cars")};
  const ClassId c2 = m.ClassByName("No passing");
  const ClassId c4 = m.ClassByName("End of speed limit 80");
  const std::vector<PredictionRecord> records = {
      Record(c2, c4, ExplanationOf(m, c2, two_cars))};
  const auto report = EvaluateScheme(Scheme::kSE, m, two_cars, records);
  EXPECT_EQ(report.err_total, 1u);
  EXPECT_EQ(report.err_detected, 1u);
  EXPECT_EQ(report.p_ed, 1.0);
}

TEST(EvaluateSchemeTest, UndetectableTwoCarsError) {
  const auto m = F4();
  const ConceptSelection two_cars = {m.ConceptByName("Two cars")};
  const ClassId c2 = m.ClassByName("No passing");
  const ClassId c3 = m.ClassByName("End of no passing zone");
  const std::vector<PredictionRecord> records = {
      Record(c2, c3, ExplanationOf(m, c2, two_cars))};
  const auto report = EvaluateScheme(Scheme::kSE, m, two_cars, records);
  EXPECT_EQ(report.err_total, 1u);
  EXPECT_EQ(report.err_detected, 0u);
  EXPECT_EQ(report.p_ed, 0.0);
}

TEST(EvaluateSchemeTest, SchemeRulesAndFalseAlarms) {
  const auto m = F4();
  const auto all = m.AllConcepts();
  const auto e0 = ExplanationOf(m, ClassId{0}, all);
  const auto e1 = ExplanationOf(m, ClassId{1}, all);
  const std::vector<PredictionRecord> records = {
      // correct, explanation wrong, classifiers agree: SE false alarm
      Record(ClassId{0}, ClassId{0}, e1, ClassId{0}),
      // correct, classifiers disagree: R1 false alarm
      Record(ClassId{0}, ClassId{0}, e0, ClassId{2}),
      // error caught only by explanation
      Record(ClassId{0}, ClassId{1}, e0, ClassId{1}),
      // error caught only by disagreement
      Record(ClassId{0}, ClassId{1}, e1, ClassId{0}),
  };
  const auto r1 = EvaluateScheme(Scheme::kR1, m, all, records);
  const auto se = EvaluateScheme(Scheme::kSE, m, all, records);
  const auto both = EvaluateScheme(Scheme::kSEPlusR1, m, all, records);
  EXPECT_EQ(r1.err_total, 2u);
  EXPECT_EQ(r1.err_detected, 1u);
  EXPECT_EQ(r1.false_alarms, 1u);
  EXPECT_EQ(se.err_detected, 1u);
  EXPECT_EQ(se.false_alarms, 1u);
  EXPECT_EQ(both.err_detected, 2u);
  EXPECT_EQ(both.false_alarms, 2u);
  EXPECT_EQ(both.p_ed, 1.0);
}

TEST(EvaluateSchemeTest, MissingFieldsAndEmptyStream) {
  const auto m = F4();
  const auto all = m.AllConcepts();
  const std::vector<PredictionRecord> no_b = {
      Record(ClassId{0}, ClassId{1}, ExplanationOf(m, ClassId{0}, all))};
  const std::vector<PredictionRecord> no_e = {
      Record(ClassId{0}, ClassId{1}, std::nullopt, ClassId{1})};
  EXPECT_THROW(EvaluateScheme(Scheme::kR1, m, all, no_b), ValidationError);
  EXPECT_THROW(EvaluateScheme(Scheme::kSEPlusR1, m, all, no_b),
               ValidationError);
  EXPECT_THROW(EvaluateScheme(Scheme::kSE, m, all, no_e), ValidationError);
  EXPECT_NO_THROW(EvaluateScheme(Scheme::kR1, m, all, no_e));
  EXPECT_THROW(EvaluateScheme(Scheme::kSE, m, all, {}), ValidationError);
}

TEST(SchemeEvaluatorTest, ShardedMergeMatchesSinglePass) {
  Rng rng(11);
  const auto m = RandomMatrix(rng, 8, 5);
  const auto sel = m.AllConcepts();
  SimulatorSpec spec;
  spec.samples = 3000;
  spec.p_err = 0.4;
  spec.explanation = ExplanationModel::kNoisy;
  spec.flip_probability = 0.1;
  const auto records = SimulateRecords(m, sel, spec, 5);
  for (const Scheme s : {Scheme::kR1, Scheme::kSE, Scheme::kSEPlusR1}) {
    const auto whole = EvaluateScheme(s, m, sel, records);
    SchemeEvaluator a(s, m, sel), b(s, m, sel), c(s, m, sel);
    for (std::size_t i = 0; i < records.size(); ++i) {
      (i % 3 == 0 ? a : i % 3 == 1 ? b : c).Add(records[i]);
    }
    c.Merge(a);
    c.Merge(b);
    EXPECT_EQ(c.Report(), whole);
  }
}

TEST(SchemeNameTest, RoundTrip) {
  for (const Scheme s : {Scheme::kR1, Scheme::kSE, Scheme::kSEPlusR1}) {
    EXPECT_EQ(ParseScheme(SchemeName(s)), s);
  }
  EXPECT_EQ(ParseScheme("se+r1"), Scheme::kSEPlusR1);
  EXPECT_THROW(ParseScheme("R2"), ValidationError);
}

TEST(MaxPedOracleTest, Examples) {
  const auto m = F4();
  EXPECT_EQ(MaxPedOracle(m, m.AllConcepts()), 1.0);
  EXPECT_EQ(MaxPedOracle(m, {}), 0.0);
  const ConceptSelection two_cars = {m.ConceptByName("Two cars")};
  EXPECT_NEAR(MaxPedOracle(m, two_cars), 8.0 / 12.0, 1e-15);
}

TEST(MaxPedOracleTest, DuplicateRowsCapBelowOne) {
  const ConceptMatrix m({"A", "B", "C"}, {"x", "y"}, {{1, 0}, {1, 0}, {0, 1}});
  EXPECT_NEAR(MaxPedOracle(m, m.AllConcepts()), 4.0 / 6.0, 1e-15);
}

// Invariants over random matrices: single-concept consistency with
// importance, monotonicity under inclusion, agreement with enumeration.
TEST(MaxPedOracleTest, Properties) {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.UniformIndex(6);
    const auto m = RandomMatrix(rng, n, 1 + rng.UniformIndex(6));
    const auto rows = testing::RowsOf(m);
    for (const ConceptId a : m.AllConcepts()) {
      const ConceptSelection single = {a};
      EXPECT_NEAR(MaxPedOracle(m, single), ImportanceScore(m, a), 1e-15);
      EXPECT_NEAR(MaxPedOracle(m, single),
                  static_cast<double>(DetErr(m, a).size()) / (n * (n - 1)),
                  1e-15);
    }
    ConceptSelection grown;
    std::vector<std::size_t> grown_idx;
    double previous = 0.0;
    for (const ConceptId a : m.AllConcepts()) {
      grown.push_back(a);
      grown_idx.push_back(a.index);
      const double now = MaxPedOracle(m, grown);
      EXPECT_GE(now, previous);
      EXPECT_NEAR(now,
                  static_cast<double>(
                      testing::BruteDistinguishablePairs(rows, grown_idx)) /
                      (n * (n - 1)),
                  1e-15);
      previous = now;
    }
  }
}

TEST(SedInvariantTest, DominanceAndExactExplanationNeverFlagged) {
  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    const auto m = RandomMatrix(rng, 3 + rng.UniformIndex(8),
                                1 + rng.UniformIndex(6));
    const auto sel = m.AllConcepts();
    SimulatorSpec spec;
    spec.samples = 500;
    spec.p_err = 0.5;
    spec.explanation = ExplanationModel::kNoisy;
    spec.flip_probability = 0.2;
    spec.p_err_b = 0.3;
    auto records = SimulateRecords(m, sel, spec, t);
    SchemeEvaluator r1(Scheme::kR1, m, sel), se(Scheme::kSE, m, sel),
        both(Scheme::kSEPlusR1, m, sel);
    for (const auto& r : records) {
      const bool f_r1 = r1.Add(r).flagged;
      const bool f_se = se.Add(r).flagged;
      const bool f_both = both.Add(r).flagged;
      EXPECT_EQ(f_both, f_r1 || f_se);
    }
    EXPECT_GE(both.Report().err_detected, r1.Report().err_detected);
    EXPECT_GE(both.Report().err_detected, se.Report().err_detected);

    // Replace every explanation by E(predicted): SE never fires, even on
    // wrong predictions.
    for (auto& r : records) {
      r.predicted_explanation = ExplanationOf(m, r.predicted_class_a, sel);
    }
    const auto report = EvaluateScheme(Scheme::kSE, m, sel, records);
    EXPECT_EQ(report.err_detected, 0u);
    EXPECT_EQ(report.false_alarms, 0u);
  }
}

TEST(SedInvariantTest, OracleExplanationsMonotoneInSelection) {
  Rng rng(8);
  for (int t = 0; t < 20; ++t) {
    const auto m = RandomMatrix(rng, 3 + rng.UniformIndex(8),
                                2 + rng.UniformIndex(5));
    SimulatorSpec spec;
    spec.samples = 400;
    spec.p_err = 0.6;
    const auto base = SimulateRecords(m, {}, spec, 1000 + t);
    ConceptSelection sel;
    std::size_t previous = 0;
    for (const ConceptId a : m.AllConcepts()) {
      sel.push_back(a);
      auto records = base;
      for (auto& r : records) {
        r.predicted_explanation = ExplanationOf(m, r.true_class, sel);
      }
      const auto report = EvaluateScheme(Scheme::kSE, m, sel, records);
      EXPECT_GE(report.err_detected, previous);
      previous = report.err_detected;
    }
  }
}

TEST(EvalReportFormatTest, JsonAndLine) {
  EvalReport r;
  r.scheme = Scheme::kSEPlusR1;
  r.total_samples = 10;
  r.err_total = 3;
  r.err_detected = 2;
  r.false_alarms = 1;
  r.p_ed = 2.0 / 3.0;
  EXPECT_EQ(FormatEvalReportJson(r),
            "{\"scheme\":\"SE+R1\",\"total_samples\":10,\"err_total\":3,"
            "\"err_detected\":2,\"false_alarms\":1,\"p_ed\":0.666666666667}\n");
  r.p_ed.reset();
  EXPECT_EQ(FormatEvalReportLine(r),
            "scheme=SE+R1\ttotal_samples=10\terr_total=3\terr_detected=2\t"
            "p_ed=undefined\tfalse_alarms=1\n");
}

}  // namespace
}  // namespace sedkit
