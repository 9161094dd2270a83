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

#include "sedkit/simulator.h"

#include <gtest/gtest.h>

#include <cmath>

#include "sedkit/errors.h"
#include "support/oracles.h"

namespace sedkit {
namespace {

using testing::F4;

TEST(SimulatorTest, PerfectClassifierHasNoErrors) {
  SimulatorSpec spec;
  spec.samples = 2000;
  spec.p_err = 0.0;
  spec.p_err_b = 0.0;
  const auto m = F4();
  const auto sel = m.AllConcepts();
  const auto records = SimulateRecords(m, sel, spec, 1);
  ASSERT_EQ(records.size(), 2000u);
  for (const auto& r : records) {
    EXPECT_EQ(r.predicted_class_a, r.true_class);
    EXPECT_EQ(r.predicted_class_b, r.true_class);
    EXPECT_EQ(*r.predicted_explanation, ExplanationOf(m, r.true_class, sel));
  }
  const auto report = EvaluateScheme(Scheme::kSE, m, sel, records);
  EXPECT_EQ(report.err_total, 0u);
  EXPECT_FALSE(report.p_ed.has_value());
}

TEST(SimulatorTest, AlwaysWrongSpreadsUniformly) {
  SimulatorSpec spec;
  spec.samples = 30000;
  spec.p_err = 1.0;
  spec.second_classifier = false;
  const auto m = F4();
  const auto records = SimulateRecords(m, {}, spec, 2);
  // Per true class, counts of each wrong predicted class.
  std::vector<std::vector<double>> counts(4, std::vector<double>(4, 0));
  std::vector<double> totals(4, 0);
  for (const auto& r : records) {
    ASSERT_NE(r.predicted_class_a, r.true_class);
    EXPECT_FALSE(r.predicted_class_b.has_value());
    counts[r.true_class.index][r.predicted_class_a.index] += 1;
    totals[r.true_class.index] += 1;
  }
  for (std::size_t t = 0; t < 4; ++t) {
    const double n = totals[t];
    const double sigma = std::sqrt(n * (1.0 / 3) * (2.0 / 3));
    for (std::size_t p = 0; p < 4; ++p) {
      if (p == t) continue;
      EXPECT_LT(std::abs(counts[t][p] - n / 3), 3 * sigma) << t << "->" << p;
    }
  }
}

TEST(SimulatorTest, ErrorRateWithinThreeSigma) {
  SimulatorSpec spec;
  spec.samples = 20000;
  spec.p_err = 0.3;
  spec.p_err_b = 0.2;
  const auto m = F4();
  const auto records = SimulateRecords(m, {}, spec, 3);
  double a = 0, b = 0;
  for (const auto& r : records) {
    a += r.predicted_class_a != r.true_class;
    b += *r.predicted_class_b != r.true_class;
  }
  const double n = spec.samples;
  EXPECT_LT(std::abs(a - 0.3 * n), 3 * std::sqrt(n * 0.3 * 0.7));
  EXPECT_LT(std::abs(b - 0.2 * n), 3 * std::sqrt(n * 0.2 * 0.8));
}

TEST(SimulatorTest, OracleExplanationsConvergeToDistinguishableFraction) {
  Rng rng(21);
  const auto m = testing::RandomMatrix(rng, 7, 5);
  SimulatorSpec spec;
  spec.samples = 40000;
  spec.p_err = 0.5;
  for (std::size_t k = 1; k <= 5; ++k) {
    std::vector<ConceptId> sel;
    for (std::size_t a = 0; a < k; ++a) sel.push_back(ConceptId{a});
    const auto report =
        EvaluateScheme(Scheme::kSE, m, sel, SimulateRecords(m, sel, spec, 4));
    const double p = MaxPedOracle(m, sel);
    const double n = static_cast<double>(report.err_total);
    const double sigma = std::sqrt(p * (1 - p) / n);
    EXPECT_LE(std::abs(*report.p_ed - p), 3 * sigma + 1e-12) << "k=" << k;
    EXPECT_EQ(report.false_alarms, 0u);
  }
}

TEST(SimulatorTest, ClassDrawsIgnoreSelection) {
  const auto m = F4();
  SimulatorSpec spec;
  spec.samples = 500;
  spec.explanation = ExplanationModel::kNoisy;
  spec.flip_probability = 0.2;
  const ConceptId one[] = {ConceptId{2}};
  const ConceptId two[] = {ConceptId{0}, ConceptId{2}};
  const auto a = SimulateRecords(m, one, spec, 5);
  const auto b = SimulateRecords(m, two, spec, 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].sample_id, b[i].sample_id);
    EXPECT_EQ(a[i].true_class, b[i].true_class);
    EXPECT_EQ(a[i].predicted_class_a, b[i].predicted_class_a);
    EXPECT_EQ(a[i].predicted_class_b, b[i].predicted_class_b);
    // Concept 2's noisy bit is shared too.
    EXPECT_EQ(a[i].predicted_explanation->bits[0],
              b[i].predicted_explanation->bits[1]);
  }
  EXPECT_EQ(SimulateRecords(m, one, spec, 5), a);
  EXPECT_NE(SimulateRecords(m, one, spec, 6), a);
}

TEST(SimulatorTest, NoisyFlipRate) {
  const auto m = F4();
  SimulatorSpec spec;
  spec.samples = 10000;
  spec.p_err = 0.0;
  spec.explanation = ExplanationModel::kNoisy;
  spec.flip_probability = 0.1;
  const auto sel = m.AllConcepts();
  double flips = 0;
  for (const auto& r : SimulateRecords(m, sel, spec, 7)) {
    const auto truth = ExplanationOf(m, r.true_class, sel);
    for (std::size_t i = 0; i < sel.size(); ++i) {
      flips += truth.bits[i] != r.predicted_explanation->bits[i];
    }
  }
  const double n = 4.0 * spec.samples;
  EXPECT_LT(std::abs(flips - 0.1 * n), 3 * std::sqrt(n * 0.09));
}

TEST(SimulatorTest, FullCorrelationRepeatsWrongClass) {
  const auto m = F4();
  SimulatorSpec spec;
  spec.samples = 3000;
  spec.p_err = 0.5;
  spec.correlation = 1.0;
  for (const auto& r : SimulateRecords(m, {}, spec, 8)) {
    if (r.predicted_class_a != r.true_class) {
      EXPECT_EQ(r.predicted_class_b, r.predicted_class_a);
    }
  }
  // R1 catches nothing when B always copies A's mistakes.
  const auto report = EvaluateScheme(Scheme::kR1, m, {},
                                     SimulateRecords(m, {}, spec, 8));
  EXPECT_EQ(report.err_detected, 0u);
}

TEST(SimulatorTest, CustomConfusionIsFollowed) {
  const auto m = F4();
  SimulatorSpec spec;
  spec.samples = 1000;
  spec.p_err = 1.0;
  spec.second_classifier = false;
  spec.confusion = {{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}};
  for (const auto& r : SimulateRecords(m, {}, spec, 9)) {
    EXPECT_EQ(r.predicted_class_a.index, (r.true_class.index + 1) % 4);
  }
}

TEST(SimulatorTest, RejectsInvalidSpecs) {
  auto expect_invalid = [](SimulatorSpec spec) {
    EXPECT_THROW(ValidateSimulatorSpec(spec, 4), ValidationError);
  };
  SimulatorSpec spec;
  spec.p_err = 1.5;
  expect_invalid(spec);
  spec = {};
  spec.samples = 0;
  expect_invalid(spec);
  spec = {};
  spec.flip_probability = -0.1;
  expect_invalid(spec);
  spec = {};
  spec.correlation = 2;
  expect_invalid(spec);
  spec = {};
  spec.confusion = {{0, 1}, {1, 0}};
  expect_invalid(spec);
  spec = {};
  spec.confusion = {{0.5, 0.5, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}};
  expect_invalid(spec);
  spec = {};
  spec.confusion = {{0, 0.5, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}, {1, 0, 0, 0}};
  expect_invalid(spec);
  EXPECT_NO_THROW(ValidateSimulatorSpec(SimulatorSpec{}, 4));
}

}  // namespace
}  // namespace sedkit
