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

#ifndef SEDKIT_SED_H_
#define SEDKIT_SED_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "sedkit/concept_matrix.h"

namespace sedkit {

// One sample's ground truth and the outputs of up to two classifiers.
// `predicted_explanation` is set for self-explainable system A;
// `predicted_class_b` is set when a second (regular) classifier ran.
struct PredictionRecord {
  std::string sample_id;
  ClassId true_class;
  ClassId predicted_class_a;
  std::optional<ExplanationVector> predicted_explanation;
  std::optional<ClassId> predicted_class_b;

  friend bool operator==(const PredictionRecord&,
                         const PredictionRecord&) = default;
};

// R1: disagreement of two regular classifiers.
// SE: explanation mismatch of one self-explainable classifier.
// SE+R1: either signal.
enum class Scheme { kR1, kSE, kSEPlusR1 };

std::string_view SchemeName(Scheme scheme);
// Accepts "R1", "SE", "SE+R1" (case-insensitive).
Scheme ParseScheme(std::string_view name);

struct DetectionOutcome {
  bool is_error = false;
  bool flagged = false;
};

struct EvalReport {
  Scheme scheme = Scheme::kSE;
  std::size_t total_samples = 0;
  std::size_t err_total = 0;
  std::size_t err_detected = 0;
  std::size_t false_alarms = 0;
  // Absent when err_total == 0.
  std::optional<double> p_ed;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// True iff `predicted_explanation` differs from E(predicted_class)
// restricted to `selected`. Throws on length mismatch.
bool SedFlag(const ConceptMatrix& m, std::span<const ConceptId> selected,
             ClassId predicted_class,
             const ExplanationVector& predicted_explanation);

// Single-pass scheme evaluation with constant state. Evaluators over
// disjoint shards can be merged in any order.
class SchemeEvaluator {
 public:
  SchemeEvaluator(Scheme scheme, const ConceptMatrix& m,
                  ConceptSelection selected);

  // Validates the record against the scheme's required fields and
  // accumulates it.
  DetectionOutcome Add(const PredictionRecord& record);
  void Merge(const SchemeEvaluator& other);
  // Throws ValidationError if no record was added.
  EvalReport Report() const;

  Scheme scheme() const { return scheme_; }

 private:
  Scheme scheme_;
  const ConceptMatrix* matrix_;
  ConceptSelection selected_;
  // E(C_j) restricted to the selection, for every class.
  std::vector<ExplanationVector> class_explanations_;
  std::size_t total_ = 0;
  std::size_t err_total_ = 0;
  std::size_t err_detected_ = 0;
  std::size_t false_alarms_ = 0;
};

EvalReport EvaluateScheme(Scheme scheme, const ConceptMatrix& m,
                          std::span<const ConceptId> selected,
                          std::span<const PredictionRecord> records);

// Fraction of the N(N-1) ordered class pairs whose explanations differ on
// `selected`: the P_ed an SE detector reaches when every predicted
// explanation equals the true class's explanation and errors are uniform
// over pairs.
double MaxPedOracle(const ConceptMatrix& m,
                    std::span<const ConceptId> selected);

// JSON object and single-line tab-separated summary of a report.
std::string FormatEvalReportJson(const EvalReport& report);
std::string FormatEvalReportLine(const EvalReport& report);

}  // namespace sedkit

#endif  // SEDKIT_SED_H_
