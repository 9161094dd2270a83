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

#include <algorithm>
#include <cctype>

#include "format.h"
#include "sedkit/errors.h"

namespace sedkit {

std::string_view SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kR1:
      return "R1";
    case Scheme::kSE:
      return "SE";
    case Scheme::kSEPlusR1:
      return "SE+R1";
  }
  return "?";
}

Scheme ParseScheme(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return std::toupper(ch); });
  if (upper == "R1") return Scheme::kR1;
  if (upper == "SE") return Scheme::kSE;
  if (upper == "SE+R1" || upper == "SE_R1") return Scheme::kSEPlusR1;
  throw ValidationError("unknown scheme '" + std::string(name) +
                        "' (expected R1, SE or SE+R1)");
}

bool SedFlag(const ConceptMatrix& m, std::span<const ConceptId> selected,
             ClassId predicted_class,
             const ExplanationVector& predicted_explanation) {
  if (predicted_explanation.size() != selected.size()) {
    throw ValidationError("predicted explanation has " +
                          std::to_string(predicted_explanation.size()) +
                          " bits but " + std::to_string(selected.size()) +
                          " concepts are selected");
  }
  return predicted_explanation != ExplanationOf(m, predicted_class, selected);
}

SchemeEvaluator::SchemeEvaluator(Scheme scheme, const ConceptMatrix& m,
                                 ConceptSelection selected)
    : scheme_(scheme), matrix_(&m), selected_(std::move(selected)) {
  m.CheckSelection(selected_);
  class_explanations_.reserve(m.num_classes());
  for (std::size_t j = 0; j < m.num_classes(); ++j) {
    class_explanations_.push_back(ExplanationOf(m, ClassId{j}, selected_));
  }
}

DetectionOutcome SchemeEvaluator::Add(const PredictionRecord& record) {
  matrix_->CheckClass(record.true_class);
  matrix_->CheckClass(record.predicted_class_a);
  const bool needs_explanation = scheme_ != Scheme::kR1;
  const bool needs_second = scheme_ != Scheme::kSE;
  if (needs_explanation && !record.predicted_explanation) {
    throw ValidationError("record '" + record.sample_id +
                          "' has no predicted explanation, required by " +
                          std::string(SchemeName(scheme_)));
  }
  if (needs_second && !record.predicted_class_b) {
    throw ValidationError("record '" + record.sample_id +
                          "' has no second-classifier prediction, required "
                          "by " +
                          std::string(SchemeName(scheme_)));
  }

  bool explanation_mismatch = false;
  if (needs_explanation) {
    const auto& explanation = *record.predicted_explanation;
    if (explanation.size() != selected_.size()) {
      throw ValidationError("record '" + record.sample_id + "' has " +
                            std::to_string(explanation.size()) +
                            " explanation bits, expected " +
                            std::to_string(selected_.size()));
    }
    explanation_mismatch =
        explanation != class_explanations_[record.predicted_class_a.index];
  }
  bool class_mismatch = false;
  if (needs_second) {
    matrix_->CheckClass(*record.predicted_class_b);
    class_mismatch = record.predicted_class_a != *record.predicted_class_b;
  }

  DetectionOutcome outcome;
  outcome.is_error = record.true_class != record.predicted_class_a;
  switch (scheme_) {
    case Scheme::kR1:
      outcome.flagged = class_mismatch;
      break;
    case Scheme::kSE:
      outcome.flagged = explanation_mismatch;
      break;
    case Scheme::kSEPlusR1:
      outcome.flagged = explanation_mismatch || class_mismatch;
      break;
  }
  ++total_;
  if (outcome.is_error) {
    ++err_total_;
    if (outcome.flagged) ++err_detected_;
  } else if (outcome.flagged) {
    ++false_alarms_;
  }
  return outcome;
}

void SchemeEvaluator::Merge(const SchemeEvaluator& other) {
  if (other.scheme_ != scheme_ || other.selected_ != selected_ ||
      !(*other.matrix_ == *matrix_)) {
    throw ValidationError("cannot merge evaluators of different setups");
  }
  total_ += other.total_;
  err_total_ += other.err_total_;
  err_detected_ += other.err_detected_;
  false_alarms_ += other.false_alarms_;
}

EvalReport SchemeEvaluator::Report() const {
  if (total_ == 0) throw ValidationError("no prediction records to evaluate");
  EvalReport report;
  report.scheme = scheme_;
  report.total_samples = total_;
  report.err_total = err_total_;
  report.err_detected = err_detected_;
  report.false_alarms = false_alarms_;
  if (err_total_ > 0) {
    report.p_ed = static_cast<double>(err_detected_) /
                  static_cast<double>(err_total_);
  }
  return report;
}

EvalReport EvaluateScheme(Scheme scheme, const ConceptMatrix& m,
                          std::span<const ConceptId> selected,
                          std::span<const PredictionRecord> records) {
  SchemeEvaluator evaluator(scheme, m,
                            ConceptSelection(selected.begin(), selected.end()));
  for (const auto& record : records) evaluator.Add(record);
  return evaluator.Report();
}

double MaxPedOracle(const ConceptMatrix& m,
                    std::span<const ConceptId> selected) {
  m.CheckSelection(selected);
  const std::size_t n = m.num_classes();
  std::vector<ExplanationVector> explanations;
  explanations.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    explanations.push_back(ExplanationOf(m, ClassId{j}, selected));
  }
  std::size_t distinguishable = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j != k && explanations[j] != explanations[k]) ++distinguishable;
    }
  }
  return static_cast<double>(distinguishable) /
         static_cast<double>(n * (n - 1));
}

std::string FormatEvalReportJson(const EvalReport& report) {
  std::string out = "{\"scheme\":\"" + std::string(SchemeName(report.scheme)) +
                    "\",\"total_samples\":" +
                    std::to_string(report.total_samples) +
                    ",\"err_total\":" + std::to_string(report.err_total) +
                    ",\"err_detected\":" + std::to_string(report.err_detected) +
                    ",\"false_alarms\":" + std::to_string(report.false_alarms) +
                    ",\"p_ed\":" +
                    (report.p_ed ? internal::FormatReal(*report.p_ed)
                                 : std::string("null")) +
                    "}\n";
  return out;
}

std::string FormatEvalReportLine(const EvalReport& report) {
  return "scheme=" + std::string(SchemeName(report.scheme)) +
         "\ttotal_samples=" + std::to_string(report.total_samples) +
         "\terr_total=" + std::to_string(report.err_total) +
         "\terr_detected=" + std::to_string(report.err_detected) +
         "\tp_ed=" +
         (report.p_ed ? internal::FormatReal(*report.p_ed)
                      : std::string("undefined")) +
         "\tfalse_alarms=" + std::to_string(report.false_alarms) + "\n";
}

}  // namespace sedkit
