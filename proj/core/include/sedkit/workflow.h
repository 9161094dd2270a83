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

#ifndef SEDKIT_WORKFLOW_H_
#define SEDKIT_WORKFLOW_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sedkit/concept_matrix.h"
#include "sedkit/prediction_log.h"
#include "sedkit/scoring.h"
#include "sedkit/sed.h"
#include "sedkit/simulator.h"
#include "sedkit/synthetic_task.h"
#include "sedkit/toy_model.h"

namespace sedkit {

// Records evaluated under one condition (e.g. one FGSM epsilon).
struct ConditionRecords {
  std::string condition;
  std::vector<PredictionRecord> records;
};

// Produces prediction records for a given concept selection. Every
// condition's records must carry the explanation and both class fields so
// all schemes can be compared on the same stream.
class EvaluationBackend {
 public:
  virtual ~EvaluationBackend() = default;
  virtual std::vector<ConditionRecords> Records(
      const ConceptMatrix& m, std::span<const ConceptId> selected) = 0;
  // JSON object echoed into reports.
  virtual std::string Describe() const = 0;
};

class SimulatorBackend : public EvaluationBackend {
 public:
  SimulatorBackend(SimulatorSpec spec, std::uint64_t seed);
  std::vector<ConditionRecords> Records(
      const ConceptMatrix& m, std::span<const ConceptId> selected) override;
  std::string Describe() const override;

 private:
  SimulatorSpec spec_;
  std::uint64_t seed_;
};

struct ToyBackendSpec {
  SyntheticTaskSpec task;
  std::vector<std::size_t> hidden_dims = {32};
  TrainConfig train;
  std::size_t train_samples = 2000;
  // Fraction of the training pool given to the self-explainable model; the
  // regular model trains on the disjoint remainder.
  double split = 0.5;
  std::size_t eval_samples = 500;
  std::vector<double> epsilons = {0.05, 0.1, 0.15};
  double threshold = 0.5;
  LossTerms attack_terms = LossTerms::kFull;
};

// Trains a self-explainable model on the top-k concepts (system A) and a
// regular model on a disjoint split (system B), then attacks a fixed
// evaluation batch with FGSM against system A at each epsilon and feeds
// the same perturbed inputs to both systems. One condition per epsilon.
class ToyModelBackend : public EvaluationBackend {
 public:
  // `task_matrix` defines the synthetic task; usually the same matrix the
  // sweep ranks.
  ToyModelBackend(const ConceptMatrix& task_matrix, ToyBackendSpec spec,
                  std::uint64_t seed);
  std::vector<ConditionRecords> Records(
      const ConceptMatrix& m, std::span<const ConceptId> selected) override;
  std::string Describe() const override;

  const SyntheticTask& task() const { return task_; }

 private:
  ToyBackendSpec spec_;
  std::uint64_t seed_;
  SyntheticTask task_;
  std::optional<SEModelParams> regular_;
};

// Replays a prediction log whose header covers every concept a selection
// may request; explanation bits are projected onto the selection.
class LogFileBackend : public EvaluationBackend {
 public:
  LogFileBackend(const ConceptMatrix& m, PredictionLog log,
                 std::string source = "");
  std::vector<ConditionRecords> Records(
      const ConceptMatrix& m, std::span<const ConceptId> selected) override;
  std::string Describe() const override;

 private:
  PredictionLog log_;
  ConceptSelection logged_;
  std::string source_;
};

struct SweepRow {
  std::size_t k = 0;
  Scheme scheme = Scheme::kSE;
  // Backend condition, or "mean" for the equal-weight average over
  // conditions (reported only when there are several).
  std::string condition;
  std::size_t total_samples = 0;
  std::size_t err_total = 0;
  std::size_t err_detected = 0;
  std::size_t false_alarms = 0;
  std::optional<double> p_ed;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  // The row summarizing (k, scheme): "mean" when present, else the single
  // condition row.
  const SweepRow* Summary(std::size_t k, Scheme scheme) const;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Evaluates every (k, scheme) on one shared record set per k, using the
// top-k concepts of OverallScores(m).
SweepResult RunSchemeSweep(const ConceptMatrix& m, EvaluationBackend& backend,
                           std::span<const Scheme> schemes, std::size_t k_min,
                           std::size_t k_max);

struct SelectionOptions {
  // Stop once P_ed >= threshold; must lie in (0, 1].
  double threshold = 0.9;
  Scheme scheme = Scheme::kSE;
};

struct SelectionResult {
  ConceptSelection selected;
  SweepResult trace;
  bool threshold_reached = false;
};

// Adds concepts in overall-score order, evaluating P_ed after each
// addition, until the threshold is met or every concept is used.
SelectionResult RunSelection(const ConceptMatrix& m,
                             EvaluationBackend& backend,
                             const SelectionOptions& options);

enum class BackendKind { kSimulator, kToyModel, kLogFile };

// Everything a run needs; loadable from a JSON config file.
struct WorkflowConfig {
  std::filesystem::path matrix_path;
  double threshold = 0.9;
  Scheme scheme = Scheme::kSE;
  BackendKind backend = BackendKind::kSimulator;
  SimulatorSpec simulator;
  ToyBackendSpec toy;
  std::filesystem::path log_path;
  std::uint64_t seed = 0;
};

void ValidateWorkflowConfig(const WorkflowConfig& config);
WorkflowConfig ParseWorkflowConfig(std::string_view json_text);
WorkflowConfig LoadWorkflowConfig(const std::filesystem::path& path);
// JSON echo of the config (stable key order).
std::string DescribeWorkflowConfig(const WorkflowConfig& config);

std::unique_ptr<EvaluationBackend> MakeBackend(const WorkflowConfig& config,
                                               const ConceptMatrix& m);

struct WorkflowResult {
  ConceptMatrix matrix;
  ScoreTable scores;
  SelectionResult selection;
};

// Loads the matrix, builds the backend and runs RunSelection.
WorkflowResult RunSelectionWorkflow(const WorkflowConfig& config);

std::string_view BackendName(BackendKind kind);
BackendKind ParseBackendKind(std::string_view name);

}  // namespace sedkit

#endif  // SEDKIT_WORKFLOW_H_
