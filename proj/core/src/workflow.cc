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

#include "sedkit/workflow.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include "format.h"
#include "sedkit/errors.h"
#include "sedkit/random.h"

namespace sedkit {
namespace {

using Json = nlohmann::json;

constexpr const char* kMeanCondition = "mean";

// Appends the rows for one k. All schemes share the backend's records.
void EvaluateK(const ConceptMatrix& m, EvaluationBackend& backend,
               const ConceptSelection& selected,
               std::span<const Scheme> schemes, std::vector<SweepRow>& out) {
  const auto conditions = backend.Records(m, selected);
  if (conditions.empty()) {
    throw RuntimeFailure("backend produced no record sets");
  }
  for (const Scheme scheme : schemes) {
    SweepRow mean;
    mean.k = selected.size();
    mean.scheme = scheme;
    mean.condition = kMeanCondition;
    double p_sum = 0.0;
    std::size_t p_count = 0;
    for (const auto& cond : conditions) {
      const EvalReport report =
          EvaluateScheme(scheme, m, selected, cond.records);
      SweepRow row{selected.size(),     scheme,
                   cond.condition,      report.total_samples,
                   report.err_total,    report.err_detected,
                   report.false_alarms, report.p_ed};
      mean.total_samples += row.total_samples;
      mean.err_total += row.err_total;
      mean.err_detected += row.err_detected;
      mean.false_alarms += row.false_alarms;
      if (row.p_ed) {
        p_sum += *row.p_ed;
        ++p_count;
      }
      out.push_back(std::move(row));
    }
    if (conditions.size() > 1) {
      if (p_count > 0) mean.p_ed = p_sum / static_cast<double>(p_count);
      out.push_back(std::move(mean));
    }
  }
}

ConfusionRows ReadConfusion(const Json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<ConfusionRows>();
}

ExplanationModel ParseExplanationModel(const std::string& name) {
  if (name == "oracle") return ExplanationModel::kOracle;
  if (name == "noisy") return ExplanationModel::kNoisy;
  throw ValidationError("unknown explanation model '" + name +
                        "' (expected oracle or noisy)");
}

LossTerms ParseLossTerms(const std::string& name) {
  if (name == "full") return LossTerms::kFull;
  if (name == "class") return LossTerms::kClassOnly;
  throw ValidationError("unknown attack loss '" + name +
                        "' (expected full or class)");
}

Json SimulatorToJson(const SimulatorSpec& s) {
  Json j{{"samples", s.samples},
         {"p_err", s.p_err},
         {"explanation",
          s.explanation == ExplanationModel::kOracle ? "oracle" : "noisy"},
         {"flip_probability", s.flip_probability},
         {"second_classifier", s.second_classifier},
         {"p_err_b", s.p_err_b},
         {"correlation", s.correlation}};
  if (!s.confusion.empty()) j["confusion"] = s.confusion;
  if (!s.confusion_b.empty()) j["confusion_b"] = s.confusion_b;
  return j;
}

Json ToyToJson(const ToyBackendSpec& t) {
  return Json{{"hidden_dims", t.hidden_dims},
              {"learning_rate", t.train.learning_rate},
              {"epochs", t.train.epochs},
              {"batch_size", t.train.batch_size},
              {"train_samples", t.train_samples},
              {"split", t.split},
              {"eval_samples", t.eval_samples},
              {"epsilons", t.epsilons},
              {"threshold", t.threshold},
              {"attack_loss",
               t.attack_terms == LossTerms::kFull ? "full" : "class"},
              {"noise", t.task.noise},
              {"class_dims", t.task.class_dims},
              {"dims_per_concept", t.task.dims_per_concept},
              {"concept_offset", t.task.concept_offset}};
}

}  // namespace

// --- SimulatorBackend -------------------------------------------------------

SimulatorBackend::SimulatorBackend(SimulatorSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed) {
  if (!spec_.second_classifier) {
    throw ValidationError(
        "scheme comparisons need the simulated second classifier");
  }
}

std::vector<ConditionRecords> SimulatorBackend::Records(
    const ConceptMatrix& m, std::span<const ConceptId> selected) {
  return {{"simulated", SimulateRecords(m, selected, spec_, seed_)}};
}

std::string SimulatorBackend::Describe() const {
  Json j = SimulatorToJson(spec_);
  j["backend"] = "simulator";
  j["seed"] = seed_;
  return j.dump();
}

// --- ToyModelBackend --------------------------------------------------------

ToyModelBackend::ToyModelBackend(const ConceptMatrix& task_matrix,
                                 ToyBackendSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)),
      seed_(seed),
      task_(task_matrix, [&] {
        SyntheticTaskSpec t = spec_.task;
        t.seed = MixSeed(seed ^ 0x7461736bULL);
        return t;
      }()) {
  if (!(spec_.split > 0.0 && spec_.split < 1.0)) {
    throw ValidationError("train split must lie in (0, 1)");
  }
  if (spec_.train_samples < 2 || spec_.eval_samples == 0) {
    throw ValidationError("toy backend needs train and eval samples");
  }
  if (spec_.epsilons.empty()) {
    throw ValidationError("toy backend needs at least one epsilon");
  }
  for (const double eps : spec_.epsilons) {
    if (!(eps >= 0.0)) throw ValidationError("epsilon must be >= 0");
  }
  if (!(spec_.threshold > 0.0 && spec_.threshold < 1.0)) {
    throw ValidationError("explanation threshold must lie in (0, 1)");
  }
  const auto cut = static_cast<std::size_t>(
      std::llround(spec_.split * static_cast<double>(spec_.train_samples)));
  if (cut == 0 || cut >= spec_.train_samples) {
    throw ValidationError("train split leaves one model without data");
  }
}

std::vector<ConditionRecords> ToyModelBackend::Records(
    const ConceptMatrix& m, std::span<const ConceptId> selected) {
  if (!(m == task_.matrix())) {
    throw ValidationError("toy backend was built for a different matrix");
  }
  const std::size_t cut = static_cast<std::size_t>(
      std::llround(spec_.split * static_cast<double>(spec_.train_samples)));

  if (!regular_) {
    const auto pool = task_.MakeDataset({}, spec_.train_samples, 1);
    const std::span<const LabeledSample> part(pool.begin() + cut, pool.end());
    TrainConfig config = spec_.train;
    config.seed = MixSeed(seed_ + 2);
    regular_ = TrainSgd(part, ShapeForTask(task_, 0, spec_.hidden_dims), config)
                   .params;
  }

  const auto pool = task_.MakeDataset(selected, spec_.train_samples, 1);
  const std::span<const LabeledSample> part(pool.begin(), pool.begin() + cut);
  TrainConfig config = spec_.train;
  config.seed = MixSeed(seed_ + 1);
  const SEModelParams se =
      TrainSgd(part, ShapeForTask(task_, selected.size(), spec_.hidden_dims),
               config)
          .params;

  const auto batch = task_.MakeDataset(selected, spec_.eval_samples, 2);
  std::vector<ConditionRecords> out;
  for (const double eps : spec_.epsilons) {
    ConditionRecords cond;
    cond.condition = "eps=" + internal::FormatReal(eps);
    cond.records.reserve(batch.size());
    for (std::size_t s = 0; s < batch.size(); ++s) {
      const auto& sample = batch[s];
      const auto x = FgsmPerturb(se, sample.x, sample.y, eps,
                                 spec_.attack_terms);
      const Prediction a = Predict(se, x, spec_.threshold);
      const Prediction b = Predict(*regular_, x, spec_.threshold);
      PredictionRecord r;
      r.sample_id = "toy-" + std::to_string(s);
      r.true_class = sample.label;
      r.predicted_class_a = a.predicted_class;
      r.predicted_explanation = a.explanation;
      r.predicted_class_b = b.predicted_class;
      cond.records.push_back(std::move(r));
    }
    out.push_back(std::move(cond));
  }
  return out;
}

std::string ToyModelBackend::Describe() const {
  Json j = ToyToJson(spec_);
  j["backend"] = "toy-model";
  j["seed"] = seed_;
  return j.dump();
}

// --- LogFileBackend ---------------------------------------------------------

LogFileBackend::LogFileBackend(const ConceptMatrix& m, PredictionLog log,
                               std::string source)
    : log_(std::move(log)),
      logged_(ResolveLogSelection(m, log_.header)),
      source_(std::move(source)) {
  if (log_.records.empty()) {
    throw ValidationError("prediction log has no records");
  }
}

std::vector<ConditionRecords> LogFileBackend::Records(
    const ConceptMatrix& m, std::span<const ConceptId> selected) {
  std::vector<std::size_t> columns;
  for (const ConceptId a : selected) {
    const auto it = std::find(logged_.begin(), logged_.end(), a);
    if (it == logged_.end()) {
      throw ValidationError("concept '" + m.concept_name(a) +
                            "' is not recorded in the prediction log");
    }
    columns.push_back(static_cast<std::size_t>(it - logged_.begin()));
  }
  ConditionRecords cond{"log", {}};
  cond.records.reserve(log_.records.size());
  for (const auto& record : log_.records) {
    PredictionRecord r = record;
    if (record.predicted_explanation) {
      ExplanationVector e;
      for (const std::size_t c : columns) {
        e.bits.push_back(record.predicted_explanation->bits[c]);
      }
      r.predicted_explanation = std::move(e);
    }
    cond.records.push_back(std::move(r));
  }
  return {std::move(cond)};
}

std::string LogFileBackend::Describe() const {
  return Json{{"backend", "log-file"},
              {"log", source_},
              {"records", log_.records.size()}}
      .dump();
}

// --- Sweep and selection ----------------------------------------------------

const SweepRow* SweepResult::Summary(std::size_t k, Scheme scheme) const {
  const SweepRow* single = nullptr;
  std::size_t matches = 0;
  for (const auto& row : rows) {
    if (row.k != k || row.scheme != scheme) continue;
    if (row.condition == kMeanCondition) return &row;
    single = &row;
    ++matches;
  }
  return matches == 1 ? single : nullptr;
}

SweepResult RunSchemeSweep(const ConceptMatrix& m, EvaluationBackend& backend,
                           std::span<const Scheme> schemes, std::size_t k_min,
                           std::size_t k_max) {
  if (schemes.empty()) throw ValidationError("sweep needs at least one scheme");
  if (k_min < 1 || k_min > k_max || k_max > m.num_concepts()) {
    throw ValidationError("k range [" + std::to_string(k_min) + ", " +
                          std::to_string(k_max) + "] is not within [1, " +
                          std::to_string(m.num_concepts()) + "]");
  }
  const ScoreTable scores = OverallScores(m);
  SweepResult result;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    EvaluateK(m, backend, scores.TopK(k), schemes, result.rows);
  }
  return result;
}

SelectionResult RunSelection(const ConceptMatrix& m,
                             EvaluationBackend& backend,
                             const SelectionOptions& options) {
  if (!(options.threshold > 0.0 && options.threshold <= 1.0)) {
    throw ValidationError("P_ed threshold must lie in (0, 1]");
  }
  const ScoreTable scores = OverallScores(m);
  const Scheme schemes[] = {options.scheme};
  SelectionResult result;
  for (std::size_t k = 1; k <= m.num_concepts(); ++k) {
    result.selected = scores.TopK(k);
    EvaluateK(m, backend, result.selected, schemes, result.trace.rows);
    const SweepRow* summary = result.trace.Summary(k, options.scheme);
    if (summary && summary->p_ed && *summary->p_ed >= options.threshold) {
      result.threshold_reached = true;
      break;
    }
  }
  return result;
}

// --- Config -----------------------------------------------------------------

std::string_view BackendName(BackendKind kind) {
  switch (kind) {
    case BackendKind::kSimulator:
      return "simulator";
    case BackendKind::kToyModel:
      return "toy-model";
    case BackendKind::kLogFile:
      return "log-file";
  }
  return "?";
}

BackendKind ParseBackendKind(std::string_view name) {
  if (name == "simulator") return BackendKind::kSimulator;
  if (name == "toy-model") return BackendKind::kToyModel;
  if (name == "log-file") return BackendKind::kLogFile;
  throw ValidationError("unknown backend '" + std::string(name) +
                        "' (expected simulator, toy-model or log-file)");
}

void ValidateWorkflowConfig(const WorkflowConfig& config) {
  if (!(config.threshold > 0.0 && config.threshold <= 1.0)) {
    throw ValidationError("P_ed threshold must lie in (0, 1]");
  }
  if (config.matrix_path.empty()) {
    throw ValidationError("config has no matrix path");
  }
  if (config.backend == BackendKind::kLogFile && config.log_path.empty()) {
    throw ValidationError("log-file backend needs a log path");
  }
}

WorkflowConfig ParseWorkflowConfig(std::string_view json_text) {
  WorkflowConfig c;
  try {
    const Json j = Json::parse(json_text);
    if (j.contains("matrix")) c.matrix_path = j.at("matrix").get<std::string>();
    c.threshold = j.value("threshold", c.threshold);
    if (j.contains("scheme")) {
      c.scheme = ParseScheme(j.at("scheme").get<std::string>());
    }
    if (j.contains("backend")) {
      c.backend = ParseBackendKind(j.at("backend").get<std::string>());
    }
    c.seed = j.value("seed", c.seed);
    if (j.contains("log")) c.log_path = j.at("log").get<std::string>();
    if (j.contains("simulator")) {
      const auto& s = j.at("simulator");
      auto& out = c.simulator;
      out.samples = s.value("samples", out.samples);
      out.p_err = s.value("p_err", out.p_err);
      out.confusion = ReadConfusion(s, "confusion");
      out.explanation =
          ParseExplanationModel(s.value("explanation", std::string("oracle")));
      out.flip_probability = s.value("flip_probability", out.flip_probability);
      out.second_classifier =
          s.value("second_classifier", out.second_classifier);
      out.p_err_b = s.value("p_err_b", out.p_err_b);
      out.confusion_b = ReadConfusion(s, "confusion_b");
      out.correlation = s.value("correlation", out.correlation);
    }
    if (j.contains("toy_model")) {
      const auto& t = j.at("toy_model");
      auto& out = c.toy;
      out.hidden_dims = t.value("hidden_dims", out.hidden_dims);
      out.train.learning_rate =
          t.value("learning_rate", out.train.learning_rate);
      out.train.epochs = t.value("epochs", out.train.epochs);
      out.train.batch_size = t.value("batch_size", out.train.batch_size);
      out.train_samples = t.value("train_samples", out.train_samples);
      out.split = t.value("split", out.split);
      out.eval_samples = t.value("eval_samples", out.eval_samples);
      out.epsilons = t.value("epsilons", out.epsilons);
      out.threshold = t.value("threshold", out.threshold);
      out.attack_terms =
          ParseLossTerms(t.value("attack_loss", std::string("full")));
      out.task.noise = t.value("noise", out.task.noise);
      out.task.class_dims = t.value("class_dims", out.task.class_dims);
      out.task.dims_per_concept =
          t.value("dims_per_concept", out.task.dims_per_concept);
      out.task.concept_offset =
          t.value("concept_offset", out.task.concept_offset);
    }
  } catch (const Json::exception& e) {
    throw ParseError(std::string("workflow config: ") + e.what());
  }
  return c;
}

WorkflowConfig LoadWorkflowConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  WorkflowConfig c = ParseWorkflowConfig(buffer.str());
  const auto base = path.parent_path();
  if (!c.matrix_path.empty() && c.matrix_path.is_relative()) {
    c.matrix_path = base / c.matrix_path;
  }
  if (!c.log_path.empty() && c.log_path.is_relative()) {
    c.log_path = base / c.log_path;
  }
  return c;
}

std::string DescribeWorkflowConfig(const WorkflowConfig& config) {
  Json j{{"matrix", config.matrix_path.string()},
         {"threshold", config.threshold},
         {"scheme", SchemeName(config.scheme)},
         {"backend", BackendName(config.backend)},
         {"seed", config.seed}};
  switch (config.backend) {
    case BackendKind::kSimulator:
      j["simulator"] = SimulatorToJson(config.simulator);
      break;
    case BackendKind::kToyModel:
      j["toy_model"] = ToyToJson(config.toy);
      break;
    case BackendKind::kLogFile:
      j["log"] = config.log_path.string();
      break;
  }
  return j.dump();
}

std::unique_ptr<EvaluationBackend> MakeBackend(const WorkflowConfig& config,
                                               const ConceptMatrix& m) {
  switch (config.backend) {
    case BackendKind::kSimulator:
      return std::make_unique<SimulatorBackend>(config.simulator, config.seed);
    case BackendKind::kToyModel:
      return std::make_unique<ToyModelBackend>(m, config.toy, config.seed);
    case BackendKind::kLogFile:
      return std::make_unique<LogFileBackend>(
          m, ReadPredictionLogFile(config.log_path), config.log_path.string());
  }
  throw ValidationError("unknown backend");
}

WorkflowResult RunSelectionWorkflow(const WorkflowConfig& config) {
  ValidateWorkflowConfig(config);
  ConceptMatrix matrix = LoadConceptMatrix(config.matrix_path);
  ScoreTable scores = OverallScores(matrix);
  auto backend = MakeBackend(config, matrix);
  SelectionResult selection =
      RunSelection(matrix, *backend, {config.threshold, config.scheme});
  return {std::move(matrix), std::move(scores), std::move(selection)};
}

}  // namespace sedkit
