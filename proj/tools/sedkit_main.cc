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

// sedkit command-line driver. Exit status: 0 ok, 1 bad input, 2 runtime
// failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include "sedkit/concept_matrix.h"
#include "sedkit/errors.h"
#include "sedkit/prediction_log.h"
#include "sedkit/report.h"
#include "sedkit/scoring.h"
#include "sedkit/sed.h"
#include "sedkit/simulator.h"
#include "sedkit/synthetic_task.h"
#include "sedkit/toy_model.h"
#include "sedkit/workflow.h"

namespace sedkit {
namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void Output(const std::string& path, const std::string& document) {
  if (path.empty() || path == "-") {
    std::cout << document;
    std::cout.flush();
    if (!std::cout) throw RuntimeFailure("failed writing to stdout");
  } else {
    WriteDocument(path, document);
  }
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ConceptSelection ByNames(const ConceptMatrix& m,
                         const std::vector<std::string>& names) {
  ConceptSelection sel;
  for (const auto& n : names) sel.push_back(m.ConceptByName(n));
  m.CheckSelection(sel);
  return sel;
}

// --concepts wins over --k; neither means every concept.
ConceptSelection PickConcepts(const ConceptMatrix& m, const std::string& names,
                              std::optional<std::size_t> k) {
  if (!names.empty()) return ByNames(m, SplitList(names));
  if (k) {
    if (*k > m.num_concepts()) {
      throw ValidationError("--k exceeds the number of concepts");
    }
    if (*k == 0) return {};
    return OverallScores(m).TopK(*k);
  }
  return m.AllConcepts();
}

std::vector<Scheme> ParseSchemes(const std::string& text) {
  std::vector<Scheme> out;
  for (const auto& s : SplitList(text)) out.push_back(ParseScheme(s));
  if (out.empty()) throw ValidationError("no schemes given");
  return out;
}

// "a:b" or a single number.
std::pair<std::size_t, std::size_t> ParseRange(const std::string& text,
                                               std::size_t max) {
  if (text.empty()) return {1, max};
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) {
      const auto v = std::stoul(text);
      return {v, v};
    }
    return {std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("bad k range '" + text + "' (expected a:b)");
  }
}

// Workflow settings shared by `select` and `sweep`: a config file, then
// any flags given explicitly on top of it.
struct WorkflowFlags {
  std::string config_path;
  std::string matrix;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::string log;
  std::optional<std::size_t> samples;
  std::optional<double> p_err;
  std::optional<double> p_err_b;
  std::optional<double> correlation;
  std::string explanation;
  std::optional<double> flip;
  std::optional<std::size_t> epochs;
  std::string epsilons;
  std::string format = "tabular";
  std::string output;

  void Attach(CLI::App* cmd) {
    cmd->add_option("matrix", matrix, "concept matrix (CSV/TSV/JSON)");
    cmd->add_option("--config", config_path, "JSON workflow config");
    cmd->add_option("--seed", seed, "random seed (required for simulator and toy-model backends)");
    cmd->add_option("--backend", backend, "simulator | toy-model | log-file");
    cmd->add_option("--log", log, "prediction log for the log-file backend");
    cmd->add_option("--samples", samples, "simulated records per k");
    cmd->add_option("--p-err", p_err, "classifier A error probability");
    cmd->add_option("--p-err-b", p_err_b, "classifier B error probability");
    cmd->add_option("--correlation", correlation, "P(B repeats A's wrong class)");
    cmd->add_option("--explanation", explanation, "oracle | noisy");
    cmd->add_option("--flip", flip, "per-bit flip probability (noisy)");
    cmd->add_option("--epochs", epochs, "toy-model training epochs");
    cmd->add_option("--eps", epsilons, "toy-model FGSM epsilons, comma-separated");
    cmd->add_option("--format", format, "tabular | structured");
    cmd->add_option("-o,--output", output, "output file (default stdout)");
  }

  WorkflowConfig Resolve(std::string* config_echo) const {
    WorkflowConfig c;
    bool seed_in_config = false;
    if (!config_path.empty()) {
      c = LoadWorkflowConfig(config_path);
      seed_in_config = nlohmann::json::parse(ReadText(config_path), nullptr,
                                             false)
                           .contains("seed");
    }
    if (!matrix.empty()) c.matrix_path = matrix;
    if (seed) c.seed = *seed;
    if (!backend.empty()) c.backend = ParseBackendKind(backend);
    if (!log.empty()) c.log_path = log;
    if (samples) c.simulator.samples = *samples;
    if (p_err) c.simulator.p_err = *p_err;
    if (p_err_b) c.simulator.p_err_b = *p_err_b;
    if (correlation) c.simulator.correlation = *correlation;
    if (!explanation.empty()) {
      if (explanation == "oracle") {
        c.simulator.explanation = ExplanationModel::kOracle;
      } else if (explanation == "noisy") {
        c.simulator.explanation = ExplanationModel::kNoisy;
      } else {
        throw ValidationError("unknown explanation model '" + explanation + "'");
      }
    }
    if (flip) c.simulator.flip_probability = *flip;
    if (epochs) c.toy.train.epochs = *epochs;
    if (!epsilons.empty()) {
      c.toy.epsilons.clear();
      for (const auto& e : SplitList(epsilons)) {
        try {
          c.toy.epsilons.push_back(std::stod(e));
        } catch (const std::exception&) {
          throw ValidationError("bad epsilon '" + e + "'");
        }
      }
    }
    if (c.backend != BackendKind::kLogFile && !seed && !seed_in_config) {
      throw ValidationError(
          "the " + std::string(BackendName(c.backend)) +
          " backend is randomized; pass --seed (or set \"seed\" in the config)");
    }
    if (c.matrix_path.empty()) {
      throw ValidationError("no matrix given (positional argument or config)");
    }
    *config_echo = DescribeWorkflowConfig(c);
    return c;
  }
};

std::string LogText(const PredictionLog& log) {
  std::ostringstream out;
  PredictionLogWriter writer(out, log.header);
  for (const auto& r : log.records) writer.Write(r);
  return out.str();
}

int RunScore(const std::string& matrix, const std::string& format,
             const std::string& output) {
  const auto m = LoadConceptMatrix(matrix);
  const auto table = OverallScores(m);
  Output(output, ParseReportFormat(format) == ReportFormat::kStructured
                     ? FormatScoreTableJson(table)
                     : FormatScoreTableText(table));
  return 0;
}

int RunSelect(const WorkflowFlags& flags, std::optional<double> threshold,
              const std::string& scheme) {
  std::string echo;
  WorkflowConfig c = flags.Resolve(&echo);
  if (threshold) c.threshold = *threshold;
  if (!scheme.empty()) c.scheme = ParseScheme(scheme);
  ValidateWorkflowConfig(c);
  echo = DescribeWorkflowConfig(c);
  const auto result = RunSelectionWorkflow(c);
  Output(flags.output,
         EmitSelectionReport(result.matrix, result.selection,
                             ParseReportFormat(flags.format),
                             {"select", echo, c.seed}));
  return 0;
}

int RunSweep(const WorkflowFlags& flags, const std::string& schemes,
             const std::string& k_range) {
  std::string echo;
  WorkflowConfig c = flags.Resolve(&echo);
  ValidateWorkflowConfig(c);
  const auto m = LoadConceptMatrix(c.matrix_path);
  const auto [k_min, k_max] = ParseRange(k_range, m.num_concepts());
  const auto scheme_list = ParseSchemes(schemes);
  auto backend = MakeBackend(c, m);
  const auto result = RunSchemeSweep(m, *backend, scheme_list, k_min, k_max);
  Output(flags.output, EmitReport(result, ParseReportFormat(flags.format),
                                  {"sweep", echo, c.seed}));
  return 0;
}

struct SimulateFlags {
  std::string matrix;
  std::uint64_t seed = 0;
  SimulatorSpec spec;
  std::string concepts;
  std::optional<std::size_t> k;
  std::string explanation = "oracle";
  bool no_second = false;
  std::string output;
};

int RunSimulate(SimulateFlags f) {
  const auto m = LoadConceptMatrix(f.matrix);
  if (f.explanation == "noisy") {
    f.spec.explanation = ExplanationModel::kNoisy;
  } else if (f.explanation != "oracle") {
    throw ValidationError("unknown explanation model '" + f.explanation + "'");
  }
  f.spec.second_classifier = !f.no_second;
  const auto sel = PickConcepts(m, f.concepts, f.k);
  PredictionLog log;
  log.header = MakeLogHeader(m, sel);
  log.records = SimulateRecords(m, sel, f.spec, f.seed);
  Output(f.output, LogText(log));
  return 0;
}

int RunEval(const std::string& matrix, const std::string& log_path,
            const std::string& scheme, const std::string& format,
            const std::string& output) {
  const auto m = LoadConceptMatrix(matrix);
  const auto log = ReadPredictionLogFile(log_path);
  const auto sel = ResolveLogSelection(m, log.header);
  const auto report = EvaluateScheme(ParseScheme(scheme), m, sel, log.records);
  Output(output, ParseReportFormat(format) == ReportFormat::kStructured
                     ? FormatEvalReportJson(report)
                     : FormatEvalReportLine(report));
  return 0;
}

struct TrainFlags {
  std::string matrix;
  std::uint64_t seed = 0;
  std::string concepts;
  std::optional<std::size_t> k;
  std::size_t samples = 1000;
  std::vector<std::size_t> hidden = {32};
  TrainConfig train;
  SyntheticTaskSpec task;
  std::optional<std::uint64_t> task_seed;
  std::size_t stream = 0;
  std::string output;
  std::string curve;
};

int RunTrain(TrainFlags f) {
  const auto m = LoadConceptMatrix(f.matrix);
  const auto sel = PickConcepts(m, f.concepts, f.k);
  f.task.seed = f.task_seed.value_or(f.seed);
  const SyntheticTask task(m, f.task);
  f.train.seed = f.seed;
  const auto data = task.MakeDataset(sel, f.samples, f.stream);
  auto result = TrainSgd(data, ShapeForTask(task, sel.size(), f.hidden), f.train);

  nlohmann::json prov;
  prov["task"] = nlohmann::json::parse(task.Describe());
  std::vector<std::string> names;
  for (const auto a : sel) names.push_back(m.concept_name(a));
  prov["selected_concepts"] = names;
  prov["train_samples"] = f.samples;
  prov["data_stream"] = f.stream;
  result.params.provenance = prov.dump();

  if (f.output.empty()) throw ValidationError("train needs --output");
  SaveModel(f.output, result.params);
  const std::string curve = FormatTrainingCurve(result.curve);
  if (f.curve.empty()) {
    std::cout << curve;
  } else {
    WriteDocument(f.curve, curve);
  }
  return 0;
}

struct Trained {
  SEModelParams params;
  ConceptSelection selected;
  std::optional<SyntheticTask> task;
};

Trained LoadTrained(const ConceptMatrix& m, const std::string& path) {
  Trained t{LoadModel(path), {}, std::nullopt};
  const auto prov = nlohmann::json::parse(t.params.provenance, nullptr, false);
  if (prov.is_discarded() || !prov.contains("task")) {
    throw ValidationError("model '" + path + "' carries no task provenance");
  }
  t.task.emplace(TaskFromDescription(m, prov.at("task").dump()));
  std::vector<std::string> names;
  for (const auto& n : prov.value("selected_concepts", nlohmann::json::array())) {
    names.push_back(n.get<std::string>());
  }
  t.selected = ByNames(m, names);
  if (t.params.shape.num_classes != m.num_classes() ||
      t.params.shape.num_concepts != t.selected.size() ||
      t.params.shape.input_dim != t.task->input_dim()) {
    throw ValidationError("model '" + path + "' does not fit the matrix");
  }
  return t;
}

struct AttackFlags {
  std::string matrix;
  std::string model;
  std::string model_b;
  std::uint64_t seed = 0;
  double epsilon = 0.1;
  std::size_t samples = 500;
  double threshold = 0.5;
  std::string attack_loss = "full";
  std::string output;
};

int RunAttack(const AttackFlags& f) {
  const auto m = LoadConceptMatrix(f.matrix);
  const auto a = LoadTrained(m, f.model);
  std::optional<Trained> b;
  if (!f.model_b.empty()) {
    b = LoadTrained(m, f.model_b);
    if (b->params.shape.input_dim != a.params.shape.input_dim) {
      throw ValidationError("the two models expect different inputs");
    }
  }
  LossTerms terms;
  if (f.attack_loss == "full") {
    terms = LossTerms::kFull;
  } else if (f.attack_loss == "class") {
    terms = LossTerms::kClassOnly;
  } else {
    throw ValidationError("unknown attack loss '" + f.attack_loss + "'");
  }
  // Evaluation inputs come from a seed-chosen stream of the model's task,
  // far from the low streams used for training data.
  const auto batch =
      a.task->MakeDataset(a.selected, f.samples, (1ULL << 32) + f.seed);

  PredictionLog log;
  log.header = MakeLogHeader(m, a.selected);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto& sample = batch[s];
    const auto x = FgsmPerturb(a.params, sample.x, sample.y, f.epsilon, terms);
    const auto pa = Predict(a.params, x, f.threshold);
    PredictionRecord r;
    r.sample_id = "attack-" + std::to_string(s);
    r.true_class = sample.label;
    r.predicted_class_a = pa.predicted_class;
    if (!a.selected.empty()) r.predicted_explanation = pa.explanation;
    if (b) r.predicted_class_b = Predict(b->params, x, f.threshold).predicted_class;
    log.records.push_back(std::move(r));
  }
  Output(f.output, LogText(log));
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"sedkit: concept scoring and self-explanation error detection"};
  app.set_version_flag("--version", std::string(Version()));
  app.require_subcommand(1);

  // score
  std::string score_matrix, score_format = "tabular", score_output;
  auto* score = app.add_subcommand("score", "print concept scores and ranking");
  score->add_option("matrix", score_matrix, "concept matrix")->required();
  score->add_option("--format", score_format, "tabular | structured");
  score->add_option("-o,--output", score_output, "output file");

  // select
  WorkflowFlags select_flags;
  std::optional<double> select_threshold;
  std::string select_scheme;
  auto* select = app.add_subcommand("select", "grow the concept set until P_ed meets a threshold");
  select_flags.Attach(select);
  select->add_option("--threshold", select_threshold, "target P_ed in (0, 1]");
  select->add_option("--scheme", select_scheme, "SE | R1 | SE+R1");

  // sweep
  WorkflowFlags sweep_flags;
  std::string sweep_schemes = "R1,SE,SE+R1", sweep_range;
  auto* sweep = app.add_subcommand("sweep", "P_ed for every (k, scheme)");
  sweep_flags.Attach(sweep);
  sweep->add_option("--schemes", sweep_schemes, "comma-separated schemes");
  sweep->add_option("--k-range", sweep_range, "a:b (default 1:M)");

  // simulate
  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "write a simulated prediction log");
  simulate->add_option("matrix", sim.matrix, "concept matrix")->required();
  simulate->add_option("--seed", sim.seed, "random seed")->required();
  simulate->add_option("--samples", sim.spec.samples, "records");
  simulate->add_option("--p-err", sim.spec.p_err, "classifier A error probability");
  simulate->add_option("--p-err-b", sim.spec.p_err_b, "classifier B error probability");
  simulate->add_option("--correlation", sim.spec.correlation, "P(B repeats A's wrong class)");
  simulate->add_flag("--no-second", sim.no_second, "omit classifier B");
  simulate->add_option("--explanation", sim.explanation, "oracle | noisy");
  simulate->add_option("--flip", sim.spec.flip_probability, "per-bit flip probability");
  simulate->add_option("--concepts", sim.concepts, "comma-separated concept names");
  simulate->add_option("--k", sim.k, "use the top-k ranked concepts");
  simulate->add_option("-o,--output", sim.output, "output file");

  // eval
  std::string eval_matrix, eval_log, eval_scheme = "SE", eval_format = "tabular",
                                     eval_output;
  auto* eval = app.add_subcommand("eval", "evaluate one scheme on a prediction log");
  eval->add_option("matrix", eval_matrix, "concept matrix")->required();
  eval->add_option("log", eval_log, "prediction log (JSON lines)")->required();
  eval->add_option("--scheme", eval_scheme, "SE | R1 | SE+R1");
  eval->add_option("--format", eval_format, "tabular | structured");
  eval->add_option("-o,--output", eval_output, "output file");

  // train
  TrainFlags tr;
  auto* train = app.add_subcommand("train", "train a toy model on a synthetic task");
  train->add_option("matrix", tr.matrix, "concept matrix")->required();
  train->add_option("--seed", tr.seed, "training seed")->required();
  train->add_option("--task-seed", tr.task_seed, "synthetic task seed (default: --seed)");
  train->add_option("--concepts", tr.concepts, "comma-separated concept names");
  train->add_option("--k", tr.k, "top-k concepts; 0 trains a regular classifier");
  train->add_option("--samples", tr.samples, "training samples");
  train->add_option("--data-stream", tr.stream, "dataset stream (disjoint data per stream)");
  train->add_option("--hidden", tr.hidden, "hidden layer widths")->delimiter(',');
  train->add_option("--epochs", tr.train.epochs, "epochs");
  train->add_option("--lr", tr.train.learning_rate, "learning rate");
  train->add_option("--batch", tr.train.batch_size, "minibatch size");
  train->add_option("--noise", tr.task.noise, "task noise");
  train->add_option("--class-dims", tr.task.class_dims, "class-specific input dims");
  train->add_option("--dims-per-concept", tr.task.dims_per_concept, "input dims per concept");
  train->add_option("-o,--output", tr.output, "model file")->required();
  train->add_option("--curve", tr.curve, "training curve TSV (default stdout)");

  // attack
  AttackFlags at;
  auto* attack = app.add_subcommand("attack", "FGSM-attack a trained model and log predictions");
  attack->add_option("matrix", at.matrix, "concept matrix")->required();
  attack->add_option("--model", at.model, "model attacked (system A)")->required();
  attack->add_option("--model-b", at.model_b, "second model fed the same inputs (system B)");
  attack->add_option("--seed", at.seed, "evaluation batch seed")->required();
  attack->add_option("--eps", at.epsilon, "FGSM epsilon");
  attack->add_option("--samples", at.samples, "evaluation samples");
  attack->add_option("--threshold", at.threshold, "explanation sigmoid cut");
  attack->add_option("--attack-loss", at.attack_loss, "full | class");
  attack->add_option("-o,--output", at.output, "output log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (*score) return RunScore(score_matrix, score_format, score_output);
  if (*select) return RunSelect(select_flags, select_threshold, select_scheme);
  if (*sweep) return RunSweep(sweep_flags, sweep_schemes, sweep_range);
  if (*simulate) return RunSimulate(sim);
  if (*eval) return RunEval(eval_matrix, eval_log, eval_scheme, eval_format, eval_output);
  if (*train) return RunTrain(tr);
  if (*attack) return RunAttack(at);
  return kExitValidation;
}

}  // namespace
}  // namespace sedkit

int main(int argc, char** argv) {
  try {
    return sedkit::Main(argc, argv);
  } catch (const sedkit::ValidationError& e) {
    std::fprintf(stderr, "sedkit: error: %s\n", e.what());
    return sedkit::kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sedkit: failure: %s\n", e.what());
    return sedkit::kExitRuntime;
  }
}
