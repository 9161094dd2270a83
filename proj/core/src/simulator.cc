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

#include <cmath>
#include <string>

#include "sedkit/errors.h"
#include "sedkit/random.h"

namespace sedkit {
namespace {

void CheckProbability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0, 1]");
  }
}

void CheckConfusion(const ConfusionRows& rows, std::size_t n,
                    const char* what) {
  if (rows.empty()) return;
  if (rows.size() != n) {
    throw ValidationError(std::string(what) + " has " +
                          std::to_string(rows.size()) + " rows for " +
                          std::to_string(n) + " classes");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (rows[j].size() != n) {
      throw ValidationError(std::string(what) + " row " + std::to_string(j) +
                            " has the wrong length");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double p = rows[j][k];
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw ValidationError(std::string(what) + " entry (" +
                              std::to_string(j) + ", " + std::to_string(k) +
                              ") is negative or not finite");
      }
      sum += p;
    }
    if (rows[j][j] != 0.0) {
      throw ValidationError(std::string(what) + " row " + std::to_string(j) +
                            " puts mass on the true class");
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ValidationError(std::string(what) + " row " + std::to_string(j) +
                            " sums to " + std::to_string(sum) +
                            " instead of 1");
    }
  }
}

std::size_t WrongClass(std::size_t truth, std::size_t n,
                       const ConfusionRows& rows, Rng& rng) {
  if (rows.empty()) {
    const std::size_t other = rng.UniformIndex(n - 1);
    return other < truth ? other : other + 1;
  }
  const double u = rng.Uniform();
  double cumulative = 0.0;
  std::size_t last = truth;
  for (std::size_t k = 0; k < n; ++k) {
    if (rows[truth][k] <= 0.0) continue;
    cumulative += rows[truth][k];
    last = k;
    if (u < cumulative) return k;
  }
  return last;  // rounding slack at the top of the row
}

}  // namespace

void ValidateSimulatorSpec(const SimulatorSpec& spec, std::size_t num_classes) {
  if (spec.samples == 0) throw ValidationError("simulator needs samples > 0");
  CheckProbability(spec.p_err, "p_err");
  CheckProbability(spec.p_err_b, "p_err_b");
  CheckProbability(spec.flip_probability, "flip probability");
  CheckProbability(spec.correlation, "correlation");
  CheckConfusion(spec.confusion, num_classes, "confusion matrix");
  CheckConfusion(spec.confusion_b, num_classes, "second confusion matrix");
}

std::vector<PredictionRecord> SimulateRecords(
    const ConceptMatrix& m, std::span<const ConceptId> selected,
    const SimulatorSpec& spec, std::uint64_t seed) {
  m.CheckSelection(selected);
  const std::size_t n = m.num_classes();
  ValidateSimulatorSpec(spec, n);

  Rng classes = Rng::Stream(seed, 1);
  Rng noise = Rng::Stream(seed, 2);
  std::vector<ExplanationVector> explanations;
  for (std::size_t j = 0; j < n; ++j) {
    explanations.push_back(ExplanationOf(m, ClassId{j}, selected));
  }
  std::vector<std::uint8_t> flips(m.num_concepts());

  std::vector<PredictionRecord> records;
  records.reserve(spec.samples);
  for (std::size_t s = 0; s < spec.samples; ++s) {
    PredictionRecord r;
    r.sample_id = "sim-" + std::to_string(s);
    const std::size_t truth = classes.UniformIndex(n);
    r.true_class = ClassId{truth};

    // Fixed draw count per record keeps streams aligned across specs.
    const double u_a = classes.Uniform();
    const std::size_t wrong_a = WrongClass(truth, n, spec.confusion, classes);
    const bool a_wrong = u_a < spec.p_err;
    r.predicted_class_a = ClassId{a_wrong ? wrong_a : truth};

    if (spec.second_classifier) {
      const double u_corr = classes.Uniform();
      const double u_b = classes.Uniform();
      const std::size_t wrong_b =
          WrongClass(truth, n, spec.confusion_b, classes);
      std::size_t b = u_b < spec.p_err_b ? wrong_b : truth;
      if (a_wrong && u_corr < spec.correlation) b = wrong_a;
      r.predicted_class_b = ClassId{b};
    }

    ExplanationVector e = explanations[truth];
    if (spec.explanation == ExplanationModel::kNoisy) {
      for (auto& f : flips) f = noise.Bernoulli(spec.flip_probability);
      for (std::size_t i = 0; i < selected.size(); ++i) {
        e.bits[i] ^= flips[selected[i].index];
      }
    }
    r.predicted_explanation = std::move(e);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace sedkit
