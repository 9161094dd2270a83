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

#ifndef SEDKIT_SIMULATOR_H_
#define SEDKIT_SIMULATOR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sedkit/concept_matrix.h"
#include "sedkit/sed.h"

namespace sedkit {

// N x N row-stochastic matrix of wrong-class probabilities: row j is the
// distribution of the predicted class given truth j and an error. Diagonal
// entries must be zero. Empty means uniform over the N - 1 other classes.
using ConfusionRows = std::vector<std::vector<double>>;

enum class ExplanationModel {
  kOracle,  // predicted explanation = E(true class)
  kNoisy,   // E(true class) with each bit flipped independently
};

struct SimulatorSpec {
  std::size_t samples = 10000;
  // Probability that classifier A mispredicts.
  double p_err = 0.1;
  ConfusionRows confusion;
  ExplanationModel explanation = ExplanationModel::kOracle;
  double flip_probability = 0.0;  // per-bit, kNoisy only

  bool second_classifier = true;
  double p_err_b = 0.1;
  ConfusionRows confusion_b;
  // When A is wrong, probability that B repeats A's exact wrong class.
  // Otherwise B errs independently with p_err_b.
  double correlation = 0.0;

  friend bool operator==(const SimulatorSpec&, const SimulatorSpec&) = default;
};

void ValidateSimulatorSpec(const SimulatorSpec& spec, std::size_t num_classes);

// Draws `spec.samples` records. True classes are uniform; class predictions
// depend only on (seed, spec) and not on `selected`, so streams for nested
// selections share every class draw. Noise bits are drawn per matrix
// concept, so explanation bits for a concept are also shared.
std::vector<PredictionRecord> SimulateRecords(
    const ConceptMatrix& m, std::span<const ConceptId> selected,
    const SimulatorSpec& spec, std::uint64_t seed);

}  // namespace sedkit

#endif  // SEDKIT_SIMULATOR_H_
