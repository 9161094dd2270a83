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

#ifndef SEDKIT_SYNTHETIC_TASK_H_
#define SEDKIT_SYNTHETIC_TASK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sedkit/concept_matrix.h"
#include "sedkit/random.h"
#include "sedkit/toy_model.h"

namespace sedkit {

struct SyntheticTaskSpec {
  // Input dims that encode each concept of the matrix.
  std::size_t dims_per_concept = 2;
  // Extra class-specific dims drawn at random per class.
  std::size_t class_dims = 8;
  // Standard deviation of the Gaussian noise added to every sample.
  double noise = 0.1;
  // Distance of concept dims from 0.5: present -> 0.5 + offset, absent ->
  // 0.5 - offset.
  double concept_offset = 0.25;
  std::uint64_t seed = 0;

  friend bool operator==(const SyntheticTaskSpec&,
                         const SyntheticTaskSpec&) = default;
};

// Stand-in image task: each class has a prototype in [0,1]^d whose leading
// dims spell out the class's concepts, followed by class-specific random
// dims. Samples are prototype + noise, clamped to [0,1].
class SyntheticTask {
 public:
  SyntheticTask(ConceptMatrix matrix, const SyntheticTaskSpec& spec);

  const ConceptMatrix& matrix() const { return matrix_; }
  const SyntheticTaskSpec& spec() const { return spec_; }
  std::size_t input_dim() const { return input_dim_; }
  std::span<const double> prototype(ClassId c) const;

  std::vector<double> Sample(ClassId c, Rng& rng) const;

  // `count` samples with uniformly drawn classes and targets built for
  // `selected` (empty for a regular classifier). Fully determined by
  // (task seed, stream).
  std::vector<LabeledSample> MakeDataset(std::span<const ConceptId> selected,
                                         std::size_t count,
                                         std::uint64_t stream) const;

  // JSON description stored as model provenance.
  std::string Describe() const;

 private:
  ConceptMatrix matrix_;
  SyntheticTaskSpec spec_;
  std::size_t input_dim_ = 0;
  std::vector<std::vector<double>> prototypes_;
};

// Rebuilds a task from Describe() output embedded in model provenance.
SyntheticTask TaskFromDescription(const ConceptMatrix& matrix,
                                  std::string_view description);

ModelShape ShapeForTask(const SyntheticTask& task, std::size_t num_concepts,
                        std::vector<std::size_t> hidden_dims = {64});

}  // namespace sedkit

#endif  // SEDKIT_SYNTHETIC_TASK_H_
