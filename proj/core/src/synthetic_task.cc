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

#include "sedkit/synthetic_task.h"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>
#include "sedkit/errors.h"

namespace sedkit {

SyntheticTask::SyntheticTask(ConceptMatrix matrix, const SyntheticTaskSpec& spec)
    : matrix_(std::move(matrix)), spec_(spec) {
  if (spec_.noise < 0.0 || !std::isfinite(spec_.noise)) {
    throw ValidationError("task noise must be a finite non-negative number");
  }
  if (spec_.concept_offset < 0.0 || spec_.concept_offset > 0.5) {
    throw ValidationError("concept offset must lie in [0, 0.5]");
  }
  input_dim_ = spec_.dims_per_concept * matrix_.num_concepts() + spec_.class_dims;
  if (input_dim_ == 0) throw ValidationError("task has zero input dims");

  Rng rng = Rng::Stream(spec_.seed, 0);
  const std::size_t n = matrix_.num_classes();
  for (std::size_t attempt = 0;; ++attempt) {
    prototypes_.assign(n, {});
    for (std::size_t j = 0; j < n; ++j) {
      auto& p = prototypes_[j];
      p.reserve(input_dim_);
      for (std::size_t a = 0; a < matrix_.num_concepts(); ++a) {
        const bool present = matrix_.Explains(ClassId{j}, ConceptId{a});
        const double v =
            0.5 + (present ? spec_.concept_offset : -spec_.concept_offset);
        for (std::size_t r = 0; r < spec_.dims_per_concept; ++r) p.push_back(v);
      }
      for (std::size_t r = 0; r < spec_.class_dims; ++r) {
        p.push_back(rng.Uniform(0.1, 0.9));
      }
    }
    bool distinct = true;
    for (std::size_t j = 0; j < n && distinct; ++j) {
      for (std::size_t k = j + 1; k < n && distinct; ++k) {
        distinct = prototypes_[j] != prototypes_[k];
      }
    }
    if (distinct) break;
    if (attempt == 16) {
      throw ValidationError(
          "cannot build distinct class prototypes; add class dims");
    }
  }
}

std::span<const double> SyntheticTask::prototype(ClassId c) const {
  matrix_.CheckClass(c);
  return prototypes_[c.index];
}

std::vector<double> SyntheticTask::Sample(ClassId c, Rng& rng) const {
  const auto proto = prototype(c);
  std::vector<double> x(proto.begin(), proto.end());
  for (double& v : x) v = std::clamp(v + spec_.noise * rng.Normal(), 0.0, 1.0);
  return x;
}

std::vector<LabeledSample> SyntheticTask::MakeDataset(
    std::span<const ConceptId> selected, std::size_t count,
    std::uint64_t stream) const {
  matrix_.CheckSelection(selected);
  Rng rng = Rng::Stream(spec_.seed, stream + 1);
  std::vector<LabeledSample> data;
  data.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    const ClassId c{rng.UniformIndex(matrix_.num_classes())};
    LabeledSample sample;
    sample.x = Sample(c, rng);
    sample.y = MakeTarget(matrix_, c, selected);
    sample.label = c;
    data.push_back(std::move(sample));
  }
  return data;
}

std::string SyntheticTask::Describe() const {
  nlohmann::json j{{"kind", "synthetic-task"},
                   {"dims_per_concept", spec_.dims_per_concept},
                   {"class_dims", spec_.class_dims},
                   {"noise", spec_.noise},
                   {"concept_offset", spec_.concept_offset},
                   {"seed", spec_.seed}};
  return j.dump();
}

SyntheticTask TaskFromDescription(const ConceptMatrix& matrix,
                                  std::string_view description) {
  try {
    const auto j = nlohmann::json::parse(description);
    const auto& t = j.contains("task") ? j.at("task") : j;
    if (t.value("kind", std::string()) != "synthetic-task") {
      throw ParseError("provenance does not describe a synthetic task");
    }
    SyntheticTaskSpec spec;
    spec.dims_per_concept = t.at("dims_per_concept").get<std::size_t>();
    spec.class_dims = t.at("class_dims").get<std::size_t>();
    spec.noise = t.at("noise").get<double>();
    spec.concept_offset = t.at("concept_offset").get<double>();
    spec.seed = t.at("seed").get<std::uint64_t>();
    return SyntheticTask(matrix, spec);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("task description: ") + e.what());
  }
}

ModelShape ShapeForTask(const SyntheticTask& task, std::size_t num_concepts,
                        std::vector<std::size_t> hidden_dims) {
  ModelShape shape;
  shape.input_dim = task.input_dim();
  shape.hidden_dims = std::move(hidden_dims);
  shape.num_classes = task.matrix().num_classes();
  shape.num_concepts = num_concepts;
  return shape;
}

}  // namespace sedkit
