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

#ifndef SEDKIT_TOY_MODEL_H_
#define SEDKIT_TOY_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sedkit/concept_matrix.h"

namespace sedkit {

// Feedforward classifier with tanh hidden layers and a linear head of
// num_classes + num_concepts raw outputs, each read through a sigmoid.
// num_concepts == 0 is a regular classifier with no explanation head.
struct ModelShape {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims = {64};
  std::size_t num_classes = 0;
  std::size_t num_concepts = 0;

  std::size_t output_dim() const { return num_classes + num_concepts; }
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;     // outputs

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct SEModelParams {
  ModelShape shape;
  std::vector<DenseLayer> layers;
  // Seed the weights were initialized from.
  std::uint64_t init_seed = 0;
  // Opaque JSON text describing where the model came from (task, config).
  std::string provenance = "{}";

  friend bool operator==(const SEModelParams&, const SEModelParams&) = default;
};

// Weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases zero.
SEModelParams InitParams(const ModelShape& shape, std::uint64_t seed);

struct LabeledSample {
  std::vector<double> x;
  // <one-hot class, explanation bits>, length num_classes + num_concepts.
  std::vector<double> y;
  ClassId label;
};

// <one-hot c, E(c) over selected>.
std::vector<double> MakeTarget(const ConceptMatrix& m, ClassId c,
                               std::span<const ConceptId> selected);

// Raw outputs f(x, w).
std::vector<double> Forward(const SEModelParams& params,
                            std::span<const double> x);

// Mean sigmoid cross-entropy over all outputs:
//   -(1/K) sum_i [y_i log s(f_i) + (1 - y_i) log(1 - s(f_i))]
// evaluated as softplus(f_i) - y_i f_i for stability.
double SigmoidCrossEntropy(std::span<const double> logits,
                           std::span<const double> targets);

// Throws RuntimeFailure when the activations are not finite.
double Loss(const SEModelParams& params, std::span<const double> x,
            std::span<const double> y);

// Which outputs a gradient is taken over. kClassOnly keeps the first
// num_classes terms (normalized by num_classes).
enum class LossTerms { kFull, kClassOnly };

struct LossGradient {
  double loss = 0.0;
  std::vector<DenseLayer> layers;  // same shapes as the params
  std::vector<double> input;       // d loss / d x
};

LossGradient ComputeGradient(const SEModelParams& params,
                             std::span<const double> x,
                             std::span<const double> y,
                             LossTerms terms = LossTerms::kFull);

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;      // mean over the epoch's samples, before updates
  double accuracy = 0.0;  // class accuracy on the training set after the epoch
};

struct TrainResult {
  SEModelParams params;
  std::vector<EpochStats> curve;
};

// Plain minibatch SGD on the mean loss. Weights are initialized from
// config.seed and the sample order is reshuffled from a seed-derived stream
// each epoch, so equal inputs give bit-identical results. Throws
// RuntimeFailure on a non-finite loss.
TrainResult TrainSgd(std::span<const LabeledSample> data,
                     const ModelShape& shape, const TrainConfig& config);

struct Prediction {
  ClassId predicted_class;
  ExplanationVector explanation;
};

// Class = argmax of the first num_classes outputs (lowest index on ties);
// explanation bit i = sigmoid(f_{N+i}) >= threshold.
Prediction Predict(const SEModelParams& params, std::span<const double> x,
                   double threshold = 0.5);

// clamp(x + epsilon * sign(d loss / d x), 0, 1), with sign(0) = 0.
std::vector<double> FgsmPerturb(const SEModelParams& params,
                                std::span<const double> x,
                                std::span<const double> y, double epsilon,
                                LossTerms terms = LossTerms::kFull);

double Sigmoid(double v);

std::string SerializeModel(const SEModelParams& params);
SEModelParams DeserializeModel(std::string_view text);
void SaveModel(const std::filesystem::path& path, const SEModelParams& params);
SEModelParams LoadModel(const std::filesystem::path& path);

// Tab-separated "epoch loss train_accuracy" table.
std::string FormatTrainingCurve(std::span<const EpochStats> curve);

}  // namespace sedkit

#endif  // SEDKIT_TOY_MODEL_H_
