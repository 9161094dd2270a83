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

#include "sedkit/toy_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "format.h"
#include <nlohmann/json.hpp>
#include "sedkit/errors.h"
#include "sedkit/random.h"

namespace sedkit {
namespace {

using Json = nlohmann::json;

// Layer inputs of a forward pass: activations[0] = x, activations[l] is the
// input of layer l. The final entry holds the raw outputs.
struct ForwardTrace {
  std::vector<std::vector<double>> activations;
};

void CheckInput(const SEModelParams& params, std::span<const double> x) {
  if (x.size() != params.shape.input_dim) {
    throw ValidationError("input has dimension " + std::to_string(x.size()) +
                          ", model expects " +
                          std::to_string(params.shape.input_dim));
  }
}

void CheckTarget(const SEModelParams& params, std::span<const double> y) {
  if (y.size() != params.shape.output_dim()) {
    throw ValidationError("target has dimension " + std::to_string(y.size()) +
                          ", model has " +
                          std::to_string(params.shape.output_dim()) +
                          " outputs");
  }
}

ForwardTrace RunForward(const SEModelParams& params,
                        std::span<const double> x) {
  CheckInput(params, x);
  ForwardTrace trace;
  trace.activations.reserve(params.layers.size() + 1);
  trace.activations.emplace_back(x.begin(), x.end());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const DenseLayer& layer = params.layers[l];
    const auto& in = trace.activations.back();
    std::vector<double> out(layer.outputs);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* row = &layer.weights[o * layer.inputs];
      double z = layer.bias[o];
      for (std::size_t i = 0; i < layer.inputs; ++i) z += row[i] * in[i];
      const bool hidden = l + 1 < params.layers.size();
      out[o] = hidden ? std::tanh(z) : z;
    }
    trace.activations.push_back(std::move(out));
  }
  return trace;
}

double Softplus(double v) {
  return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
}

std::vector<DenseLayer> ZerosLike(const std::vector<DenseLayer>& layers) {
  std::vector<DenseLayer> zeros;
  zeros.reserve(layers.size());
  for (const auto& layer : layers) {
    DenseLayer z;
    z.inputs = layer.inputs;
    z.outputs = layer.outputs;
    z.weights.assign(layer.weights.size(), 0.0);
    z.bias.assign(layer.bias.size(), 0.0);
    zeros.push_back(std::move(z));
  }
  return zeros;
}

std::size_t ArgmaxClass(std::span<const double> outputs,
                        std::size_t num_classes) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < num_classes; ++c) {
    if (outputs[c] > outputs[best]) best = c;
  }
  return best;
}

Json ShapeToJson(const ModelShape& shape) {
  return Json{{"input_dim", shape.input_dim},
              {"hidden_dims", shape.hidden_dims},
              {"num_classes", shape.num_classes},
              {"num_concepts", shape.num_concepts}};
}

void ValidateShape(const ModelShape& shape) {
  if (shape.input_dim == 0) throw ValidationError("model input_dim is 0");
  if (shape.num_classes < 2) {
    throw ValidationError("model needs at least 2 classes");
  }
  for (const std::size_t h : shape.hidden_dims) {
    if (h == 0) throw ValidationError("hidden layer of width 0");
  }
}

}  // namespace

double Sigmoid(double v) {
  if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

SEModelParams InitParams(const ModelShape& shape, std::uint64_t seed) {
  ValidateShape(shape);
  SEModelParams params;
  params.shape = shape;
  params.init_seed = seed;
  Rng rng = Rng::Stream(seed, 0);
  std::size_t fan_in = shape.input_dim;
  std::vector<std::size_t> widths = shape.hidden_dims;
  widths.push_back(shape.output_dim());
  for (const std::size_t width : widths) {
    DenseLayer layer;
    layer.inputs = fan_in;
    layer.outputs = width;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layer.weights.resize(fan_in * width);
    for (double& w : layer.weights) w = rng.Uniform(-bound, bound);
    layer.bias.assign(width, 0.0);
    params.layers.push_back(std::move(layer));
    fan_in = width;
  }
  return params;
}

std::vector<double> MakeTarget(const ConceptMatrix& m, ClassId c,
                               std::span<const ConceptId> selected) {
  const auto explanation = ExplanationOf(m, c, selected);
  std::vector<double> y(m.num_classes() + selected.size(), 0.0);
  y[c.index] = 1.0;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    y[m.num_classes() + i] = explanation.bits[i];
  }
  return y;
}

std::vector<double> Forward(const SEModelParams& params,
                            std::span<const double> x) {
  return std::move(RunForward(params, x).activations.back());
}

double SigmoidCrossEntropy(std::span<const double> logits,
                           std::span<const double> targets) {
  if (logits.size() != targets.size() || logits.empty()) {
    throw ValidationError("logit/target dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    sum += Softplus(logits[i]) - targets[i] * logits[i];
  }
  return sum / static_cast<double>(logits.size());
}

double Loss(const SEModelParams& params, std::span<const double> x,
            std::span<const double> y) {
  CheckTarget(params, y);
  const auto logits = Forward(params, x);
  for (const double f : logits) {
    if (!std::isfinite(f)) {
      throw RuntimeFailure("non-finite model output; training has diverged");
    }
  }
  return SigmoidCrossEntropy(logits, y);
}

LossGradient ComputeGradient(const SEModelParams& params,
                             std::span<const double> x,
                             std::span<const double> y, LossTerms terms) {
  CheckTarget(params, y);
  const ForwardTrace trace = RunForward(params, x);
  const auto& logits = trace.activations.back();
  const std::size_t used = terms == LossTerms::kFull
                               ? params.shape.output_dim()
                               : params.shape.num_classes;

  LossGradient grad;
  grad.loss = SigmoidCrossEntropy(std::span(logits).first(used),
                                  y.first(used));
  if (!std::isfinite(grad.loss)) {
    throw RuntimeFailure("non-finite loss; training has diverged");
  }
  grad.layers = ZerosLike(params.layers);

  // d loss / d f_i = (sigmoid(f_i) - y_i) / K over the used terms.
  std::vector<double> delta(logits.size(), 0.0);
  for (std::size_t i = 0; i < used; ++i) {
    delta[i] = (Sigmoid(logits[i]) - y[i]) / static_cast<double>(used);
  }

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    DenseLayer& g = grad.layers[l];
    const auto& in = trace.activations[l];
    std::vector<double> upstream(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      g.bias[o] = d;
      if (d == 0.0) continue;
      const double* row = &layer.weights[o * layer.inputs];
      double* grow = &g.weights[o * layer.inputs];
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        grow[i] = d * in[i];
        upstream[i] += row[i] * d;
      }
    }
    if (l > 0) {
      // `in` is a tanh activation: d tanh(z) / dz = 1 - tanh(z)^2.
      for (std::size_t i = 0; i < upstream.size(); ++i) {
        upstream[i] *= 1.0 - in[i] * in[i];
      }
    } else {
      grad.input = upstream;
    }
    delta = std::move(upstream);
  }
  return grad;
}

TrainResult TrainSgd(std::span<const LabeledSample> data,
                     const ModelShape& shape, const TrainConfig& config) {
  if (data.empty()) throw ValidationError("training set is empty");
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate) ||
      config.batch_size == 0) {
    throw ValidationError("learning rate and batch size must be positive");
  }
  for (const auto& sample : data) {
    if (sample.x.size() != shape.input_dim ||
        sample.y.size() != shape.output_dim()) {
      throw ValidationError("training sample dimensions do not match model");
    }
  }

  TrainResult result;
  result.params = InitParams(shape, config.seed);
  SEModelParams& params = result.params;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle = Rng::Stream(config.seed, epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle.UniformIndex(i)]);
    }

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      auto accum = ZerosLike(params.layers);
      for (std::size_t b = start; b < end; ++b) {
        const auto& sample = data[order[b]];
        const LossGradient g = ComputeGradient(params, sample.x, sample.y);
        loss_sum += g.loss;
        for (std::size_t l = 0; l < accum.size(); ++l) {
          for (std::size_t k = 0; k < accum[l].weights.size(); ++k) {
            accum[l].weights[k] += g.layers[l].weights[k];
          }
          for (std::size_t k = 0; k < accum[l].bias.size(); ++k) {
            accum[l].bias[k] += g.layers[l].bias[k];
          }
        }
      }
      const double step =
          config.learning_rate / static_cast<double>(end - start);
      for (std::size_t l = 0; l < accum.size(); ++l) {
        for (std::size_t k = 0; k < accum[l].weights.size(); ++k) {
          params.layers[l].weights[k] -= step * accum[l].weights[k];
        }
        for (std::size_t k = 0; k < accum[l].bias.size(); ++k) {
          params.layers[l].bias[k] -= step * accum[l].bias[k];
        }
      }
    }

    const double mean_loss = loss_sum / static_cast<double>(data.size());
    if (!std::isfinite(mean_loss)) {
      throw RuntimeFailure("training diverged at epoch " +
                           std::to_string(epoch) + " (learning rate " +
                           internal::FormatReal(config.learning_rate) + ")");
    }
    std::size_t correct = 0;
    for (const auto& sample : data) {
      const auto out = Forward(params, sample.x);
      if (ArgmaxClass(out, shape.num_classes) == sample.label.index) ++correct;
    }
    result.curve.push_back(
        {epoch, mean_loss,
         static_cast<double>(correct) / static_cast<double>(data.size())});
  }
  return result;
}

Prediction Predict(const SEModelParams& params, std::span<const double> x,
                   double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("explanation threshold must lie in (0, 1)");
  }
  const auto out = Forward(params, x);
  Prediction p;
  p.predicted_class = ClassId{ArgmaxClass(out, params.shape.num_classes)};
  p.explanation.bits.reserve(params.shape.num_concepts);
  for (std::size_t i = 0; i < params.shape.num_concepts; ++i) {
    p.explanation.bits.push_back(
        Sigmoid(out[params.shape.num_classes + i]) >= threshold ? 1 : 0);
  }
  return p;
}

std::vector<double> FgsmPerturb(const SEModelParams& params,
                                std::span<const double> x,
                                std::span<const double> y, double epsilon,
                                LossTerms terms) {
  if (!(epsilon >= 0.0)) throw ValidationError("FGSM epsilon must be >= 0");
  const LossGradient g = ComputeGradient(params, x, y, terms);
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double s = (g.input[i] > 0.0) - (g.input[i] < 0.0);
    out[i] = std::clamp(out[i] + epsilon * s, 0.0, 1.0);
  }
  return out;
}

std::string SerializeModel(const SEModelParams& params) {
  Json j;
  j["format"] = "sedkit-model";
  j["version"] = 1;
  j["shape"] = ShapeToJson(params.shape);
  j["init_seed"] = params.init_seed;
  j["provenance"] = Json::parse(params.provenance);
  Json layers = Json::array();
  for (const auto& layer : params.layers) {
    layers.push_back(Json{{"inputs", layer.inputs},
                          {"outputs", layer.outputs},
                          {"weights", layer.weights},
                          {"bias", layer.bias}});
  }
  j["layers"] = std::move(layers);
  return j.dump() + "\n";
}

SEModelParams DeserializeModel(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("format").get<std::string>() != "sedkit-model" ||
        j.at("version").get<int>() != 1) {
      throw ParseError("not a version-1 sedkit model");
    }
    SEModelParams params;
    const auto& s = j.at("shape");
    params.shape.input_dim = s.at("input_dim").get<std::size_t>();
    params.shape.hidden_dims =
        s.at("hidden_dims").get<std::vector<std::size_t>>();
    params.shape.num_classes = s.at("num_classes").get<std::size_t>();
    params.shape.num_concepts = s.at("num_concepts").get<std::size_t>();
    ValidateShape(params.shape);
    params.init_seed = j.at("init_seed").get<std::uint64_t>();
    params.provenance = j.at("provenance").dump();

    std::vector<std::size_t> widths = params.shape.hidden_dims;
    widths.push_back(params.shape.output_dim());
    const auto& layers = j.at("layers");
    if (layers.size() != widths.size()) {
      throw ParseError("model has " + std::to_string(layers.size()) +
                       " layers, shape implies " +
                       std::to_string(widths.size()));
    }
    std::size_t fan_in = params.shape.input_dim;
    for (std::size_t l = 0; l < widths.size(); ++l) {
      DenseLayer layer;
      layer.inputs = layers[l].at("inputs").get<std::size_t>();
      layer.outputs = layers[l].at("outputs").get<std::size_t>();
      layer.weights = layers[l].at("weights").get<std::vector<double>>();
      layer.bias = layers[l].at("bias").get<std::vector<double>>();
      if (layer.inputs != fan_in || layer.outputs != widths[l] ||
          layer.weights.size() != fan_in * widths[l] ||
          layer.bias.size() != widths[l]) {
        throw ParseError("layer " + std::to_string(l) +
                         " dimensions disagree with the model shape");
      }
      params.layers.push_back(std::move(layer));
      fan_in = widths[l];
    }
    return params;
  } catch (const Json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void SaveModel(const std::filesystem::path& path, const SEModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RuntimeFailure("cannot write model '" + path.string() + "'");
  }
  out << SerializeModel(params);
  if (!out) throw RuntimeFailure("I/O error writing '" + path.string() + "'");
}

SEModelParams LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open model '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return DeserializeModel(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string FormatTrainingCurve(std::span<const EpochStats> curve) {
  std::string out = "epoch\tloss\ttrain_accuracy\n";
  for (const auto& row : curve) {
    out += std::to_string(row.epoch) + '\t' + internal::FormatReal(row.loss) +
           '\t' + internal::FormatReal(row.accuracy) + '\n';
  }
  return out;
}

}  // namespace sedkit
