// Copyright 2026 The LDP-FL Toolkit Authors
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

#include "ldpfl/model.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ldpfl/error.h"
#include "ldpfl/kernels.h"

namespace ldpfl {
namespace {

std::vector<double> Transpose(std::span<const double> m, std::size_t rows,
                              std::size_t cols) {
  std::vector<double> t(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[j * rows + i] = m[i * cols + j];
  }
  return t;
}

void RequireBatch(const ModelWeights& weights, std::span<const double> features,
                  std::size_t batch) {
  if (weights.layers.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "model has no layers");
  }
  if (features.size() != batch * weights.input_dim()) {
    throw Error(ErrorCode::kShapeMismatch,
                "batch of " + std::to_string(features.size()) +
                    " values does not match " + std::to_string(batch) +
                    " rows of dimension " +
                    std::to_string(weights.input_dim()));
  }
}

// Row-wise softmax in place.
void Softmax(std::span<double> logits, std::size_t classes) {
  for (std::size_t b = 0; b * classes < logits.size(); ++b) {
    double* row = logits.data() + b * classes;
    const double mx = *std::max_element(row, row + classes);
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      row[c] = std::exp(row[c] - mx);
      total += row[c];
    }
    for (std::size_t c = 0; c < classes; ++c) row[c] /= total;
  }
}

Dataset BlobSample(std::size_t samples, std::size_t dim, std::size_t classes,
                   double separation, std::uint64_t seed,
                   std::uint64_t noise_tag) {
  if (samples == 0 || dim == 0 || classes < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "blobs need samples >= 1, dim >= 1 and classes >= 2");
  }
  RandomStream center_rng(DeriveSeed(seed, {1}));
  std::vector<double> centers(classes * dim);
  for (double& c : centers) c = center_rng.Uniform(-separation, separation);

  RandomStream noise_rng(DeriveSeed(seed, {noise_tag}));
  Dataset data;
  data.dim = dim;
  data.classes = classes;
  data.features.resize(samples * dim);
  data.labels.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const std::size_t label = i % classes;
    data.labels[i] = static_cast<int>(label);
    for (std::size_t j = 0; j < dim; ++j) {
      data.features[i * dim + j] = centers[label * dim + j] + noise_rng.Normal();
    }
  }
  return data;
}

}  // namespace

std::size_t ModelWeights::parameter_count() const {
  std::size_t total = 0;
  for (const auto& layer : layers) total += layer.params.size();
  return total;
}

void ModelWeights::Validate() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.in == 0 || layer.out == 0 ||
        layer.params.size() != layer.in * layer.out + layer.out) {
      throw Error(ErrorCode::kShapeMismatch,
                  "layer " + std::to_string(l) + " has inconsistent storage");
    }
    if (l > 0 && layers[l - 1].out != layer.in) {
      throw Error(ErrorCode::kShapeMismatch,
                  "layer " + std::to_string(l) + " input " +
                      std::to_string(layer.in) + " != previous output " +
                      std::to_string(layers[l - 1].out));
    }
    for (double v : layer.params) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "layer " + std::to_string(l) + " has a non-finite weight");
      }
    }
  }
}

ModelWeights ZerosLike(const ModelWeights& like) {
  ModelWeights z;
  for (const auto& layer : like.layers) z.layers.emplace_back(layer.in, layer.out);
  return z;
}

ModelWeights MakeMlp(std::span<const std::size_t> sizes, RandomStream& rng,
                     std::span<const double> init_scales) {
  if (sizes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "an MLP needs at least input and output sizes");
  }
  const std::size_t layer_count = sizes.size() - 1;
  if (!init_scales.empty() && init_scales.size() != layer_count) {
    throw Error(ErrorCode::kShapeMismatch,
                "init_scales needs one entry per layer");
  }
  ModelWeights model;
  for (std::size_t l = 0; l < layer_count; ++l) {
    DenseLayer layer(sizes[l], sizes[l + 1]);
    const double scale = init_scales.empty() ? 1.0 : init_scales[l];
    const double limit =
        scale * std::sqrt(6.0 / static_cast<double>(sizes[l] + sizes[l + 1]));
    for (double& w : layer.weights()) w = rng.Uniform(-limit, limit);
    model.layers.push_back(std::move(layer));
  }
  model.Validate();
  return model;
}

void Dataset::Validate() const {
  if (labels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "dataset is empty");
  }
  if (features.size() != labels.size() * dim) {
    throw Error(ErrorCode::kShapeMismatch, "feature matrix size mismatch");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(y) + " outside class count");
    }
  }
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.dim = dim;
  out.classes = classes;
  out.features.reserve(indices.size() * dim);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

Dataset MakeBlobs(std::size_t samples, std::size_t dim, std::size_t classes,
                  double separation, std::uint64_t seed) {
  return BlobSample(samples, dim, classes, separation, seed, 2);
}

Dataset MakeBlobsHeldOut(std::size_t samples, std::size_t dim,
                         std::size_t classes, double separation,
                         std::uint64_t seed) {
  return BlobSample(samples, dim, classes, separation, seed, 3);
}

void SgdConfig::Validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be >= 0");
  }
  if (batch_size == 0 || local_epochs == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "batch size and local epochs must be >= 1");
  }
}

ForwardPass Forward(const ModelWeights& weights,
                    std::span<const double> features, std::size_t batch) {
  RequireBatch(weights, features, batch);
  const auto& k = simd::Kernels();
  ForwardPass pass;
  pass.batch = batch;
  pass.activations.emplace_back(features.begin(), features.end());
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    const auto& layer = weights.layers[l];
    const auto wt = Transpose(layer.weights(), layer.out, layer.in);
    std::vector<double> z(batch * layer.out);
    auto bias = layer.bias();
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy(bias.begin(), bias.end(), z.begin() + b * layer.out);
    }
    k.gemm_acc(pass.activations.back().data(), wt.data(), z.data(), batch,
               layer.in, layer.out);
    if (l + 1 < weights.layers.size()) k.relu(z.data(), z.size());
    pass.activations.push_back(std::move(z));
  }
  return pass;
}

double CrossEntropy(std::span<const double> logits, std::size_t classes,
                    std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const double* row = logits.data() + b * classes;
    const double mx = *std::max_element(row, row + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(row[c] - mx);
    total += std::log(sum) + mx - row[labels[b]];
  }
  return total / static_cast<double>(labels.size());
}

Gradient Backward(const ModelWeights& weights, std::span<const double> features,
                  std::span<const int> labels) {
  const std::size_t batch = labels.size();
  if (batch == 0) throw Error(ErrorCode::kShapeMismatch, "empty batch");
  ForwardPass pass = Forward(weights, features, batch);
  const auto& k = simd::Kernels();
  const std::size_t classes = weights.class_count();

  Gradient result;
  result.loss = CrossEntropy(pass.logits(), classes, labels);
  result.grad = ZerosLike(weights);

  std::vector<double> delta = pass.activations.back();
  Softmax(delta, classes);
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const int y = labels[b];
    if (y < 0 || static_cast<std::size_t>(y) >= classes) {
      throw Error(ErrorCode::kShapeMismatch, "label outside class count");
    }
    delta[b * classes + y] -= 1.0;
    for (std::size_t c = 0; c < classes; ++c) delta[b * classes + c] *= inv_batch;
  }

  for (std::size_t l = weights.layers.size(); l-- > 0;) {
    const auto& layer = weights.layers[l];
    auto& g = result.grad.layers[l];
    const auto& input = pass.activations[l];
    const auto delta_t = Transpose(delta, batch, layer.out);
    k.gemm_acc(delta_t.data(), input.data(), g.weights().data(), layer.out,
               batch, layer.in);
    for (std::size_t b = 0; b < batch; ++b) {
      k.add(delta.data() + b * layer.out, g.bias().data(), layer.out);
    }
    if (l == 0) break;
    std::vector<double> upstream(batch * layer.in, 0.0);
    k.gemm_acc(delta.data(), layer.weights().data(), upstream.data(), batch,
               layer.out, layer.in);
    k.relu_backward(input.data(), upstream.data(), upstream.size());
    delta = std::move(upstream);
  }
  return result;
}

ModelWeights SgdEpochs(ModelWeights weights, const Dataset& data,
                       const SgdConfig& config, RandomStream& rng,
                       TrainingTrace* trace) {
  config.Validate();
  const auto& k = simd::Kernels();
  const std::size_t n = data.size();
  std::vector<double> batch_x;
  std::vector<int> batch_y;
  for (std::size_t epoch = 0; epoch < config.local_epochs; ++epoch) {
    const auto order = RandomPermutation(n, rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t end = std::min(n, start + config.batch_size);
      batch_x.clear();
      batch_y.clear();
      for (std::size_t i = start; i < end; ++i) {
        auto r = data.row(order[i]);
        batch_x.insert(batch_x.end(), r.begin(), r.end());
        batch_y.push_back(data.labels[order[i]]);
      }
      Gradient g = Backward(weights, batch_x, batch_y);
      loss_sum += g.loss;
      ++batches;
      if (config.learning_rate != 0.0) {
        for (std::size_t l = 0; l < weights.layers.size(); ++l) {
          auto& p = weights.layers[l].params;
          k.axpy(-config.learning_rate, g.grad.layers[l].params.data(),
                 p.data(), p.size());
        }
      }
    }
    if (trace != nullptr && batches > 0) {
      trace->epoch_loss.push_back(loss_sum / static_cast<double>(batches));
    }
  }
  return weights;
}

double Evaluate(const ModelWeights& weights, const Dataset& data) {
  const std::size_t n = data.size();
  if (n == 0) return 0.0;
  const std::size_t classes = weights.class_count();
  constexpr std::size_t kChunk = 512;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t end = std::min(n, start + kChunk);
    std::span<const double> x(data.features.data() + start * data.dim,
                              (end - start) * data.dim);
    ForwardPass pass = Forward(weights, x, end - start);
    auto logits = pass.logits();
    for (std::size_t b = 0; b < end - start; ++b) {
      const double* row = logits.data() + b * classes;
      const auto best = static_cast<int>(
          std::max_element(row, row + classes) - row);  // first max on ties
      if (best == data.labels[start + b]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace ldpfl
