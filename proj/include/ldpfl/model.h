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

#ifndef LDPFL_MODEL_H_
#define LDPFL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ldpfl/random.h"

namespace ldpfl {

// One dense layer. params holds the [out x in] row-major weight matrix
// followed by the [out] bias vector; that flat order is also the order in
// which the layer's parameters are addressed by WeightId offsets.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> params;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), params(in_dim * out_dim + out_dim, 0.0) {}

  std::size_t weight_count() const { return in * out; }
  std::span<double> weights() { return {params.data(), weight_count()}; }
  std::span<const double> weights() const {
    return {params.data(), weight_count()};
  }
  std::span<double> bias() { return {params.data() + weight_count(), out}; }
  std::span<const double> bias() const {
    return {params.data() + weight_count(), out};
  }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// A feed-forward ReLU network ending in a linear layer whose outputs are the
// class logits.
struct ModelWeights {
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in; }
  std::size_t class_count() const {
    return layers.empty() ? 0 : layers.back().out;
  }

  // Throws kShapeMismatch on inconsistent shapes and kInvalidArgument on
  // non-finite entries.
  void Validate() const;

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

ModelWeights ZerosLike(const ModelWeights& like);

// Builds an MLP with the given layer sizes (input, hidden..., classes).
// Weights are uniform in +-scale * sqrt(6 / (fan_in + fan_out)) with scale
// taken from init_scales (1 when empty); biases start at 0.
ModelWeights MakeMlp(std::span<const std::size_t> sizes, RandomStream& rng,
                     std::span<const double> init_scales = {});

struct Dataset {
  std::size_t dim = 0;
  std::size_t classes = 0;
  std::vector<double> features;  // [size x dim]
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }
  void Validate() const;
  Dataset Subset(std::span<const std::size_t> indices) const;
};

// Gaussian blobs: class centers uniform in [-separation, separation]^dim,
// unit-variance isotropic noise, balanced labels.
Dataset MakeBlobs(std::size_t samples, std::size_t dim, std::size_t classes,
                  double separation, std::uint64_t seed);

// A second sample from the same blob centers as MakeBlobs(.., seed), drawn
// with a different noise stream; used as the held-out test set.
Dataset MakeBlobsHeldOut(std::size_t samples, std::size_t dim,
                         std::size_t classes, double separation,
                         std::uint64_t seed);

struct SgdConfig {
  double learning_rate = 0.03;
  std::size_t batch_size = 16;
  std::size_t local_epochs = 1;

  // Throws kInvalidArgument. learning_rate = 0 is accepted so that training
  // can be switched off in experiments.
  void Validate() const;
};

struct ForwardPass {
  std::size_t batch = 0;
  // activations[0] is the input batch, activations.back() the logits; the
  // entries in between are post-ReLU hidden activations.
  std::vector<std::vector<double>> activations;

  std::span<const double> logits() const { return activations.back(); }
};

ForwardPass Forward(const ModelWeights& weights,
                    std::span<const double> features, std::size_t batch);

struct Gradient {
  ModelWeights grad;
  double loss = 0.0;  // mean cross-entropy over the batch
};

// Gradient of the mean softmax cross-entropy over the batch.
Gradient Backward(const ModelWeights& weights, std::span<const double> features,
                  std::span<const int> labels);

// Mean softmax cross-entropy, computed with max subtraction.
double CrossEntropy(std::span<const double> logits, std::size_t classes,
                    std::span<const int> labels);

struct TrainingTrace {
  std::vector<double> epoch_loss;  // mean batch loss per epoch
};

// E epochs of shuffled mini-batch SGD; the final batch of an epoch may be
// short.
ModelWeights SgdEpochs(ModelWeights weights, const Dataset& data,
                       const SgdConfig& config, RandomStream& rng,
                       TrainingTrace* trace = nullptr);

// Fraction of samples whose argmax logit (lowest index on ties) equals the
// label. 0 for an empty dataset.
double Evaluate(const ModelWeights& weights, const Dataset& data);

}  // namespace ldpfl

#endif  // LDPFL_MODEL_H_
