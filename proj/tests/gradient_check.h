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


// Central-difference gradient check shared by the unit and acceptance tests.

#ifndef LDPFL_TESTS_GRADIENT_CHECK_H_
#define LDPFL_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ldpfl/model.h"
#include "ldpfl/random.h"

namespace ldpfl::testing {

struct GradientCheck {
  double max_relative = 0.0;  // worst entry, |a - n| / max(|a|, |n|, floor)
  std::size_t parameters = 0;
};

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientRelativeTolerance = 1e-4;
// Entries whose true gradient is below this are compared absolutely.
inline constexpr double kGradientFloor = 1e-6;

// Random net with 1 to 3 hidden layers, random batch and labels.
struct GradientProblem {
  ModelWeights weights;
  std::vector<double> features;
  std::vector<int> labels;
};

inline GradientProblem MakeGradientProblem(std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<std::size_t> sizes{2 + rng.UniformIndex(5)};
  const std::size_t hidden = 1 + rng.UniformIndex(3);
  for (std::size_t h = 0; h < hidden; ++h) sizes.push_back(2 + rng.UniformIndex(6));
  sizes.push_back(2 + rng.UniformIndex(4));
  GradientProblem p;
  p.weights = MakeMlp(sizes, rng);
  for (auto& layer : p.weights.layers) {
    for (double& b : layer.bias()) b = rng.Uniform(-0.5, 0.5);
  }
  const std::size_t batch = 1 + rng.UniformIndex(6);
  p.features.resize(batch * sizes.front());
  for (double& x : p.features) x = rng.Normal();
  for (std::size_t b = 0; b < batch; ++b) {
    p.labels.push_back(static_cast<int>(rng.UniformIndex(sizes.back())));
  }
  return p;
}

inline double BatchLoss(const ModelWeights& w, const GradientProblem& p) {
  const ForwardPass pass = Forward(w, p.features, p.labels.size());
  return CrossEntropy(pass.logits(), w.class_count(), p.labels);
}

inline GradientCheck CheckGradient(const GradientProblem& p) {
  const Gradient g = Backward(p.weights, p.features, p.labels);
  GradientCheck result;
  ModelWeights probe = p.weights;
  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& params = probe.layers[l].params;
    for (std::size_t j = 0; j < params.size(); ++j) {
      const double saved = params[j];
      params[j] = saved + kFiniteDifferenceStep;
      const double up = BatchLoss(probe, p);
      params[j] = saved - kFiniteDifferenceStep;
      const double down = BatchLoss(probe, p);
      params[j] = saved;
      const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
      const double analytic = g.grad.layers[l].params[j];
      const double scale =
          std::max({std::abs(numeric), std::abs(analytic), kGradientFloor});
      result.max_relative =
          std::max(result.max_relative, std::abs(numeric - analytic) / scale);
      ++result.parameters;
    }
  }
  return result;
}

}  // namespace ldpfl::testing

#endif  // LDPFL_TESTS_GRADIENT_CHECK_H_
