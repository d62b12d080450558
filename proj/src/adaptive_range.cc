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

#include "ldpfl/adaptive_range.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ldpfl/error.h"
#include "ldpfl/kernels.h"

namespace ldpfl {

const char* RangeModeName(RangeMode mode) {
  return mode == RangeMode::kFixed ? "fixed" : "adaptive";
}

RangeVector InitRanges(std::size_t layer_count, const RangeConfig& config) {
  if (layer_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one layer");
  }
  return RangeVector(layer_count, Range::Make(config.center, config.radius));
}

RangeVector RangesFromWeights(const ModelWeights& weights,
                              double radius_floor) {
  if (!(radius_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius floor must be > 0");
  }
  RangeVector ranges;
  ranges.reserve(weights.layers.size());
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    const auto& params = weights.layers[l].params;
    if (params.empty()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "layer " + std::to_string(l) + " has no parameters");
    }
    for (double v : params) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "non-finite aggregated weight in layer " +
                        std::to_string(l));
      }
    }
    double lo, hi;
    simd::Kernels().min_max(params.data(), params.size(), &lo, &hi);
    const double center = 0.5 * (lo + hi);
    double radius = std::max(0.5 * (hi - lo), radius_floor);
    // Rounding in the midpoint can leave an endpoint a hair outside.
    while (center - radius > lo || center + radius < hi) {
      radius = std::nextafter(radius, INFINITY);
    }
    ranges.push_back(Range{center, radius});
  }
  return ranges;
}

RangePolicy::RangePolicy(const RangeConfig& config,
                         const ModelWeights& initial)
    : config_(config) {
  if (config_.mode == RangeMode::kFixed) {
    ranges_ = InitRanges(initial.layers.size(), config_);
  } else {
    ranges_ = RangesFromWeights(initial, config_.radius_floor);
  }
}

const RangeVector& RangePolicy::Update(const ModelWeights& aggregated) {
  if (aggregated.layers.size() != ranges_.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "aggregated model layer count differs from range vector");
  }
  if (config_.mode == RangeMode::kAdaptive) {
    ranges_ = RangesFromWeights(aggregated, config_.radius_floor);
  }
  return ranges_;
}

}  // namespace ldpfl
