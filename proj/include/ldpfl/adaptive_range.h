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

#ifndef LDPFL_ADAPTIVE_RANGE_H_
#define LDPFL_ADAPTIVE_RANGE_H_

#include <cstddef>
#include <vector>

#include "ldpfl/mechanism.h"
#include "ldpfl/model.h"

namespace ldpfl {

inline constexpr double kDefaultRadiusFloor = 1e-4;

// One Range per model layer.
using RangeVector = std::vector<Range>;

enum class RangeMode { kFixed, kAdaptive };

const char* RangeModeName(RangeMode mode);

struct RangeConfig {
  RangeMode mode = RangeMode::kFixed;
  double center = 0.0;
  double radius = 1.0;
  double radius_floor = kDefaultRadiusFloor;
};

// Every layer gets (config.center, config.radius). Throws kInvalidArgument
// for layer_count == 0 or a non-positive radius.
RangeVector InitRanges(std::size_t layer_count, const RangeConfig& config);

// Per layer: c = (min + max) / 2, r = max((max - min) / 2, radius_floor) over
// the layer's weights and biases. Throws on non-finite weights.
RangeVector RangesFromWeights(const ModelWeights& weights,
                              double radius_floor = kDefaultRadiusFloor);

// The cloud-side range state. In fixed mode the vector never changes after
// construction; in adaptive mode every Update replaces it with ranges fitted
// to the aggregated weights of the round.
class RangePolicy {
 public:
  // Adaptive mode starts from ranges fitted to the initial global weights;
  // fixed mode uses the configured (center, radius) for every layer.
  RangePolicy(const RangeConfig& config, const ModelWeights& initial);

  RangeMode mode() const { return config_.mode; }
  const RangeVector& ranges() const { return ranges_; }

  // Returns the (possibly unchanged) ranges for the next round.
  const RangeVector& Update(const ModelWeights& aggregated);

 private:
  RangeConfig config_;
  RangeVector ranges_;
};

}  // namespace ldpfl

#endif  // LDPFL_ADAPTIVE_RANGE_H_
