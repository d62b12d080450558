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

#ifndef LDPFL_RANDOM_H_
#define LDPFL_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace ldpfl {

// Mixes a root seed with a list of tags into an independent sub-seed. Every
// random stream in the toolkit is derived this way, so results depend only on
// the root seed and never on scheduling or thread count.
std::uint64_t DeriveSeed(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> tags);

// A seeded random stream. Owned by exactly one thread at a time.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling keeps it
  // unbiased and independent of the standard library's distributions.
  std::uint64_t UniformIndex(std::uint64_t bound);

  double Normal();

  std::uint64_t NextU64() { return engine_(); }

  void FillUniform(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = Uniform();
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Fisher-Yates permutation of [0, n).
std::vector<std::size_t> RandomPermutation(std::size_t n, RandomStream& rng);

// k distinct indices from [0, n), returned in ascending order.
std::vector<std::size_t> SampleWithoutReplacement(std::size_t n, std::size_t k,
                                                  RandomStream& rng);

}  // namespace ldpfl

#endif  // LDPFL_RANDOM_H_
