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

#ifndef LDPFL_MNIST_H_
#define LDPFL_MNIST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldpfl/model.h"

namespace ldpfl {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols
};

// Big-endian IDX parsers. Bad magic numbers and short buffers throw kFormat;
// the message names the byte offset where data ran out.
IdxImages ParseIdxImages(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> ParseIdxLabels(std::span<const std::uint8_t> bytes);

// Encoders for the same formats (used to build fixtures).
std::vector<std::uint8_t> EncodeIdxImages(const IdxImages& images);
std::vector<std::uint8_t> EncodeIdxLabels(std::span<const std::uint8_t> labels);

// Whole-file read; throws kIo when the file cannot be opened.
std::vector<std::uint8_t> ReadFileBytes(const std::string& path);

// Indices of a class-balanced subset of `subset` samples: each class
// contributes subset / classes samples, +1 for the first subset % classes
// classes that still have data, drawn uniformly without replacement.
// Returned in ascending order.
std::vector<std::size_t> StratifiedSubset(std::span<const int> labels,
                                          std::size_t classes,
                                          std::size_t subset,
                                          std::uint64_t seed);

// Images scaled to [0, 1], 10 classes. subset = 0 keeps every sample.
Dataset LoadMnist(const std::string& images_path,
                  const std::string& labels_path, std::size_t subset = 0,
                  std::uint64_t seed = 0);

}  // namespace ldpfl

#endif  // LDPFL_MNIST_H_
