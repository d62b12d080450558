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

#ifndef LDPFL_CONFIG_H_
#define LDPFL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ldpfl/fl_core.h"

namespace ldpfl {

struct DatasetConfig {
  enum class Kind { kBlobs, kMnist };

  Kind kind = Kind::kBlobs;
  // Synthetic blobs.
  std::size_t samples = 6000;
  std::size_t test_samples = 2000;
  std::size_t dim = 20;
  std::size_t classes = 10;
  double separation = 1.5;
  std::uint64_t seed = 7;
  // MNIST IDX files; subset 0 keeps every sample.
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  std::size_t subset = 0;
  std::size_t test_subset = 0;
};

struct VerifyConfig {
  bool mechanism = true;
  bool concentration = true;
  bool shuffle = true;
  bool adaptive = true;
  std::uint64_t seed = 20240;
  std::size_t threads = 1;
};

struct ExperimentConfig {
  FederationConfig federation;
  DatasetConfig dataset;
  std::string output_dir = "ldpfl-out";
  VerifyConfig verify;
  std::vector<double> sweep_epsilons = {0.1, 0.5, 1.0, 5.0, 10.0};

  // Throws kConfig with the offending key.
  void Validate() const;
};

// INI text with sections [federation], [training], [range], [shuffle],
// [timing], [dataset], [output], [verify] and [sweep]. Missing keys keep
// their defaults; unknown sections or keys and malformed values throw
// kConfig. The result is validated.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfig(const std::string& path);

// Canonical INI listing every key; doubles print with 17 significant digits
// so ParseConfig(SerializeConfig(c)) reproduces c exactly.
std::string SerializeConfig(const ExperimentConfig& config);

// Semantic equality: same canonical serialization.
bool SameConfig(const ExperimentConfig& a, const ExperimentConfig& b);

const char* DatasetKindName(DatasetConfig::Kind kind);

// Builds the train/test split the config describes. MNIST files that cannot
// be read throw kIo.
struct DataSplit {
  Dataset train;
  Dataset test;
};
DataSplit LoadDatasets(const DatasetConfig& config);

}  // namespace ldpfl

#endif  // LDPFL_CONFIG_H_
