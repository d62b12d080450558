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

#ifndef LDPFL_FL_CORE_H_
#define LDPFL_FL_CORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ldpfl/adaptive_range.h"
#include "ldpfl/mechanism.h"
#include "ldpfl/model.h"
#include "ldpfl/random.h"
#include "ldpfl/shuffling.h"

namespace ldpfl {

// Client timing profiles are drawn once per federation, uniformly within
// these bounds (seconds).
struct TimingModel {
  double local_min = 0.5;
  double local_max = 3.0;
  double comm_min = 0.1;
  double comm_max = 1.0;
};

struct FederationConfig {
  std::size_t total_clients = 100;  // n
  // Clients selected per round; 0 means ceil(client_fraction * n).
  std::size_t clients_per_round = 0;
  double client_fraction = 1.0;
  std::size_t rounds = 10;
  SgdConfig sgd;
  double epsilon = 1.0;
  double epsilon_floor = kDefaultEpsilonFloor;
  // Clip and perturb local weights. Off gives plain federated averaging.
  bool privacy = true;
  Mechanism::Variant variant = Mechanism::Variant::kExact;
  RangeConfig range;
  // window, delays, jitter and drop_probability are used; slowest is
  // recomputed every round from the selected clients' profiles.
  ShuffleConfig shuffle;
  TimingModel timing;
  std::vector<std::size_t> hidden = {64};
  std::vector<double> init_scales;  // one per layer, empty for all 1
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  std::size_t SelectedPerRound() const;
  void Validate() const;
};

// Sub-stream identities. Every random decision of a federation draws from
// StreamSeed(config.seed, purpose, round, client).
enum class StreamPurpose : std::uint64_t {
  kPartition = 1,
  kInit = 2,
  kTiming = 3,
  kSelection = 4,
  kTraining = 5,
  kPerturbation = 6,
  kSchedule = 7,
};

std::uint64_t StreamSeed(std::uint64_t root, StreamPurpose purpose,
                         std::uint64_t round = 0, std::uint64_t client = 0);

// n disjoint shards of a random permutation; the first size % n shards get
// one extra sample. Throws kInvalidArgument when data.size() < n.
std::vector<Dataset> PartitionData(const Dataset& data, std::size_t n,
                                   RandomStream& rng);

std::vector<TimingProfile> MakeTimingProfiles(std::size_t n,
                                              const TimingModel& model,
                                              RandomStream& rng);

struct LocalUpdateResult {
  std::vector<WeightReport> reports;
  std::size_t clipped = 0;
  std::size_t total = 0;
};

// One client's round: train a copy of the global weights, clip each layer
// into its range, perturb every parameter (unless mechanism is null), then
// split and schedule the reports.
LocalUpdateResult LocalUpdate(const ModelWeights& global,
                              const RangeVector& ranges,
                              const Dataset& client_data,
                              const SgdConfig& sgd, const Mechanism* mechanism,
                              const TimingProfile& profile,
                              const ShuffleConfig& shuffle,
                              std::uint64_t training_seed,
                              std::uint64_t perturbation_seed,
                              std::uint64_t schedule_seed);

struct RoundMetrics {
  double accuracy = 0.0;   // held-out accuracy of the aggregated weights
  double clip_rate = 0.0;  // fraction of parameters clipped before perturbing
  RangeVector ranges_used;
  double budget = 0.0;  // cumulative privacy cost under the active mode
  std::size_t reports = 0;
};

struct RoundState {
  std::size_t round = 0;
  ModelWeights global_weights;
  RangeVector ranges;  // ranges published for the next round
  RoundMetrics metrics;
};

// Averages each id's reports into a model shaped like `shape`. With
// require_complete every id must carry exactly expected_reports values;
// otherwise each id needs at least one. Violations throw kProtocol.
ModelWeights AggregateReports(const CollectedUpdates& collected,
                              const ModelWeights& shape,
                              std::size_t expected_reports,
                              bool require_complete = true);

// Cloud side of one round: collect, average, refresh ranges and score the
// new global model on `test`. clip_rate and budget are left for the caller.
RoundState CloudRound(const RoundState& state,
                      std::span<const std::vector<WeightReport>> batches,
                      RangePolicy& policy, const Dataset& test,
                      bool require_complete = true);

struct FederationRun {
  ModelWeights initial;
  std::vector<RoundState> rounds;
};

// Full federation with initial weights MakeMlp(input, hidden..., classes)
// drawn from the kInit stream.
FederationRun RunFederated(const FederationConfig& config, const Dataset& train,
                           const Dataset& test);

FederationRun RunFederated(const FederationConfig& config, const Dataset& train,
                           const Dataset& test, ModelWeights initial);

}  // namespace ldpfl

#endif  // LDPFL_FL_CORE_H_
