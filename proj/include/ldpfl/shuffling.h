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

#ifndef LDPFL_SHUFFLING_H_
#define LDPFL_SHUFFLING_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ldpfl/model.h"
#include "ldpfl/random.h"

namespace ldpfl {

// Position of one scalar parameter: layer index and offset into the layer's
// flat [weights..., bias...] storage. Ordered lexicographically.
struct WeightId {
  std::uint32_t layer = 0;
  std::uint64_t offset = 0;

  friend auto operator<=>(const WeightId&, const WeightId&) = default;
};

struct WeightEntry {
  WeightId id;
  double value = 0.0;

  friend bool operator==(const WeightEntry&, const WeightEntry&) = default;
};

// What the cloud receives. There is no client field: once a report leaves
// Schedule nothing ties it to its sender except its arrival time.
struct WeightReport {
  WeightId id;
  double value = 0.0;
  double arrival = 0.0;
  double tiebreak = 0.0;  // second uniform draw ordering equal arrivals
};

// Local compute and communication time of one client, in simulated seconds.
struct TimingProfile {
  double t_local = 0.0;
  double t_comm = 0.0;

  double response() const { return t_local + t_comm; }
};

struct ShuffleConfig {
  double window = 1.0;   // T
  double slowest = 0.0;  // T_S, slowest response among participating clients
  // When false every report is released at T_S with no random delay and no
  // tie-break draw; used for noise-free baselines.
  bool delays = true;
  // Half-width of a uniform error in each client's estimate of T_S.
  double jitter = 0.0;
  double drop_probability = 0.0;

  void Validate() const;
};

// max over profiles of t_local + t_comm. Throws on an empty list or negative
// times.
double SlowestResponse(std::span<const TimingProfile> profiles);

// How a client decides when its delay window opens.
enum class WaitRule {
  // Wait until T_S, then add U(0, T): every client's window is [T_S, T_S + T].
  kWaitForSlowest,
  // Add U(0, T) to the client's own response time. Kept only as the baseline
  // the timing attacker is expected to beat.
  kNone,
};

// One entry per scalar parameter, in ascending WeightId order.
std::vector<WeightEntry> Split(const ModelWeights& weights);

// Inverse of Split: writes each entry into a model shaped like `shape`.
// Throws kProtocol for unknown or missing ids.
ModelWeights Reassemble(std::span<const WeightEntry> entries,
                        const ModelWeights& shape);

// Assigns arrival times to one client's entries. Under kWaitForSlowest each
// entry arrives at max(response, T_S estimate) + U(0, T). Throws
// kScheduling when the profile is slower than config.slowest.
std::vector<WeightReport> Schedule(std::span<const WeightEntry> entries,
                                   const TimingProfile& profile,
                                   const ShuffleConfig& config,
                                   RandomStream& rng,
                                   WaitRule rule = WaitRule::kWaitForSlowest);

// All clients' reports merged and stably sorted by (arrival, tiebreak): the
// order in which the cloud observes them. Throws kProtocol when one client's
// batch repeats an id.
std::vector<WeightReport> ArrivalOrder(
    std::span<const std::vector<WeightReport>> batches);

struct CollectedUpdates {
  std::vector<WeightId> ids;                // ascending
  std::vector<std::vector<double>> values;  // per id, in arrival order

  std::size_t total_reports() const;
};

CollectedUpdates Collect(std::span<const std::vector<WeightReport>> batches);

enum class ShuffleMode { kNoShuffle, kModelShuffle, kParameterShuffle };

const char* ShuffleModeName(ShuffleMode mode);

// Total privacy cost of `rounds` releases of a `dimension`-parameter model
// at per-parameter budget epsilon: rounds * dimension * epsilon without
// shuffling, dimension * epsilon with model-level shuffling, epsilon with
// parameter shuffling.
double BudgetComposition(double epsilon, std::size_t rounds,
                         std::size_t dimension, ShuffleMode mode);

// Line-delimited report stream: "arrival,layer,offset,value" per line after a
// header line, values printed with 17 significant digits.
void WriteReports(std::ostream& out, std::span<const WeightReport> reports);
std::vector<WeightReport> ReadReports(std::istream& in);

struct LinkageResult {
  std::size_t correct = 0;
  std::size_t total = 0;

  double accuracy() const {
    return total == 0 ? 0.0
                      : static_cast<double>(correct) /
                            static_cast<double>(total);
  }
};

// One simulated round against a timing attacker. Every client schedules
// reports_per_client entries; the attacker knows all timing profiles and
// assigns each observed report to the client whose unshuffled expected
// arrival (response + T/2) is nearest its arrival time.
LinkageResult SimulateTimingLinkage(std::span<const TimingProfile> profiles,
                                    std::size_t reports_per_client,
                                    const ShuffleConfig& config, WaitRule rule,
                                    RandomStream& rng);

// One simulated round against a run-based attacker that assumes consecutive
// arrivals share a sender. `correct` counts adjacent pairs in arrival order
// that really do share one; `total` counts adjacent pairs. Under uniform
// shuffling the expected rate is (d - 1) / (k d - 1).
LinkageResult SimulateAdjacencyLinkage(std::span<const TimingProfile> profiles,
                                       std::size_t reports_per_client,
                                       const ShuffleConfig& config,
                                       WaitRule rule, RandomStream& rng);

}  // namespace ldpfl

#endif  // LDPFL_SHUFFLING_H_
