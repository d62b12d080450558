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

#include "ldpfl/fl_core.h"

#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "ldpfl/error.h"
#include "ldpfl/kernels.h"
#include "ldpfl/parallel.h"

namespace ldpfl {

std::size_t FederationConfig::SelectedPerRound() const {
  if (clients_per_round > 0) return clients_per_round;
  const auto k = static_cast<std::size_t>(
      std::ceil(client_fraction * static_cast<double>(total_clients)));
  return std::max<std::size_t>(k, 1);
}

void FederationConfig::Validate() const {
  if (total_clients == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one client");
  }
  if (clients_per_round == 0 &&
      !(client_fraction > 0.0 && client_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "client fraction must lie in (0, 1]");
  }
  if (SelectedPerRound() > total_clients) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot select more clients per round than exist");
  }
  if (rounds == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one round");
  }
  sgd.Validate();
  if (privacy) (void)PrivacyBudget(epsilon, epsilon_floor);
  if (range.mode == RangeMode::kFixed) (void)Range::Make(range.center, range.radius);
  if (!(range.radius_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius floor must be > 0");
  }
  ShuffleConfig probe = shuffle;
  probe.slowest = 0.0;
  probe.Validate();
  if (timing.local_min < 0.0 || timing.local_max < timing.local_min ||
      timing.comm_min < 0.0 || timing.comm_max < timing.comm_min) {
    throw Error(ErrorCode::kInvalidArgument, "invalid timing model bounds");
  }
  for (std::size_t h : hidden) {
    if (h == 0) throw Error(ErrorCode::kInvalidArgument, "empty hidden layer");
  }
  if (!init_scales.empty() && init_scales.size() != hidden.size() + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "init_scales needs one entry per layer");
  }
  if (threads == 0) {
    throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
  }
}

std::uint64_t StreamSeed(std::uint64_t root, StreamPurpose purpose,
                         std::uint64_t round, std::uint64_t client) {
  return DeriveSeed(root, {static_cast<std::uint64_t>(purpose), round, client});
}

std::vector<Dataset> PartitionData(const Dataset& data, std::size_t n,
                                   RandomStream& rng) {
  if (n == 0 || data.size() < n) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot split " + std::to_string(data.size()) +
                    " samples across " + std::to_string(n) + " clients");
  }
  const auto order = RandomPermutation(data.size(), rng);
  const std::size_t base = data.size() / n;
  const std::size_t extra = data.size() % n;
  std::vector<Dataset> shards;
  shards.reserve(n);
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = base + (i < extra ? 1 : 0);
    shards.push_back(data.Subset(
        std::span<const std::size_t>(order.data() + start, len)));
    start += len;
  }
  return shards;
}

std::vector<TimingProfile> MakeTimingProfiles(std::size_t n,
                                              const TimingModel& model,
                                              RandomStream& rng) {
  std::vector<TimingProfile> profiles(n);
  for (auto& p : profiles) {
    p.t_local = rng.Uniform(model.local_min, model.local_max);
    p.t_comm = rng.Uniform(model.comm_min, model.comm_max);
  }
  return profiles;
}

LocalUpdateResult LocalUpdate(const ModelWeights& global,
                              const RangeVector& ranges,
                              const Dataset& client_data,
                              const SgdConfig& sgd, const Mechanism* mechanism,
                              const TimingProfile& profile,
                              const ShuffleConfig& shuffle,
                              std::uint64_t training_seed,
                              std::uint64_t perturbation_seed,
                              std::uint64_t schedule_seed) {
  if (ranges.size() != global.layers.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "range vector does not match the model's layer count");
  }
  RandomStream train_rng(training_seed);
  ModelWeights local = SgdEpochs(global, client_data, sgd, train_rng);
  for (const auto& layer : local.layers) {
    for (double v : layer.params) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kDiverged,
                    "local training produced a non-finite weight");
      }
    }
  }

  LocalUpdateResult result;
  if (mechanism != nullptr) {
    RandomStream perturb_rng(perturbation_seed);
    const auto& k = simd::Kernels();
    for (std::size_t l = 0; l < local.layers.size(); ++l) {
      auto& params = local.layers[l].params;
      result.clipped += k.clamp(params.data(), params.size(), ranges[l].lower(),
                                ranges[l].upper());
      result.total += params.size();
      mechanism->PerturbInto(params, ranges[l], perturb_rng, params);
    }
  } else {
    result.total = local.parameter_count();
  }

  RandomStream schedule_rng(schedule_seed);
  result.reports = Schedule(Split(local), profile, shuffle, schedule_rng);
  return result;
}

ModelWeights AggregateReports(const CollectedUpdates& collected,
                              const ModelWeights& shape,
                              std::size_t expected_reports,
                              bool require_complete) {
  ModelWeights out = ZerosLike(shape);
  std::size_t filled = 0;
  for (std::size_t g = 0; g < collected.ids.size(); ++g) {
    const WeightId id = collected.ids[g];
    const auto& values = collected.values[g];
    if (id.layer >= out.layers.size() ||
        id.offset >= out.layers[id.layer].params.size()) {
      throw Error(ErrorCode::kProtocol, "report id outside the model shape");
    }
    if (require_complete ? values.size() != expected_reports : values.empty()) {
      throw Error(ErrorCode::kProtocol,
                  "weight (" + std::to_string(id.layer) + ", " +
                      std::to_string(id.offset) + ") has " +
                      std::to_string(values.size()) + " reports, expected " +
                      std::to_string(expected_reports));
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    out.layers[id.layer].params[id.offset] =
        sum / static_cast<double>(values.size());
    ++filled;
  }
  if (filled != shape.parameter_count()) {
    throw Error(ErrorCode::kProtocol,
                std::to_string(shape.parameter_count() - filled) +
                    " weight ids received no reports");
  }
  return out;
}

RoundState CloudRound(const RoundState& state,
                      std::span<const std::vector<WeightReport>> batches,
                      RangePolicy& policy, const Dataset& test,
                      bool require_complete) {
  const CollectedUpdates collected = Collect(batches);
  RoundState next;
  next.round = state.round + 1;
  next.global_weights = AggregateReports(collected, state.global_weights,
                                         batches.size(), require_complete);
  next.metrics.ranges_used = state.ranges;
  next.metrics.reports = collected.total_reports();
  next.ranges = policy.Update(next.global_weights);
  next.metrics.accuracy =
      test.size() == 0 ? 0.0 : Evaluate(next.global_weights, test);
  return next;
}

namespace {

std::vector<std::size_t> LayerSizes(const FederationConfig& config,
                                    const Dataset& train) {
  std::vector<std::size_t> sizes{train.dim};
  sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
  sizes.push_back(train.classes);
  return sizes;
}

}  // namespace

FederationRun RunFederated(const FederationConfig& config, const Dataset& train,
                           const Dataset& test) {
  config.Validate();
  RandomStream init_rng(StreamSeed(config.seed, StreamPurpose::kInit));
  const auto sizes = LayerSizes(config, train);
  return RunFederated(config, train, test,
                      MakeMlp(sizes, init_rng, config.init_scales));
}

FederationRun RunFederated(const FederationConfig& config, const Dataset& train,
                           const Dataset& test, ModelWeights initial) {
  config.Validate();
  train.Validate();
  initial.Validate();
  if (initial.input_dim() != train.dim ||
      initial.class_count() != train.classes) {
    throw Error(ErrorCode::kShapeMismatch,
                "initial model does not match the dataset's dimensions");
  }

  RandomStream partition_rng(StreamSeed(config.seed, StreamPurpose::kPartition));
  const auto shards = PartitionData(train, config.total_clients, partition_rng);
  RandomStream timing_rng(StreamSeed(config.seed, StreamPurpose::kTiming));
  const auto profiles =
      MakeTimingProfiles(config.total_clients, config.timing, timing_rng);

  std::optional<Mechanism> mechanism;
  if (config.privacy) {
    mechanism.emplace(PrivacyBudget(config.epsilon, config.epsilon_floor),
                      config.variant);
  }
  RangePolicy policy(config.range, initial);
  const std::size_t dimension = initial.parameter_count();
  const std::size_t selected_count = config.SelectedPerRound();

  FederationRun run;
  run.initial = initial;
  RoundState state;
  state.round = 0;
  state.global_weights = std::move(initial);
  state.ranges = policy.ranges();

  for (std::size_t round = 1; round <= config.rounds; ++round) {
    RandomStream select_rng(
        StreamSeed(config.seed, StreamPurpose::kSelection, round));
    const auto selected =
        SampleWithoutReplacement(config.total_clients, selected_count, select_rng);

    std::vector<TimingProfile> selected_profiles;
    for (std::size_t c : selected) selected_profiles.push_back(profiles[c]);
    ShuffleConfig shuffle = config.shuffle;
    shuffle.slowest = SlowestResponse(selected_profiles);

    std::vector<LocalUpdateResult> updates(selected.size());
    ParallelFor(selected.size(), config.threads, [&](std::size_t i) {
      const std::size_t c = selected[i];
      updates[i] = LocalUpdate(
          state.global_weights, state.ranges, shards[c], config.sgd,
          mechanism ? &*mechanism : nullptr, profiles[c], shuffle,
          StreamSeed(config.seed, StreamPurpose::kTraining, round, c),
          StreamSeed(config.seed, StreamPurpose::kPerturbation, round, c),
          StreamSeed(config.seed, StreamPurpose::kSchedule, round, c));
    });

    std::vector<std::vector<WeightReport>> batches;
    batches.reserve(updates.size());
    std::size_t clipped = 0;
    std::size_t total = 0;
    for (auto& u : updates) {
      clipped += u.clipped;
      total += u.total;
      batches.push_back(std::move(u.reports));
    }

    RoundState next = CloudRound(state, batches, policy, test,
                                 config.shuffle.drop_probability == 0.0);
    next.metrics.clip_rate =
        total == 0 ? 0.0
                   : static_cast<double>(clipped) / static_cast<double>(total);
    if (!config.privacy) {
      next.metrics.budget = std::numeric_limits<double>::infinity();
    } else {
      next.metrics.budget = BudgetComposition(
          config.epsilon, round, dimension,
          config.shuffle.delays ? ShuffleMode::kParameterShuffle
                                : ShuffleMode::kNoShuffle);
    }
    run.rounds.push_back(next);
    state = std::move(next);
  }
  return run;
}

}  // namespace ldpfl
