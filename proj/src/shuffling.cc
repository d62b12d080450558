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

#include "ldpfl/shuffling.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "ldpfl/error.h"

namespace ldpfl {
namespace {

bool ArrivesBefore(const WeightReport& a, const WeightReport& b) {
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.tiebreak < b.tiebreak;
}

struct OwnedReport {
  WeightReport report;
  std::size_t owner;
};

std::vector<OwnedReport> SimulateOwnedRound(
    std::span<const TimingProfile> profiles, std::size_t reports_per_client,
    const ShuffleConfig& config, WaitRule rule, RandomStream& rng) {
  std::vector<WeightEntry> entries(reports_per_client);
  for (std::size_t j = 0; j < reports_per_client; ++j) {
    entries[j].id = WeightId{0, j};
  }
  std::vector<OwnedReport> merged;
  merged.reserve(profiles.size() * reports_per_client);
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (const auto& r : Schedule(entries, profiles[i], config, rng, rule)) {
      merged.push_back({r, i});
    }
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const OwnedReport& a, const OwnedReport& b) {
                     return ArrivesBefore(a.report, b.report);
                   });
  return merged;
}

}  // namespace

void ShuffleConfig::Validate() const {
  if (!(window > 0.0) || !std::isfinite(window)) {
    throw Error(ErrorCode::kInvalidArgument, "shuffle window must be > 0");
  }
  if (!(slowest >= 0.0) || !(jitter >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "T_S and jitter must be non-negative");
  }
  if (!(drop_probability >= 0.0 && drop_probability < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "drop probability must lie in [0, 1)");
  }
}

double SlowestResponse(std::span<const TimingProfile> profiles) {
  if (profiles.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no client timing profiles");
  }
  double slowest = 0.0;
  for (const auto& p : profiles) {
    if (!(p.t_local >= 0.0) || !(p.t_comm >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "timing profile entries must be non-negative");
    }
    slowest = std::max(slowest, p.response());
  }
  return slowest;
}

std::vector<WeightEntry> Split(const ModelWeights& weights) {
  std::vector<WeightEntry> entries;
  entries.reserve(weights.parameter_count());
  for (std::size_t l = 0; l < weights.layers.size(); ++l) {
    const auto& params = weights.layers[l].params;
    for (std::size_t j = 0; j < params.size(); ++j) {
      entries.push_back({WeightId{static_cast<std::uint32_t>(l), j}, params[j]});
    }
  }
  return entries;
}

ModelWeights Reassemble(std::span<const WeightEntry> entries,
                        const ModelWeights& shape) {
  ModelWeights out = ZerosLike(shape);
  std::vector<std::vector<bool>> seen;
  for (const auto& layer : out.layers) seen.emplace_back(layer.params.size());
  for (const auto& e : entries) {
    if (e.id.layer >= out.layers.size() ||
        e.id.offset >= out.layers[e.id.layer].params.size()) {
      throw Error(ErrorCode::kProtocol, "entry id outside model shape");
    }
    if (seen[e.id.layer][e.id.offset]) {
      throw Error(ErrorCode::kProtocol, "duplicate entry id");
    }
    seen[e.id.layer][e.id.offset] = true;
    out.layers[e.id.layer].params[e.id.offset] = e.value;
  }
  for (const auto& s : seen) {
    if (std::find(s.begin(), s.end(), false) != s.end()) {
      throw Error(ErrorCode::kProtocol, "missing entry id during reassembly");
    }
  }
  return out;
}

std::vector<WeightReport> Schedule(std::span<const WeightEntry> entries,
                                   const TimingProfile& profile,
                                   const ShuffleConfig& config,
                                   RandomStream& rng, WaitRule rule) {
  config.Validate();
  const double response = profile.response();
  if (rule == WaitRule::kWaitForSlowest && response > config.slowest) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "client response %.6g s exceeds T_S = %.6g s; T_S was "
                  "misestimated",
                  response, config.slowest);
    throw Error(ErrorCode::kScheduling, buf);
  }

  std::vector<WeightReport> reports;
  reports.reserve(entries.size());
  if (!config.delays) {
    const double release =
        rule == WaitRule::kWaitForSlowest ? config.slowest : response;
    for (const auto& e : entries) reports.push_back({e.id, e.value, release, 0.0});
    return reports;
  }

  double window_open = response;
  if (rule == WaitRule::kWaitForSlowest) {
    double estimate = config.slowest;
    if (config.jitter > 0.0) {
      estimate += rng.Uniform(-config.jitter, config.jitter);
    }
    // Waiting T_S - response after finishing puts the window at T_S.
    window_open = std::max(response, estimate);
  }
  for (const auto& e : entries) {
    const double arrival = window_open + rng.Uniform(0.0, config.window);
    const double tiebreak = rng.Uniform();
    if (config.drop_probability > 0.0 &&
        rng.Uniform() < config.drop_probability) {
      continue;
    }
    reports.push_back({e.id, e.value, arrival, tiebreak});
  }
  return reports;
}

std::vector<WeightReport> ArrivalOrder(
    std::span<const std::vector<WeightReport>> batches) {
  std::size_t total = 0;
  std::vector<WeightId> ids;
  for (const auto& batch : batches) {
    ids.clear();
    for (const auto& r : batch) ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw Error(ErrorCode::kProtocol,
                  "a client batch reports the same weight id twice");
    }
    total += batch.size();
  }
  std::vector<WeightReport> merged;
  merged.reserve(total);
  for (const auto& batch : batches) {
    merged.insert(merged.end(), batch.begin(), batch.end());
  }
  std::stable_sort(merged.begin(), merged.end(), ArrivesBefore);
  return merged;
}

std::size_t CollectedUpdates::total_reports() const {
  std::size_t total = 0;
  for (const auto& v : values) total += v.size();
  return total;
}

CollectedUpdates Collect(std::span<const std::vector<WeightReport>> batches) {
  const auto observed = ArrivalOrder(batches);
  std::map<WeightId, std::vector<double>> groups;
  for (const auto& r : observed) groups[r.id].push_back(r.value);
  CollectedUpdates out;
  out.ids.reserve(groups.size());
  out.values.reserve(groups.size());
  for (auto& [id, values] : groups) {
    out.ids.push_back(id);
    out.values.push_back(std::move(values));
  }
  return out;
}

const char* ShuffleModeName(ShuffleMode mode) {
  switch (mode) {
    case ShuffleMode::kNoShuffle: return "none";
    case ShuffleMode::kModelShuffle: return "model";
    case ShuffleMode::kParameterShuffle: return "parameter";
  }
  return "unknown";
}

double BudgetComposition(double epsilon, std::size_t rounds,
                         std::size_t dimension, ShuffleMode mode) {
  if (!(epsilon > 0.0) || rounds == 0 || dimension == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "budget composition needs positive epsilon, rounds, dimension");
  }
  switch (mode) {
    case ShuffleMode::kNoShuffle:
      return static_cast<double>(rounds) * static_cast<double>(dimension) *
             epsilon;
    case ShuffleMode::kModelShuffle:
      return static_cast<double>(dimension) * epsilon;
    case ShuffleMode::kParameterShuffle:
      return epsilon;
  }
  return epsilon;
}

void WriteReports(std::ostream& out, std::span<const WeightReport> reports) {
  out << "arrival,layer,offset,value\n";
  char buf[128];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%.17g,%u,%llu,%.17g\n", r.arrival,
                  static_cast<unsigned>(r.id.layer),
                  static_cast<unsigned long long>(r.id.offset), r.value);
    out << buf;
  }
}

std::vector<WeightReport> ReadReports(std::istream& in) {
  std::vector<WeightReport> reports;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("arrival", 0) == 0) continue;
    WeightReport r;
    unsigned layer = 0;
    unsigned long long offset = 0;
    int consumed = 0;
    if (std::sscanf(line.c_str(), "%lf,%u,%llu,%lf%n", &r.arrival, &layer,
                    &offset, &r.value, &consumed) != 4 ||
        static_cast<std::size_t>(consumed) != line.size()) {
      throw Error(ErrorCode::kFormat,
                  "malformed report on line " + std::to_string(line_no));
    }
    r.id = WeightId{layer, offset};
    reports.push_back(r);
  }
  return reports;
}

LinkageResult SimulateTimingLinkage(std::span<const TimingProfile> profiles,
                                    std::size_t reports_per_client,
                                    const ShuffleConfig& config, WaitRule rule,
                                    RandomStream& rng) {
  const auto merged =
      SimulateOwnedRound(profiles, reports_per_client, config, rule, rng);
  LinkageResult result;
  for (const auto& o : merged) {
    std::size_t guess = 0;
    double best = INFINITY;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const double expected = profiles[i].response() + 0.5 * config.window;
      const double gap = std::abs(o.report.arrival - expected);
      if (gap < best) {
        best = gap;
        guess = i;
      }
    }
    result.correct += guess == o.owner ? 1 : 0;
    ++result.total;
  }
  return result;
}

LinkageResult SimulateAdjacencyLinkage(std::span<const TimingProfile> profiles,
                                       std::size_t reports_per_client,
                                       const ShuffleConfig& config,
                                       WaitRule rule, RandomStream& rng) {
  const auto merged =
      SimulateOwnedRound(profiles, reports_per_client, config, rule, rng);
  LinkageResult result;
  for (std::size_t i = 1; i < merged.size(); ++i) {
    result.correct += merged[i].owner == merged[i - 1].owner ? 1 : 0;
    ++result.total;
  }
  return result;
}

}  // namespace ldpfl
