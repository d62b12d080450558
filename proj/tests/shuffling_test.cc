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
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "ldpfl/error.h"

namespace ldpfl {
namespace {

ModelWeights SmallModel(std::uint64_t seed) {
  RandomStream rng(seed);
  const std::size_t sizes[] = {5, 4, 3};
  return MakeMlp(sizes, rng);
}

TEST(Split, RoundTripsThroughReassemble) {
  const ModelWeights w = SmallModel(1);
  auto entries = Split(w);
  EXPECT_EQ(entries.size(), w.parameter_count());
  RandomStream rng(2);
  const auto perm = RandomPermutation(entries.size(), rng);
  std::vector<WeightEntry> shuffled;
  for (auto i : perm) shuffled.push_back(entries[i]);
  EXPECT_EQ(Reassemble(shuffled, w), w);
}

TEST(Reassemble, RejectsDuplicatesAndGaps) {
  const ModelWeights w = SmallModel(1);
  auto entries = Split(w);
  auto dup = entries;
  dup.back() = dup.front();
  try {
    Reassemble(dup, w);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
  }
  entries.pop_back();
  EXPECT_THROW(Reassemble(entries, w), Error);
}

TEST(Schedule, ArrivalsStayInTheCommonWindow) {
  ShuffleConfig cfg;
  cfg.window = 2.0;
  cfg.slowest = 5.0;
  RandomStream rng(3);
  const auto entries = Split(SmallModel(2));
  for (double response : {0.1, 2.5, 5.0}) {
    const auto reports =
        Schedule(entries, TimingProfile{response * 0.6, response * 0.4}, cfg, rng);
    ASSERT_EQ(reports.size(), entries.size());
    for (const auto& r : reports) {
      EXPECT_GE(r.arrival, 5.0);
      EXPECT_LE(r.arrival, 7.0);
    }
  }
}

TEST(Schedule, SlowerThanTsIsASchedulingError) {
  ShuffleConfig cfg;
  cfg.slowest = 1.0;
  RandomStream rng(4);
  try {
    Schedule(Split(SmallModel(1)), TimingProfile{1.0, 0.5}, cfg, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kScheduling);
  }
}

TEST(Schedule, DelaysOffReleasesAtTsAndDrawsNothing) {
  ShuffleConfig cfg;
  cfg.slowest = 3.0;
  cfg.delays = false;
  RandomStream rng(5), untouched(5);
  const auto reports = Schedule(Split(SmallModel(1)), TimingProfile{1, 1}, cfg, rng);
  for (const auto& r : reports) {
    EXPECT_EQ(r.arrival, 3.0);
    EXPECT_EQ(r.tiebreak, 0.0);
  }
  EXPECT_EQ(rng.NextU64(), untouched.NextU64());
}

TEST(Schedule, ValidatesConfig) {
  RandomStream rng(1);
  ShuffleConfig cfg;
  cfg.window = 0.0;
  EXPECT_THROW(Schedule(Split(SmallModel(1)), {}, cfg, rng), Error);
  cfg.window = 1.0;
  cfg.drop_probability = 1.0;
  EXPECT_THROW(Schedule(Split(SmallModel(1)), {}, cfg, rng), Error);
}

TEST(Collect, PreservesTheMultisetPerId) {
  const std::size_t clients = 7;
  ShuffleConfig cfg;
  cfg.slowest = 2.0;
  RandomStream rng(6);
  std::vector<std::vector<WeightReport>> batches;
  std::vector<ModelWeights> models;
  for (std::size_t c = 0; c < clients; ++c) {
    models.push_back(SmallModel(100 + c));
    batches.push_back(Schedule(Split(models.back()), {1.0, 0.5}, cfg, rng));
  }
  const auto collected = Collect(batches);
  EXPECT_EQ(collected.total_reports(), clients * models[0].parameter_count());
  const auto entries = Split(models[0]);
  ASSERT_EQ(collected.ids.size(), entries.size());
  for (std::size_t g = 0; g < entries.size(); ++g) {
    EXPECT_EQ(collected.ids[g], entries[g].id);
    std::vector<double> expected;
    for (const auto& m : models) {
      expected.push_back(m.layers[entries[g].id.layer].params[entries[g].id.offset]);
    }
    auto got = collected.values[g];
    std::sort(expected.begin(), expected.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected);
  }
}

TEST(Collect, DuplicateIdInOneBatchIsAProtocolError) {
  std::vector<std::vector<WeightReport>> batches(1);
  batches[0].push_back({WeightId{0, 1}, 1.0, 0.0, 0.0});
  batches[0].push_back({WeightId{0, 1}, 2.0, 0.0, 0.0});
  try {
    Collect(batches);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
  }
}

TEST(ArrivalOrder, DelaysOffKeepsClientOrder) {
  ShuffleConfig cfg;
  cfg.slowest = 1.0;
  cfg.delays = false;
  RandomStream rng(1);
  std::vector<std::vector<WeightReport>> batches;
  for (int c = 0; c < 3; ++c) {
    std::vector<WeightEntry> e = {{WeightId{0, 0}, double(c)}};
    batches.push_back(Schedule(e, {0.2, 0.2}, cfg, rng));
  }
  const auto collected = Collect(batches);
  EXPECT_EQ(collected.values[0], (std::vector<double>{0.0, 1.0, 2.0}));
}

TEST(BudgetComposition, KnownValues) {
  EXPECT_EQ(BudgetComposition(1.0, 10, 1000, ShuffleMode::kNoShuffle), 10000.0);
  EXPECT_EQ(BudgetComposition(1.0, 10, 1000, ShuffleMode::kModelShuffle), 1000.0);
  EXPECT_EQ(BudgetComposition(1.0, 10, 1000, ShuffleMode::kParameterShuffle), 1.0);
  EXPECT_EQ(BudgetComposition(0.5, 3, 7, ShuffleMode::kNoShuffle), 10.5);
  EXPECT_THROW(BudgetComposition(0.0, 1, 1, ShuffleMode::kNoShuffle), Error);
  EXPECT_THROW(BudgetComposition(1.0, 0, 1, ShuffleMode::kNoShuffle), Error);
}

TEST(ReportIo, RoundTripsExactly) {
  ShuffleConfig cfg;
  cfg.slowest = 2.0;
  RandomStream rng(9);
  const auto reports = Schedule(Split(SmallModel(3)), {1.0, 0.3}, cfg, rng);
  std::stringstream ss;
  WriteReports(ss, reports);
  const auto back = ReadReports(ss);
  ASSERT_EQ(back.size(), reports.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, reports[i].id);
    EXPECT_EQ(back[i].value, reports[i].value);
    EXPECT_EQ(back[i].arrival, reports[i].arrival);
  }
  std::stringstream bad("arrival,layer,offset,value\n1.0,0,zz,3\n");
  try {
    ReadReports(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

TEST(Linkage, AdjacencyRateMatchesRandomInterleaving) {
  const std::size_t k = 10, d = 20;
  RandomStream rng(10);
  std::vector<TimingProfile> profiles(k);
  for (auto& p : profiles) p = {rng.Uniform(0.5, 3.0), rng.Uniform(0.1, 1.0)};
  ShuffleConfig cfg;
  cfg.slowest = SlowestResponse(profiles);
  std::size_t correct = 0, total = 0;
  for (int t = 0; t < 200; ++t) {
    const auto r = SimulateAdjacencyLinkage(profiles, d, cfg,
                                            WaitRule::kWaitForSlowest, rng);
    correct += r.correct;
    total += r.total;
  }
  const double rate = static_cast<double>(correct) / static_cast<double>(total);
  const double expected = (d - 1.0) / (k * d - 1.0);
  const double se = std::sqrt(expected * (1 - expected) / double(total));
  EXPECT_NEAR(rate, expected, 4.0 * se);
}

TEST(Linkage, NoWaitIsLinkableAndWaitIsNot) {
  const std::size_t k = 10;
  RandomStream rng(11);
  std::vector<TimingProfile> profiles(k);
  for (std::size_t i = 0; i < k; ++i) profiles[i] = {0.5 + 1.0 * i, 0.1};
  ShuffleConfig cfg;
  cfg.window = 0.5;
  cfg.slowest = SlowestResponse(profiles);
  const auto none =
      SimulateTimingLinkage(profiles, 50, cfg, WaitRule::kNone, rng);
  const auto wait =
      SimulateTimingLinkage(profiles, 50, cfg, WaitRule::kWaitForSlowest, rng);
  EXPECT_GT(none.accuracy(), 0.9);
  EXPECT_LT(wait.accuracy(), 0.25);
}

TEST(SlowestResponse, PicksMaxAndValidates) {
  const TimingProfile p[] = {{1.0, 0.5}, {0.2, 2.0}, {0.1, 0.1}};
  EXPECT_EQ(SlowestResponse(p), 2.2);
  EXPECT_THROW(SlowestResponse(std::span<const TimingProfile>{}), Error);
}

}  // namespace
}  // namespace ldpfl
