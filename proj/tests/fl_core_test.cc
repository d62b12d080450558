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

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fedavg_oracle.h"
#include "ldpfl/error.h"

namespace ldpfl {
namespace {

FederationConfig SmallConfig() {
  FederationConfig c;
  c.total_clients = 10;
  c.rounds = 3;
  c.hidden = {8};
  c.sgd = {0.1, 8, 1};
  c.seed = 17;
  return c;
}

TEST(PartitionData, DisjointCoverWithBalancedSizes) {
  const Dataset data = MakeBlobs(103, 3, 4, 1.0, 1);
  RandomStream rng(2);
  const auto shards = PartitionData(data, 10, rng);
  ASSERT_EQ(shards.size(), 10u);
  std::size_t total = 0;
  std::vector<double> seen;
  for (const auto& s : shards) {
    EXPECT_TRUE(s.size() == 10 || s.size() == 11);
    total += s.size();
    for (std::size_t i = 0; i < s.size(); ++i) seen.push_back(s.row(i)[0]);
  }
  EXPECT_EQ(total, 103u);
  std::vector<double> all;
  for (std::size_t i = 0; i < data.size(); ++i) all.push_back(data.row(i)[0]);
  std::sort(seen.begin(), seen.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(seen, all);
  EXPECT_THROW(PartitionData(data, 200, rng), Error);
}

TEST(RunFederated, NoiseFreeMatchesFedAvgOracle) {
  FederationConfig c = SmallConfig();
  c.privacy = false;
  c.shuffle.delays = false;
  const Dataset train = MakeBlobs(300, 4, 3, 2.0, 1);
  const Dataset test = MakeBlobsHeldOut(100, 4, 3, 2.0, 1);
  const FederationRun run = RunFederated(c, train, test);
  const auto oracle = testing::FedAvgOracle(c, train, run.initial);
  ASSERT_EQ(run.rounds.size(), oracle.size());
  for (std::size_t r = 0; r < oracle.size(); ++r) {
    EXPECT_EQ(run.rounds[r].global_weights, oracle[r]) << "round " << r + 1;
  }
}

TEST(RunFederated, PartialParticipationMatchesOracle) {
  FederationConfig c = SmallConfig();
  c.privacy = false;
  c.shuffle.delays = false;
  c.client_fraction = 0.3;
  const Dataset train = MakeBlobs(300, 4, 3, 2.0, 2);
  const FederationRun run = RunFederated(c, train, Dataset{});
  const auto oracle = testing::FedAvgOracle(c, train, run.initial);
  for (std::size_t r = 0; r < oracle.size(); ++r) {
    EXPECT_EQ(run.rounds[r].global_weights, oracle[r]);
    EXPECT_EQ(run.rounds[r].metrics.reports, 3 * run.initial.parameter_count());
  }
}

TEST(RunFederated, ThreadCountDoesNotChangeResults) {
  FederationConfig c = SmallConfig();
  c.range.mode = RangeMode::kAdaptive;
  const Dataset train = MakeBlobs(300, 4, 3, 2.0, 3);
  const Dataset test = MakeBlobsHeldOut(100, 4, 3, 2.0, 3);
  const auto one = RunFederated(c, train, test);
  c.threads = 4;
  const auto four = RunFederated(c, train, test);
  for (std::size_t r = 0; r < one.rounds.size(); ++r) {
    EXPECT_EQ(one.rounds[r].global_weights, four.rounds[r].global_weights);
    EXPECT_EQ(one.rounds[r].metrics.accuracy, four.rounds[r].metrics.accuracy);
  }
}

TEST(RunFederated, PrivateRunProducesTwoPointAverages) {
  FederationConfig c = SmallConfig();
  c.total_clients = 4;
  c.rounds = 1;
  c.range = {RangeMode::kFixed, 0.0, 0.5, kDefaultRadiusFloor};
  const Dataset train = MakeBlobs(80, 4, 3, 2.0, 4);
  const auto run = RunFederated(c, train, Dataset{});
  // Every aggregated value is a mean of 4 values from {+rk, -rk}.
  const double rk = 0.5 * Coefficient(PrivacyBudget(1.0));
  for (const auto& layer : run.rounds[0].global_weights.layers) {
    for (double v : layer.params) {
      const double units = (v / rk + 1.0) * 2.0;  // number of highs
      EXPECT_NEAR(units, std::round(units), 1e-9);
    }
  }
  EXPECT_EQ(run.rounds[0].metrics.budget, 1.0);
  EXPECT_EQ(run.rounds[0].metrics.ranges_used[0], (Range{0.0, 0.5}));
}

TEST(RunFederated, BudgetAccumulatesWithoutShuffling) {
  FederationConfig c = SmallConfig();
  c.shuffle.delays = false;
  const Dataset train = MakeBlobs(300, 4, 3, 2.0, 5);
  const auto run = RunFederated(c, train, Dataset{});
  const double d = static_cast<double>(run.initial.parameter_count());
  for (std::size_t r = 0; r < run.rounds.size(); ++r) {
    EXPECT_EQ(run.rounds[r].metrics.budget, (r + 1) * d * c.epsilon);
  }
  c.privacy = false;
  EXPECT_TRUE(std::isinf(RunFederated(c, train, Dataset{}).rounds[0].metrics.budget));
}

TEST(RunFederated, DroppedReportsStillAggregate) {
  FederationConfig c = SmallConfig();
  c.shuffle.drop_probability = 0.05;
  const Dataset train = MakeBlobs(300, 4, 3, 2.0, 6);
  const auto run = RunFederated(c, train, Dataset{});
  EXPECT_LT(run.rounds[0].metrics.reports, 10 * run.initial.parameter_count());
}

TEST(RunFederated, DivergentLocalTrainingIsReported) {
  FederationConfig c = SmallConfig();
  c.sgd = {1e300, 4, 3};
  c.range.mode = RangeMode::kAdaptive;
  const Dataset train = MakeBlobs(300, 4, 3, 20.0, 7);
  try {
    RunFederated(c, train, Dataset{});
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDiverged);
  }
}

TEST(AggregateReports, MissingReportIsAProtocolError) {
  ModelWeights shape;
  shape.layers.emplace_back(1, 1);
  CollectedUpdates u;
  u.ids = {WeightId{0, 0}, WeightId{0, 1}};
  u.values = {{1.0, 2.0}, {3.0}};
  try {
    AggregateReports(u, shape, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
  }
  const auto relaxed = AggregateReports(u, shape, 2, false);
  EXPECT_EQ(relaxed.layers[0].params, (std::vector<double>{1.5, 3.0}));
}

TEST(FederationConfig, Validation) {
  FederationConfig c = SmallConfig();
  c.epsilon = 1e-5;
  try {
    c.Validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetTooSmall);
  }
  c = SmallConfig();
  c.client_fraction = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c = SmallConfig();
  c.init_scales = {1.0};
  EXPECT_THROW(c.Validate(), Error);
  c = SmallConfig();
  c.clients_per_round = 11;
  EXPECT_THROW(c.Validate(), Error);
  c = SmallConfig();
  c.client_fraction = 0.25;
  EXPECT_EQ(c.SelectedPerRound(), 3u);
}

}  // namespace
}  // namespace ldpfl
