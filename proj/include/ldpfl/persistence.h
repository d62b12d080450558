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

#ifndef LDPFL_PERSISTENCE_H_
#define LDPFL_PERSISTENCE_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldpfl/config.h"
#include "ldpfl/fl_core.h"

namespace ldpfl {

// One parsed row of a metrics CSV.
struct MetricsRow {
  std::size_t round = 0;
  double accuracy = 0.0;
  double clip_rate = 0.0;
  double budget = 0.0;
  std::size_t reports = 0;
  RangeVector ranges;
};

// Header "round,accuracy,clip_rate,budget,reports,c_0,r_0,c_1,r_1,..." then
// one row per round; doubles with 17 significant digits.
void WriteMetricsCsv(std::ostream& out, const FederationRun& run);
std::vector<MetricsRow> ReadMetricsCsv(std::istream& in);

nlohmann::json RoundStateToJson(const RoundState& state);
RoundState RoundStateFromJson(const nlohmann::json& j);

// Run directory layout: config.ini (snapshot incl. seed), metrics.csv and
// final_state.json. Creates the directory; failures throw kIo.
void WriteRunDirectory(const std::string& dir, const ExperimentConfig& config,
                       const FederationRun& run);

// Text summary of a run directory: final and best accuracy, mean clip rate,
// final budget and ranges.
std::string SummarizeRunDirectory(const std::string& dir);

}  // namespace ldpfl

#endif  // LDPFL_PERSISTENCE_H_
