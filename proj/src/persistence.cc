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

#include "ldpfl/persistence.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ldpfl/error.h"

namespace ldpfl {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double ParseNum(const std::string& s, std::size_t line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kFormat, "metrics line " + std::to_string(line) +
                                      ": bad number '" + s + "'");
}

std::ofstream OpenOut(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
  return out;
}

}  // namespace

void WriteMetricsCsv(std::ostream& out, const FederationRun& run) {
  out << "round,accuracy,clip_rate,budget,reports";
  const std::size_t layers = run.initial.layers.size();
  for (std::size_t l = 0; l < layers; ++l) out << ",c_" << l << ",r_" << l;
  out << "\n";
  for (const auto& s : run.rounds) {
    const auto& m = s.metrics;
    out << s.round << "," << Num(m.accuracy) << "," << Num(m.clip_rate) << ","
        << (std::isinf(m.budget) ? std::string("inf") : Num(m.budget)) << ","
        << m.reports;
    for (const auto& r : m.ranges_used) {
      out << "," << Num(r.center) << "," << Num(r.radius);
    }
    out << "\n";
  }
}

std::vector<MetricsRow> ReadMetricsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("round,accuracy", 0) != 0) {
    throw Error(ErrorCode::kFormat, "metrics CSV header missing");
  }
  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 5 || (cells.size() - 5) % 2 != 0) {
      throw Error(ErrorCode::kFormat,
                  "metrics line " + std::to_string(lineno) + ": bad arity");
    }
    MetricsRow row;
    row.round = static_cast<std::size_t>(ParseNum(cells[0], lineno));
    row.accuracy = ParseNum(cells[1], lineno);
    row.clip_rate = ParseNum(cells[2], lineno);
    row.budget = ParseNum(cells[3], lineno);
    row.reports = static_cast<std::size_t>(ParseNum(cells[4], lineno));
    for (std::size_t i = 5; i < cells.size(); i += 2) {
      row.ranges.push_back(
          {ParseNum(cells[i], lineno), ParseNum(cells[i + 1], lineno)});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json RoundStateToJson(const RoundState& state) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : state.global_weights.layers) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"params", l.params}});
  }
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& r : state.ranges) ranges.push_back({r.center, r.radius});
  const auto& m = state.metrics;
  return {{"round", state.round},
          {"layers", layers},
          {"ranges", ranges},
          {"metrics",
           {{"accuracy", m.accuracy},
            {"clip_rate", m.clip_rate},
            {"budget", std::isinf(m.budget) ? nlohmann::json("inf")
                                            : nlohmann::json(m.budget)},
            {"reports", m.reports}}}};
}

RoundState RoundStateFromJson(const nlohmann::json& j) {
  try {
    RoundState s;
    s.round = j.at("round").get<std::size_t>();
    for (const auto& l : j.at("layers")) {
      DenseLayer layer;
      layer.in = l.at("in").get<std::size_t>();
      layer.out = l.at("out").get<std::size_t>();
      layer.params = l.at("params").get<std::vector<double>>();
      s.global_weights.layers.push_back(std::move(layer));
    }
    s.global_weights.Validate();
    for (const auto& r : j.at("ranges")) {
      s.ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    }
    const auto& m = j.at("metrics");
    s.metrics.accuracy = m.at("accuracy").get<double>();
    s.metrics.clip_rate = m.at("clip_rate").get<double>();
    s.metrics.budget = m.at("budget").is_string()
                           ? std::numeric_limits<double>::infinity()
                           : m.at("budget").get<double>();
    s.metrics.reports = m.at("reports").get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("round state: ") + e.what());
  }
}

void WriteRunDirectory(const std::string& dir, const ExperimentConfig& config,
                       const FederationRun& run) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);
  {
    auto out = OpenOut(root / "config.ini");
    out << SerializeConfig(config);
  }
  {
    auto out = OpenOut(root / "metrics.csv");
    WriteMetricsCsv(out, run);
  }
  if (!run.rounds.empty()) {
    auto out = OpenOut(root / "final_state.json");
    out << RoundStateToJson(run.rounds.back()).dump() << "\n";
  }
}

std::string SummarizeRunDirectory(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream in(root / "metrics.csv");
  if (!in) throw Error(ErrorCode::kIo, "no metrics.csv in " + dir);
  const auto rows = ReadMetricsCsv(in);
  std::ostringstream out;
  out << "run directory: " << dir << "\n";
  if (fs::exists(root / "config.ini")) {
    const ExperimentConfig cfg = LoadConfig((root / "config.ini").string());
    out << "seed " << cfg.federation.seed << ", epsilon "
        << cfg.federation.epsilon << ", clients "
        << cfg.federation.total_clients << ", privacy "
        << (cfg.federation.privacy ? "on" : "off") << ", ranges "
        << RangeModeName(cfg.federation.range.mode) << "\n";
  }
  if (rows.empty()) {
    out << "no rounds recorded\n";
    return out.str();
  }
  double best = 0.0;
  std::size_t best_round = 0;
  double clip = 0.0;
  for (const auto& r : rows) {
    if (r.accuracy > best) {
      best = r.accuracy;
      best_round = r.round;
    }
    clip += r.clip_rate;
  }
  const auto& last = rows.back();
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "rounds %zu\nfinal accuracy %.4f\nbest accuracy %.4f (round "
                "%zu)\nmean clip rate %.4f\nfinal budget %g\n",
                rows.size(), last.accuracy, best, best_round,
                clip / static_cast<double>(rows.size()), last.budget);
  out << buf;
  for (std::size_t l = 0; l < last.ranges.size(); ++l) {
    std::snprintf(buf, sizeof buf, "layer %zu range c=%.6g r=%.6g\n", l,
                  last.ranges[l].center, last.ranges[l].radius);
    out << buf;
  }
  return out.str();
}

}  // namespace ldpfl
