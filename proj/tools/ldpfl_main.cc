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

// ldpfl: command-line front end for the LDP federated learning toolkit.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ldpfl/analysis.h"
#include "ldpfl/config.h"
#include "ldpfl/error.h"
#include "ldpfl/fl_core.h"
#include "ldpfl/kernels.h"
#include "ldpfl/persistence.h"
#include "ldpfl/shuffling.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int ExitFor(const ldpfl::Error& e) {
  using ldpfl::ErrorCode;
  switch (e.code()) {
    case ErrorCode::kIo:
    case ErrorCode::kFormat:
      return kExitIo;
    case ErrorCode::kConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kBudgetTooSmall:
      return kExitUsage;
    default:
      return kExitFailed;
  }
}

struct Common {
  std::string config_path;
  std::string out;
};

ldpfl::ExperimentConfig LoadOrDefault(const Common& c) {
  ldpfl::ExperimentConfig cfg;
  if (!c.config_path.empty()) cfg = ldpfl::LoadConfig(c.config_path);
  if (!c.out.empty()) {
    cfg.output_dir = c.out;
  } else if (const char* env = std::getenv("LDPFL_OUTPUT_DIR")) {
    if (*env) cfg.output_dir = env;
  }
  return cfg;
}

std::ofstream OpenOrThrow(const std::filesystem::path& p) {
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p);
  if (!out) throw ldpfl::Error(ldpfl::ErrorCode::kIo, "cannot write " + p.string());
  return out;
}

int CmdVerify(const Common& common, const std::string& mutate,
              std::size_t threads, bool quick) {
  ldpfl::ExperimentConfig cfg = LoadOrDefault(common);
  ldpfl::SuiteOptions opt;
  opt.seed = cfg.verify.seed;
  opt.threads = threads ? threads : cfg.verify.threads;
  opt.mechanism_checks = cfg.verify.mechanism;
  opt.concentration_checks = cfg.verify.concentration;
  opt.shuffle_checks = cfg.verify.shuffle;
  opt.adaptive_checks = cfg.verify.adaptive && !quick;
  if (mutate == "swapped") {
    opt.variant = ldpfl::Mechanism::Variant::kSwappedProbabilities;
  } else if (mutate == "doubled") {
    opt.variant = ldpfl::Mechanism::Variant::kDoubledCoefficient;
  }
  const auto reports = ldpfl::RunVerificationSuite(opt);
  const auto path = std::filesystem::path(cfg.output_dir) / "verification.jsonl";
  auto out = OpenOrThrow(path);
  bool ok = true;
  for (const auto& r : reports) {
    out << r.ToJson().dump() << "\n";
    ok = ok && r.pass;
  }
  std::cout << ldpfl::SummaryTable(reports);
  std::cout << "reports written to " << path.string() << "\n";
  return ok ? kExitOk : kExitFailed;
}

void PrintRun(const ldpfl::FederationRun& run) {
  for (const auto& s : run.rounds) {
    std::printf("round %3zu  accuracy %.4f  clip %.4f  budget %g\n", s.round,
                s.metrics.accuracy, s.metrics.clip_rate, s.metrics.budget);
  }
}

int CmdRun(const Common& common, bool no_noise, std::size_t threads) {
  ldpfl::ExperimentConfig cfg = LoadOrDefault(common);
  if (no_noise) cfg.federation.privacy = false;
  if (threads) cfg.federation.threads = threads;
  cfg.Validate();
  const auto data = ldpfl::LoadDatasets(cfg.dataset);
  const auto run = ldpfl::RunFederated(cfg.federation, data.train, data.test);
  ldpfl::WriteRunDirectory(cfg.output_dir, cfg, run);
  PrintRun(run);
  std::cout << "run written to " << cfg.output_dir << "\n";
  return kExitOk;
}

int CmdSweep(const Common& common, std::vector<double> epsilons,
             std::size_t threads) {
  ldpfl::ExperimentConfig cfg = LoadOrDefault(common);
  if (!epsilons.empty()) cfg.sweep_epsilons = epsilons;
  if (threads) cfg.federation.threads = threads;
  cfg.Validate();
  const auto data = ldpfl::LoadDatasets(cfg.dataset);
  const std::filesystem::path root(cfg.output_dir);
  auto summary = OpenOrThrow(root / "sweep.csv");
  summary << "epsilon,final_accuracy,best_accuracy\n";
  for (double eps : cfg.sweep_epsilons) {
    ldpfl::ExperimentConfig one = cfg;
    one.federation.epsilon = eps;
    char name[64];
    std::snprintf(name, sizeof name, "eps_%g", eps);
    one.output_dir = (root / name).string();
    const auto run = ldpfl::RunFederated(one.federation, data.train, data.test);
    ldpfl::WriteRunDirectory(one.output_dir, one, run);
    double best = 0.0;
    for (const auto& s : run.rounds) best = std::max(best, s.metrics.accuracy);
    const double last = run.rounds.empty() ? 0.0 : run.rounds.back().metrics.accuracy;
    summary << eps << "," << last << "," << best << "\n";
    std::printf("epsilon %-6g final accuracy %.4f\n", eps, last);
  }
  std::cout << "sweep written to " << root.string() << "\n";
  return kExitOk;
}

int CmdShuffleDemo(std::size_t clients, std::size_t params, double window,
                   std::uint64_t seed) {
  using namespace ldpfl;
  if (clients == 0 || params == 0) {
    throw Error(ErrorCode::kInvalidArgument, "clients and params must be > 0");
  }
  RandomStream prof(DeriveSeed(seed, {0}));
  const auto profiles = MakeTimingProfiles(clients, TimingModel{}, prof);
  ShuffleConfig cfg;
  cfg.window = window;
  cfg.slowest = SlowestResponse(profiles);
  cfg.Validate();
  std::vector<std::vector<WeightReport>> batches;
  for (std::size_t u = 0; u < clients; ++u) {
    RandomStream rng(DeriveSeed(seed, {1, u}));
    std::vector<WeightEntry> entries(params);
    for (std::size_t i = 0; i < params; ++i) {
      entries[i] = {{0, i}, static_cast<double>(u) + rng.Uniform() / 10.0};
    }
    std::printf("client %zu: response %.4f\n", u, profiles[u].response());
    batches.push_back(Schedule(entries, profiles[u], cfg, rng));
  }
  std::printf("T_S %.4f, window [%.4f, %.4f]\n", cfg.slowest, cfg.slowest,
              cfg.slowest + cfg.window);
  const auto order = ArrivalOrder(batches);
  WriteReports(std::cout, order);
  const auto collected = Collect(batches);
  for (std::size_t i = 0; i < collected.ids.size(); ++i) {
    double sum = 0.0;
    for (double v : collected.values[i]) sum += v;
    std::printf("id (%u,%llu): %zu reports, mean %.6f\n", collected.ids[i].layer,
                static_cast<unsigned long long>(collected.ids[i].offset),
                collected.values[i].size(),
                sum / static_cast<double>(collected.values[i].size()));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally differentially private federated learning toolkit"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "Kernel set: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  Common common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", common.config_path, "INI config file");
    cmd->add_option("-o,--out", common.out,
                    "Output directory (else LDPFL_OUTPUT_DIR, else the config)");
  };

  std::size_t threads = 0;
  auto* verify = app.add_subcommand("verify", "Run the verification suite");
  add_common(verify);
  std::string mutate;
  verify->add_option("--mutate", mutate,
                     "Run against a broken mechanism (swapped or doubled)")
      ->expected(0, 1)
      ->default_str("swapped")
      ->check(CLI::IsMember({"", "swapped", "doubled"}));
  bool quick = false;
  verify->add_flag("--quick", quick, "Skip the federated adaptive-range checks");
  verify->add_option("-j,--threads", threads, "Worker threads");

  auto* run = app.add_subcommand("run", "Run one federation");
  add_common(run);
  bool no_noise = false;
  run->add_flag("--no-noise", no_noise, "Disable clipping and perturbation");
  run->add_option("-j,--threads", threads, "Worker threads");

  auto* sweep = app.add_subcommand("sweep", "Run one federation per epsilon");
  add_common(sweep);
  std::vector<double> epsilons;
  sweep->add_option("--epsilons", epsilons, "Epsilon list")->delimiter(',');
  sweep->add_option("-j,--threads", threads, "Worker threads");

  auto* demo = app.add_subcommand("shuffle-demo", "Print a shuffled collect trace");
  std::size_t clients = 4;
  std::size_t params = 3;
  double window = 1.0;
  std::uint64_t seed = 1;
  demo->add_option("--clients", clients, "Number of clients");
  demo->add_option("--params", params, "Parameters per client");
  demo->add_option("--window", window, "Shuffle window T");
  demo->add_option("--seed", seed, "Seed");

  auto* report = app.add_subcommand("report", "Summarize a run directory");
  std::string dir;
  report->add_option("dir", dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (isa == "scalar") {
      ldpfl::simd::SelectIsa(ldpfl::simd::Isa::kScalar);
    } else if (isa == "avx2" && !ldpfl::simd::SelectIsa(ldpfl::simd::Isa::kAvx2)) {
      std::cerr << "error: AVX2 kernels are not available on this machine\n";
      return kExitUsage;
    }
    if (verify->parsed()) {
      if (verify->count("--mutate") && mutate.empty()) mutate = "swapped";
      return CmdVerify(common, mutate, threads, quick);
    }
    if (run->parsed()) return CmdRun(common, no_noise, threads);
    if (sweep->parsed()) return CmdSweep(common, epsilons, threads);
    if (demo->parsed()) return CmdShuffleDemo(clients, params, window, seed);
    if (report->parsed()) {
      std::cout << ldpfl::SummarizeRunDirectory(dir);
      return kExitOk;
    }
  } catch (const ldpfl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}
