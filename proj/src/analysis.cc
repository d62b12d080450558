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

#include "ldpfl/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "ldpfl/error.h"
#include "ldpfl/parallel.h"
#include "ldpfl/shuffling.h"
#include "ldpfl/stats.h"

namespace ldpfl {
namespace {

constexpr std::size_t kChunk = std::size_t{1} << 15;

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

nlohmann::json MechanismJson(const Mechanism& m) {
  return {{"epsilon", m.budget().epsilon()},
          {"variant", VariantName(m.variant())}};
}

nlohmann::json RangeJson(const Range& r) {
  return {{"center", r.center}, {"radius", r.radius}};
}

// Per-repetition sums of the perturbed reports of clients holding `w` with
// radii `radii`. Client u draws from its own stream.
std::vector<double> RepetitionMeans(const Mechanism& mechanism,
                                    std::span<const double> w,
                                    std::span<const double> radii,
                                    double center, std::size_t repetitions,
                                    std::uint64_t seed) {
  std::vector<double> sums(repetitions, 0.0);
  std::vector<double> buf(repetitions);
  for (std::size_t u = 0; u < w.size(); ++u) {
    RandomStream rng(DeriveSeed(seed, {u}));
    const Range range{center, radii[u]};
    std::fill(buf.begin(), buf.end(), w[u]);
    mechanism.PerturbInto(buf, range, rng, buf);
    for (std::size_t t = 0; t < repetitions; ++t) sums[t] += buf[t];
  }
  const double n = static_cast<double>(w.size());
  for (double& s : sums) s /= n;
  return sums;
}

std::vector<WeightEntry> SyntheticEntries(std::size_t count,
                                          RandomStream& rng) {
  std::vector<WeightEntry> entries(count);
  for (std::size_t i = 0; i < count; ++i) {
    entries[i].id = {static_cast<std::uint32_t>(i % 3), i / 3};
    entries[i].value = rng.Uniform(-1.0, 1.0);
  }
  return entries;
}

struct BlobData {
  Dataset train;
  Dataset test;
};

BlobData MakeSetupData(const AdaptiveGainSetup& setup, std::uint64_t seed) {
  const std::uint64_t data_seed = DeriveSeed(seed, {1});
  return {MakeBlobs(setup.samples, setup.dim, setup.classes, setup.separation,
                    data_seed),
          MakeBlobsHeldOut(setup.test_samples, setup.dim, setup.classes,
                           setup.separation, data_seed)};
}

FederationConfig SetupConfig(const AdaptiveGainSetup& setup,
                             std::uint64_t seed, RangeConfig range) {
  FederationConfig cfg;
  cfg.total_clients = setup.clients;
  cfg.client_fraction = 1.0;
  cfg.rounds = setup.rounds;
  cfg.sgd = setup.sgd;
  cfg.epsilon = setup.epsilon;
  cfg.variant = setup.variant;
  cfg.range = range;
  cfg.hidden = setup.hidden;
  cfg.init_scales = setup.init_scales;
  cfg.seed = DeriveSeed(seed, {2});
  return cfg;
}

double FinalAccuracy(const FederationRun& run) {
  return run.rounds.empty() ? 0.0 : run.rounds.back().metrics.accuracy;
}

// A run whose local training blows up scores 0; the caller's comparison then
// fails instead of the whole suite aborting.
double TrainedAccuracy(const FederationConfig& config, const Dataset& train,
                       const Dataset& test) {
  try {
    return FinalAccuracy(RunFederated(config, train, test));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDiverged) throw;
    return 0.0;
  }
}

nlohmann::json SetupJson(const AdaptiveGainSetup& s) {
  return {{"hidden", s.hidden},
          {"init_scales", s.init_scales},
          {"epsilon", s.epsilon},
          {"clients", s.clients},
          {"rounds", s.rounds},
          {"lr", s.sgd.learning_rate},
          {"batch", s.sgd.batch_size},
          {"epochs", s.sgd.local_epochs},
          {"samples", s.samples},
          {"dim", s.dim},
          {"classes", s.classes},
          {"separation", s.separation},
          {"variant", VariantName(s.variant)}};
}

template <typename... Args>
std::string Fmt(const char* fmt, Args... args) {
  char buf[320];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

}  // namespace

nlohmann::json VerificationReport::ToJson() const {
  return {{"property", property},
          {"theoretical", theoretical},
          {"empirical", empirical},
          {"ci", {ci_low, ci_high}},
          {"samples", samples},
          {"verdict", pass ? "pass" : "fail"},
          {"rule", rule},
          {"note", note},
          {"config", config}};
}

VerificationReport VerifyBias(const Mechanism& mechanism, double w,
                              const Range& range, std::size_t samples,
                              std::uint64_t seed) {
  Require(samples >= 10000, "verify_bias needs at least 1e4 samples");
  const double var = MechanismVariance(w, range, mechanism.budget());
  RandomStream rng(seed);
  std::vector<double> buf(std::min(samples, kChunk));
  double sum = 0.0;
  for (std::size_t done = 0; done < samples;) {
    const std::size_t m = std::min(buf.size(), samples - done);
    std::span<double> part(buf.data(), m);
    std::fill(part.begin(), part.end(), w);
    mechanism.PerturbInto(part, range, rng, part);
    for (double v : part) sum += v;
    done += m;
  }
  const double mean = sum / static_cast<double>(samples);
  const double gate =
      Tolerances::kBiasSigmas * std::sqrt(var / static_cast<double>(samples));

  VerificationReport r;
  r.property = "bias";
  r.theoretical = w;
  r.empirical = mean;
  r.ci_low = w - gate;
  r.ci_high = w + gate;
  r.samples = samples;
  r.pass = std::abs(mean - w) <= gate;
  r.rule = "|mean - w| <= 4 sqrt(Var(w) / N)";
  r.config = {{"w", w},
              {"range", RangeJson(range)},
              {"mechanism", MechanismJson(mechanism)},
              {"samples", samples},
              {"seed", seed}};
  return r;
}

std::size_t RequiredVarianceSamples(double w, const Range& range,
                                    const PrivacyBudget& budget) {
  const double theo = MechanismVariance(w, range, budget);
  if (!(theo > 0.0)) return 0;
  const double k = Coefficient(budget);
  const double a = (range.center + range.radius * k - w);
  const double b = (range.center - range.radius * k - w);
  const double p = HighOutputProbability(w, range, budget);
  const double spread = a * a - b * b;
  const double var_y = p * (1.0 - p) * spread * spread;
  const double z = Tolerances::kVarianceSigmas /
                   (Tolerances::kVarianceRelative * theo);
  return static_cast<std::size_t>(std::ceil(var_y * z * z));
}

VerificationReport VerifyVariance(const Mechanism& mechanism, double w,
                                  const Range& range, std::size_t samples,
                                  std::uint64_t seed) {
  Require(samples >= 10000, "verify_variance needs at least 1e4 samples");
  const PrivacyBudget& budget = mechanism.budget();
  const double theo = MechanismVariance(w, range, budget);
  const double bound = MechanismVarianceBound(range, budget);
  const std::size_t n =
      std::max(samples, RequiredVarianceSamples(w, range, budget));

  RandomStream rng(seed);
  std::vector<double> buf(std::min(n, kChunk));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t done = 0; done < n;) {
    const std::size_t m = std::min(buf.size(), n - done);
    std::span<double> part(buf.data(), m);
    std::fill(part.begin(), part.end(), w);
    mechanism.PerturbInto(part, range, rng, part);
    for (double v : part) {
      const double e = (v - w) * (v - w);
      sum += e;
      sum_sq += e * e;
    }
    done += m;
  }
  const double dn = static_cast<double>(n);
  const double mse = sum / dn;
  const double se = std::sqrt(std::max(sum_sq / dn - mse * mse, 0.0) / dn);

  VerificationReport r;
  r.property = "variance";
  r.theoretical = theo;
  r.empirical = mse;
  r.ci_low = mse - 1.96 * se;
  r.ci_high = mse + 1.96 * se;
  r.samples = n;
  const bool within =
      std::abs(mse - theo) <= Tolerances::kVarianceRelative * theo;
  const bool bounded =
      mse <= (1.0 + Tolerances::kVarianceBoundSlack) * bound;
  r.pass = within && bounded;
  r.rule =
      "|E[(M(w) - w)^2] - (r^2 k^2 - (w - c)^2)| <= 0.01 theoretical and "
      "<= 1.01 r^2 k^2";
  r.note = Fmt("bound r^2 k^2 = %.9g; requested %.0f samples", bound,
               static_cast<double>(samples));
  r.config = {{"w", w},
              {"range", RangeJson(range)},
              {"mechanism", MechanismJson(mechanism)},
              {"samples", n},
              {"requested_samples", samples},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyMeanVariance(const Mechanism& mechanism,
                                      std::span<const double> radii,
                                      std::span<const double> offsets,
                                      std::size_t repetitions,
                                      std::uint64_t seed, double center) {
  Require(!radii.empty(), "no clients");
  Require(radii.size() == offsets.size(), "radii/offsets length mismatch");
  Require(repetitions >= 2, "need at least two repetitions");
  const std::size_t n = radii.size();
  std::vector<double> w(n);
  double exact = 0.0;
  const double k = Coefficient(mechanism.budget());
  for (std::size_t u = 0; u < n; ++u) {
    Require(offsets[u] >= -1.0 && offsets[u] <= 1.0, "offset outside [-1, 1]");
    w[u] = center + offsets[u] * radii[u];
    const double d = offsets[u] * radii[u];
    exact += radii[u] * radii[u] * k * k - d * d;
  }
  exact /= static_cast<double>(n) * static_cast<double>(n);
  const double truth = stats::Mean(w);
  const VarianceBounds bounds = MeanVarianceBounds(radii, mechanism.budget());

  const std::vector<double> means =
      RepetitionMeans(mechanism, w, radii, center, repetitions, seed);
  std::vector<double> sq(repetitions);
  for (std::size_t t = 0; t < repetitions; ++t) {
    sq[t] = (means[t] - truth) * (means[t] - truth);
  }
  const double emp = stats::Mean(sq);
  const double se =
      std::sqrt(stats::SampleVariance(sq) / static_cast<double>(repetitions));

  VerificationReport r;
  r.property = "mean_variance";
  r.theoretical = bounds.upper;
  r.empirical = emp;
  r.ci_low = emp - 1.96 * se;
  r.ci_high = emp + 1.96 * se;
  r.samples = repetitions;
  r.pass = emp >= Tolerances::kMeanVarianceLowerCushion * bounds.lower &&
           emp <= Tolerances::kMeanVarianceUpperCushion * bounds.upper;
  r.rule = "0.9 lower <= E[(mean - true mean)^2] <= 1.1 upper";
  r.note = Fmt("lower %.9g, upper %.9g, exact %.9g", bounds.lower,
               bounds.upper, exact);
  r.config = {{"clients", n},
              {"center", center},
              {"radius_min", *std::min_element(radii.begin(), radii.end())},
              {"radius_max", *std::max_element(radii.begin(), radii.end())},
              {"mechanism", MechanismJson(mechanism)},
              {"repetitions", repetitions},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyConcentration(const Mechanism& mechanism,
                                       double radius,
                                       std::span<const double> offsets,
                                       double beta, std::size_t repetitions,
                                       std::uint64_t seed) {
  Require(!offsets.empty(), "no clients");
  Require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  Require(repetitions >= 1, "need repetitions");
  const std::size_t n = offsets.size();
  const double lambda =
      ConcentrationRadius(radius, mechanism.budget(), n, beta);
  std::vector<double> w(n);
  for (std::size_t u = 0; u < n; ++u) w[u] = offsets[u] * radius;
  const std::vector<double> radii(n, radius);
  const double truth = stats::Mean(w);
  const std::vector<double> means =
      RepetitionMeans(mechanism, w, radii, 0.0, repetitions, seed);
  std::size_t exceed = 0;
  for (double m : means) exceed += std::abs(m - truth) >= lambda ? 1 : 0;
  const double reps = static_cast<double>(repetitions);
  const double freq = static_cast<double>(exceed) / reps;
  const double gate =
      beta + Tolerances::kExceedanceSigmas * std::sqrt(beta * (1 - beta) / reps);

  VerificationReport r;
  r.property = "concentration";
  r.theoretical = beta;
  r.empirical = freq;
  r.ci_low = 0.0;
  r.ci_high = gate;
  r.samples = repetitions;
  r.pass = freq <= gate;
  r.rule = "Pr[|mean - true mean| >= lambda] <= beta + 3 sqrt(beta(1-beta)/R)";
  r.note = Fmt("lambda %.9g", lambda);
  r.config = {{"clients", n},
              {"radius", radius},
              {"beta", beta},
              {"lambda", lambda},
              {"mechanism", MechanismJson(mechanism)},
              {"repetitions", repetitions},
              {"seed", seed}};
  return r;
}

std::vector<double> GoldenOffsets(std::size_t n, double lo, double hi) {
  const double phi = 0.6180339887498949;
  std::vector<double> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    const double f = std::fmod(static_cast<double>(u + 1) * phi, 1.0);
    out[u] = lo + (hi - lo) * f;
  }
  return out;
}

VerificationReport VerifyConcentrationScaling(const Mechanism& mechanism,
                                              double radius, std::size_t n,
                                              double beta,
                                              std::size_t repetitions,
                                              std::uint64_t seed) {
  Require(n >= 1, "no clients");
  Require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  Require(repetitions >= 100, "need at least 100 repetitions");
  auto quantile = [&](std::size_t clients, std::uint64_t s) {
    std::vector<double> radii(clients);
    for (std::size_t u = 0; u < clients; ++u) {
      radii[u] = radius * (0.5 + (static_cast<double>(u) + 0.5) /
                                     static_cast<double>(clients));
    }
    const std::vector<double> off = GoldenOffsets(clients, 0.0, 1.0);
    std::vector<double> w(clients);
    for (std::size_t u = 0; u < clients; ++u) w[u] = off[u] * radii[u];
    const double truth = stats::Mean(w);
    std::vector<double> dev =
        RepetitionMeans(mechanism, w, radii, 0.0, repetitions, s);
    for (double& d : dev) d = std::abs(d - truth);
    return stats::Quantile(std::move(dev), 1.0 - beta);
  };
  const double q1 = quantile(n, DeriveSeed(seed, {1}));
  const double q4 = quantile(4 * n, DeriveSeed(seed, {4}));
  const double ratio = q4 / q1;
  const double tol = Tolerances::kQuantileHalvingRelative;

  VerificationReport r;
  r.property = "concentration_scaling";
  r.theoretical = 0.5;
  r.empirical = ratio;
  r.ci_low = 0.5 * (1.0 - tol);
  r.ci_high = 0.5 * (1.0 + tol);
  r.samples = repetitions;
  r.pass = std::abs(ratio - 0.5) <= 0.5 * tol;
  r.rule = "q_{1-beta}(4n) / q_{1-beta}(n) within 10% of 1/2";
  r.note = Fmt("quantile at n %.9g, at 4n %.9g", q1, q4);
  r.config = {{"clients", n},
              {"radius", radius},
              {"beta", beta},
              {"mechanism", MechanismJson(mechanism)},
              {"repetitions", repetitions},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyLdp(const Mechanism& mechanism, const Range& range,
                             std::size_t samples, std::uint64_t seed) {
  Require(samples >= 1, "need samples");
  const PrivacyBudget& budget = mechanism.budget();
  const double eps = budget.epsilon();
  const double target = std::exp(eps);
  const double analytic = LdpRatio(budget, range);
  const bool analytic_ok =
      std::abs(analytic - target) <= Tolerances::kLdpAnalyticRelative * target;

  const double k = Coefficient(budget);
  const double hi = range.center + range.radius * k;
  const double lo = range.center - range.radius * k;
  const double ns = static_cast<double>(samples);
  const double p_top = HighOutputProbability(range.upper(), range, budget);
  const double p_bottom = HighOutputProbability(range.lower(), range, budget);
  const bool feasible = ns * p_bottom >= Tolerances::kLdpMinExpectedCount;

  VerificationReport r;
  r.property = "ldp";
  r.theoretical = target;
  r.samples = 2 * samples;
  r.rule =
      "|ratio - e^eps| <= 1e-12 e^eps analytically; outputs only c +- r k; "
      "endpoint high-output ratio within 3 SE of e^eps, or when the rare "
      "count is too small, high-output rate at c + r within 4 SE";

  std::size_t high[2] = {0, 0};
  std::size_t off_support = 0;
  const double inputs[2] = {range.upper(), range.lower()};
  std::vector<double> buf(std::min(samples, kChunk));
  for (int side = 0; side < 2; ++side) {
    RandomStream rng(DeriveSeed(seed, {static_cast<std::uint64_t>(side)}));
    for (std::size_t done = 0; done < samples;) {
      const std::size_t m = std::min(buf.size(), samples - done);
      std::span<double> part(buf.data(), m);
      std::fill(part.begin(), part.end(), inputs[side]);
      mechanism.PerturbInto(part, range, rng, part);
      for (double v : part) {
        if (v == hi) {
          ++high[side];
        } else if (v != lo) {
          ++off_support;
        }
      }
      done += m;
    }
  }
  const bool support_ok = off_support == 0;
  const double p1 = static_cast<double>(high[0]) / ns;
  const double p2 = static_cast<double>(high[1]) / ns;
  bool empirical_ok = true;
  if (feasible) {
    const double ratio = p2 > 0.0 ? p1 / p2 : INFINITY;
    const double se = target * std::sqrt((1.0 - p_top) / (ns * p_top) +
                                         (1.0 - p_bottom) / (ns * p_bottom));
    const double gate = Tolerances::kLdpSigmas * se;
    empirical_ok = std::abs(ratio - target) <= gate;
    r.empirical = ratio;
    r.ci_low = target - gate;
    r.ci_high = target + gate;
    const double low_ratio = (1.0 - p2) / (1.0 - p1);
    r.note = Fmt("analytic %.17g; low-output ratio %.9g; off-support %.0f",
                 analytic, low_ratio, static_cast<double>(off_support));
  } else {
    const double gate = Tolerances::kLdpEndpointSigmas *
                        std::sqrt(p_top * (1.0 - p_top) / ns);
    empirical_ok = std::abs(p1 - p_top) <= gate;
    r.empirical = analytic;
    r.ci_low = r.ci_high = target;
    r.note = Fmt(
        "analytic %.17g; histogram skipped: expected rare count %.3g < 100; "
        "high-output rate at c + r %.9g vs %.9g; off-support %.0f",
        analytic, ns * p_bottom, p1, p_top, static_cast<double>(off_support));
  }
  r.pass = analytic_ok && support_ok && empirical_ok;
  r.config = {{"range", RangeJson(range)},
              {"mechanism", MechanismJson(mechanism)},
              {"samples_per_endpoint", samples},
              {"empirical_part", feasible},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyArrivalUniformity(std::size_t clients,
                                           std::size_t reports_per_client,
                                           std::uint64_t seed) {
  Require(clients >= 1 && reports_per_client >= 1, "empty round");
  RandomStream prof_rng(DeriveSeed(seed, {0}));
  const auto profiles = MakeTimingProfiles(clients, TimingModel{}, prof_rng);
  ShuffleConfig cfg;
  cfg.window = 1.0;
  cfg.slowest = SlowestResponse(profiles);
  std::vector<double> pooled;
  pooled.reserve(clients * reports_per_client);
  for (std::size_t u = 0; u < clients; ++u) {
    RandomStream rng(DeriveSeed(seed, {1, u}));
    const auto entries = SyntheticEntries(reports_per_client, rng);
    for (const auto& rep : Schedule(entries, profiles[u], cfg, rng)) {
      pooled.push_back(rep.arrival - cfg.slowest);
    }
  }
  const double d = stats::KsUniformStatistic(pooled, 0.0, cfg.window);
  const double p = stats::KsPValue(d, pooled.size());

  VerificationReport r;
  r.property = "arrival_uniformity";
  r.theoretical = Tolerances::kKsAlpha;
  r.empirical = p;
  r.ci_low = 0.0;
  r.ci_high = d;
  r.samples = pooled.size();
  r.pass = p >= Tolerances::kKsAlpha;
  r.rule = "KS p-value of (arrival - T_S) vs Uniform(0, T) >= 0.01";
  r.note = Fmt("KS statistic %.6g", d);
  r.config = {{"clients", clients},
              {"reports_per_client", reports_per_client},
              {"window", cfg.window},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyTimingLinkage(std::size_t clients,
                                       std::size_t reports_per_client,
                                       std::size_t trials,
                                       std::uint64_t seed) {
  Require(clients >= 2 && reports_per_client >= 1 && trials >= 1,
          "degenerate linkage experiment");
  LinkageResult shuffled;
  LinkageResult baseline;
  for (std::size_t t = 0; t < trials; ++t) {
    RandomStream prof_rng(DeriveSeed(seed, {t, 0}));
    const auto profiles = MakeTimingProfiles(clients, TimingModel{}, prof_rng);
    ShuffleConfig cfg;
    cfg.window = 1.0;
    cfg.slowest = SlowestResponse(profiles);
    RandomStream rng(DeriveSeed(seed, {t, 1}));
    const LinkageResult a = SimulateTimingLinkage(
        profiles, reports_per_client, cfg, WaitRule::kWaitForSlowest, rng);
    shuffled.correct += a.correct;
    shuffled.total += a.total;
    RandomStream rng2(DeriveSeed(seed, {t, 2}));
    const LinkageResult b = SimulateTimingLinkage(
        profiles, reports_per_client, cfg, WaitRule::kNone, rng2);
    baseline.correct += b.correct;
    baseline.total += b.total;
  }
  const double p0 = 1.0 / static_cast<double>(clients);
  const double se =
      std::sqrt(p0 * (1.0 - p0) / static_cast<double>(shuffled.total));
  const double gate = Tolerances::kLinkageSigmas * se;

  VerificationReport r;
  r.property = "timing_linkage";
  r.theoretical = p0;
  r.empirical = shuffled.accuracy();
  r.ci_low = p0 - gate;
  r.ci_high = p0 + gate;
  r.samples = shuffled.total;
  r.pass = std::abs(shuffled.accuracy() - p0) <= gate;
  r.rule = "attacker accuracy within 3 SE of 1/k";
  r.note = Fmt("attacker accuracy without waiting for T_S: %.4f",
               baseline.accuracy());
  r.config = {{"clients", clients},
              {"reports_per_client", reports_per_client},
              {"trials", trials},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyHeterogeneityNeutrality(
    std::size_t clients, std::size_t reports_per_client, std::uint64_t seed) {
  Require(clients >= 1 && reports_per_client >= 1, "empty round");
  // Wide spread: the slowest client is up to 100x slower than the fastest.
  const TimingModel spread{0.05, 5.0, 0.01, 1.0};
  RandomStream prof_rng(DeriveSeed(seed, {0}));
  const auto profiles = MakeTimingProfiles(clients, spread, prof_rng);
  ShuffleConfig cfg;
  cfg.window = 1.0;
  cfg.slowest = SlowestResponse(profiles);
  double lo = INFINITY;
  double hi = -INFINITY;
  std::size_t count = 0;
  for (std::size_t u = 0; u < clients; ++u) {
    RandomStream rng(DeriveSeed(seed, {1, u}));
    const auto entries = SyntheticEntries(reports_per_client, rng);
    for (const auto& rep : Schedule(entries, profiles[u], cfg, rng)) {
      lo = std::min(lo, rep.arrival);
      hi = std::max(hi, rep.arrival);
      ++count;
    }
  }
  VerificationReport r;
  r.property = "heterogeneity_neutrality";
  r.theoretical = cfg.slowest;
  r.empirical = lo;
  r.ci_low = lo;
  r.ci_high = hi;
  r.samples = count;
  r.pass = lo >= cfg.slowest && hi <= cfg.slowest + cfg.window;
  r.rule = "every arrival in [T_S, T_S + T]";
  r.note = Fmt("T_S %.6g, earliest %.6g, latest %.6g", cfg.slowest, lo, hi);
  r.config = {{"clients", clients},
              {"reports_per_client", reports_per_client},
              {"window", cfg.window},
              {"seed", seed}};
  return r;
}

VerificationReport VerifyMultisetPreservation(std::size_t clients,
                                              std::uint64_t seed) {
  Require(clients >= 1, "empty round");
  RandomStream init(DeriveSeed(seed, {0}));
  const std::vector<std::size_t> sizes = {5, 4, 3};
  const ModelWeights shape = MakeMlp(sizes, init);
  RandomStream prof_rng(DeriveSeed(seed, {1}));
  const auto profiles = MakeTimingProfiles(clients, TimingModel{}, prof_rng);
  ShuffleConfig cfg;
  cfg.slowest = SlowestResponse(profiles);
  cfg.jitter = 0.1;

  std::map<WeightId, std::vector<double>> sent;
  std::vector<std::vector<WeightReport>> batches;
  for (std::size_t u = 0; u < clients; ++u) {
    RandomStream rng(DeriveSeed(seed, {2, u}));
    ModelWeights m = shape;
    for (auto& layer : m.layers) {
      for (double& v : layer.params) v = rng.Uniform(-1.0, 1.0);
    }
    const auto entries = Split(m);
    for (const auto& e : entries) sent[e.id].push_back(e.value);
    batches.push_back(Schedule(entries, profiles[u], cfg, rng));
  }
  const CollectedUpdates got = Collect(batches);
  bool same = got.ids.size() == sent.size();
  std::size_t i = 0;
  for (auto& [id, values] : sent) {
    if (!same) break;
    if (got.ids[i] != id) {
      same = false;
      break;
    }
    std::vector<double> a = values;
    std::vector<double> b = got.values[i];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    same = a == b;
    ++i;
  }
  VerificationReport r;
  r.property = "multiset_preservation";
  r.theoretical = static_cast<double>(clients * shape.parameter_count());
  r.empirical = static_cast<double>(got.total_reports());
  r.ci_low = r.ci_high = r.theoretical;
  r.samples = got.total_reports();
  r.pass = same;
  r.rule = "multiset of (id, value) sent == multiset collected";
  r.config = {{"clients", clients},
              {"parameters", shape.parameter_count()},
              {"seed", seed}};
  return r;
}

AdaptiveGainSetup AdaptiveGainSetup::Homogeneous() {
  AdaptiveGainSetup s;
  s.name = "adaptive_parity";
  s.expectation = Expectation::kParity;
  s.hidden = {};
  s.init_scales = {1.0};
  s.sgd = {0.5, 16, 10};
  return s;
}

VerificationReport VerifyAdaptiveGain(const AdaptiveGainSetup& setup,
                                      std::uint64_t seed) {
  const BlobData data = MakeSetupData(setup, seed);
  RangeConfig fixed;
  fixed.mode = RangeMode::kFixed;
  fixed.center = setup.fixed_range.center;
  fixed.radius = setup.fixed_range.radius;
  RangeConfig adaptive;
  adaptive.mode = RangeMode::kAdaptive;
  const double acc_fixed = TrainedAccuracy(
      SetupConfig(setup, seed, fixed), data.train, data.test);
  const double acc_adaptive = TrainedAccuracy(
      SetupConfig(setup, seed, adaptive), data.train, data.test);
  const double gap = acc_adaptive - acc_fixed;

  VerificationReport r;
  r.property = setup.name;
  r.empirical = gap;
  r.samples = data.test.size();
  if (setup.expectation == AdaptiveGainSetup::Expectation::kAdaptiveWins) {
    r.theoretical = Tolerances::kAdaptiveGain;
    r.ci_low = Tolerances::kAdaptiveGain;
    r.ci_high = 1.0;
    r.pass = gap >= Tolerances::kAdaptiveGain;
    r.rule = "adaptive accuracy - fixed accuracy >= 0.10";
  } else {
    r.theoretical = 0.0;
    r.ci_low = -Tolerances::kAdaptiveParity;
    r.ci_high = Tolerances::kAdaptiveParity;
    const double floor = 1.0 / static_cast<double>(setup.classes) +
                         Tolerances::kParityAboveChance;
    r.pass = std::abs(gap) < Tolerances::kAdaptiveParity &&
             std::min(acc_adaptive, acc_fixed) >= floor;
    r.rule =
        "|adaptive accuracy - fixed accuracy| < 0.03, both >= chance + 0.20";
  }
  r.note = Fmt("adaptive %.4f, fixed %.4f", acc_adaptive, acc_fixed);
  r.config = SetupJson(setup);
  r.config["fixed_range"] = RangeJson(setup.fixed_range);
  r.config["seed"] = seed;
  return r;
}

VerificationReport VerifyAdaptiveGain(std::uint64_t seed,
                                      Mechanism::Variant variant) {
  AdaptiveGainSetup deep;
  deep.variant = variant;
  AdaptiveGainSetup shallow = AdaptiveGainSetup::Homogeneous();
  shallow.variant = variant;
  const VerificationReport gain =
      VerifyAdaptiveGain(deep, DeriveSeed(seed, {1}));
  const VerificationReport parity =
      VerifyAdaptiveGain(shallow, DeriveSeed(seed, {2}));
  VerificationReport r = gain;
  r.pass = gain.pass && parity.pass;
  r.rule = gain.rule + "; shallow model: " + parity.rule;
  r.note = "deep: " + gain.note + "; shallow: " + parity.note + " (gap " +
           Fmt("%.4f", parity.empirical) + ")";
  r.config = {{"deep", gain.config}, {"shallow", parity.config}};
  return r;
}

VerificationReport VerifyFixedRangeSweep(const AdaptiveGainSetup& setup,
                                         std::span<const double> radii,
                                         std::uint64_t seed) {
  Require(!radii.empty(), "no radii to sweep");
  const BlobData data = MakeSetupData(setup, seed);
  RangeConfig adaptive;
  adaptive.mode = RangeMode::kAdaptive;
  const double acc_adaptive = TrainedAccuracy(
      SetupConfig(setup, seed, adaptive), data.train, data.test);
  double best = 0.0;
  std::ostringstream note;
  note << "adaptive " << acc_adaptive;
  for (double radius : radii) {
    RangeConfig fixed;
    fixed.mode = RangeMode::kFixed;
    fixed.center = setup.fixed_range.center;
    fixed.radius = radius;
    const double acc = TrainedAccuracy(
        SetupConfig(setup, seed, fixed), data.train, data.test);
    best = std::max(best, acc);
    note << "; fixed r=" << radius << " " << acc;
  }
  VerificationReport r;
  r.property = "fixed_range_sweep";
  r.theoretical = Tolerances::kAdaptiveGain;
  r.empirical = acc_adaptive - best;
  r.ci_low = Tolerances::kAdaptiveGain;
  r.ci_high = 1.0;
  r.samples = data.test.size();
  r.pass = acc_adaptive - best >= Tolerances::kAdaptiveGain;
  r.rule = "adaptive accuracy - best fixed-radius accuracy >= 0.10";
  r.note = note.str();
  r.config = SetupJson(setup);
  r.config["radii"] = std::vector<double>(radii.begin(), radii.end());
  r.config["seed"] = seed;
  return r;
}

std::vector<VerificationReport> RunVerificationSuite(
    const SuiteOptions& options) {
  using Task = std::function<VerificationReport(std::uint64_t)>;
  std::vector<Task> tasks;
  const auto variant = options.variant;
  const auto mech = [variant](double eps) {
    return Mechanism(PrivacyBudget(eps), variant);
  };
  const Range unit{0.0, 1.0};

  if (options.mechanism_checks) {
    for (double eps : {0.1, 1.0, 5.0, 10.0}) {
      tasks.push_back([=](std::uint64_t s) {
        return VerifyLdp(mech(eps), unit, 1000000, s);
      });
    }
    tasks.push_back([=](std::uint64_t s) {
      return VerifyLdp(mech(1.0), Range{3.0, 0.25}, 1000000, s);
    });
    for (double eps : {0.5, 1.0, 5.0}) {
      for (double frac : {-1.0, 0.0, 0.3, 1.0}) {
        tasks.push_back([=](std::uint64_t s) {
          return VerifyBias(mech(eps), frac, unit, 1000000, s);
        });
        tasks.push_back([=](std::uint64_t s) {
          return VerifyVariance(mech(eps), frac, unit, 1000000, s);
        });
      }
    }
    for (std::size_t n : {std::size_t{100}, std::size_t{1000}}) {
      const std::vector<double> uniform(n, 1.0);
      std::vector<double> mixed(n);
      for (std::size_t u = 0; u < n; ++u) {
        mixed[u] = 1.0 + static_cast<double>(u) / static_cast<double>(n - 1);
      }
      const std::vector<double> center(n, 0.0);
      std::vector<double> ends(n);
      for (std::size_t u = 0; u < n; ++u) ends[u] = (u % 2 == 0) ? 1.0 : -1.0;
      const std::vector<double> spread = GoldenOffsets(n, -1.0, 1.0);
      const std::vector<double> upper_half = GoldenOffsets(n, 0.0, 1.0);
      using Vec = const std::vector<double>*;
      for (Vec radii : {Vec{&uniform}, Vec{&mixed}}) {
        for (Vec off :
             {Vec{&center}, Vec{&ends}, Vec{&spread}, Vec{&upper_half}}) {
          tasks.push_back([=, r = *radii, o = *off](std::uint64_t s) {
            return VerifyMeanVariance(mech(1.0), r, o, 10000, s);
          });
        }
      }
    }
  }
  if (options.concentration_checks) {
    const std::vector<double> off = GoldenOffsets(100, 0.0, 1.0);
    for (double beta : {0.01, 0.05}) {
      tasks.push_back([=](std::uint64_t s) {
        return VerifyConcentration(mech(1.0), 1.0, off, beta, 10000, s);
      });
      tasks.push_back([=](std::uint64_t s) {
        return VerifyConcentrationScaling(mech(1.0), 1.0, 100, beta, 10000,
                                          s);
      });
    }
  }
  if (options.shuffle_checks) {
    tasks.push_back([](std::uint64_t s) {
      return VerifyMultisetPreservation(10, s);
    });
    tasks.push_back([](std::uint64_t s) {
      return VerifyArrivalUniformity(10, 1000, s);
    });
    tasks.push_back([](std::uint64_t s) {
      return VerifyTimingLinkage(10, 100, 100, s);
    });
    tasks.push_back([](std::uint64_t s) {
      return VerifyHeterogeneityNeutrality(50, 200, s);
    });
  }
  if (options.adaptive_checks) {
    tasks.push_back([=](std::uint64_t s) {
      return VerifyAdaptiveGain(s, variant);
    });
    tasks.push_back([=](std::uint64_t s) {
      AdaptiveGainSetup setup;
      setup.variant = variant;
      const double radii[] = {0.01, 0.1, 1.0, 10.0};
      return VerifyFixedRangeSweep(setup, radii, s);
    });
  }

  std::vector<VerificationReport> reports(tasks.size());
  ParallelFor(tasks.size(), options.threads, [&](std::size_t i) {
    reports[i] = tasks[i](DeriveSeed(options.seed, {i}));
  });
  return reports;
}

std::string SummaryTable(std::span<const VerificationReport> reports) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-26s %14s %14s %27s %10s  %s\n",
                "property", "theoretical", "empirical", "interval", "n",
                "verdict");
  out << line;
  std::size_t passed = 0;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line,
                  "%-26s %14.6g %14.6g [%12.6g,%12.6g] %10zu  %s\n",
                  r.property.c_str(), r.theoretical, r.empirical, r.ci_low,
                  r.ci_high, r.samples, r.pass ? "PASS" : "FAIL");
    out << line;
    passed += r.pass ? 1 : 0;
  }
  out << passed << "/" << reports.size() << " passed\n";
  return out.str();
}

}  // namespace ldpfl
