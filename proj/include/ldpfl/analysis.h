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

#ifndef LDPFL_ANALYSIS_H_
#define LDPFL_ANALYSIS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ldpfl/fl_core.h"
#include "ldpfl/mechanism.h"

namespace ldpfl {

// Every acceptance gate used by the verification suite. The Monte Carlo
// gates are wide enough that a correct mechanism fails any single check with
// probability well under 1e-3.
struct Tolerances {
  static constexpr double kBiasSigmas = 4.0;
  static constexpr double kVarianceRelative = 0.01;
  static constexpr double kVarianceSigmas = 4.0;  // sizing rule for samples
  static constexpr double kVarianceBoundSlack = 0.01;
  static constexpr double kMeanVarianceLowerCushion = 0.9;
  static constexpr double kMeanVarianceUpperCushion = 1.1;
  static constexpr double kExceedanceSigmas = 3.0;
  static constexpr double kQuantileHalvingRelative = 0.10;
  static constexpr double kLdpAnalyticRelative = 1e-12;
  static constexpr double kLdpSigmas = 3.0;
  static constexpr double kLdpMinExpectedCount = 100.0;
  // Fallback when the ratio histogram is skipped.
  static constexpr double kLdpEndpointSigmas = 4.0;
  static constexpr double kKsAlpha = 0.01;
  static constexpr double kLinkageSigmas = 3.0;
  static constexpr double kAdaptiveGain = 0.10;
  static constexpr double kAdaptiveParity = 0.03;
  // A parity claim between two models is vacuous unless both learned: each
  // accuracy must clear chance (1 / classes) by this much.
  static constexpr double kParityAboveChance = 0.20;
};

struct VerificationReport {
  std::string property;
  double theoretical = 0.0;
  double empirical = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t samples = 0;
  bool pass = false;
  std::string rule;
  std::string note;
  nlohmann::json config;

  nlohmann::json ToJson() const;
};

// Monte Carlo checks of the perturbation mechanism. `mechanism` may be a
// deliberately broken variant; the theoretical values always come from the
// exact mechanism with the same budget.

// |mean - w| <= 4 sqrt(Var(w) / samples).
VerificationReport VerifyBias(const Mechanism& mechanism, double w,
                              const Range& range, std::size_t samples,
                              std::uint64_t seed);

// Empirical variance about the true input, E[(M(w) - w)^2], within 1% of
// r^2 k^2 - (w - c)^2 and at most 1.01 r^2 k^2.
VerificationReport VerifyVariance(const Mechanism& mechanism, double w,
                                  const Range& range, std::size_t samples,
                                  std::uint64_t seed);

// Smallest sample count at which the 1% variance gate sits at least
// kVarianceSigmas standard errors from the truth.
std::size_t RequiredVarianceSamples(double w, const Range& range,
                                    const PrivacyBudget& budget);

// Client u holds w_u = center + offsets[u] * radii[u] with offsets in
// [-1, 1]. Var[mean] about the true average must land in
// [0.9 lower, 1.1 upper] of MeanVarianceBounds(radii).
VerificationReport VerifyMeanVariance(const Mechanism& mechanism,
                                      std::span<const double> radii,
                                      std::span<const double> offsets,
                                      std::size_t repetitions,
                                      std::uint64_t seed, double center = 0.0);

// Frequency of |mean - true mean| >= ConcentrationRadius(beta) must not
// exceed beta + 3 sqrt(beta (1 - beta) / repetitions).
VerificationReport VerifyConcentration(const Mechanism& mechanism,
                                       double radius,
                                       std::span<const double> offsets,
                                       double beta, std::size_t repetitions,
                                       std::uint64_t seed);

// The (1 - beta) quantile of |mean - true mean| with 4n clients must be half
// the one with n clients, within 10%. Client u uses radius
// radius * (0.5 + (u + 0.5) / n) and offset GoldenOffsets; distinct radii
// keep the mean off a lattice, which would otherwise quantize the quantiles.
VerificationReport VerifyConcentrationScaling(const Mechanism& mechanism,
                                              double radius, std::size_t n,
                                              double beta,
                                              std::size_t repetitions,
                                              std::uint64_t seed);

// Analytic LdpRatio == e^eps to 1e-12, plus an endpoint histogram test: with
// `samples` draws at w = c + r and at w = c - r, both output-ratio estimates
// must lie within 3 standard errors of e^eps and every output must be one of
// c +- r k. The histogram part is skipped when the rarer outcome's expected
// count is below 100.
VerificationReport VerifyLdp(const Mechanism& mechanism, const Range& range,
                             std::size_t samples, std::uint64_t seed);

// Low-discrepancy offsets frac((u + 1) * golden ratio) mapped into [lo, hi].
std::vector<double> GoldenOffsets(std::size_t n, double lo, double hi);

// Shuffle checks.

// Pooled arrival times minus T_S against Uniform(0, T), KS at alpha = 0.01.
VerificationReport VerifyArrivalUniformity(std::size_t clients,
                                           std::size_t reports_per_client,
                                           std::uint64_t seed);

// Mean accuracy of the nearest-arrival attacker within 3 standard errors of
// 1 / clients.
VerificationReport VerifyTimingLinkage(std::size_t clients,
                                       std::size_t reports_per_client,
                                       std::size_t trials, std::uint64_t seed);

// Every arrival of heterogeneous clients lies in [T_S, T_S + T].
VerificationReport VerifyHeterogeneityNeutrality(std::size_t clients,
                                                 std::size_t reports_per_client,
                                                 std::uint64_t seed);

// Multiset of (id, value) into Schedule equals the multiset out of Collect.
VerificationReport VerifyMultisetPreservation(std::size_t clients,
                                              std::uint64_t seed);

// Fixed-versus-adaptive range comparison on synthetic blobs.
struct AdaptiveGainSetup {
  enum class Expectation { kAdaptiveWins, kParity };

  std::string name = "adaptive_gain";
  Expectation expectation = Expectation::kAdaptiveWins;
  std::vector<std::size_t> hidden = {32, 32, 32};
  // Layer scales in ratio 1 : 0.1 : 0.01 : 0.001, lifted by 10^1.5 so their
  // product is 1. ReLU nets are positively homogeneous, so a product of 1e-6
  // would leave logits far below the bias terms and the net untrainable.
  std::vector<double> init_scales = {31.622776601683793, 3.1622776601683795,
                                     0.31622776601683794,
                                     0.031622776601683791};
  double epsilon = 5.0;
  std::size_t clients = 200;
  std::size_t rounds = 10;
  SgdConfig sgd = {0.003, 16, 5};
  Range fixed_range = {0.0, 1.0};
  std::size_t samples = 6000;
  std::size_t test_samples = 2000;
  std::size_t dim = 20;
  std::size_t classes = 10;
  double separation = 1.5;
  Mechanism::Variant variant = Mechanism::Variant::kExact;

  // One-layer model with unit-scale initialization, trained to saturation.
  static AdaptiveGainSetup Homogeneous();
};

// kAdaptiveWins: adaptive accuracy - fixed accuracy >= 0.10.
// kParity: |adaptive - fixed| < 0.03 and both accuracies >= chance + 0.20.
VerificationReport VerifyAdaptiveGain(const AdaptiveGainSetup& setup,
                                      std::uint64_t seed);

// The reference comparison: the default heterogeneous setup must show the
// gain and AdaptiveGainSetup::Homogeneous() must show parity, both under
// `variant`.
VerificationReport VerifyAdaptiveGain(
    std::uint64_t seed,
    Mechanism::Variant variant = Mechanism::Variant::kExact);

// Adaptive accuracy against fixed ranges (0, r) for every r in `radii`;
// passes iff adaptive beats the best fixed radius by at least 0.10.
VerificationReport VerifyFixedRangeSweep(const AdaptiveGainSetup& setup,
                                         std::span<const double> radii,
                                         std::uint64_t seed);

struct SuiteOptions {
  std::uint64_t seed = 20240;
  Mechanism::Variant variant = Mechanism::Variant::kExact;
  bool mechanism_checks = true;
  bool concentration_checks = true;
  bool shuffle_checks = true;
  bool adaptive_checks = true;
  std::size_t threads = 1;
};

// The full verification suite. Each check runs with its own sub-seed, so the
// result does not depend on `threads`.
std::vector<VerificationReport> RunVerificationSuite(const SuiteOptions& options);

// Fixed-width human-readable table.
std::string SummaryTable(std::span<const VerificationReport> reports);

}  // namespace ldpfl

#endif  // LDPFL_ANALYSIS_H_
