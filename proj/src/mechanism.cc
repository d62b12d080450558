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

#include "ldpfl/mechanism.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "ldpfl/error.h"
#include "ldpfl/kernels.h"

namespace ldpfl {
namespace {

std::string Str(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void RequireInRange(double w, const Range& range) {
  if (!range.contains(w)) {
    throw Error(ErrorCode::kOutOfRange,
                "weight " + Str(w) + " outside [" + Str(range.lower()) + ", " +
                    Str(range.upper()) + "]; clip before perturbing");
  }
}

// Pr[high] for normalized offset s = (w - c) / r in [-1, 1].
double HighProbabilityAtOffset(double s, double q) {
  return ((1.0 + s) + (1.0 - s) * q) / (2.0 * (1.0 + q));
}

double LowProbabilityAtOffset(double s, double q) {
  return ((1.0 - s) + (1.0 + s) * q) / (2.0 * (1.0 + q));
}

}  // namespace

Range Range::Make(double center, double radius) {
  if (!std::isfinite(center) || !std::isfinite(radius) || !(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "range needs finite center and radius > 0, got (" +
                    Str(center) + ", " + Str(radius) + ")");
  }
  return Range{center, radius};
}

PrivacyBudget::PrivacyBudget(double epsilon, double floor) : epsilon_(epsilon) {
  if (!(epsilon >= floor) || std::isnan(epsilon)) {
    throw Error(ErrorCode::kBudgetTooSmall,
                "epsilon " + Str(epsilon) + " below floor " + Str(floor));
  }
  if (std::isinf(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be finite");
  }
}

double Coefficient(const PrivacyBudget& budget) {
  return 1.0 + 2.0 / std::expm1(budget.epsilon());
}

double Clip(double w, const Range& range) {
  if (w < range.lower()) return range.lower();
  if (w > range.upper()) return range.upper();
  return w;
}

double EstimateMean(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kEmptyAggregate, "cannot average zero reports");
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double MechanismVariance(double w, const Range& range,
                         const PrivacyBudget& budget) {
  RequireInRange(w, range);
  const double d = w - range.center;
  return MechanismVarianceBound(range, budget) - d * d;
}

double MechanismVarianceBound(const Range& range, const PrivacyBudget& budget) {
  const double rk = range.radius * Coefficient(budget);
  return rk * rk;
}

VarianceBounds MeanVarianceBounds(std::span<const double> radii,
                                  const PrivacyBudget& budget) {
  if (radii.empty()) {
    throw Error(ErrorCode::kEmptyAggregate, "need at least one client radius");
  }
  double sum_sq = 0.0;
  for (double r : radii) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kInvalidArgument, "radii must be finite and > 0");
    }
    sum_sq += r * r;
  }
  const double n = static_cast<double>(radii.size());
  const double k = Coefficient(budget);
  const double spread = sum_sq / (n * n);
  const double upper = k * k * spread;
  return {upper - spread, upper};
}

double ConcentrationRadius(double radius, const PrivacyBudget& budget,
                           std::size_t n, double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "beta must lie in (0, 1], got " + Str(beta));
  }
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one client");
  }
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be > 0");
  }
  // Every deviation is at least 0 with probability 1.
  if (beta == 1.0) return 0.0;

  const double k = Coefficient(budget);
  const double log_term = std::log(2.0 / beta);
  const double variance_term = 2.0 * radius * radius * k * k;
  // 4 r e^eps / (3 (e^eps - 1)) = 4 r / (3 (1 - e^-eps)).
  const double range_term =
      4.0 * radius / (3.0 * -std::expm1(-budget.epsilon()));
  // n lambda^2 - L b lambda - L a = 0, positive root.
  const double nn = static_cast<double>(n);
  const double lb = log_term * range_term;
  return (lb + std::sqrt(lb * lb + 4.0 * nn * log_term * variance_term)) /
         (2.0 * nn);
}

double LdpRatio(const PrivacyBudget& budget, const Range& range) {
  (void)Range::Make(range.center, range.radius);
  const double q = std::exp(-budget.epsilon());
  // Both output probabilities are affine in w, so the extremes over the range
  // sit at the endpoints s = -1 and s = +1.
  const double high_ratio =
      HighProbabilityAtOffset(1.0, q) / HighProbabilityAtOffset(-1.0, q);
  const double low_ratio =
      LowProbabilityAtOffset(-1.0, q) / LowProbabilityAtOffset(1.0, q);
  return std::max(high_ratio, low_ratio);
}

double HighOutputProbability(double w, const Range& range,
                             const PrivacyBudget& budget) {
  RequireInRange(w, range);
  return HighProbabilityAtOffset((w - range.center) / range.radius,
                                 std::exp(-budget.epsilon()));
}

Mechanism::Mechanism(PrivacyBudget budget, Variant variant)
    : budget_(budget),
      variant_(variant),
      coefficient_(Coefficient(budget)),
      q_(std::exp(-budget.epsilon())) {
  if (variant_ == Variant::kDoubledCoefficient) coefficient_ *= 2.0;
}

std::pair<double, double> Mechanism::Outputs(const Range& range) const {
  const double rk = range.radius * coefficient_;
  return {range.center + rk, range.center - rk};
}

namespace {

simd::TwoPointParams MakeParams(const Range& range, double q, bool swapped,
                                std::pair<double, double> outputs) {
  return simd::TwoPointParams{
      .center = range.center,
      .radius = range.radius,
      .q = q,
      .denom = 2.0 * (1.0 + q),
      .sign = swapped ? -1.0 : 1.0,
      .high = outputs.first,
      .low = outputs.second,
  };
}

}  // namespace

double Mechanism::Perturb(double w, const Range& range,
                          RandomStream& rng) const {
  RequireInRange(w, range);
  const auto params = MakeParams(
      range, q_, variant_ == Variant::kSwappedProbabilities, Outputs(range));
  const double u = rng.Uniform();
  double out;
  simd::Kernels().two_point_select(&w, &u, 1, params, &out);
  return out;
}

void Mechanism::PerturbInto(std::span<const double> w, const Range& range,
                            RandomStream& rng, std::span<double> out) const {
  if (out.size() != w.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "perturbation output length differs from input");
  }
  for (double x : w) RequireInRange(x, range);
  const auto params = MakeParams(
      range, q_, variant_ == Variant::kSwappedProbabilities, Outputs(range));
  std::vector<double> u(w.size());
  rng.FillUniform(u.data(), u.size());
  simd::Kernels().two_point_select(w.data(), u.data(), w.size(), params,
                                   out.data());
}

const char* VariantName(Mechanism::Variant variant) {
  switch (variant) {
    case Mechanism::Variant::kExact: return "exact";
    case Mechanism::Variant::kSwappedProbabilities: return "swapped";
    case Mechanism::Variant::kDoubledCoefficient: return "doubled";
  }
  return "unknown";
}

}  // namespace ldpfl
