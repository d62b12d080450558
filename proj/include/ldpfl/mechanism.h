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

#ifndef LDPFL_MECHANISM_H_
#define LDPFL_MECHANISM_H_

#include <cstddef>
#include <span>
#include <utility>

#include "ldpfl/random.h"

namespace ldpfl {

inline constexpr double kDefaultEpsilonFloor = 1e-3;

// Center/radius pair bounding a weight: [center - radius, center + radius].
struct Range {
  double center = 0.0;
  double radius = 1.0;

  // Validated construction; radius must be finite and > 0.
  static Range Make(double center, double radius);

  double lower() const { return center - radius; }
  double upper() const { return center + radius; }
  bool contains(double w) const { return lower() <= w && w <= upper(); }

  friend bool operator==(const Range&, const Range&) = default;
};

class PrivacyBudget {
 public:
  // Throws kBudgetTooSmall when epsilon < floor (or is not finite).
  explicit PrivacyBudget(double epsilon,
                         double floor = kDefaultEpsilonFloor);

  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

// k = (e^eps + 1) / (e^eps - 1), evaluated as 1 + 2 / expm1(eps).
double Coefficient(const PrivacyBudget& budget);

// min(max(w, c - r), c + r).
double Clip(double w, const Range& range);

// Arithmetic mean; throws kEmptyAggregate on an empty list.
double EstimateMean(std::span<const double> values);

// Exact variance r^2 k^2 - (w - c)^2 of one perturbed report.
double MechanismVariance(double w, const Range& range,
                         const PrivacyBudget& budget);

// r^2 k^2, the variance at w = c and the upper bound for every w.
double MechanismVarianceBound(const Range& range, const PrivacyBudget& budget);

struct VarianceBounds {
  double lower;
  double upper;
};

// Bounds on Var[mean of n = radii.size() reports] when client u perturbs
// with radius radii[u]: upper = k^2 sum(r^2) / n^2, lower = upper - sum(r^2)
// / n^2.
VarianceBounds MeanVarianceBounds(std::span<const double> radii,
                                  const PrivacyBudget& budget);

// Smallest lambda with
//   2 exp(-n lambda^2 / (2 r^2 k^2 + 4 lambda r e^eps / (3 (e^eps - 1)))) <= beta,
// i.e. the Bernstein deviation radius that the mean of n reports stays
// within with probability at least 1 - beta. beta = 1 returns 0.
double ConcentrationRadius(double radius, const PrivacyBudget& budget,
                           std::size_t n, double beta);

// max over outputs y and inputs w, w' in the range of
// Pr[M(w) = y] / Pr[M(w') = y]. Equals e^eps; the range does not matter.
double LdpRatio(const PrivacyBudget& budget, const Range& range = Range{});

// Probability that the mechanism reports the high value for input w.
double HighOutputProbability(double w, const Range& range,
                             const PrivacyBudget& budget);

// The two-point perturbation. Variants other than kExact are deliberately
// broken mechanisms that the verification suite must reject.
class Mechanism {
 public:
  enum class Variant {
    kExact,
    kSwappedProbabilities,
    kDoubledCoefficient,
  };

  explicit Mechanism(PrivacyBudget budget, Variant variant = Variant::kExact);

  const PrivacyBudget& budget() const { return budget_; }
  Variant variant() const { return variant_; }
  double coefficient() const { return coefficient_; }

  // c + r k and c - r k (with k doubled for kDoubledCoefficient).
  std::pair<double, double> Outputs(const Range& range) const;

  // One report for w. Throws kOutOfRange unless range.contains(w). Consumes
  // exactly one uniform draw.
  double Perturb(double w, const Range& range, RandomStream& rng) const;

  // Perturbs every entry of w into out (same length, may alias). Consumes one
  // uniform draw per entry, so it produces the same sequence as calling
  // Perturb in a loop.
  void PerturbInto(std::span<const double> w, const Range& range,
                   RandomStream& rng, std::span<double> out) const;

 private:
  PrivacyBudget budget_;
  Variant variant_;
  double coefficient_;
  double q_;
};

const char* VariantName(Mechanism::Variant variant);

}  // namespace ldpfl

#endif  // LDPFL_MECHANISM_H_
