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

#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "ldpfl/error.h"
#include "ldpfl/kernels.h"

namespace ldpfl {
namespace {

// Reference values computed offline at 40-digit precision.
struct CoefficientCase {
  double epsilon;
  double k;
};
constexpr CoefficientCase kCoefficients[] = {
    {0.1, 20.016663889550098},
    {0.5, 4.0829881650735966},
    {1.0, 2.1639534137386528},
    {5.0, 1.0135673098126085},
    {10.0, 1.0000908039820194},
};

TEST(Coefficient, MatchesHighPrecisionReference) {
  for (const auto& c : kCoefficients) {
    EXPECT_NEAR(Coefficient(PrivacyBudget(c.epsilon)), c.k, 1e-14 * c.k)
        << "eps=" << c.epsilon;
  }
}

TEST(Coefficient, ClosedFormPoints) {
  EXPECT_NEAR(Coefficient(PrivacyBudget(std::log(3.0))), 2.0, 1e-15);
  EXPECT_EQ(Coefficient(PrivacyBudget(700.0)), 1.0);
  EXPECT_TRUE(std::isfinite(Coefficient(PrivacyBudget(1e-3))));
}

TEST(Coefficient, DecreasesWithEpsilon) {
  double prev = INFINITY;
  for (double eps = 0.01; eps < 30.0; eps *= 1.3) {
    const double k = Coefficient(PrivacyBudget(eps));
    EXPECT_LT(k, prev);
    EXPECT_GE(k, 1.0);
    prev = k;
  }
}

TEST(PrivacyBudget, RejectsTooSmallOrInvalid) {
  try {
    PrivacyBudget b(1e-4);
    FAIL() << "accepted epsilon below floor";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetTooSmall);
  }
  EXPECT_THROW(PrivacyBudget(0.0), Error);
  EXPECT_THROW(PrivacyBudget(-1.0), Error);
  EXPECT_THROW(PrivacyBudget(NAN), Error);
  EXPECT_NO_THROW(PrivacyBudget(1e-3));
  EXPECT_NO_THROW(PrivacyBudget(0.05, 0.01));
  EXPECT_THROW(PrivacyBudget(0.05, 0.1), Error);
}

TEST(Range, ValidatesAndContains) {
  EXPECT_THROW(Range::Make(0.0, 0.0), Error);
  EXPECT_THROW(Range::Make(0.0, -1.0), Error);
  EXPECT_THROW(Range::Make(NAN, 1.0), Error);
  const Range r = Range::Make(3.0, 0.25);
  EXPECT_TRUE(r.contains(2.75));
  EXPECT_TRUE(r.contains(3.25));
  EXPECT_FALSE(r.contains(3.2500001));
  EXPECT_EQ(Clip(5.0, r), 3.25);
  EXPECT_EQ(Clip(-5.0, r), 2.75);
  EXPECT_EQ(Clip(3.1, r), 3.1);
}

TEST(MechanismVariance, Formula) {
  const PrivacyBudget b(1.0);
  const Range unit{0.0, 1.0};
  EXPECT_NEAR(MechanismVariance(0.0, unit, b), 4.6826943768311693, 1e-14);
  EXPECT_NEAR(MechanismVariance(1.0, unit, b), 4.6826943768311693 - 1.0,
              1e-14);
  EXPECT_NEAR(MechanismVarianceBound(unit, PrivacyBudget(5.0)),
              1.0273186915207682, 1e-15);
  EXPECT_NEAR(MechanismVariance(3.0, Range{2.0, 2.0}, b),
              4.0 * 4.6826943768311693 - 1.0, 1e-13);
  EXPECT_THROW(MechanismVariance(1.5, unit, b), Error);
}

TEST(MeanVarianceBounds, UniformAndMixed) {
  const PrivacyBudget b(1.0);
  const double k2 = 4.6826943768311693;
  std::vector<double> uniform(100, 1.0);
  const auto u = MeanVarianceBounds(uniform, b);
  EXPECT_NEAR(u.upper, k2 / 100.0, 1e-15);
  EXPECT_NEAR(u.lower, (k2 - 1.0) / 100.0, 1e-15);
  const double radii[] = {1.0, 2.0};
  const auto m = MeanVarianceBounds(radii, b);
  EXPECT_NEAR(m.upper, k2 * 5.0 / 4.0, 1e-14);
  EXPECT_NEAR(m.lower, (k2 - 1.0) * 5.0 / 4.0, 1e-14);
  EXPECT_THROW(MeanVarianceBounds(std::span<const double>{}, b), Error);
}

struct LambdaCase {
  double radius, epsilon;
  std::size_t n;
  double beta, lambda;
};
// Bisection on the Bernstein tail at 40 digits.
constexpr LambdaCase kLambdas[] = {
    {1.0, 1.0, 100, 0.05, 0.62796464116453251},
    {1.0, 1.0, 100, 0.01, 0.76251194723648034},
    {2.0, 0.5, 1000, 0.1, 0.64231676085017521},
    {1.0, 5.0, 100, 0.5, 0.17833098250664755},
};

TEST(ConcentrationRadius, MatchesBisectionReference) {
  for (const auto& c : kLambdas) {
    EXPECT_NEAR(ConcentrationRadius(c.radius, PrivacyBudget(c.epsilon), c.n,
                                    c.beta),
                c.lambda, 1e-13)
        << c.radius << " " << c.epsilon << " " << c.n << " " << c.beta;
  }
}

TEST(ConcentrationRadius, SolvesTheTailEquation) {
  for (double eps : {0.2, 1.0, 3.0}) {
    for (std::size_t n : {10, 100, 5000}) {
      for (double beta : {0.001, 0.05, 0.3}) {
        const PrivacyBudget b(eps);
        const double r = 1.5;
        const double lam = ConcentrationRadius(r, b, n, beta);
        const double k = Coefficient(b);
        const double a = 2.0 * r * r * k * k;
        const double c = 4.0 * r * std::exp(eps) / (3.0 * std::expm1(eps));
        const double tail = 2.0 * std::exp(-static_cast<double>(n) * lam *
                                           lam / (a + c * lam));
        EXPECT_NEAR(tail, beta, 1e-10 * beta);
      }
    }
  }
}

TEST(ConcentrationRadius, MonotoneInNAndBeta) {
  const PrivacyBudget b(1.0);
  EXPECT_GT(ConcentrationRadius(1.0, b, 100, 0.05),
            ConcentrationRadius(1.0, b, 400, 0.05));
  EXPECT_GT(ConcentrationRadius(1.0, b, 100, 0.01),
            ConcentrationRadius(1.0, b, 100, 0.05));
  EXPECT_EQ(ConcentrationRadius(1.0, b, 100, 1.0), 0.0);
  EXPECT_THROW(ConcentrationRadius(1.0, b, 100, 0.0), Error);
  EXPECT_THROW(ConcentrationRadius(1.0, b, 100, 1.5), Error);
  EXPECT_THROW(ConcentrationRadius(1.0, b, 0, 0.05), Error);
}

TEST(LdpRatio, EqualsExpEpsilon) {
  for (double eps : {0.1, 1.0, 5.0, 10.0}) {
    const PrivacyBudget b(eps);
    EXPECT_NEAR(LdpRatio(b) / std::exp(eps), 1.0, 1e-12);
    EXPECT_EQ(LdpRatio(b, Range{0.0, 1.0}), LdpRatio(b, Range{-7.0, 0.01}));
  }
}

TEST(HighOutputProbability, KnownValues) {
  const PrivacyBudget b(1.0);
  const Range unit{0.0, 1.0};
  EXPECT_DOUBLE_EQ(HighOutputProbability(0.0, unit, b), 0.5);
  EXPECT_NEAR(HighOutputProbability(1.0, unit, b), 0.73105857863000488,
              1e-15);
  EXPECT_NEAR(HighOutputProbability(-1.0, unit, b), 1.0 - 0.73105857863000488,
              1e-15);
}

TEST(Mechanism, ExpectationAndVarianceAreExactInClosedForm) {
  for (double eps : {0.1, 0.5, 1.0, 5.0, 10.0}) {
    const PrivacyBudget b(eps);
    const Mechanism mech(b);
    for (const Range range : {Range{0.0, 1.0}, Range{3.0, 0.25}}) {
      const auto [hi, lo] = mech.Outputs(range);
      for (double s = -1.0; s <= 1.0; s += 0.125) {
        const double w = range.center + s * range.radius;
        const double p = HighOutputProbability(w, range, b);
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 1.0);
        const double mean = p * hi + (1.0 - p) * lo;
        EXPECT_NEAR(mean, w, 1e-12 * (std::abs(hi) + std::abs(lo)));
        const double var =
            p * (hi - w) * (hi - w) + (1.0 - p) * (lo - w) * (lo - w);
        EXPECT_NEAR(var, MechanismVariance(w, range, b), 1e-11 * var + 1e-14);
      }
    }
  }
}

TEST(Mechanism, OutputsAreTheTwoPoints) {
  const Mechanism mech(PrivacyBudget(1.0));
  const Range range{0.5, 2.0};
  const double rk = 2.0 * 2.1639534137386528;
  RandomStream rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double y = mech.Perturb(0.5 + rng.Uniform(-2.0, 2.0), range, rng);
    EXPECT_TRUE(y == mech.Outputs(range).first || y == mech.Outputs(range).second);
  }
  EXPECT_NEAR(mech.Outputs(range).first, 0.5 + rk, 1e-14);
  EXPECT_NEAR(mech.Outputs(range).second, 0.5 - rk, 1e-14);
}

TEST(Mechanism, RejectsOutOfRange) {
  const Mechanism mech(PrivacyBudget(1.0));
  RandomStream rng(1);
  try {
    mech.Perturb(1.0000001, Range{0.0, 1.0}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  std::vector<double> w = {0.0, 2.0};
  std::vector<double> out(2);
  EXPECT_THROW(mech.PerturbInto(w, Range{0.0, 1.0}, rng, out), Error);
  std::vector<double> shorter(1);
  EXPECT_THROW(mech.PerturbInto(w, Range{0.0, 5.0}, rng, shorter), Error);
}

TEST(Mechanism, PerturbIntoMatchesLoopOnEveryIsa) {
  const Mechanism mech(PrivacyBudget(0.7));
  const Range range{0.2, 0.9};
  std::vector<double> w(257);
  RandomStream gen(4);
  for (auto& x : w) x = range.center + gen.Uniform(-0.9, 0.9);
  for (auto isa : {simd::Isa::kScalar, simd::Isa::kAvx2}) {
    if (!simd::SelectIsa(isa)) continue;
    RandomStream a(99), b(99);
    std::vector<double> bulk(w.size());
    mech.PerturbInto(w, range, a, bulk);
    std::vector<double> loop(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) loop[i] = mech.Perturb(w[i], range, b);
    EXPECT_EQ(0, std::memcmp(bulk.data(), loop.data(), w.size() * sizeof(double)))
        << simd::IsaName(isa);
    EXPECT_EQ(a.NextU64(), b.NextU64());
  }
  simd::SelectIsa(simd::DetectBestIsa());
}

TEST(Mechanism, SameSeedSameOutput) {
  const Mechanism mech(PrivacyBudget(2.0));
  std::vector<double> w(100, 0.1), x(100), y(100);
  RandomStream a(5), b(5);
  mech.PerturbInto(w, Range{0.0, 1.0}, a, x);
  mech.PerturbInto(w, Range{0.0, 1.0}, b, y);
  EXPECT_EQ(x, y);
}

TEST(Mechanism, MutantsDifferFromExact) {
  const PrivacyBudget b(1.0);
  const Mechanism doubled(b, Mechanism::Variant::kDoubledCoefficient);
  EXPECT_NEAR(doubled.coefficient(), 2.0 * 2.1639534137386528, 1e-14);
  EXPECT_STREQ(VariantName(Mechanism::Variant::kSwappedProbabilities), "swapped");
  // Swapped probabilities mirror w about c: at w = c + r the high output
  // becomes the unlikely one.
  const Mechanism swapped(b, Mechanism::Variant::kSwappedProbabilities);
  RandomStream rng(8);
  int high = 0;
  for (int i = 0; i < 20000; ++i) {
    high += swapped.Perturb(1.0, Range{0.0, 1.0}, rng) > 0.0 ? 1 : 0;
  }
  EXPECT_NEAR(high / 20000.0, 1.0 - 0.73105857863000488, 0.015);
}

TEST(EstimateMean, EmptyIsAnError) {
  try {
    EstimateMean(std::span<const double>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyAggregate);
  }
  const double v[] = {1.0, 2.0, 6.0};
  EXPECT_EQ(EstimateMean(v), 3.0);
}

}  // namespace
}  // namespace ldpfl
