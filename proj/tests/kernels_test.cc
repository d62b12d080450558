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


#include "ldpfl/kernels.h"

#include <cmath>
#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include "ldpfl/random.h"

namespace ldpfl::simd {
namespace {

bool SameBits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(),
                                   a.size() * sizeof(double)) == 0);
}

std::vector<double> Draw(std::size_t n, RandomStream& rng, double lo,
                         double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.Uniform(lo, hi);
  return v;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    avx2_ = Avx2Kernels();
    if (avx2_ == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  }
  const KernelTable& scalar_ = ScalarKernels();
  const KernelTable* avx2_ = nullptr;
};

TEST_F(KernelEquivalence, TwoPointSelectIsBitExact) {
  RandomStream rng(11);
  for (std::size_t n = 0; n <= 41; ++n) {
    const auto w = Draw(n, rng, -0.5, 1.5);
    const auto u = Draw(n, rng, 0.0, 1.0);
    TwoPointParams p{0.5, 1.0, std::exp(-1.0), 0.0, 1.0, 0.0, 0.0};
    p.denom = 1.0 + p.q;
    p.high = 0.5 + 2.16;
    p.low = 0.5 - 2.16;
    std::vector<double> a(n), b(n);
    scalar_.two_point_select(w.data(), u.data(), n, p, a.data());
    avx2_->two_point_select(w.data(), u.data(), n, p, b.data());
    EXPECT_TRUE(SameBits(a, b)) << "n=" << n;
  }
}

TEST_F(KernelEquivalence, ElementwiseOpsAreBitExact) {
  RandomStream rng(12);
  for (std::size_t n = 0; n <= 41; ++n) {
    const auto x = Draw(n, rng, -2.0, 2.0);
    auto a = x, b = x;
    EXPECT_EQ(scalar_.clamp(a.data(), n, -0.7, 1.1),
              avx2_->clamp(b.data(), n, -0.7, 1.1));
    EXPECT_TRUE(SameBits(a, b));

    auto y1 = Draw(n, rng, -1.0, 1.0);
    auto y2 = y1;
    scalar_.axpy(0.37, x.data(), y1.data(), n);
    avx2_->axpy(0.37, x.data(), y2.data(), n);
    EXPECT_TRUE(SameBits(y1, y2));

    scalar_.add(x.data(), y1.data(), n);
    avx2_->add(x.data(), y2.data(), n);
    EXPECT_TRUE(SameBits(y1, y2));

    a = x;
    b = x;
    scalar_.relu(a.data(), n);
    avx2_->relu(b.data(), n);
    EXPECT_TRUE(SameBits(a, b));

    auto g1 = Draw(n, rng, -1.0, 1.0);
    auto g2 = g1;
    scalar_.relu_backward(x.data(), g1.data(), n);
    avx2_->relu_backward(x.data(), g2.data(), n);
    EXPECT_TRUE(SameBits(g1, g2));
  }
}

TEST_F(KernelEquivalence, GemmIsBitExact) {
  RandomStream rng(13);
  for (std::size_t m : {1, 3, 16}) {
    for (std::size_t k : {1, 5, 20}) {
      for (std::size_t n = 1; n <= 37; n += 4) {
        const auto a = Draw(m * k, rng, -1.0, 1.0);
        const auto b = Draw(k * n, rng, -1.0, 1.0);
        auto c1 = Draw(m * n, rng, -1.0, 1.0);
        auto c2 = c1;
        scalar_.gemm_acc(a.data(), b.data(), c1.data(), m, k, n);
        avx2_->gemm_acc(a.data(), b.data(), c2.data(), m, k, n);
        EXPECT_TRUE(SameBits(c1, c2)) << m << "x" << k << "x" << n;
      }
    }
  }
}

TEST_F(KernelEquivalence, ReductionsAgreeToRounding) {
  RandomStream rng(14);
  for (std::size_t n = 1; n <= 1000; n = n * 3 + 1) {
    const auto x = Draw(n, rng, -3.0, 5.0);
    const Moments s = scalar_.shifted_moments(x.data(), n, 0.25);
    const Moments v = avx2_->shifted_moments(x.data(), n, 0.25);
    EXPECT_NEAR(s.sum, v.sum, 1e-12 * static_cast<double>(n) * 5.0);
    EXPECT_NEAR(s.sum_sq, v.sum_sq, 1e-12 * s.sum_sq + 1e-15);
    double lo1, hi1, lo2, hi2;
    scalar_.min_max(x.data(), n, &lo1, &hi1);
    avx2_->min_max(x.data(), n, &lo2, &hi2);
    EXPECT_EQ(lo1, lo2);
    EXPECT_EQ(hi1, hi2);
  }
}

TEST(Kernels, GemmMatchesNaiveProduct) {
  const double a[] = {1, 2, 3, 4, 5, 6};        // 2x3
  const double b[] = {7, 8, 9, 10, 11, 12};     // 3x2
  double c[] = {1, 1, 1, 1};
  ScalarKernels().gemm_acc(a, b, c, 2, 3, 2);
  EXPECT_EQ(c[0], 59.0);
  EXPECT_EQ(c[1], 65.0);
  EXPECT_EQ(c[2], 140.0);
  EXPECT_EQ(c[3], 155.0);
}

TEST(Kernels, ClampCountsMovedEntries) {
  std::vector<double> x = {-2.0, -1.0, 0.0, 1.0, 2.0};
  EXPECT_EQ(ScalarKernels().clamp(x.data(), x.size(), -1.0, 1.0), 2u);
  EXPECT_EQ(x, (std::vector<double>{-1.0, -1.0, 0.0, 1.0, 1.0}));
}

TEST(Kernels, SelectIsaFallsBackCleanly) {
  EXPECT_TRUE(SelectIsa(Isa::kScalar));
  EXPECT_EQ(Kernels().isa, Isa::kScalar);
  const bool has_avx2 = Avx2Kernels() != nullptr;
  EXPECT_EQ(SelectIsa(Isa::kAvx2), has_avx2);
  SelectIsa(DetectBestIsa());
}

}  // namespace
}  // namespace ldpfl::simd
