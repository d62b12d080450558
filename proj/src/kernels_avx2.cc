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

#include <immintrin.h>

#include <bit>
#include <cstdint>

#include "ldpfl/kernels.h"

namespace ldpfl::simd {
namespace {

constexpr std::size_t kLanes = 4;

void TwoPointSelect(const double* w, const double* u, std::size_t n,
                    const TwoPointParams& params, double* out) {
  const __m256d center = _mm256_set1_pd(params.center);
  const __m256d radius = _mm256_set1_pd(params.radius);
  const __m256d sign = _mm256_set1_pd(params.sign);
  const __m256d q = _mm256_set1_pd(params.q);
  const __m256d denom = _mm256_set1_pd(params.denom);
  const __m256d high = _mm256_set1_pd(params.high);
  const __m256d low = _mm256_set1_pd(params.low);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d wv = _mm256_loadu_pd(w + i);
    const __m256d s =
        _mm256_mul_pd(sign, _mm256_div_pd(_mm256_sub_pd(wv, center), radius));
    const __m256d num = _mm256_add_pd(
        _mm256_add_pd(one, s), _mm256_mul_pd(_mm256_sub_pd(one, s), q));
    const __m256d p = _mm256_div_pd(num, denom);
    const __m256d take_high = _mm256_cmp_pd(_mm256_loadu_pd(u + i), p, _CMP_LT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(low, high, take_high));
  }
  for (; i < n; ++i) {
    const double s = params.sign * ((w[i] - params.center) / params.radius);
    const double p = ((1.0 + s) + (1.0 - s) * params.q) / params.denom;
    out[i] = u[i] < p ? params.high : params.low;
  }
}

std::size_t Clamp(double* x, std::size_t n, double lo, double hi) {
  const __m256d lov = _mm256_set1_pd(lo);
  const __m256d hiv = _mm256_set1_pd(hi);
  std::size_t moved = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d below = _mm256_cmp_pd(v, lov, _CMP_LT_OQ);
    const __m256d above = _mm256_cmp_pd(v, hiv, _CMP_GT_OQ);
    __m256d r = _mm256_blendv_pd(v, lov, below);
    r = _mm256_blendv_pd(r, hiv, above);
    moved += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(
            _mm256_movemask_pd(_mm256_or_pd(below, above)))));
    _mm256_storeu_pd(x + i, r);
  }
  for (; i < n; ++i) {
    const bool below = x[i] < lo;
    const bool above = x[i] > hi;
    double v = below ? lo : x[i];
    v = above ? hi : v;
    moved += (below || above) ? 1 : 0;
    x[i] = v;
  }
  return moved;
}

void Axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void Add(const double* x, double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = y[i] + x[i];
}

void GemmAcc(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double as = a[i * k + p];
      const __m256d av = _mm256_set1_pd(as);
      const double* brow = b + p * n;
      std::size_t j = 0;
      for (; j + kLanes <= n; j += kLanes) {
        const __m256d prod = _mm256_mul_pd(av, _mm256_loadu_pd(brow + j));
        _mm256_storeu_pd(crow + j,
                         _mm256_add_pd(_mm256_loadu_pd(crow + j), prod));
      }
      for (; j < n; ++j) crow[j] = crow[j] + as * brow[j];
    }
  }
}

void Relu(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(x + i,
                     _mm256_and_pd(v, _mm256_cmp_pd(v, zero, _CMP_GT_OQ)));
  }
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void ReluBackward(const double* act, double* grad, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d mask =
        _mm256_cmp_pd(_mm256_loadu_pd(act + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_and_pd(_mm256_loadu_pd(grad + i), mask));
  }
  for (; i < n; ++i) grad[i] = act[i] > 0.0 ? grad[i] : 0.0;
}

double HorizontalSum(__m256d v) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

Moments ShiftedMoments(const double* x, std::size_t n, double shift) {
  const __m256d sv = _mm256_set1_pd(shift);
  __m256d sum = _mm256_setzero_pd();
  __m256d sum_sq = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), sv);
    sum = _mm256_add_pd(sum, d);
    sum_sq = _mm256_add_pd(sum_sq, _mm256_mul_pd(d, d));
  }
  Moments m{HorizontalSum(sum), HorizontalSum(sum_sq)};
  for (; i < n; ++i) {
    const double d = x[i] - shift;
    m.sum += d;
    m.sum_sq += d * d;
  }
  return m;
}

void MinMax(const double* x, std::size_t n, double* lo, double* hi) {
  double mn = x[0];
  double mx = x[0];
  std::size_t i = 0;
  if (n >= kLanes) {
    __m256d vmin = _mm256_loadu_pd(x);
    __m256d vmax = vmin;
    for (i = kLanes; i + kLanes <= n; i += kLanes) {
      const __m256d v = _mm256_loadu_pd(x + i);
      vmin = _mm256_blendv_pd(vmin, v, _mm256_cmp_pd(v, vmin, _CMP_LT_OQ));
      vmax = _mm256_blendv_pd(vmax, v, _mm256_cmp_pd(v, vmax, _CMP_GT_OQ));
    }
    alignas(32) double a[kLanes];
    alignas(32) double b[kLanes];
    _mm256_store_pd(a, vmin);
    _mm256_store_pd(b, vmax);
    mn = a[0];
    mx = b[0];
    for (std::size_t l = 1; l < kLanes; ++l) {
      mn = a[l] < mn ? a[l] : mn;
      mx = b[l] > mx ? b[l] : mx;
    }
  }
  for (; i < n; ++i) {
    mn = x[i] < mn ? x[i] : mn;
    mx = x[i] > mx ? x[i] : mx;
  }
  *lo = mn;
  *hi = mx;
}

}  // namespace

namespace internal {
const KernelTable kAvx2Table = {
    Isa::kAvx2, TwoPointSelect, Clamp,          Axpy,   Add, GemmAcc,
    Relu,       ReluBackward,   ShiftedMoments, MinMax,
};
}  // namespace internal

}  // namespace ldpfl::simd
