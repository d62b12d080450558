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

namespace ldpfl::simd {
namespace {

void TwoPointSelect(const double* w, const double* u, std::size_t n,
                    const TwoPointParams& params, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double s = params.sign * ((w[i] - params.center) / params.radius);
    const double p = ((1.0 + s) + (1.0 - s) * params.q) / params.denom;
    out[i] = u[i] < p ? params.high : params.low;
  }
}

std::size_t Clamp(double* x, std::size_t n, double lo, double hi) {
  std::size_t moved = 0;
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void Add(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + x[i];
}

void GemmAcc(const double* a, const double* b, double* c, std::size_t m,
             std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = crow[j] + av * brow[j];
    }
  }
}

void Relu(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void ReluBackward(const double* act, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) grad[i] = act[i] > 0.0 ? grad[i] : 0.0;
}

Moments ShiftedMoments(const double* x, std::size_t n, double shift) {
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - shift;
    m.sum += d;
    m.sum_sq += d * d;
  }
  return m;
}

void MinMax(const double* x, std::size_t n, double* lo, double* hi) {
  double mn = x[0];
  double mx = x[0];
  for (std::size_t i = 1; i < n; ++i) {
    mn = x[i] < mn ? x[i] : mn;
    mx = x[i] > mx ? x[i] : mx;
  }
  *lo = mn;
  *hi = mx;
}

}  // namespace

namespace internal {
const KernelTable kScalarTable = {
    Isa::kScalar, TwoPointSelect, Clamp,          Axpy,   Add, GemmAcc,
    Relu,         ReluBackward,   ShiftedMoments, MinMax,
};
}  // namespace internal

}  // namespace ldpfl::simd
