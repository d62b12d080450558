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

#ifndef LDPFL_KERNELS_H_
#define LDPFL_KERNELS_H_

#include <cstddef>

// Data-parallel inner loops. Each kernel has a scalar reference
// implementation and, where the CPU supports it, an AVX2 variant selected at
// runtime. Element-wise kernels (everything except Moments) are bit-identical
// across variants: the vector code performs the same IEEE operations in the
// same order per element, and the build disables FMA contraction.

namespace ldpfl::simd {

enum class Isa { kScalar, kAvx2 };

const char* IsaName(Isa isa);

// Parameters of the two-point selection. For input w the probability of the
// high output is p = ((1 + s) + (1 - s) q) / denom with s = sign (w - c) / r,
// q = exp(-eps) and denom = 2 (1 + q). This is the usual
// ((w-c)(e^eps - 1) + r(e^eps + 1)) / (2r(e^eps + 1)) divided through by
// e^eps, which stays finite for any eps. sign = -1 swaps the probabilities
// and only exists for mutation testing.
struct TwoPointParams {
  double center;
  double radius;
  double q;
  double denom;
  double sign;
  double high;
  double low;
};

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

struct KernelTable {
  Isa isa;

  // out[i] = u[i] < p(w[i]) ? high : low.
  void (*two_point_select)(const double* w, const double* u, std::size_t n,
                           const TwoPointParams& params, double* out);

  // Clamps x into [lo, hi] in place; returns how many entries moved.
  std::size_t (*clamp)(double* x, std::size_t n, double lo, double hi);

  // y += a * x.
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  // y += x.
  void (*add)(const double* x, double* y, std::size_t n);

  // c[m x n] += a[m x k] * b[k x n], all row-major. Each output element is
  // accumulated in increasing k order.
  void (*gemm_acc)(const double* a, const double* b, double* c, std::size_t m,
                   std::size_t k, std::size_t n);

  // x = max(x, 0) in place, written as x > 0 ? x : 0.
  void (*relu)(double* x, std::size_t n);

  // grad[i] = act[i] > 0 ? grad[i] : 0.
  void (*relu_backward)(const double* act, double* grad, std::size_t n);

  // Sum and sum of squares of (x[i] - shift). Reduction order differs
  // between variants, so results agree only to rounding.
  Moments (*shifted_moments)(const double* x, std::size_t n, double shift);

  // Minimum and maximum of x; n > 0.
  void (*min_max)(const double* x, std::size_t n, double* lo, double* hi);
};

const KernelTable& ScalarKernels();

// nullptr when the binary was built without AVX2 kernels or the CPU lacks
// AVX2.
const KernelTable* Avx2Kernels();

Isa DetectBestIsa();

// The table used by the rest of the library. Defaults to DetectBestIsa().
const KernelTable& Kernels();

// Forces a variant; returns false (and changes nothing) when it is not
// available on this machine.
bool SelectIsa(Isa isa);

namespace internal {
extern const KernelTable kScalarTable;
#if defined(LDPFL_HAVE_AVX2_KERNELS)
extern const KernelTable kAvx2Table;
#endif
}  // namespace internal

}  // namespace ldpfl::simd

#endif  // LDPFL_KERNELS_H_
