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

#include <atomic>

namespace ldpfl::simd {
namespace {

std::atomic<const KernelTable*>& ActiveTable() {
  static std::atomic<const KernelTable*> table{
      DetectBestIsa() == Isa::kAvx2 ? Avx2Kernels() : &ScalarKernels()};
  return table;
}

}  // namespace

const char* IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& ScalarKernels() { return internal::kScalarTable; }

const KernelTable* Avx2Kernels() {
#if defined(LDPFL_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &internal::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

Isa DetectBestIsa() {
  return Avx2Kernels() != nullptr ? Isa::kAvx2 : Isa::kScalar;
}

const KernelTable& Kernels() { return *ActiveTable().load(); }

bool SelectIsa(Isa isa) {
  const KernelTable* table =
      isa == Isa::kAvx2 ? Avx2Kernels() : &ScalarKernels();
  if (table == nullptr) return false;
  ActiveTable().store(table);
  return true;
}

}  // namespace ldpfl::simd
