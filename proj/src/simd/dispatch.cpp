// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "pnf/simd/kernels.hpp"

namespace pnf::simd {

#if defined(PNF_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(PNF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() noexcept {
  const bool have_avx2 = cpu_has_avx2();
  const char* env = std::getenv("PNF_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") return Isa::scalar;
  return have_avx2 ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(PNF_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  if (current().load(std::memory_order_relaxed) == Isa::avx2) {
    if (const KernelTable* t = avx2_kernels()) return *t;
  }
  return scalar_kernels();
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
  if (isa == Isa::avx2 && avx2_kernels() == nullptr) return false;
  current().store(isa, std::memory_order_relaxed);
  return true;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace pnf::simd
