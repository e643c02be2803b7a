// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the network, smoothing and Langevin
// updates. Each kernel has a scalar reference and, on x86-64, an AVX2/FMA
// variant; the active table is chosen once at startup from CPUID and the
// PNF_SIMD environment variable ("scalar", "avx2" or "auto").
namespace pnf::simd {

struct KernelTable {
  const char* name;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
  /// out[r] += sum_c w[r * cols + c] * in[c]
  void (*matvec)(double* out, const double* w, const double* in, std::size_t rows,
                 std::size_t cols);
  /// out[c] += sum_r w[r * cols + c] * in[r]
  void (*matvec_t)(double* out, const double* w, const double* in, std::size_t rows,
                   std::size_t cols);
  /// g[r * cols + c] += a[r] * b[c]
  void (*outer)(double* g, const double* a, const double* b, std::size_t rows, std::size_t cols);
  /// x[i] += eta * grad[i] + noise_scale * noise[i]
  void (*langevin)(double* x, const double* grad, const double* noise, double eta,
                   double noise_scale, std::size_t n);
  /// out[k] = logits[k] - (xi - centers[k])^2 * inv_two_var
  void (*gaussian_shift)(double* out, const double* logits, const double* centers, double xi,
                         double inv_two_var, std::size_t n);
};

enum class Isa { scalar, avx2 };

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

/// The table selected for this process.
const KernelTable& active() noexcept;
Isa active_isa() noexcept;
/// Overrides the selection; returns false (and leaves the selection alone) if unsupported.
bool select(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

}  // namespace pnf::simd
