// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/simd/kernels.hpp"

namespace pnf::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_scalar(double* out, const double* w, const double* in, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) out[r] += dot_scalar(w + r * cols, in, cols);
}

void matvec_t_scalar(double* out, const double* w, const double* in, std::size_t rows,
                     std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(out, in[r], w + r * cols, cols);
}

void outer_scalar(double* g, const double* a, const double* b, std::size_t rows,
                  std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(g + r * cols, a[r], b, cols);
}

void langevin_scalar(double* x, const double* grad, const double* noise, double eta,
                     double noise_scale, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += eta * grad[i] + noise_scale * noise[i];
}

void gaussian_shift_scalar(double* out, const double* logits, const double* centers, double xi,
                           double inv_two_var, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double diff = xi - centers[k];
    out[k] = logits[k] - diff * diff * inv_two_var;
  }
}

constexpr KernelTable kScalar{
    "scalar",       dot_scalar,      axpy_scalar, matvec_scalar, matvec_t_scalar, outer_scalar,
    langevin_scalar, gaussian_shift_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace pnf::simd
