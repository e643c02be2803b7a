// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 -mfma; only reached after a runtime CPUID check.

#include <immintrin.h>

#include "pnf/simd/kernels.hpp"

namespace pnf::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_avx2(double* out, const double* w, const double* in, std::size_t rows,
                 std::size_t cols) {
  std::size_t r = 0;
  // Four rows share each load of `in`.
  for (; r + 4 <= rows; r += 4) {
    const double* w0 = w + r * cols;
    const double* w1 = w0 + cols;
    const double* w2 = w1 + cols;
    const double* w3 = w2 + cols;
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      const __m256d v = _mm256_loadu_pd(in + c);
      a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), v, a0);
      a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), v, a1);
      a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), v, a2);
      a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), v, a3);
    }
    double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
    for (; c < cols; ++c) {
      s0 += w0[c] * in[c];
      s1 += w1[c] * in[c];
      s2 += w2[c] * in[c];
      s3 += w3[c] * in[c];
    }
    out[r] += s0;
    out[r + 1] += s1;
    out[r + 2] += s2;
    out[r + 3] += s3;
  }
  for (; r < rows; ++r) out[r] += dot_avx2(w + r * cols, in, cols);
}

void matvec_t_avx2(double* out, const double* w, const double* in, std::size_t rows,
                   std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(out, in[r], w + r * cols, cols);
}

void outer_avx2(double* g, const double* a, const double* b, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) axpy_avx2(g + r * cols, a[r], b, cols);
}

void langevin_avx2(double* x, const double* grad, const double* noise, double eta,
                   double noise_scale, std::size_t n) {
  const __m256d ve = _mm256_set1_pd(eta);
  const __m256d vs = _mm256_set1_pd(noise_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d step = _mm256_fmadd_pd(ve, _mm256_loadu_pd(grad + i),
                                         _mm256_mul_pd(vs, _mm256_loadu_pd(noise + i)));
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), step));
  }
  for (; i < n; ++i) x[i] += eta * grad[i] + noise_scale * noise[i];
}

void gaussian_shift_avx2(double* out, const double* logits, const double* centers, double xi,
                         double inv_two_var, std::size_t n) {
  const __m256d vx = _mm256_set1_pd(xi);
  const __m256d vk = _mm256_set1_pd(inv_two_var);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d diff = _mm256_sub_pd(vx, _mm256_loadu_pd(centers + k));
    const __m256d pen = _mm256_mul_pd(_mm256_mul_pd(diff, diff), vk);
    _mm256_storeu_pd(out + k, _mm256_sub_pd(_mm256_loadu_pd(logits + k), pen));
  }
  for (; k < n; ++k) {
    const double diff = xi - centers[k];
    out[k] = logits[k] - diff * diff * inv_two_var;
  }
}

constexpr KernelTable kAvx2{
    "avx2",       dot_avx2,      axpy_avx2, matvec_avx2, matvec_t_avx2, outer_avx2,
    langevin_avx2, gaussian_shift_avx2,
};

}  // namespace

const KernelTable& avx2_table() noexcept { return kAvx2; }

}  // namespace pnf::simd
