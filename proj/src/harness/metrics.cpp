// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnf/error.hpp"

namespace pnf::harness {

double si_sdr(std::span<const double> estimate, std::span<const double> target) {
  if (estimate.size() != target.size()) throw InvalidArgument("si_sdr: length mismatch");
  double tt = 0.0, et = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    tt += target[i] * target[i];
    et += estimate[i] * target[i];
  }
  if (!(tt > 0.0)) throw InvalidArgument("si_sdr: target is identically zero");
  const double alpha = et / tt;
  double signal = 0.0, distortion = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double s = alpha * target[i];
    signal += s * s;
    distortion += (s - estimate[i]) * (s - estimate[i]);
  }
  if (distortion <= signal * 1e-6) return kSiSdrCap;  // 10 log10(1e6) = 60 dB
  return std::min(kSiSdrCap, 10.0 * std::log10(signal / distortion));
}

double psnr(std::span<const double> estimate, std::span<const double> target, double peak) {
  if (estimate.size() != target.size() || target.empty()) {
    throw InvalidArgument("psnr: length mismatch");
  }
  double mse = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    mse += (estimate[i] - target[i]) * (estimate[i] - target[i]);
  }
  mse /= static_cast<double>(target.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t m = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m), values.end());
  const double hi = values[m];
  if (values.size() % 2) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(m));
  return 0.5 * (lo + hi);
}

LogLikelihoods eval_ll(const ConditionalModel& base, std::span<const std::vector<double>> samples) {
  const auto& grid = base.grid();
  LogLikelihoods out;
  for (const auto& x : samples) {
    require_finite(x, "sample");
    const auto bins = grid.quantize(x);
    const auto snapped = grid.to_values(bins);
    const auto pass = base.forward(snapped);
    double ll = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const auto logits = pass->logits().row(i);
      ll += logits[bins[i]] - log_sum_exp(logits);
    }
    out.per_sample.push_back(ll);
  }
  out.median = median(out.per_sample);
  return out;
}

double constraint_residual(const MeasurementModel& mm, std::span<const double> x,
                           std::span<const double> y) {
  const auto ax = mm.apply(x);
  if (ax.size() != y.size()) throw InvalidArgument("observation has the wrong length");
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(ax[i] - y[i]));
  return worst;
}

}  // namespace pnf::harness
