// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pnf/error.hpp"
#include "pnf/simd/kernels.hpp"

namespace pnf {

double gaussian_log_normalizer(double sigma) noexcept {
  return -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

double smoothed_conditional(std::span<const double> logits, double xi, double sigma,
                            std::span<const double> centers, double& grad_xi,
                            std::span<double> logit_grad, std::span<double> scratch) {
  const std::size_t d = logits.size();
  const auto& k = simd::active();
  auto shifted = scratch.subspan(0, d);
  auto prior = scratch.subspan(d, d);
  const double var = sigma * sigma;
  k.gaussian_shift(shifted.data(), logits.data(), centers.data(), xi, 0.5 / var, d);
  const double lse_shifted = log_sum_exp(shifted);
  const double lse_prior = log_sum_exp(logits);
  double mean = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double s = std::exp(shifted[i] - lse_shifted);
    prior[i] = std::exp(logits[i] - lse_prior);
    mean += s * (centers[i] - xi);
    logit_grad[i] = s - prior[i];
  }
  grad_xi = mean / var;
  return lse_shifted - lse_prior + gaussian_log_normalizer(sigma);
}

SmoothedConditionalResult log_smoothed_conditional(std::span<const double> logits, double xi,
                                                   double sigma, const DiscretizationGrid& grid) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  if (logits.empty()) throw InvalidArgument("logits must not be empty");
  if (logits.size() != grid.size()) throw InvalidArgument("logit length must equal bin count");
  require_finite(logits, "logits");
  if (!std::isfinite(xi)) throw InvalidSample("xi is not finite");
  SmoothedConditionalResult r;
  r.logit_grad.resize(logits.size());
  std::vector<double> scratch(2 * logits.size());
  r.log_density = smoothed_conditional(logits, xi, sigma, grid.values(), r.grad_xi, r.logit_grad,
                                       scratch);
  return r;
}

double partial_score(const ConditionalModel& model, std::span<const double> x, double sigma,
                     std::size_t upstream_begin, std::size_t upstream_end,
                     std::size_t direct_begin, std::size_t direct_end, std::span<double> grad) {
  const std::size_t n = x.size();
  const std::size_t d = model.bins();
  if (grad.size() != n) throw InvalidArgument("gradient length must equal sequence length");
  if (upstream_begin > upstream_end || upstream_end > n || direct_begin > direct_end ||
      direct_end > n) {
    throw InvalidArgument("score row ranges out of bounds");
  }
  const auto centers = model.grid().values();
  const auto pass = model.forward(x);
  const Matrix& logits = pass->logits();
  std::fill(grad.begin(), grad.end(), 0.0);

  std::vector<double> scratch(2 * d);
  std::vector<double> row_grad(d);
  std::vector<double> direct(n, 0.0);
  double log_density = 0.0;
  const bool backprop = model.input_differentiable() && upstream_begin < upstream_end;
  Matrix upstream(backprop ? n : 0, d);
  const std::size_t lo = std::min(upstream_begin, direct_begin);
  const std::size_t hi = std::max(upstream_end, direct_end);
  for (std::size_t i = lo; i < hi; ++i) {
    const bool is_direct = i >= direct_begin && i < direct_end;
    const bool is_upstream = backprop && i >= upstream_begin && i < upstream_end;
    if (!is_direct && !is_upstream) continue;
    double gx = 0.0;
    const double ld = smoothed_conditional(logits.row(i), x[i], sigma, centers, gx,
                                           is_upstream ? upstream.row(i) : std::span<double>(row_grad),
                                           scratch);
    if (is_direct) {
      log_density += ld;
      direct[i] = gx;
    }
  }
  if (backprop) pass->backward(upstream, grad);
  for (std::size_t i = direct_begin; i < direct_end; ++i) grad[i] += direct[i];
  return log_density;
}

SequenceScore sequence_score(const ConditionalModel& model, std::span<const double> x,
                             double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
  require_finite(x, "sequence");
  SequenceScore r;
  r.score.resize(x.size());
  r.log_density = partial_score(model, x, sigma, 0, x.size(), 0, x.size(), r.score);
  return r;
}

}  // namespace pnf
