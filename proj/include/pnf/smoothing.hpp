// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pnf/model.hpp"

namespace pnf {

/// Gaussian-smoothed categorical conditional evaluated at one noisy value.
///
///   log p = LSE_k(f_k - (xi - e_k)^2 / (2 sigma^2)) - LSE_k(f_k) - ln(2 pi sigma^2) / 2
struct SmoothedConditionalResult {
  double log_density = 0.0;
  double grad_xi = 0.0;             // d log p / d xi
  std::vector<double> logit_grad;   // d log p / d f_k; sums to zero
};

SmoothedConditionalResult log_smoothed_conditional(std::span<const double> logits, double xi,
                                                   double sigma, const DiscretizationGrid& grid);

/// Allocation-free form of the above. `scratch` needs 2d entries; writes
/// logit_grad (length d) and returns the log density.
double smoothed_conditional(std::span<const double> logits, double xi, double sigma,
                            std::span<const double> centers, double& grad_xi,
                            std::span<double> logit_grad, std::span<double> scratch);

struct SequenceScore {
  double log_density = 0.0;
  std::vector<double> score;
};

/// log p_sigma(x) = sum_i log p_sigma(x_i | x_{<i}) and its gradient: each
/// position's direct term plus its logit gradient pushed through one
/// backward pass of the model.
SequenceScore sequence_score(const ConditionalModel& model, std::span<const double> x,
                             double sigma);

/// Partial score on a slice `x` of a longer sequence. Logit gradients of rows
/// [upstream_begin, upstream_end) are back-propagated, direct terms of rows
/// [direct_begin, direct_end) are added; `grad` (length |x|) is overwritten.
/// Returns the summed log density of the direct rows. Uses the same per-row
/// arithmetic and summation order as sequence_score, so restricting the
/// output to rows whose dependents are all in the upstream range reproduces
/// the full score bit for bit.
double partial_score(const ConditionalModel& model, std::span<const double> x, double sigma,
                     std::size_t upstream_begin, std::size_t upstream_end,
                     std::size_t direct_begin, std::size_t direct_end, std::span<double> grad);

/// -ln(2 pi sigma^2) / 2
double gaussian_log_normalizer(double sigma) noexcept;

}  // namespace pnf
