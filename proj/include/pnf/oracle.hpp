// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pnf/measure.hpp"
#include "pnf/tabular.hpp"

// Brute-force ground truth for tiny tabular instances: every sum over D^n is
// enumerated in log space. Configurations are indexed in base d with
// position 0 as the most significant digit.
namespace pnf::oracle {

/// Enumerations larger than this many configurations are refused.
inline constexpr std::uint64_t kBudget = std::uint64_t{1} << 20;

/// d^n, throwing BudgetExceeded beyond kBudget.
std::uint64_t configuration_count(std::size_t d, std::size_t n);
/// Digits of configuration `index` (length n).
std::vector<std::uint32_t> decode(std::uint64_t index, std::size_t d, std::size_t n);

/// p(x) for every x in D^n.
std::vector<double> exact_distribution(const TabularMarkovModel& model, std::size_t n);

struct ExactDensity {
  double log_density = 0.0;
  std::vector<double> score;
};

/// log (phi_sigma * p)(x~) and its gradient.
ExactDensity exact_log_density(const TabularMarkovModel& model, std::span<const double> x_tilde,
                               double sigma);

/// p(x_i = e_k | x~_{<i}) for the prefix x~_{<i} (any length, possibly 0).
std::vector<double> exact_noisy_conditional(const TabularMarkovModel& model,
                                            std::span<const double> prefix, double sigma);

/// Posterior over source configurations given y under N(y; A x, sigma^2 G):
/// one model per source, index = c_1 d^{n} ... (source 0 most significant).
/// Throws UnreachableObservation when no configuration has ||A x - y||_inf <= 10 sigma.
std::vector<double> exact_posterior(std::span<const TabularMarkovModel* const> sources,
                                    const MeasurementModel& mm, std::span<const double> y,
                                    double sigma);

/// Distribution of quantize(x~) for x~ ~ p_sigma, over D^n.
std::vector<double> quantized_smoothed_distribution(const TabularMarkovModel& model, std::size_t n,
                                                    double sigma);

/// (1/2) sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace pnf::oracle
