// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "pnf/model.hpp"
#include "pnf/tabular.hpp"

namespace pnf {

/// Bayes-optimal noisy conditional for a tabular chain:
///
///   p(x_i = e_k | x~_{<i}) ∝ sum_{x_{<i}} p(x_{<i}) prod_j phi_sigma(x~_j - x_j) p(e_k | x_{<i})
///
/// computed by a forward filter over the chain's context states. This is the
/// function that noisy fine-tuning converges to, so a stack of these is the
/// exact smoothed prior of a tabular model.
///
/// The filter starts from the sentinel state and reads at most `window` noisy
/// entries; it is exact whenever the context fits in the window.
class ExactNoisyMarkovModel final : public ConditionalModel {
 public:
  static constexpr std::size_t kDefaultWindow = 64;

  ExactNoisyMarkovModel(TabularMarkovModel base, double sigma,
                        std::size_t window = kDefaultWindow);

  const DiscretizationGrid& grid() const noexcept override { return base_.grid(); }
  std::size_t window() const noexcept override { return window_; }
  bool input_differentiable() const noexcept override { return true; }
  std::unique_ptr<ForwardPass> forward(std::span<const double> x) const override;

  const TabularMarkovModel& base() const noexcept { return base_; }
  double sigma() const noexcept { return sigma_; }

 private:
  friend class NoisyFilterPass;

  TabularMarkovModel base_;
  double sigma_;
  std::size_t window_;
};

}  // namespace pnf
