// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pnf/model.hpp"
#include "pnf/random.hpp"

namespace pnf {

/// Order-m Markov chain over grid bins given by an explicit d^m x d table of
/// conditional probabilities. Context rows are indexed oldest-first in base d;
/// positions before the start read as the sentinel bin, so the first
/// conditional is the row of the all-sentinel context.
///
/// Continuous contexts are quantized, so logits are piecewise constant and the
/// input Jacobian is zero.
class TabularMarkovModel final : public ConditionalModel {
 public:
  static constexpr std::size_t kMaxOrder = 3;

  /// `table` is row-major, d^order rows of d probabilities; each row must sum to 1 (1e-9)
  /// and is renormalized exactly.
  TabularMarkovModel(DiscretizationGrid grid, std::size_t order, std::vector<double> table);

  static TabularMarkovModel uniform(DiscretizationGrid grid, std::size_t order = 1);
  /// Rows drawn from a symmetric Dirichlet(concentration).
  static TabularMarkovModel random(DiscretizationGrid grid, std::size_t order, Rng& rng,
                                   double concentration = 1.0);
  /// Order-1 discretized AR(1): row s puts mass exp(-(e_k - rho e_s)^2 / (2 spread^2)) on k.
  static TabularMarkovModel random_walk(DiscretizationGrid grid, double rho, double spread);

  const DiscretizationGrid& grid() const noexcept override { return grid_; }
  std::size_t window() const noexcept override { return order_; }
  bool input_differentiable() const noexcept override { return false; }
  std::unique_ptr<ForwardPass> forward(std::span<const double> x) const override;

  std::size_t order() const noexcept { return order_; }
  std::size_t rows() const noexcept { return rows_; }
  std::span<const double> table() const noexcept { return table_; }
  /// log(table) with zero entries clamped to kMinLogit.
  std::span<const double> log_table() const noexcept { return log_table_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {table_.data() + r * grid_.size(), grid_.size()};
  }

  /// Row for the context formed by the last `order` bins of `prefix`
  /// (sentinel-padded on the left).
  std::size_t context_row(std::span<const std::uint32_t> prefix) const noexcept;
  /// Row reached from `row` after emitting `bin`.
  std::size_t next_row(std::size_t row, std::size_t bin) const noexcept {
    return (row * grid_.size() + bin) % rows_;
  }
  std::size_t initial_row() const noexcept { return initial_row_; }

  /// log p(bins) = sum_i log p(bins_i | bins_{<i}); -inf for impossible sequences.
  double log_prob(std::span<const std::uint32_t> bins) const noexcept;

  /// Stationary distribution of the context chain (order 1: over bins).
  std::vector<double> stationary() const;
  /// Entropy rate in nats, sum_r pi_r H(row r).
  double entropy_rate() const;

 private:
  DiscretizationGrid grid_;
  std::size_t order_;
  std::size_t rows_;
  std::size_t initial_row_;
  std::vector<double> table_;
  std::vector<double> log_table_;
};

}  // namespace pnf
