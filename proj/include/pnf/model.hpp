// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pnf/grid.hpp"
#include "pnf/matrix.hpp"

namespace pnf {

/// Result of evaluating a model on a sequence. Row i of `logits()` holds the
/// logits of position i given the entries before it.
class ForwardPass {
 public:
  virtual ~ForwardPass() = default;

  const Matrix& logits() const noexcept { return logits_; }

  /// grad_x[k] += sum_i upstream.row(i) . d logits_i / d x_k
  virtual void backward(const Matrix& upstream, std::span<double> grad_x) const = 0;

 protected:
  Matrix logits_;
};

/// Autoregressive conditional p(x_i | x_{<i}) given as softmax(logits) over
/// the grid, with a Markov window: logits for position i read only
/// x_{i-w}..x_{i-1}. Positions before the start are padded with the grid
/// sentinel. Implementations are immutable after construction and safe to
/// evaluate from several threads.
class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;

  virtual const DiscretizationGrid& grid() const noexcept = 0;
  virtual std::size_t window() const noexcept = 0;
  /// False when logits are piecewise constant in the inputs (input gradients are zero).
  virtual bool input_differentiable() const noexcept = 0;

  /// Evaluates every position of `x`. Inputs are assumed finite.
  virtual std::unique_ptr<ForwardPass> forward(std::span<const double> x) const = 0;

  std::size_t bins() const noexcept { return grid().size(); }

  /// Logits of the next position given `context`; entries older than the
  /// window are ignored. Throws InvalidSample on non-finite context.
  std::vector<double> logits(std::span<const double> context) const;

  /// upstream^T d logits / d context, over the last min(|context|, w) entries.
  std::vector<double> input_vjp(std::span<const double> context,
                                std::span<const double> upstream) const;
};

/// Throws InvalidSample if any entry is not finite.
void require_finite(std::span<const double> x, const char* what);

/// log-sum-exp with the running maximum subtracted.
double log_sum_exp(std::span<const double> v) noexcept;
/// softmax(v) written into `out` (same length).
void softmax(std::span<const double> v, std::span<double> out) noexcept;

/// Logits of an exact-zero probability are clamped here so they stay finite.
inline constexpr double kMinLogit = -700.0;

}  // namespace pnf
