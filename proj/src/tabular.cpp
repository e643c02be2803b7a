// Copyright (C) 2026 The PnF Sampling Authors
// SPDX-License-Identifier: Apache-2.0

#include "pnf/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnf/error.hpp"

namespace pnf {
namespace {

class TabularPass final : public ForwardPass {
 public:
  explicit TabularPass(Matrix logits) { logits_ = std::move(logits); }
  void backward(const Matrix&, std::span<double>) const override {}
};

std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

TabularMarkovModel::TabularMarkovModel(DiscretizationGrid grid, std::size_t order,
                                       std::vector<double> table)
    : grid_(std::move(grid)), order_(order), table_(std::move(table)) {
  if (order_ == 0 || order_ > kMaxOrder) throw InvalidArgument("tabular order must be in 1..3");
  const std::size_t d = grid_.size();
  rows_ = int_pow(d, order_);
  if (table_.size() != rows_ * d) throw InvalidArgument("table must have d^order x d entries");
  log_table_.resize(table_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double p = table_[r * d + k];
      if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("table entries must be >= 0");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("table rows must sum to 1");
    for (std::size_t k = 0; k < d; ++k) {
      double& p = table_[r * d + k];
      p /= sum;
      log_table_[r * d + k] = p > 0.0 ? std::max(std::log(p), kMinLogit) : kMinLogit;
    }
  }
  initial_row_ = 0;
  for (std::size_t j = 0; j < order_; ++j) initial_row_ = initial_row_ * d + grid_.sentinel_index();
}

TabularMarkovModel TabularMarkovModel::uniform(DiscretizationGrid grid, std::size_t order) {
  const std::size_t d = grid.size();
  std::vector<double> t(int_pow(d, order) * d, 1.0 / static_cast<double>(d));
  return TabularMarkovModel(std::move(grid), order, std::move(t));
}

TabularMarkovModel TabularMarkovModel::random(DiscretizationGrid grid, std::size_t order, Rng& rng,
                                              double concentration) {
  if (!(concentration > 0.0)) throw InvalidArgument("concentration must be positive");
  const std::size_t d = grid.size();
  const std::size_t rows = int_pow(d, order);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> t(rows * d);
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      t[r * d + k] = gamma(rng) + 1e-12;
      sum += t[r * d + k];
    }
    for (std::size_t k = 0; k < d; ++k) t[r * d + k] /= sum;
  }
  return TabularMarkovModel(std::move(grid), order, std::move(t));
}

TabularMarkovModel TabularMarkovModel::random_walk(DiscretizationGrid grid, double rho,
                                                   double spread) {
  if (!(spread > 0.0)) throw InvalidArgument("spread must be positive");
  const std::size_t d = grid.size();
  std::vector<double> t(d * d);
  for (std::size_t s = 0; s < d; ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double z = (grid[k] - rho * grid[s]) / spread;
      t[s * d + k] = std::exp(-0.5 * z * z);
      sum += t[s * d + k];
    }
    for (std::size_t k = 0; k < d; ++k) t[s * d + k] /= sum;
  }
  return TabularMarkovModel(std::move(grid), 1, std::move(t));
}

std::size_t TabularMarkovModel::context_row(std::span<const std::uint32_t> prefix) const noexcept {
  std::size_t row = initial_row_;
  const std::size_t start = prefix.size() > order_ ? prefix.size() - order_ : 0;
  for (std::size_t i = start; i < prefix.size(); ++i) row = next_row(row, prefix[i]);
  return row;
}

std::unique_ptr<ForwardPass> TabularMarkovModel::forward(std::span<const double> x) const {
  const std::size_t d = grid_.size();
  Matrix logits(x.size(), d);
  std::size_t row = initial_row_;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::copy_n(log_table_.begin() + static_cast<std::ptrdiff_t>(row * d), d, logits.row(i).begin());
    row = next_row(row, grid_.quantize(x[i]));
  }
  return std::make_unique<TabularPass>(std::move(logits));
}

double TabularMarkovModel::log_prob(std::span<const std::uint32_t> bins) const noexcept {
  const std::size_t d = grid_.size();
  double lp = 0.0;
  std::size_t row = initial_row_;
  for (auto b : bins) {
    const double p = table_[row * d + b];
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    lp += std::log(p);
    row = next_row(row, b);
  }
  return lp;
}

std::vector<double> TabularMarkovModel::stationary() const {
  const std::size_t d = grid_.size();
  std::vector<double> pi(rows_, 1.0 / static_cast<double>(rows_));
  std::vector<double> next(rows_);
  for (int it = 0; it < 100000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t k = 0; k < d; ++k) next[next_row(r, k)] += pi[r] * table_[r * d + k];
    }
    // Lazy averaging keeps periodic chains from oscillating.
    double delta = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double v = 0.5 * (pi[r] + next[r]);
      delta = std::max(delta, std::abs(v - pi[r]));
      pi[r] = v;
    }
    if (delta < 1e-15) break;
  }
  return pi;
}

double TabularMarkovModel::entropy_rate() const {
  const std::size_t d = grid_.size();
  const auto pi = stationary();
  double h = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = 0; k < d; ++k) {
      const double p = table_[r * d + k];
      if (p > 0.0) h -= pi[r] * p * std::log(p);
    }
  }
  return h;
}

}  // namespace pnf
